use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use softiga_core::{EtaTable, Method};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "softiga", version, about = "Spectra, condition numbers and error studies for softIGA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discrete spectrum paired with the exact Laplacian eigenvalues.
    Spectrum(SpectrumArgs),
    /// Condition numbers and reduction ratio against a baseline method.
    Condition(ConditionArgs),
    /// Error of one mode over a sequence of meshes, with fitted slopes.
    Convergence(ConvergenceArgs),
    /// Reduction ratio and RMS eigenvalue error over a grid of eta values.
    EtaSweep(SweepArgs),
    /// Fitted versus exact dispersion coefficients.
    Dispersion(CommonArgs),
    /// Runs the built-in consistency suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Iga,
    OfIga,
    Softiga,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Iga => Method::Iga,
            MethodArg::OfIga => Method::OfIga,
            MethodArg::Softiga => Method::SoftIga,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaMode {
    Default,
    Super,
    Zero,
    Custom(f64),
}

impl FromStr for EtaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(EtaMode::Default),
            "super" | "superconvergent" => Ok(EtaMode::Super),
            "zero" => Ok(EtaMode::Zero),
            _ => s
                .parse::<f64>()
                .map(EtaMode::Custom)
                .map_err(|_| format!("expected default, super, zero or a number, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaBMode {
    Zero,
    Paper,
    Custom(f64),
}

impl FromStr for EtaBMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(EtaBMode::Zero),
            "paper" => Ok(EtaBMode::Paper),
            _ => s
                .parse::<f64>()
                .map(EtaBMode::Custom)
                .map_err(|_| format!("expected zero, paper or a number, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Spline degree.
    #[arg(short = 'p', long = "degree", default_value_t = 2)]
    pub p: usize,
    /// Elements per direction.
    #[arg(short = 'N', long = "elements", default_value_t = 20)]
    pub n: usize,
    /// Spatial dimension.
    #[arg(short = 'd', long = "dim", default_value_t = 1)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Softiga)]
    pub method: MethodArg,
    /// default | super | zero | <value>
    #[arg(long, default_value = "default")]
    pub eta: EtaMode,
    /// zero | paper | <value>
    #[arg(long = "eta-b", default_value = "zero")]
    pub eta_b: EtaBMode,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Iga,
    OfIga,
}

#[derive(Debug, Clone, Args)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = BaselineArg::Iga)]
    pub baseline: BaselineArg,
    /// Every dimension and degree at N = 100, 40, 20 for d = 1, 2, 3.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated element counts.
    #[arg(long, value_delimiter = ',', default_values_t = [9, 12, 15, 18, 21, 24, 27, 30])]
    pub ns: Vec<usize>,
    /// 1-based mode index.
    #[arg(long = "mode-index", default_value_t = 1)]
    pub mode_index: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of grid points.
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Upper end of the grid; the default eta when omitted.
    #[arg(long = "eta-max")]
    pub eta_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Replaces the definiteness probes by one at this multiple of the sharp bound.
    #[arg(long = "probe-eta-factor")]
    pub probe_eta_factor: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Validated parameters shared by the commands.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunConfig {
    pub p: usize,
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub eta: f64,
    pub eta_b: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self, CliError> {
        if !(1..=3).contains(&a.d) {
            return Err(CliError::Config(format!("-d must be 1, 2 or 3, got {}", a.d)));
        }
        if a.p == 0 {
            return Err(CliError::Config("-p must be at least 1".into()));
        }
        let method = Method::from(a.method);
        let (eta, eta_b) = if method == Method::SoftIga {
            (resolve_eta(a.eta, a.p)?, resolve_eta_b(a.eta_b, a.p)?)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            p: a.p,
            n: a.n,
            d: a.d,
            method,
            eta,
            eta_b,
            out: a.out.clone(),
            format: a.format,
        })
    }
}

pub fn resolve_eta(mode: EtaMode, p: usize) -> Result<f64, CliError> {
    let table = |v: Option<softiga_core::Rational>, what: &str| {
        v.map(softiga_core::analytic::to_f64)
            .ok_or_else(|| CliError::Config(format!("no {what} eta tabulated for p = {p}")))
    };
    match mode {
        EtaMode::Zero => Ok(0.0),
        // p = 5 has no default; fall back to the superconvergent value
        EtaMode::Default => table(EtaTable::default_eta(p).or_else(|| EtaTable::superconvergent(p)), "default"),
        EtaMode::Super => table(EtaTable::superconvergent(p), "superconvergent"),
        EtaMode::Custom(v) => {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("--eta must be a finite value >= 0, got {v}")));
            }
            if let Some(sharp) = EtaTable::sharp_max(p).map(softiga_core::analytic::to_f64) {
                if v > sharp {
                    return Err(CliError::Config(format!(
                        "--eta {v} exceeds the sharp bound {sharp:e} for p = {p}"
                    )));
                }
            }
            if let Some(def) = EtaTable::default_eta(p).map(softiga_core::analytic::to_f64) {
                if v > def {
                    eprintln!("warning: eta {v} is above the default {def:e}; the spectrum may not be monotone");
                }
            }
            Ok(v)
        }
    }
}

pub fn resolve_eta_b(mode: EtaBMode, p: usize) -> Result<f64, CliError> {
    match mode {
        EtaBMode::Zero => Ok(0.0),
        EtaBMode::Paper => EtaTable::superconvergent_mass(p)
            .map(softiga_core::analytic::to_f64)
            .ok_or_else(|| CliError::Config(format!("no mass-side eta tabulated for p = {p}"))),
        EtaBMode::Custom(v) if v >= 0.0 && v.is_finite() => Ok(v),
        EtaBMode::Custom(v) => Err(CliError::Config(format!("--eta-b must be a finite value >= 0, got {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_modes_parse() {
        assert_eq!("default".parse::<EtaMode>().unwrap(), EtaMode::Default);
        assert_eq!("super".parse::<EtaMode>().unwrap(), EtaMode::Super);
        assert_eq!("0.001".parse::<EtaMode>().unwrap(), EtaMode::Custom(0.001));
        assert!("fast".parse::<EtaMode>().is_err());
        assert_eq!("paper".parse::<EtaBMode>().unwrap(), EtaBMode::Paper);
    }

    #[test]
    fn custom_eta_is_range_checked() {
        assert!(resolve_eta(EtaMode::Custom(0.01), 2).is_ok());
        assert!(resolve_eta(EtaMode::Custom(0.03), 2).is_err());
        assert!(resolve_eta(EtaMode::Custom(-1.0), 2).is_err());
        assert!(resolve_eta(EtaMode::Super, 1).is_err());
        assert!((resolve_eta(EtaMode::Default, 2).unwrap() - 3.0 / 272.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_mass_side_only_for_low_degrees() {
        assert!((resolve_eta_b(EtaBMode::Paper, 2).unwrap() - 1.0 / 3360.0).abs() < 1e-15);
        assert!(resolve_eta_b(EtaBMode::Paper, 4).is_err());
    }
}
