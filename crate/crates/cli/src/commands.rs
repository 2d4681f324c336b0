use num_rational::Ratio;
use serde_json::{json, Value};
use softiga_core::analytic::{dispersion_expansion, empirical_expansion, to_f64};
use softiga_core::spectral_analysis::{
    condition_stats_from_extremes, convergence_slope, eta_sweep, h1_eigenfunction_error, relative_errors,
    ConditionStats,
};
use softiga_core::verify::{run_suite, VerifyOptions};
use softiga_core::{build_system, kron_sum_spectrum, Method, SpectralReport};

use crate::config::{
    resolve_eta, resolve_eta_b, BaselineArg, ConditionArgs, ConvergenceArgs, EtaMode, RunConfig, SweepArgs,
    VerifyArgs,
};
use crate::error::CliError;
use crate::output::{Cell, Report};

fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

fn require_1d(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.d == 1 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} is computed in one dimension only (-d 1)")))
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let sys = build_system(cfg.method, cfg.p, cfg.n, cfg.eta, cfg.eta_b)?;
    let spec = sys.solve()?;
    let (mut report, rep) = if cfg.d == 1 {
        let rep = SpectralReport::from_spectrum(&spec)?.with_h1_errors(&sys.space, &spec)?;
        let h1 = rep.h1_errors.clone().unwrap_or_default();
        let mut r = Report::new(
            &["j", "indices", "lambda_exact", "lambda_h", "rel_err", "h1_err"],
            config_json(cfg),
        );
        for j in 0..rep.eigenvalues.len() {
            r.push(vec![
                (j + 1).into(),
                (j + 1).to_string().into(),
                rep.exact[j].into(),
                rep.eigenvalues[j].into(),
                rep.rel_errors[j].into(),
                h1[j].into(),
            ]);
        }
        (r, rep)
    } else {
        let ts = kron_sum_spectrum(&spec.eigenvalues, cfg.d)?;
        let rep = SpectralReport::from_tensor(&ts)?;
        let mut r = Report::new(&["j", "indices", "lambda_exact", "lambda_h", "rel_err"], config_json(cfg));
        for j in 0..rep.eigenvalues.len() {
            let ix: Vec<String> = ts.indices[j].iter().map(|i| i.to_string()).collect();
            r.push(vec![
                (j + 1).into(),
                ix.join(";").into(),
                rep.exact[j].into(),
                rep.eigenvalues[j].into(),
                rep.rel_errors[j].into(),
            ]);
        }
        (r, rep)
    };
    report.summary = vec![
        ("lambda_min".into(), rep.lambda_min),
        ("lambda_max".into(), rep.lambda_max),
        ("gamma".into(), rep.gamma),
        ("rms_error".into(), rep.rms_error),
    ];
    Ok(report)
}

fn extremes(method: Method, p: usize, n: usize, d: usize, eta: f64, eta_b: f64) -> Result<(f64, f64), CliError> {
    let spec = build_system(method, p, n, eta, eta_b)?.solve()?;
    let ts = kron_sum_spectrum(&spec.eigenvalues, d)?;
    Ok((ts.min(), ts.max()))
}

fn condition_row(
    d: usize,
    p: usize,
    n: usize,
    baseline: Method,
    eta: f64,
    eta_b: f64,
) -> Result<ConditionStats, CliError> {
    let base = extremes(baseline, p, n, d, 0.0, 0.0)?;
    let target = extremes(Method::SoftIga, p, n, d, eta, eta_b)?;
    Ok(condition_stats_from_extremes(target, base)?)
}

const CONDITION_COLUMNS: [&str; 9] = [
    "d",
    "p",
    "lambda_min",
    "lambda_max_baseline",
    "lambda_max_target",
    "gamma_baseline",
    "gamma_target",
    "rho",
    "varrho_pct",
];

pub fn condition(args: &ConditionArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::from_args(&args.common)?;
    let baseline = match args.baseline {
        BaselineArg::Iga => Method::Iga,
        BaselineArg::OfIga => Method::OfIga,
    };
    let mut config = config_json(&cfg);
    config["baseline"] = json!(baseline);
    config["table"] = json!(args.table);
    let mut report = Report::new(&CONDITION_COLUMNS, config);
    let cases: Vec<(usize, usize, usize)> = if args.table {
        let degrees: Vec<usize> = match baseline {
            Method::OfIga => vec![3, 4],
            _ => vec![2, 3, 4],
        };
        (1..=3)
            .flat_map(|d| {
                let n = [100, 40, 20][d - 1];
                degrees.iter().map(move |&p| (d, p, n))
            })
            .collect()
    } else {
        vec![(cfg.d, cfg.p, cfg.n)]
    };
    for (d, p, n) in cases {
        let eta = resolve_eta(args.common.eta, p)?;
        let eta_b = resolve_eta_b(args.common.eta_b, p)?;
        let s = condition_row(d, p, n, baseline, eta, eta_b)?;
        report.push(vec![
            d.into(),
            p.into(),
            s.lambda_min_baseline.into(),
            s.lambda_max_baseline.into(),
            s.lambda_max_target.into(),
            s.gamma_baseline.into(),
            s.gamma_target.into(),
            s.rho.into(),
            s.varrho_pct.into(),
        ]);
    }
    Ok(report)
}

pub fn convergence(args: &ConvergenceArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::from_args(&args.common)?;
    require_1d(&cfg, "convergence")?;
    let j = args.mode_index;
    if j == 0 {
        return Err(CliError::Config("--mode-index is 1-based".into()));
    }
    let mut config = config_json(&cfg);
    config["ns"] = json!(args.ns);
    config["mode_index"] = json!(j);
    let mut report = Report::new(&["N", "h", "lambda_exact", "lambda_h", "rel_err", "h1_err"], config);
    let (mut hs, mut eig, mut h1) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &args.ns {
        let sys = build_system(cfg.method, cfg.p, n, cfg.eta, cfg.eta_b)?;
        let spec = sys.solve()?;
        if j > spec.len() {
            return Err(CliError::Config(format!(
                "mode {j} exceeds the {} modes available at N = {n}",
                spec.len()
            )));
        }
        let exact = (j as f64 * std::f64::consts::PI).powi(2);
        let lam = spec.eigenvalues[j - 1];
        let err = relative_errors(&[lam], &[exact])?[0];
        let u_err = h1_eigenfunction_error(&sys.space, &spec.eigenvector(j - 1), j)?;
        let h = 1.0 / n as f64;
        report.push(vec![n.into(), h.into(), exact.into(), lam.into(), err.into(), u_err.into()]);
        hs.push(h);
        eig.push(err);
        h1.push(u_err);
    }
    report.summary = vec![
        ("eigenvalue_slope".into(), convergence_slope(&eig, &hs)?),
        ("h1_slope".into(), convergence_slope(&h1, &hs)?),
    ];
    Ok(report)
}

pub fn sweep(args: &SweepArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::from_args(&args.common)?;
    require_1d(&cfg, "the eta sweep")?;
    if args.points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let top = match args.eta_max {
        Some(v) => resolve_eta(EtaMode::Custom(v), cfg.p)?,
        None => resolve_eta(EtaMode::Default, cfg.p)?,
    };
    let eta_b = resolve_eta_b(args.common.eta_b, cfg.p)?;
    let etas: Vec<f64> = (0..args.points)
        .map(|k| top * k as f64 / (args.points - 1) as f64)
        .collect();
    let points = eta_sweep(cfg.p, cfg.n, &etas, eta_b)?;
    let mut config = config_json(&cfg);
    config["points"] = json!(args.points);
    config["eta_max"] = json!(top);
    let mut report = Report::new(&["eta", "rho", "rms_error"], config);
    for pt in &points {
        report.push(vec![pt.eta.into(), pt.rho.into(), pt.rms_error.into()]);
    }
    if let Some(best) = points.iter().min_by(|a, b| a.rms_error.total_cmp(&b.rms_error)) {
        report.summary = vec![
            ("eta_min_rms".into(), best.eta),
            ("min_rms_error".into(), best.rms_error),
        ];
    }
    Ok(report)
}

pub fn dispersion(cfg: &RunConfig) -> Result<Report, CliError> {
    let eta = if cfg.method == Method::SoftIga { cfg.eta } else { 0.0 };
    let base = dispersion_expansion(cfg.p, Ratio::from_integer(0))?;
    let leading = to_f64(base.leading) - eta;
    let next = to_f64(base.next);
    let (fit_lead, fit_next) = empirical_expansion(cfg.p, eta)?;
    // a cancelled leading term leaves t^{2p+2} as the leading behaviour
    let rel_dev = if leading.abs() <= 1e-12 * next.abs() {
        ((fit_next - next) / next).abs()
    } else {
        ((fit_lead - leading) / leading).abs()
    };
    let mut report = Report::new(
        &["p", "eta", "order", "leading_exact", "leading_fitted", "next_exact", "next_fitted", "rel_dev"],
        config_json(cfg),
    );
    report.push(vec![
        cfg.p.into(),
        eta.into(),
        (2 * cfg.p).into(),
        leading.into(),
        fit_lead.into(),
        next.into(),
        fit_next.into(),
        rel_dev.into(),
    ]);
    Ok(report)
}

/// The report, and whether every check passed.
pub fn verify(args: &VerifyArgs) -> Result<(Report, bool), CliError> {
    let checks = run_suite(VerifyOptions {
        probe_eta_factor: args.probe_eta_factor,
    })?;
    let config = json!({ "probe_eta_factor": args.probe_eta_factor, "format": args.format });
    let mut report = Report::new(&["name", "passed", "value", "threshold", "detail"], config);
    for c in &checks {
        report.push(vec![
            c.name.clone().into(),
            c.passed.into(),
            c.value.into(),
            c.threshold.into(),
            Cell::Text(c.detail.clone()),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    report.summary = vec![("checks".into(), checks.len() as f64), ("failed".into(), failed as f64)];
    Ok((report, failed == 0))
}
