//! Cross-module consistency checks, runnable as one suite.

use num_rational::Ratio;

use crate::analytic::{
    analytic_spectrum, commutator_norm, dispersion_expansion, empirical_expansion, reference_matrix, to_f64,
    EtaTable, MatrixKind,
};
use crate::assembly::build_soft_system;
use crate::error::Result;
use crate::spectral_analysis::{coercivity_margin, exact_spectrum_1d};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Replaces the coercivity sample with `η = factor · η_max(sharp)`.
    pub probe_eta_factor: Option<f64>,
}

/// Default `η`, or the superconvergent one where no default is tabulated.
pub fn default_or_superconvergent(p: usize) -> f64 {
    EtaTable::default_eta(p)
        .or_else(|| EtaTable::superconvergent(p))
        .map(to_f64)
        .unwrap_or(0.0)
}

fn eta_set(p: usize) -> Vec<(&'static str, f64)> {
    let mut v = vec![("zero", 0.0)];
    if let Some(e) = EtaTable::default_eta(p) {
        v.push(("default", to_f64(e)));
    }
    if let Some(e) = EtaTable::superconvergent(p) {
        v.push(("superconvergent", to_f64(e)));
    }
    v
}

pub fn closed_form_checks(ns: &[usize]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for p in 2..=4 {
        for &n in ns {
            for (label, eta) in eta_set(p) {
                let spec = build_soft_system(p, n, eta, 0.0)?.solve()?;
                let want = analytic_spectrum(p, eta, n)?;
                let worst = spec
                    .eigenvalues
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| ((a - b) / b).abs())
                    .fold(0.0, f64::max);
                out.push(CheckResult::at_most(
                    format!("closed-form p={p} N={n} eta={label}"),
                    worst,
                    1e-9,
                    "max relative deviation from the closed-form eigenvalues",
                ));
            }
        }
    }
    Ok(out)
}

pub fn commutator_checks(n: usize) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for p in 2..=5 {
        let t = reference_matrix(MatrixKind::T, p, n)?;
        let k = reference_matrix(MatrixKind::K, p, n)?;
        let m = reference_matrix(MatrixKind::M, p, n)?;
        let s = reference_matrix(MatrixKind::S, p, n)?;
        let eta = default_or_superconvergent(p);
        let soft = k.combine(1.0, &s, -eta)?;
        for (label, a) in [("K", &k), ("M", &m), ("K-etaS", &soft)] {
            out.push(CheckResult::at_most(
                format!("commutator [{label},T] p={p} N={n}"),
                commutator_norm(a, &t)?,
                1e-12,
                "Frobenius norm of the commutator",
            ));
        }
    }
    Ok(out)
}

pub fn coercivity_checks(n: usize, probe: Option<f64>) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for p in 2..=4 {
        let sharp = to_f64(EtaTable::sharp_max(p).expect("sharp bound tabulated for p <= 4"));
        let factors: Vec<(f64, bool)> = match probe {
            Some(f) => vec![(f, true)],
            None => vec![(0.99, true), (1.01, false)],
        };
        for (f, expect_positive) in factors {
            let spec = build_soft_system(p, n, f * sharp, 0.0)?.solve()?;
            let lo = spec.min();
            let passed = if expect_positive { lo > 0.0 } else { lo < 0.0 };
            out.push(CheckResult {
                name: format!("definiteness p={p} N={n} eta={f}*eta_max"),
                passed,
                value: lo,
                threshold: 0.0,
                detail: if expect_positive {
                    "smallest eigenvalue must be positive".into()
                } else {
                    "smallest eigenvalue must be negative".into()
                },
            });
        }
        let sys = build_soft_system(p, n, default_or_superconvergent(p), 0.0)?;
        let (lo, k_norm) = coercivity_margin(&sys)?;
        out.push(CheckResult {
            name: format!("coercivity p={p} N={n} eta=default"),
            passed: lo >= -1e-10 * k_norm,
            value: lo,
            threshold: -1e-10 * k_norm,
            detail: "smallest eigenvalue of K_hat - beta K".into(),
        });
    }
    Ok(out)
}

/// Ratio of observed relative error to the theorem bound, maximized over modes.
pub fn theorem_bound_ratio(p: usize, n: usize, eta: f64, superconvergent: bool) -> Result<f64> {
    let spec = build_soft_system(p, n, eta, 0.0)?.solve()?;
    let exact = exact_spectrum_1d(spec.len());
    let h = 1.0 / n as f64;
    let (c, power) = match (p, superconvergent) {
        (2, false) => (37.0 / 5040.0 + eta, 4),
        (2, true) => (1.0 / 1680.0, 6),
        (3, false) => (131.0 / 332640.0 + eta, 6),
        (3, true) => (1.0 / 27720.0, 8),
        _ => return Err(crate::Error::param("p", "error bounds are stated for p = 2, 3")),
    };
    Ok(spec
        .eigenvalues
        .iter()
        .zip(&exact)
        .enumerate()
        .map(|(j, (l, e))| {
            let t = (j + 1) as f64 * std::f64::consts::PI * h;
            ((l - e).abs() / e) / (c * t.powi(power))
        })
        .fold(0.0, f64::max))
}

pub fn theorem_bound_checks(ns: &[usize]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for p in 2..=3 {
        for &n in ns {
            for (label, eta) in eta_set(p) {
                let r = theorem_bound_ratio(p, n, eta, false)?;
                out.push(CheckResult {
                    name: format!("error bound p={p} N={n} eta={label}"),
                    passed: r < 1.0,
                    value: r,
                    threshold: 1.0,
                    detail: "max over modes of error / bound".into(),
                });
            }
            let eta = to_f64(EtaTable::superconvergent(p).expect("tabulated"));
            let r = theorem_bound_ratio(p, n, eta, true)?;
            out.push(CheckResult {
                name: format!("superconvergent bound p={p} N={n}"),
                passed: r < 1.0,
                value: r,
                threshold: 1.0,
                detail: "max over modes of error / bound".into(),
            });
        }
    }
    Ok(out)
}

pub fn dispersion_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for p in 2..=5 {
        let sc = EtaTable::superconvergent(p).expect("tabulated");
        for (label, eta) in [("zero", Ratio::from_integer(0)), ("superconvergent", sc)] {
            let want = dispersion_expansion(p, eta)?;
            let (lead, next) = empirical_expansion(p, to_f64(eta))?;
            let (got, target, which) = if want.leading == Ratio::from_integer(0) {
                (next, to_f64(want.next), "t^(2p+2)")
            } else {
                (lead, to_f64(want.leading), "t^(2p)")
            };
            out.push(CheckResult::at_most(
                format!("dispersion p={p} eta={label}"),
                ((got - target) / target).abs(),
                0.01,
                format!("relative deviation of the fitted {which} coefficient"),
            ));
        }
    }
    Ok(out)
}

pub fn run_suite(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut all = closed_form_checks(&[8, 16, 32])?;
    all.extend(commutator_checks(14)?);
    all.extend(coercivity_checks(50, opts.probe_eta_factor)?);
    all.extend(theorem_bound_checks(&[10, 20, 40])?);
    all.extend(dispersion_checks()?);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutators_pass() {
        assert!(commutator_checks(14).unwrap().iter().all(|c| c.passed));
    }

    #[test]
    fn dispersion_passes() {
        for c in dispersion_checks().unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn probe_above_sharp_bound_fails() {
        let checks = coercivity_checks(20, Some(1.01)).unwrap();
        assert!(checks.iter().any(|c| c.name.starts_with("definiteness") && !c.passed));
    }
}
