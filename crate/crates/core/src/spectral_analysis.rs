//! Error, condition-number and convergence statistics of computed spectra.

use std::f64::consts::{PI, SQRT_2};

use crate::analytic::{inverse_constants, EtaTable};
use crate::assembly::{build_soft_system, energies, SoftSystem};
use crate::eigensolve::{symmetric_eig, Spectrum};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spaces::SplineSpace;
use crate::tensor::TensorSpectrum;

/// `λ_j = (jπ)²`, `j = 1..=n`.
pub fn exact_spectrum_1d(n: usize) -> Vec<f64> {
    (1..=n).map(|j| (j as f64 * PI).powi(2)).collect()
}

/// Sorted continuum eigenvalues for the multi-indices `1..=n` per direction.
pub fn exact_spectrum(d: usize, n: usize) -> Result<Vec<f64>> {
    let one = exact_spectrum_1d(n);
    Ok(crate::tensor::kron_sum_spectrum(&one, d)?.values)
}

/// `ê_j = |λ̂_j - λ_j| / λ_j`, paired by rank.
pub fn relative_errors(computed: &[f64], exact: &[f64]) -> Result<Vec<f64>> {
    if computed.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            found: computed.len(),
        });
    }
    Ok(computed
        .iter()
        .zip(exact)
        .map(|(c, e)| (c - e).abs() / e)
        .collect())
}

/// `sqrt(Σ ê_j²)`.
pub fn rms_error(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub exact: Vec<f64>,
    pub rel_errors: Vec<f64>,
    pub h1_errors: Option<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub gamma: f64,
    pub rms_error: f64,
}

impl SpectralReport {
    pub fn new(eigenvalues: Vec<f64>, exact: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InsufficientData { required: 1, found: 0 });
        }
        let rel_errors = relative_errors(&eigenvalues, &exact)?;
        let lambda_min = eigenvalues[0];
        let lambda_max = eigenvalues[eigenvalues.len() - 1];
        Ok(Self {
            rms_error: rms_error(&rel_errors),
            gamma: lambda_max / lambda_min,
            eigenvalues,
            exact,
            rel_errors,
            h1_errors: None,
            lambda_min,
            lambda_max,
        })
    }

    pub fn from_tensor(spec: &TensorSpectrum) -> Result<Self> {
        let exact = exact_spectrum(spec.d, spec.one_d.len())?;
        Self::new(spec.values.clone(), exact)
    }

    pub fn from_spectrum(spec: &Spectrum) -> Result<Self> {
        Self::new(spec.eigenvalues.clone(), exact_spectrum_1d(spec.len()))
    }

    /// Adds H¹-seminorm eigenfunction errors for every mode.
    pub fn with_h1_errors(mut self, space: &SplineSpace, spec: &Spectrum) -> Result<Self> {
        let errs = (0..spec.len())
            .map(|j| h1_eigenfunction_error(space, &spec.eigenvector(j), j + 1))
            .collect::<Result<Vec<_>>>()?;
        self.h1_errors = Some(errs);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConditionStats {
    pub lambda_min_target: f64,
    pub lambda_max_target: f64,
    pub lambda_min_baseline: f64,
    pub lambda_max_baseline: f64,
    pub gamma_target: f64,
    pub gamma_baseline: f64,
    /// `γ_baseline / γ_target`.
    pub rho: f64,
    /// `100 (1 - 1/ρ)`.
    pub varrho_pct: f64,
}

pub fn condition_stats_from_extremes(target: (f64, f64), baseline: (f64, f64)) -> Result<ConditionStats> {
    for (lo, hi) in [target, baseline] {
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::Numerical(format!(
                "condition number needs a positive spectrum, got [{lo:e}, {hi:e}]"
            )));
        }
    }
    let gamma_target = target.1 / target.0;
    let gamma_baseline = baseline.1 / baseline.0;
    let rho = gamma_baseline / gamma_target;
    Ok(ConditionStats {
        lambda_min_target: target.0,
        lambda_max_target: target.1,
        lambda_min_baseline: baseline.0,
        lambda_max_baseline: baseline.1,
        gamma_target,
        gamma_baseline,
        rho,
        varrho_pct: 100.0 * (1.0 - 1.0 / rho),
    })
}

pub fn condition_stats(target: &SpectralReport, baseline: &SpectralReport) -> Result<ConditionStats> {
    condition_stats_from_extremes(
        (target.lambda_min, target.lambda_max),
        (baseline.lambda_min, baseline.lambda_max),
    )
}

/// Scales `coeffs` to unit L² norm and flips the sign so that `(û, u_j) ≥ 0`,
/// `u_j = √2 sin(jπx)`.
fn normalize_to_mode(space: &SplineSpace, coeffs: &[f64], j: usize, rule: &GaussLegendre) -> Result<Vec<f64>> {
    if coeffs.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: coeffs.len(),
        });
    }
    let kv = space.knot_vector();
    let w_j = j as f64 * PI;
    let mut norm2 = 0.0;
    let mut inner = 0.0;
    for e in 0..space.num_elements() {
        let (a, b) = kv.element_bounds(e);
        for (x, w) in rule.on_interval(a, b) {
            let u: f64 = space.eval_on_element(e, x, 0).iter().map(|&(i, v)| coeffs[i] * v).sum();
            norm2 += w * u * u;
            inner += w * u * SQRT_2 * (w_j * x).sin();
        }
    }
    if !(norm2 > 0.0) {
        return Err(Error::Numerical("eigenfunction has zero norm".into()));
    }
    let s = inner.signum() / norm2.sqrt();
    let s = if s == 0.0 { 1.0 / norm2.sqrt() } else { s };
    Ok(coeffs.iter().map(|c| c * s).collect())
}

/// `|u_j - û|_{1,Ω}` with `û` normalized and sign-aligned, using `p + 4`
/// Gauss points per element.
pub fn h1_eigenfunction_error(space: &SplineSpace, coeffs: &[f64], j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::param("j", "mode indices are 1-based"));
    }
    let rule = GaussLegendre::new(space.degree() + 4);
    let c = normalize_to_mode(space, coeffs, j, &rule)?;
    let kv = space.knot_vector();
    let w_j = j as f64 * PI;
    let mut err = 0.0;
    for e in 0..space.num_elements() {
        let (a, b) = kv.element_bounds(e);
        for (x, w) in rule.on_interval(a, b) {
            let du: f64 = space.eval_on_element(e, x, 1).iter().map(|&(i, v)| c[i] * v).sum();
            let d = SQRT_2 * w_j * (w_j * x).cos() - du;
            err += w * d * d;
        }
    }
    Ok(err.sqrt())
}

/// Both sides of `|||u_j - û_j|||² = λ_j ‖u_j - û_j‖² + λ̂_j - λ_j`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PythagoreanCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `|λ̂_j - λ_j|`.
    pub eigen_gap: f64,
}

pub fn pythagorean_check(system: &SoftSystem, spectrum: &Spectrum, j: usize) -> Result<PythagoreanCheck> {
    if j == 0 || j > spectrum.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: spectrum.len() + 1,
        });
    }
    let space = &system.space;
    let rule = GaussLegendre::new(space.degree() + 4);
    let c = normalize_to_mode(space, &spectrum.eigenvector(j - 1), j, &rule)?;
    let kv = space.knot_vector();
    let w_j = j as f64 * PI;
    let lam = w_j * w_j;
    let lam_h = spectrum.eigenvalues[j - 1];
    let (mut a, mut b) = (0.0, 0.0);
    for e in 0..space.num_elements() {
        let (lo, hi) = kv.element_bounds(e);
        for (x, w) in rule.on_interval(lo, hi) {
            let u: f64 = space.eval_on_element(e, x, 0).iter().map(|&(i, v)| c[i] * v).sum();
            let du: f64 = space.eval_on_element(e, x, 1).iter().map(|&(i, v)| c[i] * v).sum();
            let d0 = SQRT_2 * (w_j * x).sin() - u;
            let d1 = SQRT_2 * w_j * (w_j * x).cos() - du;
            a += w * d1 * d1;
            b += w * d0 * d0;
        }
    }
    // the exact mode has no p-th derivative jumps and vanishing boundary traces
    let s = energies(space, &c, system.faces)?.softness;
    let lhs = a - system.eta * s;
    let rhs = lam * b + lam_h - lam;
    Ok(PythagoreanCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        eigen_gap: (lam_h - lam).abs(),
    })
}

/// Smallest eigenvalue of `K̂ - (1 - η/η_max) K̃ = η (2C²_{p,3} K̃ - S)` and
/// `‖K̃‖_F`.
pub fn coercivity_margin(system: &SoftSystem) -> Result<(f64, f64)> {
    let c3 = inverse_constants(system.p, system.p)?.c3_squared as f64;
    let k = system.stiffness.to_dense();
    let s = system.softness.to_dense();
    let m = (&k * (2.0 * c3) - s) * system.eta;
    let (vals, _) = symmetric_eig(&m)?;
    Ok((vals[0], k.norm()))
}

/// `β = 1 - η / η_max` with the theoretical bound.
pub fn coercivity_beta(p: usize, eta: f64) -> Result<f64> {
    let t = EtaTable::for_degree(p)?.theoretical_max;
    Ok(1.0 - eta / crate::analytic::to_f64(t))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepPoint {
    pub eta: f64,
    /// Reduction ratio against `η = 0`.
    pub rho: f64,
    pub rms_error: f64,
}

pub fn eta_sweep(p: usize, n_elems: usize, etas: &[f64], eta_b: f64) -> Result<Vec<SweepPoint>> {
    let base = SpectralReport::from_spectrum(&build_soft_system(p, n_elems, 0.0, 0.0)?.solve()?)?;
    etas.iter()
        .map(|&eta| {
            let rep = SpectralReport::from_spectrum(&build_soft_system(p, n_elems, eta, eta_b)?.solve()?)?;
            let stats = condition_stats(&rep, &base)?;
            Ok(SweepPoint {
                eta,
                rho: stats.rho,
                rms_error: rep.rms_error,
            })
        })
        .collect()
}

/// Least-squares slope of `log(error)` against `log(h)`; non-positive or
/// non-finite errors are dropped.
pub fn convergence_slope(errors: &[f64], hs: &[f64]) -> Result<f64> {
    if errors.len() != hs.len() {
        return Err(Error::DimensionMismatch {
            expected: hs.len(),
            found: errors.len(),
        });
    }
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .zip(hs)
        .filter(|(e, h)| **e > 0.0 && e.is_finite() && **h > 0.0)
        .map(|(e, h)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            required: 2,
            found: 1,
        });
    }
    Ok(sxy / sxx)
}
