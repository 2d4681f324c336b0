//! Dispersion of the softened discretization.
//!
//! On interior rows the pencil acts on `sin(k t)` patterns through the stencil
//! symbols, so `λ̂ h² = (K(t) - η S(t)) / M(t)` with `K(t) = K₀ + 2 Σ K_k cos(kt)`.

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;

use super::eta::{to_f64, Rational};
use super::reference::{reference_stencil, MatrixKind};
use crate::error::{Error, Result};

/// Leading terms of `(λ̂ - λ)/λ = a t^{2p} + b t^{2p+2} + ...`, `t = ωh`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DispersionExpansion {
    pub p: usize,
    pub eta: Rational,
    /// Coefficient of `t^{2p}`.
    pub leading: Rational,
    /// Coefficient of `t^{2p+2}`; independent of `η`.
    pub next: Rational,
}

pub fn dispersion_expansion(p: usize, eta: Rational) -> Result<DispersionExpansion> {
    let (lead, next) = match p {
        2 => (Ratio::new(1, 720), Ratio::new(1, 3360)),
        3 => (Ratio::new(1, 30240), Ratio::new(1, 60480)),
        4 => (Ratio::new(1, 1209600), Ratio::new(1, 1368576)),
        5 => (Ratio::new(1, 47900160), Ratio::new(691, 24216192000)),
        _ => return Err(Error::param("p", format!("dispersion expansion tabulated for 2 <= p <= 5, got {p}"))),
    };
    Ok(DispersionExpansion {
        p,
        eta,
        leading: lead - eta,
        next,
    })
}

/// `-4 Σ_k a_k sin²(kt/2)`, the symbol of a stencil with zero row sum.
fn difference_symbol(stencil: &[f64], t: f64) -> f64 {
    -4.0 * stencil
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * (0.5 * k as f64 * t).sin().powi(2))
        .sum::<f64>()
}

fn symbol(stencil: &[f64], t: f64) -> f64 {
    stencil[0]
        + 2.0
            * stencil
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * (k as f64 * t).cos())
                .sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct Stencils {
    pub k: Vec<f64>,
    pub m: Vec<f64>,
    pub s: Vec<f64>,
}

impl Stencils {
    pub fn reference(p: usize) -> Result<Self> {
        let conv = |kind| -> Result<Vec<f64>> {
            Ok(reference_stencil(kind, p)?.into_iter().map(to_f64).collect())
        };
        Ok(Self {
            k: conv(MatrixKind::K)?,
            m: conv(MatrixKind::M)?,
            s: conv(MatrixKind::S)?,
        })
    }

    /// `λ̂(t) h²` for the pencil `(K - ηS, M + η_b S)` with all stencils dimensionless.
    pub fn discrete_eigenvalue(&self, eta: f64, eta_b: f64, t: f64) -> f64 {
        let k = difference_symbol(&self.k, t);
        let s = difference_symbol(&self.s, t);
        (k - eta * s) / (symbol(&self.m, t) + eta_b * s)
    }

    /// `(λ̂ - ω²)/ω²` at `t = ωh`.
    pub fn relative_error(&self, eta: f64, eta_b: f64, t: f64) -> f64 {
        self.discrete_eigenvalue(eta, eta_b, t) / (t * t) - 1.0
    }
}

/// Least-squares fit of `relative_error(t) / t^q` by a polynomial in `t²` of
/// degree `terms - 1` on a uniform grid over `[t_lo, t_hi]`.
pub fn fit_expansion(
    stencils: &Stencils,
    eta: f64,
    eta_b: f64,
    q: usize,
    (t_lo, t_hi): (f64, f64),
    points: usize,
    terms: usize,
) -> Result<Vec<f64>> {
    if points < terms {
        return Err(Error::InsufficientData {
            required: terms,
            found: points,
        });
    }
    let ts: Vec<f64> = (0..points)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (points - 1) as f64)
        .collect();
    let a = DMatrix::from_fn(points, terms, |r, c| ts[r].powi(2 * c as i32));
    let b = DVector::from_iterator(
        points,
        ts.iter().map(|&t| stencils.relative_error(eta, eta_b, t) / t.powi(q as i32)),
    );
    let x = a
        .svd(true, true)
        .solve(&b, 1e-300)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

/// Fitted coefficients of `t^{2p}` and `t^{2p+2}` from the reference stencils.
pub fn empirical_expansion(p: usize, eta: f64) -> Result<(f64, f64)> {
    let st = Stencils::reference(p)?;
    let c = fit_expansion(&st, eta, 0.0, 2 * p, (0.5, 1.5), 24, 7)?;
    Ok((c[0], c[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_coefficients() {
        let e = dispersion_expansion(2, Ratio::from_integer(0)).unwrap();
        assert_eq!((e.leading, e.next), (Ratio::new(1, 720), Ratio::new(1, 3360)));
        let e = dispersion_expansion(4, Ratio::new(1, 1209600)).unwrap();
        assert_eq!(e.leading, Ratio::from_integer(0));
        assert_eq!(e.next, Ratio::new(1, 1368576));
        let e = dispersion_expansion(5, Ratio::from_integer(0)).unwrap();
        assert_eq!((e.leading, e.next), (Ratio::new(1, 47900160), Ratio::new(691, 24216192000)));
        assert!(dispersion_expansion(6, Ratio::from_integer(0)).is_err());
    }

    #[test]
    fn symbols_match_direct_sum() {
        let st = Stencils::reference(3).unwrap();
        for &t in &[0.1, 0.7, 2.0] {
            assert!((difference_symbol(&st.k, t) - symbol(&st.k, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_symbol_is_closed_form() {
        let st = Stencils::reference(2).unwrap();
        let eta: f64 = 0.004;
        for &t in &[0.3, 1.1, 2.9] {
            let got = st.discrete_eigenvalue(eta, 0.0, t);
            let c = t.cos();
            let c2 = (2.0 * t).cos();
            let want = 80.0 * (0.5 * t).sin().powi(2) * (2.0 - 18.0 * eta + (1.0 + 24.0 * eta) * c - 6.0 * eta * c2)
                / (33.0 + 26.0 * c + c2);
            assert!((got - want).abs() < 1e-13 * want);
        }
    }

    #[test]
    fn fit_recovers_quadratic_coefficients() {
        let (a, b) = empirical_expansion(2, 0.0).unwrap();
        assert!((a * 720.0 - 1.0).abs() < 1e-5);
        assert!((b * 3360.0 - 1.0).abs() < 1e-3);
    }
}
