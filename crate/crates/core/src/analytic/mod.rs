//! Closed-form eigenpairs, softness parameters, reference matrices and
//! dispersion expansions of the 1D softened pencils.

pub mod dispersion;
pub mod eta;
pub mod reference;

pub use dispersion::{dispersion_expansion, empirical_expansion, DispersionExpansion, Stencils};
pub use eta::{inverse_constants, to_f64, EtaChoice, EtaTable, InverseConstants, Rational};
pub use reference::{commutator_norm, reference_entries, reference_matrix, reference_order, MatrixKind};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Order of the outlier-free pencil: `N` for even `p`, `N - 1` for odd `p`.
pub fn pencil_order(p: usize, n_elems: usize) -> usize {
    reference_order(p, n_elems)
}

/// `λ̂_j` of the softened outlier-free pencil with `N` uniform elements.
pub fn analytic_eigenvalue(p: usize, eta: f64, j: usize, n_elems: usize) -> Result<f64> {
    if !(2..=4).contains(&p) {
        return Err(Error::param("p", format!("closed forms exist for 2 <= p <= 4, got {p}")));
    }
    if n_elems == 0 {
        return Err(Error::param("N", "need at least one element"));
    }
    let order = pencil_order(p, n_elems);
    if j == 0 || j > order {
        return Err(Error::param("j", format!("mode index must lie in 1..={order}, got {j}")));
    }
    let h = 1.0 / n_elems as f64;
    let t = j as f64 * PI * h;
    Ok(closed_form_symbol(p, eta, t) / (h * h))
}

/// `λ̂ h²` as a function of `t = jπh`.
pub(crate) fn closed_form_symbol(p: usize, eta: f64, t: f64) -> f64 {
    let c = |k: f64| (k * t).cos();
    let s2 = (0.5 * t).sin().powi(2);
    match p {
        2 => {
            80.0 * s2 * (2.0 - 18.0 * eta + (1.0 + 24.0 * eta) * c(1.0) - 6.0 * eta * c(2.0))
                / (33.0 + 26.0 * c(1.0) + c(2.0))
        }
        3 => {
            168.0 * s2
                * (33.0 - 1200.0 * eta
                    + 2.0 * (13.0 + 900.0 * eta) * c(1.0)
                    + (1.0 - 720.0 * eta) * c(2.0)
                    + 120.0 * eta * c(3.0))
                / (1208.0 + 1191.0 * c(1.0) + 120.0 * c(2.0) + c(3.0))
        }
        4 => {
            let lam = 120.0 * (1.0 - 1176.0 * eta) * c(2.0) + (1.0 + 40320.0 * eta) * c(3.0)
                - 5040.0 * eta * c(4.0);
            288.0 * s2 * (1208.0 - 176400.0 * eta + 3.0 * (397.0 + 94080.0 * eta) * c(1.0) + lam)
                / (78095.0 + 88234.0 * c(1.0) + 14608.0 * c(2.0) + 502.0 * c(3.0) + c(4.0))
        }
        _ => f64::NAN,
    }
}

/// All closed-form eigenvalues, ascending in `j`.
pub fn analytic_spectrum(p: usize, eta: f64, n_elems: usize) -> Result<Vec<f64>> {
    (1..=pencil_order(p, n_elems))
        .map(|j| analytic_eigenvalue(p, eta, j, n_elems))
        .collect()
}

/// Component `k` (1-based) of the unnormalized closed-form eigenvector `j`:
/// `sin(k t_j)` for odd `p`, `sin((k - 1/2) t_j)` for even `p`.
pub fn analytic_eigenvector_sample(p: usize, j: usize, n_elems: usize, k: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::param("p", "degree must be positive"));
    }
    if n_elems < 2 {
        return Err(Error::param("N", "need at least two elements"));
    }
    let order = pencil_order(p, n_elems);
    if j == 0 || j > order {
        return Err(Error::param("j", format!("mode index must lie in 1..={order}, got {j}")));
    }
    if k == 0 || k > order {
        return Err(Error::param("k", format!("component index must lie in 1..={order}, got {k}")));
    }
    let t = j as f64 * PI / n_elems as f64;
    let node = if p % 2 == 1 { k as f64 } else { k as f64 - 0.5 };
    Ok((node * t).sin())
}

/// Sampling points of the closed-form eigenvectors: `k h` for odd `p`,
/// `(k - 1/2) h` for even `p`.
pub fn eigenvector_nodes(p: usize, n_elems: usize) -> Vec<f64> {
    let h = 1.0 / n_elems as f64;
    (1..=pencil_order(p, n_elems))
        .map(|k| if p % 2 == 1 { k as f64 * h } else { (k as f64 - 0.5) * h })
        .collect()
}
