//! Dense symmetric-definite generalized eigensolver.
//!
//! `A x = λ B x` is reduced to `C y = λ y` with `C = L⁻¹ A L⁻ᵀ`, `B = L Lᵀ`.
//! `C` is tridiagonalized by Householder reflections and diagonalized by the
//! implicit QL iteration, then `x = L⁻ᵀ y`.

use nalgebra::DMatrix;

use crate::banded::SymBandedMatrix;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PencilMeta {
    pub p: usize,
    pub n_elems: usize,
    pub eta: f64,
    pub eta_b: f64,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` belongs to `eigenvalues[j]`; columns are B-orthonormal.
    pub eigenvectors: DMatrix<f64>,
    /// `‖A x - λ B x‖₂ / (‖A‖_F + |λ| ‖B‖_F)` per pair.
    pub residuals: Vec<f64>,
    /// `max |XᵀBX - I|`.
    pub orthogonality_defect: f64,
    pub meta: Option<PencilMeta>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.len() - 1]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j).iter().copied().collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_meta(mut self, meta: PencilMeta) -> Self {
        self.meta = Some(meta);
        self
    }
}

pub fn generalized_eig(a: &SymBandedMatrix, b: &SymBandedMatrix) -> Result<Spectrum> {
    generalized_eig_dense(&a.to_dense(), &b.to_dense())
}

pub fn generalized_eig_dense(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Spectrum> {
    let n = a.nrows();
    for m in [a, b] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if m.nrows() != n { m.nrows() } else { m.ncols() },
            });
        }
    }
    let l = cholesky(b)?;
    // C = L⁻¹ A L⁻ᵀ
    let x = forward_solve(&l, a);
    let mut c = forward_solve(&l, &x.transpose());
    symmetrize(&mut c);
    let (values, y) = symmetric_eig(&c)?;
    let mut vecs = backward_solve_transposed(&l, &y);
    for j in 0..n {
        fix_sign(&mut vecs, j);
    }
    let residuals = residuals(a, b, &values, &vecs);
    let orthogonality_defect = orthogonality_defect(b, &vecs);
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vecs,
        residuals,
        orthogonality_defect,
        meta: None,
    })
}

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending, columns
/// of the returned matrix orthonormal.
pub fn symmetric_eig(c: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = c.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let mut v = c.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok((values, vecs))
}

/// Lower Cholesky factor.
pub fn cholesky(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut s = b[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: s });
        }
        let d = s.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// `L⁻¹ R` for lower triangular `L`.
fn forward_solve(l: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = r.clone();
    for col in 0..x.ncols() {
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

/// `L⁻ᵀ R` for lower triangular `L`.
fn backward_solve_transposed(l: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = r.clone();
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

fn symmetrize(c: &mut DMatrix<f64>) {
    let n = c.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
}

fn fix_sign(v: &mut DMatrix<f64>, j: usize) {
    let mut pivot = 0.0f64;
    for x in v.column(j).iter() {
        if x.abs() > pivot.abs() {
            pivot = *x;
        }
    }
    if pivot < 0.0 {
        v.column_mut(j).neg_mut();
    }
}

/// `‖A x - λ B x‖₂ / (‖A‖_F + |λ| ‖B‖_F)` on banded storage.
pub fn pair_residual(a: &SymBandedMatrix, b: &SymBandedMatrix, lambda: f64, x: &[f64]) -> Result<f64> {
    let ax = a.matvec(x)?;
    let bx = b.matvec(x)?;
    let r = ax
        .iter()
        .zip(&bx)
        .map(|(u, v)| (u - lambda * v).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(r / (a.frobenius_norm() + lambda.abs() * b.frobenius_norm()))
}

fn residuals(a: &DMatrix<f64>, b: &DMatrix<f64>, values: &[f64], vecs: &DMatrix<f64>) -> Vec<f64> {
    let na = a.norm();
    let nb = b.norm();
    let av = a * vecs;
    let bv = b * vecs;
    values
        .iter()
        .enumerate()
        .map(|(j, &lam)| {
            let r = av.column(j) - bv.column(j) * lam;
            r.norm() / (na + lam.abs() * nb)
        })
        .collect()
}

fn orthogonality_defect(b: &DMatrix<f64>, vecs: &DMatrix<f64>) -> f64 {
    let g = vecs.transpose() * b * vecs;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - want).abs());
        }
    }
    worst
}

/// Householder reduction to tridiagonal form; on exit `v` holds the
/// accumulated transformation, `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix left by `tred2`.
fn tql2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: MAX_QL_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                        v[(k, i)] = c * v[(k, i)] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
