//! Symmetric banded storage with an explicit scalar factor.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric matrix stored by diagonals, `A[i][i + k] = scale * bands[k][i]`.
///
/// The scale carries the mesh factor (`h` for mass, `1/h` for stiffness and
/// softness) so the stored numbers can be compared with dimensionless stencils.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymBandedMatrix {
    n: usize,
    bands: Vec<Vec<f64>>,
    scale: f64,
}

impl SymBandedMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize, scale: f64) -> Self {
        let bw = half_bandwidth.min(n.saturating_sub(1));
        let bands = (0..=bw).map(|k| vec![0.0; n - k]).collect();
        Self { n, bands, scale }
    }

    /// Takes the lower triangle of `m` (divided by `scale`); entries beyond the
    /// last nonzero diagonal are dropped.
    pub fn from_dense(m: &DMatrix<f64>, scale: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let bw = (0..n)
            .flat_map(|j| (j..n).map(move |i| (i, j)))
            .filter(|&(i, j)| m[(i, j)] != 0.0)
            .map(|(i, j)| i - j)
            .max()
            .unwrap_or(0);
        let mut out = Self::zeros(n, bw, scale);
        for k in 0..=out.half_bandwidth() {
            for i in 0..n - k {
                out.bands[k][i] = m[(i + k, i)] / scale;
            }
        }
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bands.len().saturating_sub(1)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    pub fn get_unscaled(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.bands
            .get(hi - lo)
            .and_then(|b| b.get(lo))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scale * self.get_unscaled(i, j)
    }

    /// Adds `v` (unscaled) to entry `(i, j)` and, implicitly, `(j, i)`.
    pub fn add_unscaled(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        assert!(
            k < self.bands.len(),
            "entry ({i}, {j}) outside half-bandwidth {}",
            self.half_bandwidth()
        );
        self.bands[k][lo] += v;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Unscaled row `i`, dense.
    pub fn row_unscaled(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get_unscaled(i, j)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut y: Vec<f64> = self.bands[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, a) in band.iter().enumerate() {
                y[i] += a * x[i + k];
                y[i + k] += a * x[i];
            }
        }
        y.iter_mut().for_each(|v| *v *= self.scale);
        Ok(y)
    }

    /// `alpha * self + beta * other`, kept in the scale of `self`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let bw = self.half_bandwidth().max(other.half_bandwidth());
        let mut out = Self::zeros(self.n, bw, self.scale);
        let ratio = other.scale / self.scale;
        for (k, band) in out.bands.iter_mut().enumerate() {
            for (i, v) in band.iter_mut().enumerate() {
                *v = alpha * self.get_unscaled(i, i + k) + beta * ratio * other.get_unscaled(i, i + k);
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for (k, band) in self.bands.iter().enumerate() {
            let w = if k == 0 { 1.0 } else { 2.0 };
            s += w * band.iter().map(|v| v * v).sum::<f64>();
        }
        self.scale.abs() * s.sqrt()
    }

    /// Largest `|A[i][j] - A[n-1-j][n-1-i]|` relative to the largest entry.
    pub fn persymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        let mut big = 0.0f64;
        for (k, band) in self.bands.iter().enumerate() {
            for (i, v) in band.iter().enumerate() {
                let j = i + k;
                let mirror = self.get_unscaled(n - 1 - j, n - 1 - i);
                worst = worst.max((v - mirror).abs());
                big = big.max(v.abs());
            }
        }
        if big == 0.0 {
            0.0
        } else {
            worst / big
        }
    }

    /// Banded Cholesky; succeeds iff the matrix is numerically positive definite.
    pub fn cholesky_check(&self) -> Result<()> {
        let n = self.n;
        let bw = self.half_bandwidth();
        let sign = self.scale.signum();
        // lower factor stored as l[i][k] = L[i][i - k]
        let mut l = vec![vec![0.0; bw + 1]; n];
        for i in 0..n {
            for k in (0..=bw.min(i)).rev() {
                let j = i - k;
                let mut s = sign * self.get_unscaled(i, j);
                for m in 1..=bw {
                    if m > j || k + m > bw {
                        break;
                    }
                    s -= l[i][k + m] * l[j][m];
                }
                if k == 0 {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[i][0] = s.sqrt();
                } else {
                    l[i][k] = s / l[j][0];
                }
            }
        }
        if sign <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                pivot: 0,
                value: self.scale,
            });
        }
        Ok(())
    }
}
