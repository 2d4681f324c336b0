//! Tensor-product spectra on `[0, 1]^d` from 1D pencils.
//!
//! With the 1D pencil `(A, B)` the d-dimensional pencil is built from Kronecker
//! products, e.g. `(A⊗B + B⊗A, B⊗B)` for `d = 2`, and its eigenvalues are the
//! sums `λ_j + λ_k` of 1D eigenvalues.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TensorSpectrum {
    pub d: usize,
    pub one_d: Vec<f64>,
    /// Ascending; equal values ordered lexicographically by multi-index.
    pub values: Vec<f64>,
    /// 1-based multi-indices, one per value.
    pub indices: Vec<Vec<usize>>,
}

impl TensorSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Continuum eigenvalues at the multi-indices of the composed values.
    pub fn exact_at_indices(&self) -> Vec<f64> {
        self.indices
            .iter()
            .map(|ix| PI * PI * ix.iter().map(|&j| (j * j) as f64).sum::<f64>())
            .collect()
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::param("d", format!("dimension must be 1, 2 or 3, got {d}")))
    }
}

pub fn kron_sum_spectrum(one_d: &[f64], d: usize) -> Result<TensorSpectrum> {
    check_dimension(d)?;
    let n = one_d.len();
    let total = n.pow(d as u32);
    let mut entries: Vec<(f64, Vec<usize>)> = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut ix = vec![0; d];
        for slot in ix.iter_mut().rev() {
            *slot = rem % n;
            rem /= n;
        }
        let v = ix.iter().map(|&i| one_d[i]).sum();
        entries.push((v, ix.iter().map(|i| i + 1).collect()));
    }
    // generated in lexicographic order, so a stable sort keeps ties lexicographic
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, indices) = entries.into_iter().unzip();
    Ok(TensorSpectrum {
        d,
        one_d: one_d.to_vec(),
        values,
        indices,
    })
}

/// `λ = π² Σ j_i²`.
pub fn exact_eigenvalue(d: usize, indices: &[usize]) -> Result<f64> {
    check_dimension(d)?;
    if indices.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: indices.len(),
        });
    }
    if indices.contains(&0) {
        return Err(Error::param("indices", "mode indices are 1-based"));
    }
    Ok(PI * PI * indices.iter().map(|&j| (j * j) as f64).sum::<f64>())
}

/// Explicit 2D pencil `(A⊗B + B⊗A, B⊗B)`.
pub fn kron_pencil_2d(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.kronecker(b) + b.kronecker(a), b.kronecker(b))
}

/// Explicit 3D pencil `(A⊗B⊗B + B⊗A⊗B + B⊗B⊗A, B⊗B⊗B)`.
pub fn kron_pencil_3d(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let bb = b.kronecker(b);
    let stiff = a.kronecker(&bb) + b.kronecker(&a.kronecker(b)) + bb.kronecker(a);
    (stiff, bb.kronecker(b))
}
