//! Trial spaces built on top of raw B-splines through an extraction operator.
//!
//! Every space function is a linear combination of a contiguous run of raw
//! B-splines. The standard space drops the two interpolatory end functions.
//! The outlier-free space additionally forces the even derivatives of order
//! `2, 4, ..., 2 alpha_p` to vanish at both ends, `alpha_p = (p - 1) / 2`.
//! Raw functions away from the ends satisfy those conditions already and are
//! kept; the first and last `2 alpha_p + 1` raw functions are recombined
//! through an orthonormal basis of the null space of the end constraints.

use crate::error::{Error, Result};
use crate::splines::{KnotVector, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceFlavor {
    Standard,
    OutlierFree,
}

/// One row of the extraction operator: coefficients on raw functions
/// `first .. first + coeffs.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRow {
    pub first: usize,
    pub coeffs: Vec<f64>,
}

impl ExtractionRow {
    fn unit(i: usize) -> Self {
        Self {
            first: i,
            coeffs: vec![1.0],
        }
    }

    pub fn last(&self) -> usize {
        self.first + self.coeffs.len() - 1
    }

    pub fn coeff(&self, raw: usize) -> f64 {
        raw.checked_sub(self.first)
            .and_then(|k| self.coeffs.get(k))
            .copied()
            .unwrap_or(0.0)
    }
}

/// A space function restricted to one element, as coefficients on the
/// element's `p + 1` local raw functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFunction {
    pub index: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SplineSpace {
    kv: KnotVector,
    flavor: SpaceFlavor,
    rows: Vec<ExtractionRow>,
    local: Vec<Vec<LocalFunction>>,
}

/// `alpha_p = floor((p - 1) / 2)`.
pub fn alpha(p: usize) -> usize {
    (p - 1) / 2
}

pub fn build_standard_space(p: usize, n_elems: usize) -> Result<SplineSpace> {
    let kv = KnotVector::open_uniform(p, n_elems)?;
    Ok(SplineSpace::standard_on(kv))
}

pub fn build_of_space(p: usize, n_elems: usize) -> Result<SplineSpace> {
    let kv = KnotVector::open_uniform(p, n_elems)?;
    SplineSpace::outlier_free_on(kv)
}

impl SplineSpace {
    /// Homogeneous Dirichlet space on an arbitrary open knot vector.
    pub fn standard_on(kv: KnotVector) -> Self {
        let n = kv.num_basis();
        let rows = (1..n - 1).map(ExtractionRow::unit).collect();
        Self::from_rows(kv, SpaceFlavor::Standard, rows)
    }

    pub fn outlier_free_on(kv: KnotVector) -> Result<Self> {
        let p = kv.degree();
        let n = kv.num_basis();
        let a = alpha(p);
        let block = 2 * a + 1;
        // the right block must also be free of left-end constraints
        if 2 * block > n {
            return Err(Error::param(
                "N",
                format!(
                    "end constraint blocks of {block} functions overlap with only {n} raw functions"
                ),
            ));
        }
        let left = end_null_space(&kv, a)?;
        let mut rows = Vec::with_capacity(n);
        rows.extend(left.iter().map(|c| ExtractionRow {
            first: 0,
            coeffs: c.clone(),
        }));
        rows.extend((block..n - block).map(ExtractionRow::unit));
        // mirror images, ordered so that function i mirrors function dim - 1 - i
        rows.extend(left.iter().rev().map(|c| ExtractionRow {
            first: n - block,
            coeffs: c.iter().rev().copied().collect(),
        }));
        Ok(Self::from_rows(kv, SpaceFlavor::OutlierFree, rows))
    }

    /// A space spanned by explicit extraction rows.
    pub fn from_rows(kv: KnotVector, flavor: SpaceFlavor, rows: Vec<ExtractionRow>) -> Self {
        let p = kv.degree();
        let n_elems = kv.num_elements();
        let mut local = vec![Vec::new(); n_elems];
        for (index, row) in rows.iter().enumerate() {
            let e_lo = row.first.saturating_sub(p);
            let e_hi = row.last().min(n_elems - 1);
            for (e, slot) in local.iter_mut().enumerate().take(e_hi + 1).skip(e_lo) {
                let coeffs: Vec<f64> = (0..=p).map(|k| row.coeff(e + k)).collect();
                if coeffs.iter().any(|&c| c != 0.0) {
                    slot.push(LocalFunction { index, coeffs });
                }
            }
        }
        Self {
            kv,
            flavor,
            rows,
            local,
        }
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.kv
    }

    pub fn degree(&self) -> usize {
        self.kv.degree()
    }

    pub fn num_elements(&self) -> usize {
        self.kv.num_elements()
    }

    pub fn flavor(&self) -> SpaceFlavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[ExtractionRow] {
        &self.rows
    }

    /// Extraction operator as a dense `dim x (N + p)` array.
    pub fn extraction_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.kv.num_basis();
        self.rows
            .iter()
            .map(|r| (0..n).map(|i| r.coeff(i)).collect())
            .collect()
    }

    pub fn local_functions(&self, e: usize) -> &[LocalFunction] {
        &self.local[e]
    }

    /// `order`-th derivative of every space function with support on element
    /// `e`, as `(index, value)` pairs.
    pub fn eval_on_element(&self, e: usize, x: f64, order: usize) -> Vec<(usize, f64)> {
        let raw = self.kv.eval_on_element(e, x, order);
        self.local[e]
            .iter()
            .map(|f| {
                let v = f.coeffs.iter().zip(&raw.values).map(|(c, r)| c * r).sum();
                (f.index, v)
            })
            .collect()
    }

    /// `order`-th derivative of space function `i` at `x`.
    pub fn member_eval(&self, i: usize, x: f64, order: usize) -> Result<f64> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim(),
            });
        }
        let ev = self.kv.eval_basis_from(x, order, Side::default())?;
        let row = &self.rows[i];
        Ok((row.first..=row.last())
            .map(|r| row.coeff(r) * ev.raw_value(r))
            .sum())
    }

    /// `order`-th derivative at `x` of the function with `coeffs` in this basis.
    pub fn eval_combination(&self, coeffs: &[f64], x: f64, order: usize) -> Result<f64> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        if order > self.degree() {
            return Err(Error::param("r", "derivative order exceeds degree"));
        }
        let e = self.kv.locate(x, Side::default())?;
        Ok(self
            .eval_on_element(e, x, order)
            .into_iter()
            .map(|(i, v)| coeffs[i] * v)
            .sum())
    }
}

/// Orthonormal, sign-fixed basis of the null space of the left-end
/// constraints `w^{(2k)}(0) = 0, k = 0..=alpha`, over raw functions `0..=2 alpha`.
fn end_null_space(kv: &KnotVector, alpha: usize) -> Result<Vec<Vec<f64>>> {
    let m = 2 * alpha + 1;
    let ders = kv.derivatives_on_element(0, 0.0, 2 * alpha);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..=alpha {
        let row: Vec<f64> = ders[2 * k][..m].to_vec();
        let norm = dot(&row, &row).sqrt();
        let v = row.iter().map(|x| x / norm).collect::<Vec<_>>();
        if let Some(q) = orthonormalize(&v, &basis, 1e-10) {
            basis.push(q);
        } else {
            return Err(Error::RankDeficient {
                rank: basis.len(),
                expected: alpha + 1,
            });
        }
    }
    let mut null = Vec::with_capacity(alpha);
    for k in 0..m {
        if null.len() == m - (alpha + 1) {
            break;
        }
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let span: Vec<Vec<f64>> = basis.iter().chain(null.iter()).cloned().collect();
        if let Some(mut q) = orthonormalize(&e, &span, 1e-8) {
            fix_sign(&mut q);
            null.push(q);
        }
    }
    if null.len() != alpha {
        return Err(Error::RankDeficient {
            rank: m - null.len(),
            expected: alpha + 1,
        });
    }
    Ok(null)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Twice-iterated Gram–Schmidt; `None` if `v` is (numerically) in the span.
fn orthonormalize(v: &[f64], span: &[Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in span {
            let c = dot(&w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    let norm = dot(&w, &w).sqrt();
    (norm > tol).then(|| w.iter().map(|x| x / norm).collect())
}

fn fix_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    for x in v.iter_mut() {
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
}
