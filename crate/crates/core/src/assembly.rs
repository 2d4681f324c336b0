//! Galerkin assembly of the stiffness, mass and softness forms, and the
//! softened pencil built from them.

use crate::analytic::{to_f64, EtaTable};
use crate::banded::SymBandedMatrix;
use crate::eigensolve::{generalized_eig, pair_residual, PencilMeta, Spectrum};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spaces::{build_of_space, build_standard_space, SplineSpace};

/// Which faces enter the softness form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SoftnessFaces {
    /// Interior faces, plus twice the boundary traces for even `p`.
    #[default]
    Standard,
    /// Interior faces only.
    InteriorOnly,
}

fn bandwidth(space: &SplineSpace) -> usize {
    (0..space.num_elements())
        .map(|e| {
            let f = space.local_functions(e);
            let lo = f.iter().map(|g| g.index).min().unwrap_or(0);
            let hi = f.iter().map(|g| g.index).max().unwrap_or(0);
            hi - lo
        })
        .max()
        .unwrap_or(0)
}

fn assemble_volume(space: &SplineSpace, order: usize, scale: f64) -> SymBandedMatrix {
    let kv = space.knot_vector();
    let rule = GaussLegendre::new(space.degree() + 1);
    let mut m = SymBandedMatrix::zeros(space.dim(), bandwidth(space), scale);
    for e in 0..space.num_elements() {
        let (a, b) = kv.element_bounds(e);
        for (x, w) in rule.on_interval(a, b) {
            let vals = space.eval_on_element(e, x, order);
            for (ii, &(i, vi)) in vals.iter().enumerate() {
                for &(j, vj) in &vals[ii..] {
                    m.add_unscaled(i, j, w * vi * vj / scale);
                }
            }
        }
    }
    m
}

/// `a(φ_i, φ_j) = (φ_i', φ_j')`; scale `1/h` on uniform meshes.
pub fn assemble_stiffness(space: &SplineSpace) -> SymBandedMatrix {
    let scale = space.knot_vector().uniform_h().map_or(1.0, |h| 1.0 / h);
    assemble_volume(space, 1, scale)
}

/// `b(φ_i, φ_j) = (φ_i, φ_j)`; scale `h` on uniform meshes.
pub fn assemble_mass(space: &SplineSpace) -> SymBandedMatrix {
    let scale = space.knot_vector().uniform_h().unwrap_or(1.0);
    assemble_volume(space, 0, scale)
}

/// Weighted `p`-th derivative jumps of the space functions at every face,
/// `(weight, [(index, jump)])`.
fn face_jumps(space: &SplineSpace, faces: SoftnessFaces) -> Result<Vec<(f64, Vec<(usize, f64)>)>> {
    let kv = space.knot_vector();
    let h = kv.uniform_h().ok_or(Error::NonUniformMesh)?;
    let p = space.degree();
    let n = space.num_elements();
    let w = h.powi(2 * p as i32 - 1);
    let with_boundary = faces == SoftnessFaces::Standard && p % 2 == 0;
    let bp = kv.breakpoints();
    let mut out = Vec::with_capacity(n + 1);
    for f in 0..=n {
        let boundary = f == 0 || f == n;
        if boundary && !with_boundary {
            continue;
        }
        let x = bp[f];
        let mut jump: Vec<(usize, f64)> = Vec::new();
        let mut push = |i: usize, v: f64| match jump.iter_mut().find(|(k, _)| *k == i) {
            Some(slot) => slot.1 += v,
            None => jump.push((i, v)),
        };
        if f > 0 {
            let sign = if f == n { 1.0 } else { -1.0 };
            for (i, v) in space.eval_on_element(f - 1, x, p) {
                push(i, sign * v);
            }
        }
        if f < n {
            let sign = if f == 0 { -1.0 } else { 1.0 };
            for (i, v) in space.eval_on_element(f, x, p) {
                push(i, sign * v);
            }
        }
        jump.sort_by_key(|t| t.0);
        let weight = if boundary { 2.0 * w } else { w };
        out.push((weight, jump));
    }
    Ok(out)
}

/// `s(φ_i, φ_j)`, scale `1/h`. Refuses non-uniform meshes.
pub fn assemble_softness(space: &SplineSpace) -> Result<SymBandedMatrix> {
    assemble_softness_with(space, SoftnessFaces::Standard)
}

pub fn assemble_softness_with(space: &SplineSpace, faces: SoftnessFaces) -> Result<SymBandedMatrix> {
    let h = space.knot_vector().uniform_h().ok_or(Error::NonUniformMesh)?;
    let scale = 1.0 / h;
    let mut m = SymBandedMatrix::zeros(space.dim(), space.degree() + bandwidth(space), scale);
    for (weight, jump) in face_jumps(space, faces)? {
        for (ii, &(i, vi)) in jump.iter().enumerate() {
            for &(j, vj) in &jump[ii..] {
                m.add_unscaled(i, j, weight * vi * vj / scale);
            }
        }
    }
    Ok(m)
}

/// `(a(u,u), b(u,u), s(u,u))` for `u = Σ c_i φ_i`, accumulated as sums of
/// squares, which keeps every term nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub stiffness: f64,
    pub mass: f64,
    pub softness: f64,
}

pub fn energies(space: &SplineSpace, coeffs: &[f64], faces: SoftnessFaces) -> Result<Energies> {
    if coeffs.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: coeffs.len(),
        });
    }
    let kv = space.knot_vector();
    let rule = GaussLegendre::new(space.degree() + 1);
    let mut a = 0.0;
    let mut b = 0.0;
    for e in 0..space.num_elements() {
        let (lo, hi) = kv.element_bounds(e);
        for (x, w) in rule.on_interval(lo, hi) {
            let u: f64 = space.eval_on_element(e, x, 0).iter().map(|&(i, v)| coeffs[i] * v).sum();
            let du: f64 = space.eval_on_element(e, x, 1).iter().map(|&(i, v)| coeffs[i] * v).sum();
            a += w * du * du;
            b += w * u * u;
        }
    }
    let s = match face_jumps(space, faces) {
        Ok(jumps) => jumps
            .iter()
            .map(|(w, j)| {
                let v: f64 = j.iter().map(|&(i, v)| coeffs[i] * v).sum();
                w * v * v
            })
            .sum(),
        Err(Error::NonUniformMesh) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(Energies {
        stiffness: a,
        mass: b,
        softness: s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum EtaStatus {
    /// `η` below the sharp bound.
    Admissible,
    /// `η ≥ η_max`; the stiffness side may be indefinite.
    AboveSharpMax { eta_max: f64 },
    /// No sharp bound is known for this degree.
    Unchecked,
}

/// The softened pencil `(K - ηS, M + η_b h² S)`.
///
/// `η_b` multiplies `h² S` so that both sides of the mass penalty carry the
/// same `h^{2p+1}` weight as the mass matrix.
#[derive(Debug, Clone)]
pub struct SoftSystem {
    pub p: usize,
    pub n_elems: usize,
    pub eta: f64,
    pub eta_b: f64,
    pub faces: SoftnessFaces,
    pub space: SplineSpace,
    pub stiffness: SymBandedMatrix,
    pub mass: SymBandedMatrix,
    pub softness: SymBandedMatrix,
    pub a: SymBandedMatrix,
    pub b: SymBandedMatrix,
    pub status: EtaStatus,
}

/// Discretization families compared throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Standard space, no softness.
    Iga,
    /// Outlier-free space, no softness.
    OfIga,
    /// Outlier-free space with softness.
    SoftIga,
}

/// Pencil for `method`; `eta` and `eta_b` are ignored unless `method` is softIGA.
pub fn build_system(method: Method, p: usize, n_elems: usize, eta: f64, eta_b: f64) -> Result<SoftSystem> {
    match method {
        Method::Iga => SoftSystem::on_space(build_standard_space(p, n_elems)?, 0.0, 0.0, SoftnessFaces::Standard),
        Method::OfIga => build_soft_system(p, n_elems, 0.0, 0.0),
        Method::SoftIga => build_soft_system(p, n_elems, eta, eta_b),
    }
}

/// softIGA pencil on the outlier-free space.
pub fn build_soft_system(p: usize, n_elems: usize, eta: f64, eta_b: f64) -> Result<SoftSystem> {
    let space = build_of_space(p, n_elems)?;
    SoftSystem::on_space(space, eta, eta_b, SoftnessFaces::Standard)
}

impl SoftSystem {
    pub fn on_space(space: SplineSpace, eta: f64, eta_b: f64, faces: SoftnessFaces) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("must be a finite value >= 0, got {eta}")));
        }
        if !(eta_b >= 0.0) || !eta_b.is_finite() {
            return Err(Error::param("eta_b", format!("must be a finite value >= 0, got {eta_b}")));
        }
        let p = space.degree();
        let n_elems = space.num_elements();
        let h = space
            .knot_vector()
            .uniform_h()
            .ok_or(Error::NonUniformMesh)?;
        let stiffness = assemble_stiffness(&space);
        let mass = assemble_mass(&space);
        let softness = assemble_softness_with(&space, faces)?;
        let a = stiffness.combine(1.0, &softness, -eta)?;
        let b = mass.combine(1.0, &softness, eta_b * h * h)?;
        if eta_b > 0.0 {
            b.cholesky_check()?;
        }
        let status = match EtaTable::sharp_max(p) {
            Some(m) if eta >= to_f64(m) => EtaStatus::AboveSharpMax { eta_max: to_f64(m) },
            Some(_) => EtaStatus::Admissible,
            None if eta == 0.0 => EtaStatus::Admissible,
            None => EtaStatus::Unchecked,
        };
        Ok(Self {
            p,
            n_elems,
            eta,
            eta_b,
            faces,
            space,
            stiffness,
            mass,
            softness,
            a,
            b,
            status,
        })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_elems as f64
    }

    pub fn meta(&self) -> PencilMeta {
        PencilMeta {
            p: self.p,
            n_elems: self.n_elems,
            eta: self.eta,
            eta_b: self.eta_b,
        }
    }

    /// Full spectrum; eigenvalues are the energy-form Rayleigh quotients of the
    /// computed eigenvectors, which removes the `ε‖C‖` floor of the dense
    /// solver from the low end of the spectrum.
    pub fn solve(&self) -> Result<Spectrum> {
        let mut spec = generalized_eig(&self.a, &self.b)?.with_meta(self.meta());
        self.refine(&mut spec)?;
        Ok(spec)
    }

    /// Dense solve only, without the energy refinement.
    pub fn solve_raw(&self) -> Result<Spectrum> {
        Ok(generalized_eig(&self.a, &self.b)?.with_meta(self.meta()))
    }

    pub fn rayleigh_quotient(&self, coeffs: &[f64]) -> Result<f64> {
        let en = energies(&self.space, coeffs, self.faces)?;
        let h = self.h();
        let num = en.stiffness - self.eta * en.softness;
        let den = en.mass + self.eta_b * h * h * en.softness;
        Ok(num / den)
    }

    fn refine(&self, spec: &mut Spectrum) -> Result<()> {
        let raw = spec.eigenvalues.clone();
        for (j, lam) in spec.eigenvalues.iter_mut().enumerate() {
            let x = spec.eigenvectors.column(j).iter().copied().collect::<Vec<_>>();
            let q = self.rayleigh_quotient(&x)?;
            // keep the solver value if the quotient is not a refinement of it
            if q.is_finite() && (q - raw[j]).abs() <= 1e-8 * raw[j].abs().max(1.0) {
                *lam = q;
            }
        }
        let mut order: Vec<usize> = (0..spec.len()).collect();
        order.sort_by(|&i, &k| spec.eigenvalues[i].total_cmp(&spec.eigenvalues[k]));
        if order.iter().enumerate().any(|(i, &k)| i != k) {
            let vals = order.iter().map(|&k| spec.eigenvalues[k]).collect();
            let res = order.iter().map(|&k| spec.residuals[k]).collect();
            let n = spec.eigenvectors.nrows();
            let vecs = nalgebra::DMatrix::from_fn(n, order.len(), |r, c| spec.eigenvectors[(r, order[c])]);
            spec.eigenvalues = vals;
            spec.residuals = res;
            spec.eigenvectors = vecs;
        }
        for j in 0..spec.len() {
            let x = spec.eigenvector(j);
            spec.residuals[j] = pair_residual(&self.a, &self.b, spec.eigenvalues[j], &x)?;
        }
        Ok(())
    }
}
