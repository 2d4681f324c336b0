//! Open knot vectors and B-spline evaluation with derivatives of any order.
//!
//! Raw B-splines of degree `p` on `N` elements are indexed `0..N + p`. The
//! function with index `i` is supported on elements `i - p ..= i` (clipped to
//! the mesh), so element `e` carries the `p + 1` functions `e ..= e + p`.
//! Evaluation at a breakpoint takes the limit from the element on the
//! requested side; the default is the right limit, except at `x = 1`.

use crate::error::{Error, Result};

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    Left,
    #[default]
    Right,
}

/// An open knot vector with simple interior knots (maximal `C^{p-1}` continuity).
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    breakpoints: Vec<f64>,
    knots: Vec<f64>,
    uniform: bool,
}

impl KnotVector {
    /// Uniform open knot vector on `[0, 1]` with `n_elems` elements.
    pub fn open_uniform(degree: usize, n_elems: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::param("p", "degree must be at least 1"));
        }
        if n_elems < degree + 1 {
            return Err(Error::param(
                "N",
                format!("need at least p + 1 = {} elements, got {n_elems}", degree + 1),
            ));
        }
        let breakpoints = (0..=n_elems)
            .map(|j| j as f64 / n_elems as f64)
            .collect::<Vec<_>>();
        Ok(Self::from_parts(degree, breakpoints, true))
    }

    /// Open knot vector over arbitrary strictly ascending breakpoints from 0 to 1.
    pub fn with_breakpoints(degree: usize, breakpoints: Vec<f64>) -> Result<Self> {
        if degree < 1 {
            return Err(Error::param("p", "degree must be at least 1"));
        }
        let n_elems = breakpoints.len().saturating_sub(1);
        if n_elems < 1 {
            return Err(Error::param("breakpoints", "need at least one element"));
        }
        if breakpoints[0] != 0.0 || breakpoints[n_elems] != 1.0 {
            return Err(Error::param("breakpoints", "must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("breakpoints", "must be strictly ascending"));
        }
        let h = 1.0 / n_elems as f64;
        let uniform = breakpoints
            .iter()
            .enumerate()
            .all(|(j, &x)| (x - j as f64 * h).abs() <= 1e-14);
        Ok(Self::from_parts(degree, breakpoints, uniform))
    }

    fn from_parts(degree: usize, breakpoints: Vec<f64>, uniform: bool) -> Self {
        let n_elems = breakpoints.len() - 1;
        let mut knots = Vec::with_capacity(n_elems + 2 * degree + 1);
        knots.extend(std::iter::repeat(0.0).take(degree));
        knots.extend_from_slice(&breakpoints);
        knots.extend(std::iter::repeat(1.0).take(degree));
        Self {
            degree,
            breakpoints,
            knots,
            uniform,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Number of raw B-splines, `N + p`.
    pub fn num_basis(&self) -> usize {
        self.num_elements() + self.degree
    }

    /// Full knot sequence including the repeated end knots.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Uniform element size `1 / N`, or `None` on a non-uniform mesh.
    pub fn uniform_h(&self) -> Option<f64> {
        self.uniform.then(|| 1.0 / self.num_elements() as f64)
    }

    pub fn element_bounds(&self, e: usize) -> (f64, f64) {
        (self.breakpoints[e], self.breakpoints[e + 1])
    }

    /// Element whose closure contains `x`, honouring `side` at breakpoints.
    pub fn locate(&self, x: f64, side: Side) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        let n = self.num_elements();
        // number of breakpoints <= x (right) or < x (left)
        let count = match side {
            Side::Right => self.breakpoints.partition_point(|&b| b <= x),
            Side::Left => self.breakpoints.partition_point(|&b| b < x),
        };
        Ok(count.saturating_sub(1).min(n - 1))
    }

    /// Derivatives of orders `0..=max_order` of the `p + 1` functions carried by
    /// element `e`, evaluated on that element's polynomial piece at `x`.
    ///
    /// `result[r][k]` is the `r`-th derivative of raw function `e + k`.
    pub fn derivatives_on_element(&self, e: usize, x: f64, max_order: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let span = e + p;
        let u = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; max_order + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let n = max_order.min(p);
        let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=n {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if rk >= 0 {
                    let rk = rk as usize;
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                    d = a[s2][0] * ndu[rk][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for (k, row) in ders.iter_mut().enumerate().take(n + 1).skip(1) {
            for v in row.iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }
        // orders above p vanish identically
        ders
    }

    /// Values of the `order`-th derivative of every raw function nonzero at `x`.
    pub fn eval_basis(&self, x: f64, order: usize) -> Result<BasisEval> {
        self.eval_basis_from(x, order, Side::default())
    }

    pub fn eval_basis_from(&self, x: f64, order: usize, side: Side) -> Result<BasisEval> {
        if order > self.degree {
            return Err(Error::param(
                "r",
                format!("derivative order {order} exceeds degree {}", self.degree),
            ));
        }
        let e = self.locate(x, side)?;
        Ok(self.eval_on_element(e, x, order))
    }

    /// Evaluation on the closed element `e`; at its ends this gives one-sided limits.
    pub fn eval_on_element(&self, e: usize, x: f64, order: usize) -> BasisEval {
        let ders = self.derivatives_on_element(e, x, order);
        BasisEval {
            element: e,
            order,
            values: ders.into_iter().nth(order).unwrap_or_default(),
        }
    }

    /// Jump of the `p`-th derivative of every raw function across breakpoint
    /// `interface` (`0..=N`).
    ///
    /// Interior breakpoints give `right limit - left limit`. At the two ends the
    /// one-sided trace is multiplied by the outward normal (`-1` at `x = 0`,
    /// `+1` at `x = 1`). The result has one entry per raw function.
    pub fn pth_derivative_jump(&self, interface: usize) -> Result<Vec<f64>> {
        let n = self.num_elements();
        if interface > n {
            return Err(Error::IndexOutOfRange {
                index: interface,
                len: n + 1,
            });
        }
        let p = self.degree;
        let x = self.breakpoints[interface];
        let mut jump = vec![0.0; self.num_basis()];
        if interface > 0 {
            let left = self.eval_on_element(interface - 1, x, p);
            let sign = if interface == n { 1.0 } else { -1.0 };
            for (k, v) in left.values.iter().enumerate() {
                jump[interface - 1 + k] += sign * v;
            }
        }
        if interface < n {
            let right = self.eval_on_element(interface, x, p);
            let sign = if interface == 0 { -1.0 } else { 1.0 };
            for (k, v) in right.values.iter().enumerate() {
                jump[interface + k] += sign * v;
            }
        }
        Ok(jump)
    }
}

/// Derivative values of the raw functions carried by one element.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    /// Element the evaluation was anchored on; it carries raw functions
    /// `element ..= element + p`.
    pub element: usize,
    pub order: usize,
    pub values: Vec<f64>,
}

impl BasisEval {
    pub fn first_index(&self) -> usize {
        self.element
    }

    /// Value for raw function `i`, zero if it is not carried by this element.
    pub fn raw_value(&self, i: usize) -> f64 {
        i.checked_sub(self.element)
            .and_then(|k| self.values.get(k))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self, num_basis: usize) -> Vec<f64> {
        (0..num_basis).map(|i| self.raw_value(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_knot_vectors() {
        let kv = KnotVector::open_uniform(1, 2).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.5, 1.0, 1.0]);
        assert_eq!(kv.num_basis(), 3);

        let kv = KnotVector::open_uniform(2, 4).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
        assert_eq!(kv.num_basis(), 6);

        assert_eq!(KnotVector::open_uniform(3, 10).unwrap().num_basis(), 13);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            KnotVector::open_uniform(0, 4),
            Err(Error::InvalidParameter { name: "p", .. })
        ));
        assert!(matches!(
            KnotVector::open_uniform(3, 3),
            Err(Error::InvalidParameter { name: "N", .. })
        ));
        assert!(KnotVector::with_breakpoints(2, vec![0.0, 0.5, 0.4, 1.0]).is_err());
    }

    #[test]
    fn partition_of_unity_at_midpoint() {
        // two quadratic elements fall below the uniform constructor's minimum
        let kv = KnotVector::with_breakpoints(2, vec![0.0, 0.5, 1.0]).unwrap();
        let ev = kv.eval_basis(0.5, 0).unwrap();
        assert_eq!(ev.element, 1);
        let s: f64 = ev.values.iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interpolatory_at_left_end() {
        let kv = KnotVector::open_uniform(2, 4).unwrap();
        let ev = kv.eval_basis(0.0, 0).unwrap();
        let dense = ev.to_dense(kv.num_basis());
        assert_eq!(dense[0], 1.0);
        assert!(dense[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn default_side_is_left_limit_at_one() {
        let kv = KnotVector::open_uniform(3, 5).unwrap();
        let ev = kv.eval_basis(1.0, 0).unwrap();
        assert_eq!(ev.element, 4);
        assert!((ev.raw_value(kv.num_basis() - 1) - 1.0).abs() < 1e-15);
        assert!(matches!(kv.eval_basis(1.5, 0), Err(Error::OutOfDomain { .. })));
        assert!(kv.eval_basis(0.5, 4).is_err());
    }

    #[test]
    fn breakpoint_sides() {
        let kv = KnotVector::open_uniform(2, 4).unwrap();
        assert_eq!(kv.locate(0.5, Side::Right).unwrap(), 2);
        assert_eq!(kv.locate(0.5, Side::Left).unwrap(), 1);
        assert_eq!(kv.locate(0.0, Side::Left).unwrap(), 0);
        assert_eq!(kv.locate(1.0, Side::Right).unwrap(), 3);
    }

    #[test]
    fn jumps_vanish_below_order_p() {
        let kv = KnotVector::open_uniform(3, 6).unwrap();
        let x = kv.breakpoints()[2];
        for r in 0..3 {
            let left = kv.eval_on_element(1, x, r).to_dense(kv.num_basis());
            let right = kv.eval_on_element(2, x, r).to_dense(kv.num_basis());
            for (l, rt) in left.iter().zip(&right) {
                assert!((l - rt).abs() < 1e-10, "order {r}: {l} vs {rt}");
            }
        }
    }

    #[test]
    fn interface_index_checked() {
        let kv = KnotVector::open_uniform(2, 4).unwrap();
        assert!(kv.pth_derivative_jump(4).is_ok());
        assert!(matches!(
            kv.pth_derivative_jump(5),
            Err(Error::IndexOutOfRange { index: 5, len: 5 })
        ));
    }

    #[test]
    fn uniform_quadratic_jump_stencil() {
        // interior uniform quadratic: second derivatives 1, -2, 1 (times 1/h^2)
        // on the three elements of its support, so the jumps at its four knots
        // are 1, -3, 3, -1.
        let n = 8;
        let kv = KnotVector::open_uniform(2, n).unwrap();
        let h2 = (n * n) as f64;
        let i = 4; // support [x_2, x_5]
        let jumps: Vec<f64> = (2..=5)
            .map(|f| kv.pth_derivative_jump(f).unwrap()[i] / h2)
            .collect();
        let want = [1.0, -3.0, 3.0, -1.0];
        for (j, w) in jumps.iter().zip(want) {
            assert!((j - w).abs() < 1e-10, "{jumps:?}");
        }
    }
}
