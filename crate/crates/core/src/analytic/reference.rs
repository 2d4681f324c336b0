//! Hard-coded softIGA matrices and transformation matrices.
//!
//! Each matrix is given by its leading rows and the interior stencil; the
//! remaining entries follow from symmetry and persymmetry.

use super::eta::{to_f64, Rational};
use crate::banded::SymBandedMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum MatrixKind {
    /// Stiffness, scale `1/h`.
    K,
    /// Mass, scale `h`.
    M,
    /// Softness, scale `1/h`.
    S,
    /// Transformation matrix, unscaled.
    T,
}

struct Pattern {
    top: &'static [&'static [&'static str]],
    /// Diagonal followed by the off-diagonals.
    stencil: &'static [&'static str],
}

fn pattern(kind: MatrixKind, p: usize) -> Option<Pattern> {
    use MatrixKind::*;
    let (top, stencil): (&[&[&str]], &[&str]) = match (kind, p) {
        (K, 2) => (
            &[&["4/3", "-1/6", "-1/6"], &["-1/6", "1", "-1/3", "-1/6"]],
            &["1", "-1/3", "-1/6"],
        ),
        (M, 2) => (
            &[&["1/3", "5/24", "1/120"], &["5/24", "11/20", "13/60", "1/120"]],
            &["11/20", "13/60", "1/120"],
        ),
        (S, 2) => (
            &[
                &["35", "-21", "7", "-1"],
                &["-21", "21", "-15", "6", "-1"],
                &["7", "-15", "20", "-15", "6", "-1"],
            ],
            &["20", "-15", "6", "-1"],
        ),
        (K, 3) => (
            &[
                &["13/15", "-7/60", "-1/5", "-1/120"],
                &["-7/60", "2/3", "-1/8", "-1/5", "-1/120"],
            ],
            &["2/3", "-1/8", "-1/5", "-1/120"],
        ),
        (M, 3) => (
            &[
                &["41/90", "17/72", "1/42", "1/5040"],
                &["17/72", "151/315", "397/1680", "1/42", "1/5040"],
            ],
            &["151/315", "397/1680", "1/42", "1/5040"],
        ),
        (S, 3) => (
            &[
                &["42", "-48", "27", "-8", "1"],
                &["-48", "69", "-56", "28", "-8", "1"],
                &["27", "-56", "70", "-56", "28", "-8", "1"],
            ],
            &["70", "-56", "28", "-8", "1"],
        ),
        (K, 4) => (
            &[
                &["31/60", "19/120", "-139/840", "-13/560", "-1/5040"],
                &["19/120", "107/210", "-17/560", "-17/90", "-59/2520", "-1/5040"],
                &["-139/840", "-17/560", "35/72", "-11/360", "-17/90", "-59/2520", "-1/5040"],
                &["-13/560", "-17/90", "-11/360", "35/72", "-11/360", "-17/90", "-59/2520", "-1/5040"],
            ],
            &["35/72", "-11/360", "-17/90", "-59/2520", "-1/5040"],
        ),
        (M, 4) => (
            &[
                &["809/4320", "1753/8640", "2351/60480", "167/120960", "1/362880"],
                &["1753/8640", "6487/15120", "29411/120960", "913/22680", "251/181440", "1/362880"],
                &[
                    "2351/60480", "29411/120960", "15619/36288", "44117/181440", "913/22680", "251/181440",
                    "1/362880",
                ],
                &[
                    "167/120960", "913/22680", "44117/181440", "15619/36288", "44117/181440", "913/22680",
                    "251/181440", "1/362880",
                ],
            ],
            &["15619/36288", "44117/181440", "913/22680", "251/181440", "1/362880"],
        ),
        (S, 4) => (
            &[
                &["462", "-330", "165", "-55", "11", "-1"],
                &["-330", "297", "-220", "121", "-45", "10", "-1"],
                &["165", "-220", "253", "-210", "120", "-45", "10", "-1"],
                &["-55", "121", "-210", "252", "-210", "120", "-45", "10", "-1"],
            ],
            &["252", "-210", "120", "-45", "10", "-1"],
        ),
        (K, 5) => (
            &[
                &["8143/15120", "1285/24192", "-2951/18144", "-3401/90720", "-25/18144", "-1/362880"],
                &[
                    "1285/24192", "34103/90720", "5671/362880", "-31/189", "-907/24192", "-25/18144",
                    "-1/362880",
                ],
                &[
                    "-2951/18144", "5671/362880", "809/2160", "1/64", "-31/189", "-907/24192", "-25/18144",
                    "-1/362880",
                ],
                &[
                    "-3401/90720", "-31/189", "1/64", "809/2160", "1/64", "-31/189", "-907/24192",
                    "-25/18144", "-1/362880",
                ],
            ],
            &["809/2160", "1/64", "-31/189", "-907/24192", "-25/18144", "-1/362880"],
        ),
        (M, 5) => (
            &[
                &[
                    "10243/30240", "96823/403200", "50033/907200", "3469/907200", "509/9979200",
                    "1/39916800",
                ],
                &[
                    "96823/403200", "357323/907200", "126469/518400", "1093/19800", "50879/13305600",
                    "509/9979200", "1/39916800",
                ],
                &[
                    "50033/907200", "126469/518400", "655177/1663200", "1623019/6652800", "1093/19800",
                    "50879/13305600", "509/9979200", "1/39916800",
                ],
                &[
                    "3469/907200", "1093/19800", "1623019/6652800", "655177/1663200", "1623019/6652800",
                    "1093/19800", "50879/13305600", "509/9979200", "1/39916800",
                ],
            ],
            &["655177/1663200", "1623019/6652800", "1093/19800", "50879/13305600", "509/9979200", "1/39916800"],
        ),
        (S, 5) => (
            &[
                &["429", "-572", "429", "-208", "65", "-12", "1"],
                &["-572", "858", "-780", "494", "-220", "66", "-12", "1"],
                &["429", "-780", "923", "-792", "495", "-220", "66", "-12", "1"],
                &["-208", "494", "-792", "924", "-792", "495", "-220", "66", "-12", "1"],
            ],
            &["924", "-792", "495", "-220", "66", "-12", "1"],
        ),
        (T, 2) => (&[&["5/8", "1/8"]], &["3/4", "1/8"]),
        (T, 3) => (&[&["2/3", "1/6"]], &["2/3", "1/6"]),
        (T, 4) => (
            &[&["77/192", "25/128", "1/384"], &["25/128", "115/192", "19/96", "1/384"]],
            &["115/192", "19/96", "1/384"],
        ),
        (T, 5) => (
            &[&["13/24", "13/60", "1/120"], &["13/60", "11/20", "13/60", "1/120"]],
            &["11/20", "13/60", "1/120"],
        ),
        _ => return None,
    };
    Some(Pattern { top, stencil })
}

fn parse(s: &str) -> Rational {
    s.parse().expect("malformed rational literal in reference table")
}

/// Exact entries of the reference matrix of order `n`.
pub fn reference_entries(kind: MatrixKind, p: usize, n: usize) -> Result<Vec<Vec<Rational>>> {
    let pat = pattern(kind, p)
        .ok_or_else(|| Error::param("p", format!("no reference matrix {kind:?} for p = {p}")))?;
    let top: Vec<Vec<Rational>> = pat.top.iter().map(|r| r.iter().map(|s| parse(s)).collect()).collect();
    let stencil: Vec<Rational> = pat.stencil.iter().map(|s| parse(s)).collect();
    let bw = stencil.len() - 1;
    if n < 2 * top.len() + 1 || n <= bw {
        return Err(Error::param(
            "N",
            format!("matrix order {n} too small for the {kind:?} pattern of degree {p}"),
        ));
    }
    let f = |i: usize, j: usize| -> Rational {
        if let Some(v) = top.get(i).and_then(|r| r.get(j)) {
            return *v;
        }
        if let Some(v) = top.get(j).and_then(|r| r.get(i)) {
            return *v;
        }
        let d = i.abs_diff(j);
        stencil.get(d).copied().unwrap_or_default()
    };
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i + j < n { f(i, j) } else { f(n - 1 - j, n - 1 - i) })
                .collect()
        })
        .collect())
}

/// Matrix order for `N` elements: `N` for even `p`, `N - 1` for odd `p`.
pub fn reference_order(p: usize, n_elems: usize) -> usize {
    if p % 2 == 0 {
        n_elems
    } else {
        n_elems - 1
    }
}

pub fn reference_matrix(kind: MatrixKind, p: usize, n_elems: usize) -> Result<SymBandedMatrix> {
    if n_elems < 2 {
        return Err(Error::param("N", "need at least two elements"));
    }
    let n = reference_order(p, n_elems);
    let entries = reference_entries(kind, p, n)?;
    let h = 1.0 / n_elems as f64;
    let scale = match kind {
        MatrixKind::K | MatrixKind::S => 1.0 / h,
        MatrixKind::M => h,
        MatrixKind::T => 1.0,
    };
    let bw = pattern(kind, p).map(|pt| pt.stencil.len() - 1).unwrap_or(0);
    let mut m = SymBandedMatrix::zeros(n, bw, scale);
    for (i, row) in entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate().skip(i) {
            if *v != Rational::default() {
                m.add_unscaled(i, j, to_f64(*v));
            }
        }
    }
    Ok(m)
}

/// Interior stencil `(a_0, a_1, ..., a_b)` of a reference matrix.
pub fn reference_stencil(kind: MatrixKind, p: usize) -> Result<Vec<Rational>> {
    let pat = pattern(kind, p)
        .ok_or_else(|| Error::param("p", format!("no reference matrix {kind:?} for p = {p}")))?;
    Ok(pat.stencil.iter().map(|s| parse(s)).collect())
}

/// `‖AB - BA‖_F`.
pub fn commutator_norm(a: &SymBandedMatrix, b: &SymBandedMatrix) -> Result<f64> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: b.order(),
        });
    }
    let (da, db) = (a.to_dense(), b.to_dense());
    Ok((&da * &db - &db * &da).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn quadratic_transformation_matrix() {
        let t = reference_matrix(MatrixKind::T, 2, 6).unwrap();
        let d: Vec<f64> = (0..6).map(|i| t.get(i, i)).collect();
        assert_eq!(d, vec![0.625, 0.75, 0.75, 0.75, 0.75, 0.625]);
        for i in 0..5 {
            assert_eq!(t.get(i, i + 1), 0.125);
        }
        assert_eq!(t.get(0, 2), 0.0);
    }

    #[test]
    fn quartic_softness_first_row() {
        let e = reference_entries(MatrixKind::S, 4, 12).unwrap();
        let want: Vec<Rational> = [462, -330, 165, -55, 11, -1].iter().map(|&v| Ratio::from_integer(v)).collect();
        assert_eq!(&e[0][..6], &want[..]);
        assert!(e[0][6..].iter().all(|v| *v == Rational::default()));
        assert_eq!(e[11][11], Ratio::from_integer(462));
    }

    #[test]
    fn quintic_stiffness_interior_row() {
        let e = reference_entries(MatrixKind::K, 5, 13).unwrap();
        assert_eq!(e[6][6], Ratio::new(809, 2160));
        assert_eq!(e[6][7], Ratio::new(1, 64));
    }

    #[test]
    fn symmetric_and_persymmetric() {
        for kind in [MatrixKind::K, MatrixKind::M, MatrixKind::S, MatrixKind::T] {
            for p in 2..=5 {
                let n = reference_order(p, 14);
                let e = reference_entries(kind, p, n).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(e[i][j], e[j][i]);
                        assert_eq!(e[i][j], e[n - 1 - j][n - 1 - i]);
                    }
                }
            }
        }
    }

    #[test]
    fn stiffness_and_softness_annihilate_constants_in_the_interior() {
        for p in 2..=5 {
            for kind in [MatrixKind::K, MatrixKind::S] {
                let s = reference_stencil(kind, p).unwrap();
                let sum = s[0] + s[1..].iter().fold(Rational::default(), |a, b| a + *b * 2);
                assert_eq!(sum, Rational::default(), "{kind:?} p = {p}");
            }
            let t = reference_stencil(MatrixKind::T, p).unwrap();
            let sum = t[0] + t[1..].iter().fold(Rational::default(), |a, b| a + *b * 2);
            assert_eq!(sum, Ratio::from_integer(1));
        }
    }

    #[test]
    fn commutators() {
        let a = reference_matrix(MatrixKind::T, 3, 12).unwrap();
        assert_eq!(commutator_norm(&a, &a).unwrap(), 0.0);
        let b = reference_matrix(MatrixKind::T, 2, 12).unwrap();
        assert!(commutator_norm(&a, &b).is_err());
        let m = reference_matrix(MatrixKind::M, 4, 12).unwrap();
        let t = reference_matrix(MatrixKind::T, 4, 12).unwrap();
        assert!(commutator_norm(&m, &t).unwrap() < 1e-12);
    }

    #[test]
    fn unsupported_patterns() {
        assert!(reference_matrix(MatrixKind::K, 6, 20).is_err());
        assert!(reference_matrix(MatrixKind::S, 5, 6).is_err());
    }
}
