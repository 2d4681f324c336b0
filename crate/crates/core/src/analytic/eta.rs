use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn q(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// Named choices of the softness parameter.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaChoice {
    Zero,
    /// Largest value for which the discrete spectrum stays monotone in the mode index.
    Default,
    /// Cancels the leading dispersion term.
    Superconvergent,
    Custom(f64),
}

impl EtaChoice {
    pub fn value(&self, p: usize) -> Result<f64> {
        match *self {
            EtaChoice::Zero => Ok(0.0),
            EtaChoice::Custom(v) => Ok(v),
            EtaChoice::Default => EtaTable::default_eta(p)
                .map(to_f64)
                .ok_or_else(|| Error::Unsupported(format!("no default softness parameter for p = {p}"))),
            EtaChoice::Superconvergent => EtaTable::superconvergent(p)
                .map(to_f64)
                .ok_or_else(|| {
                    Error::Unsupported(format!("no superconvergent softness parameter for p = {p}"))
                }),
        }
    }
}

/// Softness parameters for one degree.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EtaTable {
    pub p: usize,
    /// `1 / (2 C²_{p,3})`, sufficient for coercivity.
    pub theoretical_max: Rational,
    /// Largest value keeping the 1D pencil definite.
    pub sharp_max: Option<Rational>,
    pub default: Option<Rational>,
    pub superconvergent: Option<Rational>,
    /// Mass-side parameter paired with `superconvergent`.
    pub superconvergent_mass: Option<Rational>,
}

impl EtaTable {
    pub fn for_degree(p: usize) -> Result<Self> {
        if !(2..=5).contains(&p) {
            return Err(Error::param("p", format!("softness parameters are tabulated for 2 <= p <= 5, got {p}")));
        }
        let c3 = inverse_constants(p, p)?.c3_squared;
        Ok(Self {
            p,
            theoretical_max: q(1, 2 * c3),
            sharp_max: Self::sharp_max(p),
            default: Self::default_eta(p),
            superconvergent: Self::superconvergent(p),
            superconvergent_mass: Self::superconvergent_mass(p),
        })
    }

    pub fn sharp_max(p: usize) -> Option<Rational> {
        match p {
            2 => Some(q(1, 48)),
            3 => Some(q(1, 480)),
            4 => Some(q(17, 80640)),
            _ => None,
        }
    }

    pub fn default_eta(p: usize) -> Option<Rational> {
        match p {
            2 => Some(q(3, 272)),
            3 => Some(q(69, 79360)),
            4 => Some(q(451, 6191360)),
            _ => None,
        }
    }

    pub fn superconvergent(p: usize) -> Option<Rational> {
        match p {
            2 => Some(q(1, 720)),
            3 => Some(q(1, 30240)),
            4 => Some(q(1, 1209600)),
            5 => Some(q(1, 47900160)),
            _ => None,
        }
    }

    pub fn superconvergent_mass(p: usize) -> Option<Rational> {
        match p {
            2 => Some(q(1, 3360)),
            3 => Some(q(1, 60480)),
            _ => None,
        }
    }
}

/// Constants of the inverse inequalities `|∂^k v| ≤ C h^{-k} |v|` on one element.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InverseConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c1_squared: i64,
    pub c2_squared: Rational,
    pub c3_squared: i64,
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// `(C_{p,1}, C_{p,2}, C_{p,3})` for `1 <= k <= p`. Exact for `p <= 6`.
pub fn inverse_constants(p: usize, k: usize) -> Result<InverseConstants> {
    if p == 0 || p > 6 {
        return Err(Error::param("p", format!("need 1 <= p <= 6, got {p}")));
    }
    if k == 0 || k > p {
        return Err(Error::param("k", format!("need 1 <= k <= p = {p}, got {k}")));
    }
    let pi = p as i64;
    let c1_squared = pi * (pi + 1) * (pi + 2) * (pi + 3) / 2;
    let m = p - k;
    let c2_squared = q(
        factorial(m) * factorial(m + 1) * factorial(m + 2) * factorial(m + 3),
        3 * (1i64 << (m + 2)),
    );
    let c3_num = factorial(p - 1) * factorial(p) * factorial(p + 1) * factorial(p + 2);
    let c3_den = 3 * (1i64 << p);
    debug_assert_eq!(c3_num % c3_den, 0);
    let c3_squared = c3_num / c3_den;
    Ok(InverseConstants {
        c1: (c1_squared as f64).sqrt(),
        c2: to_f64(c2_squared).sqrt(),
        c3: (c3_squared as f64).sqrt(),
        c1_squared,
        c2_squared,
        c3_squared,
    })
}
