//! Rotation angles: exact rational multiples of π with a float fallback.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};

/// Two float angles closer than this (mod 2π) are considered equal.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

const TWO_PI: f64 = 2.0 * PI;

/// An angle normalized to `[0, 2π)`.
///
/// `Exact(r)` stands for `r·π` with `r ∈ [0, 2)` in lowest terms.
/// `Float(x)` holds radians.
#[derive(Clone, Copy, Debug)]
pub enum Angle {
    Exact(Rational64),
    Float(f64),
}

fn normalize_ratio(r: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    let q = (r / two).floor();
    r - q * two
}

fn normalize_float(x: f64) -> f64 {
    let mut y = x.rem_euclid(TWO_PI);
    if y < FLOAT_TOLERANCE || TWO_PI - y < FLOAT_TOLERANCE {
        y = 0.0;
    }
    y
}

impl Angle {
    pub const ZERO: Angle = Angle::Exact(Rational64::new_raw(0, 1));

    /// `num/den · π`.
    pub fn pi_frac(num: i64, den: i64) -> Self {
        Angle::Exact(normalize_ratio(Rational64::new(num, den)))
    }

    pub fn from_pi_ratio(r: Rational64) -> Self {
        Angle::Exact(normalize_ratio(r))
    }

    /// An angle in radians. Values that are not finite are mapped to zero.
    pub fn from_radians(x: f64) -> Self {
        if !x.is_finite() {
            return Angle::ZERO;
        }
        let y = normalize_float(x);
        if y == 0.0 {
            Angle::ZERO
        } else {
            Angle::Float(y)
        }
    }

    pub fn radians(&self) -> f64 {
        match self {
            Angle::Exact(r) => *r.numer() as f64 / *r.denom() as f64 * PI,
            Angle::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact(r) => r.is_zero(),
            Angle::Float(x) => normalize_float(*x) == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    /// Tolerant equality: exact angles compare exactly, anything else in radians.
    pub fn approx_eq(&self, other: &Angle) -> bool {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            _ => (*self - *other).is_zero(),
        }
    }

    /// Symbolic form in `(−π, π]` for exact angles, radians in `[0, 2π)` otherwise.
    pub fn to_qasm(&self) -> String {
        match self {
            Angle::Float(x) => format!("{x:?}"),
            Angle::Exact(r) => {
                let mut r = *r;
                if r > Rational64::one() {
                    r -= Rational64::from_integer(2);
                }
                if r.is_zero() {
                    return "0".to_string();
                }
                let sign = if r.is_negative() { "-" } else { "" };
                let (n, d) = (r.numer().abs(), *r.denom());
                match (n, d) {
                    (1, 1) => format!("{sign}pi"),
                    (1, d) => format!("{sign}pi/{d}"),
                    (n, 1) => format!("{sign}{n}*pi"),
                    (n, d) => format!("{sign}{n}*pi/{d}"),
                }
            }
        }
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::ZERO
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::Exact(normalize_ratio(a + b)),
            (a, b) => Angle::from_radians(a.radians() + b.radians()),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        match self {
            Angle::Exact(a) => Angle::Exact(normalize_ratio(-a)),
            Angle::Float(x) => Angle::from_radians(-x),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            (Angle::Float(a), Angle::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Angle {}

impl Hash for Angle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Angle::Exact(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Angle::Float(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a.cmp(b),
            (Angle::Exact(_), Angle::Float(_)) => Ordering::Less,
            (Angle::Float(_), Angle::Exact(_)) => Ordering::Greater,
            (Angle::Float(a), Angle::Float(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_qasm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sums_cancel() {
        let t = Angle::pi_frac(1, 4);
        assert!((t + -t).is_zero());
        assert_eq!(t + t, Angle::pi_frac(1, 2));
        assert_eq!(Angle::pi_frac(-1, 4), Angle::pi_frac(7, 4));
    }

    #[test]
    fn symbolic_printing() {
        assert_eq!(Angle::pi_frac(1, 4).to_qasm(), "pi/4");
        assert_eq!(Angle::pi_frac(-1, 4).to_qasm(), "-pi/4");
        assert_eq!(Angle::pi_frac(3, 4).to_qasm(), "3*pi/4");
        assert_eq!(Angle::pi_frac(1, 1).to_qasm(), "pi");
        assert_eq!(Angle::ZERO.to_qasm(), "0");
    }

    #[test]
    fn float_merge_tolerance() {
        let a = Angle::from_radians(0.3);
        let b = Angle::from_radians(-0.3 + 1e-14);
        assert!((a + b).is_zero());
    }
}
