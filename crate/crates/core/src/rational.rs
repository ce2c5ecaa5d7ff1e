//! Exact rationals and extended face degrees.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary precision, always reduced, denominator positive.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `1/n` for a positive count.
pub fn recip(n: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Degree of a face (or any quantity that may be infinite).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Finite(u64),
    Infinite,
}

impl Degree {
    /// `1/|f|` with the convention `1/inf = 0`.
    pub fn reciprocal(self) -> Rational {
        match self {
            Degree::Finite(0) => Rational::zero(),
            Degree::Finite(n) => recip(n),
            Degree::Infinite => Rational::zero(),
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::Finite(n) => Some(n),
            Degree::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Degree::Infinite)
    }

    /// `q / (q - 1)`, equal to 1 for an infinite degree.
    pub fn ratio_q_over_q_minus_1(self) -> Option<Rational> {
        match self {
            Degree::Infinite => Some(Rational::one()),
            Degree::Finite(q) if q > 1 => Some(Rational::new(q.into(), (q - 1).into())),
            Degree::Finite(_) => None,
        }
    }

    /// `2q / (q - 2)`, equal to 2 for an infinite degree; undefined for `q <= 2`.
    pub fn two_q_over_q_minus_2(self) -> Option<Rational> {
        match self {
            Degree::Infinite => Some(int(2)),
            Degree::Finite(q) if q > 2 => Some(Rational::new((2 * q).into(), (q - 2).into())),
            Degree::Finite(_) => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(n) => write!(f, "{n}"),
            Degree::Infinite => f.write_str("inf"),
        }
    }
}

/// Degree of a traced face: known exactly, or unknown because the truncation
/// cut the face and no hint was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceDegree {
    Known(Degree),
    Unknown,
}

impl FaceDegree {
    pub fn known(self) -> Option<Degree> {
        match self {
            FaceDegree::Known(d) => Some(d),
            FaceDegree::Unknown => None,
        }
    }
}

impl fmt::Display for FaceDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceDegree::Known(d) => d.fmt(f),
            FaceDegree::Unknown => f.write_str("?"),
        }
    }
}

/// Curvature of a face: a rational, or the `-inf` of an infinigon with
/// infinitely many branching boundary vertices. On truncations the latter is
/// only a hint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceCurvature {
    Value(Rational),
    UnboundedNegative,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_conventions() {
        assert_eq!(Degree::Infinite.reciprocal(), int(0));
        assert_eq!(Degree::Finite(43).reciprocal(), rat(1, 43));
        assert_eq!(Degree::Infinite.two_q_over_q_minus_2(), Some(int(2)));
        assert_eq!(Degree::Finite(7).two_q_over_q_minus_2(), Some(rat(14, 5)));
        assert_eq!(Degree::Finite(2).two_q_over_q_minus_2(), None);
        assert_eq!(Degree::Finite(3).ratio_q_over_q_minus_1(), Some(rat(3, 2)));
    }

    #[test]
    fn reduced_form() {
        assert_eq!(rat(-301, 1806) + rat(42, 1806), rat(-259, 1806));
        assert_eq!(rat(2, 4).to_string(), "1/2");
    }
}
