//! Dual-representation coordinates.
//!
//! Coordinates constructed from lattice generators or rational input are kept
//! as exact arbitrary-precision rationals; everything else is a binary float.
//! Membership tests against half-open dyadic boxes are exact in both
//! representations: dyadic boundaries `m/2^j` with `j <= 52` are exactly
//! representable in `f64`, so float comparisons against them are true
//! predicates, and rational coordinates are compared with integer arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A coordinate value, either an exact rational or a binary float.
#[derive(Clone, Debug)]
pub enum Coord {
    Exact(BigRational),
    Approx(f64),
}

impl Coord {
    /// Exact rational `num/den`. Panics if `den == 0`.
    pub fn ratio(num: u64, den: u64) -> Coord {
        Coord::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Coord {
        Coord::Exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coord::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(r) => r.to_f64().expect("rational in unit range converts"),
            Coord::Approx(v) => *v,
        }
    }

    /// Lossless promotion to a rational. A finite `f64` is itself a rational,
    /// so this never rounds.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coord::Exact(r) => r.clone(),
            Coord::Approx(v) => BigRational::from_float(*v).expect("finite float"),
        }
    }

    pub fn compare(&self, other: &Coord) -> Ordering {
        match (self, other) {
            (Coord::Approx(a), Coord::Approx(b)) => a.partial_cmp(b).expect("finite"),
            (a, b) => a.to_rational().cmp(&b.to_rational()),
        }
    }

    /// Compares against the dyadic rational `m / 2^j`.
    pub fn cmp_dyadic(&self, m: u64, j: u32) -> Ordering {
        match self {
            Coord::Approx(v) => {
                debug_assert!(j <= 52, "dyadic boundary not exactly representable");
                let boundary = m as f64 * 2f64.powi(-(j as i32));
                v.partial_cmp(&boundary).expect("finite")
            }
            Coord::Exact(r) => {
                // num/den vs m/2^j  <=>  num * 2^j vs m * den
                let lhs = r.numer() << j;
                let rhs = BigInt::from(m) * r.denom();
                lhs.cmp(&rhs)
            }
        }
    }

    /// `floor(self * 2^j)` for a coordinate in `[0,1)`; always in `[0, 2^j)`
    /// and consistent with `cmp_dyadic` boundary semantics.
    pub fn scaled_floor(&self, j: u32) -> u64 {
        match self {
            Coord::Exact(r) => {
                let scaled = (r.numer() << j) / r.denom();
                scaled.to_u64().expect("in range")
            }
            Coord::Approx(v) => {
                let mut idx = (v * 2f64.powi(j as i32)).floor() as i64;
                // rounding in the product can land one box off; fix against
                // the exactly-representable boundaries
                let pow = 2f64.powi(-(j as i32));
                while idx > 0 && *v < idx as f64 * pow {
                    idx -= 1;
                }
                while *v >= (idx + 1) as f64 * pow {
                    idx += 1;
                }
                idx.clamp(0, (1i64 << j) - 1) as u64
            }
        }
    }

    /// `0 <= self < 1`
    pub fn in_unit_half_open(&self) -> bool {
        match self {
            Coord::Approx(v) => v.is_finite() && (0.0..1.0).contains(v),
            Coord::Exact(r) => !r.is_negative() && r < &BigRational::one(),
        }
    }

    /// `0 <= self <= 1`
    pub fn in_unit_closed(&self) -> bool {
        match self {
            Coord::Approx(v) => v.is_finite() && (0.0..=1.0).contains(v),
            Coord::Exact(r) => !r.is_negative() && r <= &BigRational::one(),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // shortest representation that round-trips
            Coord::Approx(v) => write!(f, "{}", v),
        }
    }
}

impl FromStr for Coord {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.parse().map_err(|_| format!("bad numerator {:?}", num))?;
            let den: BigInt = den.parse().map_err(|_| format!("bad denominator {:?}", den))?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Coord::Exact(BigRational::new(num, den)))
        } else {
            let v: f64 = s.parse().map_err(|_| format!("bad decimal {:?}", s))?;
            if !v.is_finite() {
                return Err(format!("non-finite value {:?}", s));
            }
            Ok(Coord::Approx(v))
        }
    }
}

/// Parses a coordinate field, reporting `line` in errors.
pub(crate) fn parse_field(s: &str, line: usize) -> Result<Coord> {
    s.parse().map_err(|msg| Error::Parse { line, msg })
}
