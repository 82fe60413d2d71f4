//! Scalar abstraction shared by the tree-map and matrix code.
//!
//! Everything in this crate is generic over [`Scalar`]. The exact
//! instantiation ([`BigRational`]) is the one the library is designed around;
//! `Rational64` and `f64` are supported for quick experiments, with the usual
//! caveats (overflow for the former, rounding for the latter).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field-like number type used for coordinates, weights and matrix entries.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Converts a finite float, exactly when the type allows it.
    fn from_f64(x: f64) -> Option<Self>;

    fn ratio(numer: i64, denom: i64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    /// `true` when the value is an integer.
    fn is_integral(&self) -> bool;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator or denominator too large for a direct conversion
            let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for Rational64 {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        <Rational64 as FromPrimitive>::from_f64(x)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

/// Total order for sorting; incomparable values (NaN) compare equal.
pub fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub(crate) fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

pub(crate) fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// Writes a rational as `p/q` in lowest terms (integers as `n/1`).
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `n`.
pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n = BigInt::from_str_radix(n, 10).ok()?;
    let d = BigInt::from_str_radix(d, 10).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
