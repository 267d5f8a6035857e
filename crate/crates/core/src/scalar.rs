//! Scalar types for distances and scales.
//!
//! Every metric computation in the crate is generic over [`Scalar`]. Graph and
//! word metrics are usually run with exact rationals ([`Rational64`]) so that
//! chain thresholds compare exactly; point clouds use `f64` (or `f32`).

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::Add;

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A totally ordered (on the values we produce) numeric type usable as a
/// distance or scale.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + ToPrimitive + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Slack accepted when validating the triangle inequality.
    fn triangle_slack() -> Self;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    /// Conversion used for reporting and for real-valued side computations.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn triangle_slack() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn triangle_slack() -> Self {
        1e-5
    }
}

impl Scalar for Rational64 {
    fn triangle_slack() -> Self {
        Rational64::zero()
    }
}

impl Scalar for i64 {
    fn triangle_slack() -> Self {
        0
    }
}

/// A non-negative extended real: a finite value or `+∞`.
///
/// The derived order puts every finite value below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Extended<T> {
    pub fn zero() -> Self {
        Extended::Finite(T::zero())
    }

    pub fn from_count(n: u64) -> Self {
        Extended::Finite(T::from_count(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `self <= r` for a finite scale `r`.
    pub fn le_scale(&self, r: T) -> bool {
        match self {
            Extended::Finite(v) => *v <= r,
            Extended::Infinite => false,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64_lossy(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T: Scalar> From<T> for Extended<T> {
    fn from(v: T) -> Self {
        Extended::Finite(v)
    }
}

impl<T: Scalar> Add for Extended<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl<T: Scalar> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Parses a scale written as an integer, a decimal, or `p/q`.
pub fn parse_scalar<T: Scalar>(text: &str) -> Option<T> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        if den == 0 {
            return None;
        }
        return Some(T::from_i64(num)? / T::from_i64(den)?);
    }
    if let Ok(n) = text.parse::<i64>() {
        return T::from_i64(n);
    }
    let value: f64 = text.parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    // Decimals go through their exact digit string so rationals stay exact.
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.len() <= 12 && frac_part.chars().all(|c| c.is_ascii_digit()) {
            let digits = format!("{int_part}{frac_part}");
            if let Ok(n) = digits.parse::<i64>() {
                let den = 10i64.pow(frac_part.len() as u32);
                return Some(T::from_i64(n)? / T::from_i64(den)?);
            }
        }
    }
    T::from_f64(value)
}
