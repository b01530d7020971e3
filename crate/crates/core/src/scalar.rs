//! Numeric abstraction shared by the reference models.
//!
//! Expected-citation arithmetic is a sum of unit fractions `m / |group|`.
//! In floating point these sums drift, which matters for the
//! preferential-draws model where groups are formed by comparing running
//! totals for equality. Every model is therefore generic over [`Scalar`]:
//! `f64` (and `f32`) compare within a tolerance, [`BigRational`] compares
//! exactly.

use std::fmt::Debug;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Scalar type usable for expected citation counts.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + AddAssign + SubAssign + Send + Sync + 'static
{
    /// Exact ratio `num / den` (or its nearest representable value).
    fn ratio(num: u64, den: u64) -> Self;

    fn from_count(n: u64) -> Self {
        Self::ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Equality used when grouping papers by running expected counts.
    /// Floating types use `|a - b| <= eps`; exact types ignore `eps`.
    fn tied(&self, other: &Self, eps: f64) -> bool;

    /// Whether arithmetic is exact.
    fn is_exact() -> bool {
        false
    }

    /// Human-readable exact form, if the type has one.
    fn exact_repr(&self) -> Option<String> {
        None
    }
}

impl Scalar for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tied(&self, other: &Self, eps: f64) -> bool {
        (self - other).abs() <= eps
    }
}

impl Scalar for f32 {
    fn ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn tied(&self, other: &Self, eps: f64) -> bool {
        ((self - other).abs() as f64) <= eps
    }
}

impl Scalar for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tied(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }

    fn is_exact() -> bool {
        true
    }

    fn exact_repr(&self) -> Option<String> {
        Some(self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sums_are_exact() {
        let mut acc = BigRational::ratio(0, 1);
        for _ in 0..3 {
            acc += BigRational::ratio(1, 3);
        }
        assert!(acc.tied(&BigRational::from_count(1), 0.0));
        assert_eq!(acc.exact_repr().as_deref(), Some("1"));
    }

    #[test]
    fn float_tie_uses_tolerance() {
        let a = 0.1 + 0.2;
        assert!(a.tied(&0.3, 1e-9));
        assert!(!a.tied(&0.3, 0.0));
        assert!(1.0f32.tied(&1.0, 0.0));
    }
}
