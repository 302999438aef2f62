//! Numeric abstraction shared by every statistic in the crate.
//!
//! Most quantities here are ratios of counts (mutation rates, agreement
//! fractions, mean tree distances, normalized edit similarity), so they can
//! be evaluated exactly with a rational type as well as with `f32`/`f64`.
//! Quantities that need a square root (cosine similarity, standard errors)
//! additionally require [`FloatScalar`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, Num};

/// A scalar able to represent ratios of non-negative counts.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync + Sum<Self> + 'static {
    fn from_count(n: u64) -> Self;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn to_f64(&self) -> f64;
}

/// A floating-point scalar.
pub trait FloatScalar: Scalar + Float {
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_count(n: u64) -> Self {
        n as f64
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_count(n: u64) -> Self {
        n as f32
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl FloatScalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl FloatScalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
}

macro_rules! rational_scalar {
    ($($int:ty)*) => ($(
        impl Scalar for Ratio<$int> {
            fn from_count(n: u64) -> Self {
                Ratio::from_integer(<$int>::try_from(n).expect("count overflows rational numerator"))
            }

            fn ratio(num: u64, den: u64) -> Self {
                Ratio::new(
                    <$int>::try_from(num).expect("count overflows rational numerator"),
                    <$int>::try_from(den).expect("count overflows rational denominator"),
                )
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*)
}

rational_scalar!(i64 i128);

/// Mean of a non-empty sequence of scalars.
pub fn mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut n = 0u64;
    let mut total = T::zero();
    for v in values {
        total = total + v;
        n += 1;
    }
    (n > 0).then(|| total / T::from_count(n))
}
