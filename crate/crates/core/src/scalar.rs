use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Real scalar used throughout the metric and regression code: `f32` or `f64`.
///
/// The loading and pipeline paths always run in `f64`; `f32` is available for
/// callers that already hold single-precision embeddings.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals and tolerances.
    fn of(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("f64 is representable as a float scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sums values after sorting them with a total order, so the result depends
/// only on the multiset of inputs and not on their arrangement.
pub(crate) fn canonical_sum<T: Scalar>(mut values: Vec<T>) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub(crate) fn canonical_mean<T: Scalar>(values: Vec<T>) -> T {
    let n = values.len();
    canonical_sum(values) / T::from_usize(n).expect("length fits in a float")
}
