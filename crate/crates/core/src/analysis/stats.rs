use crate::scalar::{canonical_mean, Scalar};

pub fn mean<T: Scalar>(xs: &[T]) -> Option<T> {
    (!xs.is_empty()).then(|| canonical_mean(xs.to_vec()))
}

/// Sample standard deviation (n - 1 denominator); `None` below two values.
pub fn sample_stddev<T: Scalar>(xs: &[T]) -> Option<T> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss = canonical_mean(xs.iter().map(|&x| (x - m) * (x - m)).collect::<Vec<_>>())
        * T::from_usize(xs.len()).unwrap();
    Some((ss / T::from_usize(xs.len() - 1).unwrap()).sqrt())
}

pub fn std_error<T: Scalar>(xs: &[T]) -> Option<T> {
    sample_stddev(xs).map(|s| s / T::from_usize(xs.len()).unwrap().sqrt())
}

pub fn min_max<T: Scalar>(xs: &[T]) -> Option<(T, T)> {
    let mut it = xs.iter().copied();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
}
