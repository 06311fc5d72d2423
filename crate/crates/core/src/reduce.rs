//! Deterministic data-parallel map and reduction.
//!
//! Every reduction in the crate goes through here. Items are mapped (in
//! parallel with the `parallel` feature, sequentially otherwise) into a vector
//! that keeps input order, then summed by a fixed pairwise tree. The tree
//! shape depends only on the item count, so sums are bit-identical across
//! thread counts and across the two backends.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Leaf size of the pairwise summation tree.
const LEAF: usize = 8;

/// Maps `0..len` through `f`, preserving order.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps a slice through `f`, preserving order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Pairwise (cascade) summation with a fixed tree shape.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `Σ_{i<len} f(i)` with parallel evaluation and deterministic summation.
pub fn sum_range<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    pairwise_sum(&map_range(len, f))
}

/// Maximum of `f(i)` over `0..len`; `0.0` for an empty range. NaN propagates.
pub fn max_range<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_range(len, f)
        .into_iter()
        .fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn tree_shape_only_depends_on_length() {
        let v: Vec<f64> = (0..777).map(|i| (i as f64 * 0.37).sin() * 1e-3 + 1.0).collect();
        let a = sum_range(v.len(), |i| v[i]);
        let b = pairwise_sum(&v);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn max_handles_nan_and_empty() {
        assert_eq!(max_range(0, |_| 1.0), 0.0);
        assert!(max_range(3, |i| if i == 1 { f64::NAN } else { 1.0 }).is_nan());
        assert_eq!(max_range(4, |i| i as f64), 3.0);
    }
}
