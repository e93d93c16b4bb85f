//! Deterministic data-parallel reductions.
//!
//! Every sum is split into fixed-size chunks, each chunk is reduced pairwise,
//! and the chunk totals are reduced pairwise again. Chunk boundaries do not
//! depend on the thread count, so results are bitwise identical whether the
//! `parallel` feature is on or off and whatever the size of the rayon pool.

use std::convert::Infallible;

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: usize = 256;

/// Pairwise (tree) summation.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        2 => values[0] + values[1],
        len => {
            let (lo, hi) = values.split_at(len / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Sums `f(i)` for `i in 0..len` in a fixed tree order.
pub fn sum_indexed<F>(len: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let total: Result<Complex64, Infallible> = try_sum_chunked(len, |start, end| Ok((start..end).map(&f).collect()));
    total.unwrap_or_else(|never| match never {})
}

/// Sums the values `f(start, end)` returns for consecutive index chunks, in
/// the same tree order as [`sum_indexed`].
pub fn try_sum_chunked<F, E>(len: usize, f: F) -> Result<Complex64, E>
where
    F: Fn(usize, usize) -> Result<Vec<Complex64>, E> + Sync + Send,
    E: Send,
{
    let chunks: Vec<usize> = (0..len.div_ceil(CHUNK)).collect();
    let partial = map_slice(&chunks, |&c| f(c * CHUNK, ((c + 1) * CHUNK).min(len)).map(|v| pairwise_sum(&v)));
    Ok(pairwise_sum(&partial.into_iter().collect::<Result<Vec<_>, E>>()?))
}

/// Order-preserving map over a slice.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_plain_sum_on_integers() {
        let v: Vec<Complex64> = (0..1000).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        assert_eq!(pairwise_sum(&v), Complex64::new(499500.0, -499500.0));
        assert_eq!(sum_indexed(1000, |i| v[i]), Complex64::new(499500.0, -499500.0));
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sum_indexed(0, |_| Complex64::new(1.0, 0.0)), Complex64::new(0.0, 0.0));
    }
}
