//! Data-parallel execution of independent randomized cases.
//!
//! With the `parallel` feature (on by default) [`map_cases`] fans cases out
//! over rayon's pool; without it, or through [`map_cases_sequential`], cases
//! run in order on the calling thread. Either way case `i` draws from stream
//! `i` of the seed, so the returned vector is identical.

use crate::random::{Bounds, Sampler};

pub fn map_cases_sequential<T, F>(seed: u64, count: usize, bounds: Bounds, f: F) -> Vec<T>
where
    F: Fn(usize, &mut Sampler) -> T,
{
    (0..count)
        .map(|i| f(i, &mut Sampler::new(seed, i as u64, bounds)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn map_cases_parallel<T, F>(seed: u64, count: usize, bounds: Bounds, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Sampler) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut Sampler::new(seed, i as u64, bounds)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn map_cases<T, F>(seed: u64, count: usize, bounds: Bounds, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Sampler) -> T + Sync + Send,
{
    map_cases_parallel(seed, count, bounds, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map_cases<T, F>(seed: u64, count: usize, bounds: Bounds, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Sampler) -> T + Sync + Send,
{
    map_cases_sequential(seed, count, bounds, f)
}

/// Parallel map over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_items<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(usize, &I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_items<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(usize, &I) -> T + Sync + Send,
{
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_agree() {
        let b = Bounds::default();
        let seq = map_cases_sequential(11, 64, b, |_, s| s.kernel_poly());
        let any = map_cases(11, 64, b, |_, s| s.kernel_poly());
        assert_eq!(seq, any);
    }
}
