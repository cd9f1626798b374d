//! Data-parallel helpers. With the `parallel` feature the maps run on the rayon pool;
//! without it (or after [`set_sequential`]) they run in order on the calling thread.
//! Results are always returned in input order.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force sequential execution at run time (used by the benches to compare both paths).
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Map over `0..n`.
pub fn map_range<R, F>(n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Fold `0..n` in fixed-size chunks; `fold` reduces each chunk, `combine` merges chunk
/// results left to right, so the outcome does not depend on scheduling.
pub fn chunked_reduce<A, F, C>(n: u64, chunk: u64, identity: A, fold: F, combine: C) -> A
where
    A: Send + Clone,
    F: Fn(u64, u64) -> A + Sync + Send,
    C: Fn(A, A) -> A,
{
    let chunks = n.div_ceil(chunk.max(1));
    let parts = map_range(chunks, |i| {
        let lo = i * chunk;
        fold(lo, (lo + chunk).min(n))
    });
    parts.into_iter().fold(identity, combine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results() {
        let v: Vec<u64> = (0..100).collect();
        assert_eq!(map(&v, |x| x * 2), (0..100).map(|x| x * 2).collect::<Vec<_>>());
        let s = chunked_reduce(1000, 7, 0u64, |a, b| (a..b).sum(), |x, y| x + y);
        assert_eq!(s, 999 * 1000 / 2);
    }
}
