//! Data-parallel helpers. With the `parallel` feature these run on rayon;
//! without it they are plain sequential loops with identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
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

/// Maps `f` over `0..n`, preserving order.
pub fn range_collect<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps `f` over `0..n` and keeps the smallest `Some` result. Ties resolve to
/// the smaller value under `Ord`, so the answer does not depend on scheduling.
pub fn range_min<R, F>(n: usize, f: F) -> Option<R>
where
    R: Send + Ord,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter_map(f).min()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter_map(f).min()
    }
}

/// Returns the result for the smallest `i` in `0..n` with `f(i) = Some(_)`.
/// Indices are evaluated in blocks so later work is skipped once a hit is
/// known; the answer is the same as a sequential scan.
pub fn first_in_order<R, F>(n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let block = (4 * rayon::current_num_threads()).max(1);
        let mut start = 0;
        while start < n {
            let end = (start + block).min(n);
            let hit = (start..end).into_par_iter().map(&f).find_first(|r| r.is_some()).flatten();
            if hit.is_some() {
                return hit;
            }
            start = end;
        }
        None
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(f)
    }
}

/// Runs `f` with at most `workers` threads when parallelism is enabled.
/// `workers == 0` uses the global pool.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if workers > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return pool.install(f);
            }
        }
        f()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

/// True when compiled with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_preserve_order_and_min() {
        let v: Vec<usize> = (0..100).collect();
        assert_eq!(map_collect(&v, |x| x * 2), (0..100).map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(range_collect(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
        assert_eq!(range_min(50, |i| (i % 7 == 3).then_some((10 - i as i64).abs())), Some(0));
        assert_eq!(range_min(10, |_| None::<u8>), None);
        assert_eq!(with_workers(2, || 7), 7);
        assert_eq!(first_in_order(1000, |i| (i >= 37 && i % 5 == 0).then_some(i)), Some(40));
        assert_eq!(first_in_order(10, |_| None::<u8>), None);
    }
}
