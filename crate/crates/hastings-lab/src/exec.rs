//! Map helpers with an optional data-parallel backend.
//!
//! With the `parallel` feature (on by default) [`par_map`] fans work out over
//! rayon; without it the same call runs sequentially, so callers never branch
//! on the feature themselves. [`seq_map`] is always sequential, for
//! benchmarking the two paths against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cap the rayon pool from the `HASTINGS_LAB_THREADS` environment variable.
/// Safe to call more than once; only the first global initialization wins.
/// A no-op without the `parallel` feature or when the variable is unset.
pub fn configure_threads_from_env() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("HASTINGS_LAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

/// Apply `f` to every item, in parallel when the backend is available.
/// Output order always matches input order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
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

/// Always-sequential counterpart of [`par_map`].
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_and_seq_agree_in_order() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(par_map(&items, f), seq_map(&items, f));
    }

    #[test]
    fn empty_input() {
        let items: Vec<u64> = vec![];
        assert!(par_map(&items, |x| *x).is_empty());
    }
}
