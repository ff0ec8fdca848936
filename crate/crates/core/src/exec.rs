//! Execution policy for the data-parallel inner loops.
//!
//! Every parallel loop in this crate goes through [`map_ordered`], which
//! returns results in input order. Parallel and sequential runs therefore
//! produce identical outputs; only wall time differs.

/// How a batch of independent evaluations is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Run on the calling thread.
    Sequential,
    /// Use the rayon pool when the `parallel` feature is enabled,
    /// otherwise fall back to sequential evaluation.
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether this policy will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Map `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(policy: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = policy;
    items.iter().map(f).collect()
}

/// Index and value of the first item (in input order) for which `f` returns
/// `Some`. Items are evaluated in waves of one item per worker thread, so the
/// sequential policy stops at the first hit.
pub fn find_first_ordered<T, R, F>(policy: Parallelism, items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    let wave = worker_count(policy).max(1);
    for (c, chunk) in items.chunks(wave).enumerate() {
        let hits = map_ordered(policy, chunk, &f);
        if let Some((i, hit)) = hits
            .into_iter()
            .enumerate()
            .find_map(|(i, h)| h.map(|h| (i, h)))
        {
            return Some((c * wave + i, hit));
        }
    }
    None
}

/// Worker threads the policy will use.
pub fn worker_count(policy: Parallelism) -> usize {
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return rayon::current_num_threads();
    }
    let _ = policy;
    1
}
