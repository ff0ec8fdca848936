//! Generators for the named hypergraph families.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Hypergraph;
use crate::tensor::MAX_ORDER;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("need 2 <= k <= n (and k <= {MAX_ORDER}), got n = {n}, k = {k}")]
    Range { n: usize, k: usize },
    #[error("overlap r = {r} must satisfy 0 < r < k = {k}")]
    Overlap { r: usize, k: usize },
    #[error("{family} with k = {k}, r = {r} does not tile n = {n}; feasible n: {feasible}")]
    Tiling {
        family: &'static str,
        n: usize,
        k: usize,
        r: usize,
        feasible: String,
    },
    #[error("density must lie in [0, 1], got {0}")]
    Density(f64),
}

/// Family of an r-overlap variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapFamily {
    Chain,
    Ring,
    Star,
}

impl OverlapFamily {
    fn name(self) -> &'static str {
        match self {
            OverlapFamily::Chain => "r-chain",
            OverlapFamily::Ring => "r-ring",
            OverlapFamily::Star => "r-star",
        }
    }
}

fn check_range(n: usize, k: usize) -> Result<(), GeneratorError> {
    if k < 2 || k > n || k > MAX_ORDER {
        return Err(GeneratorError::Range { n, k });
    }
    Ok(())
}

fn build(n: usize, edges: Vec<Vec<usize>>) -> Hypergraph {
    Hypergraph::new(n, edges).expect("generator produced a valid hypergraph")
}

/// Every `k` consecutive nodes form an edge: `n - k + 1` edges.
pub fn gen_hyperchain(n: usize, k: usize) -> Result<Hypergraph, GeneratorError> {
    check_range(n, k)?;
    Ok(build(n, (0..=n - k).map(|j| (j..j + k).collect()).collect()))
}

/// Cyclic windows of `k` consecutive nodes. Windows that coincide as sets are
/// kept once, so `n == k` yields a single edge.
pub fn gen_hyperring(n: usize, k: usize) -> Result<Hypergraph, GeneratorError> {
    check_range(n, k)?;
    Ok(build(n, cyclic_windows(n, k, 1, n)))
}

fn cyclic_windows(n: usize, k: usize, stride: usize, count: usize) -> Vec<Vec<usize>> {
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        let start = i * stride;
        let mut e: Vec<usize> = (start..start + k).map(|j| j % n).collect();
        e.sort_unstable();
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges
}

/// Internal nodes `0..k-1` shared by every edge, plus one leaf per edge.
pub fn gen_hyperstar(n: usize, k: usize) -> Result<Hypergraph, GeneratorError> {
    // n >= k guarantees at least one leaf.
    check_range(n, k)?;
    let internal: Vec<usize> = (0..k - 1).collect();
    let edges = (k - 1..n)
        .map(|leaf| {
            let mut e = internal.clone();
            e.push(leaf);
            e
        })
        .collect();
    Ok(build(n, edges))
}

/// All `C(n, k)` edges, in lexicographic order.
pub fn gen_complete(n: usize, k: usize) -> Result<Hypergraph, GeneratorError> {
    check_range(n, k)?;
    Ok(build(n, (0..n).combinations(k).collect()))
}

/// Chains, rings and stars whose consecutive edges share exactly `r` nodes.
///
/// Chains and rings advance each window by `k - r` nodes. A chain needs
/// `(n - r) % (k - r) == 0`; a ring needs `n % (k - r) == 0` and at least
/// three edges. Stars share internal nodes `0..r` and give each edge `k - r`
/// fresh leaves, so `(n - k) % (k - r) == 0`. With `r = k - 1` these reduce to
/// [`gen_hyperchain`], [`gen_hyperring`] and [`gen_hyperstar`].
pub fn gen_overlap_variant(
    n: usize,
    k: usize,
    r: usize,
    family: OverlapFamily,
) -> Result<Hypergraph, GeneratorError> {
    check_range(n, k)?;
    if r == 0 || r >= k {
        return Err(GeneratorError::Overlap { r, k });
    }
    if r == k - 1 {
        return match family {
            OverlapFamily::Chain => gen_hyperchain(n, k),
            OverlapFamily::Ring => gen_hyperring(n, k),
            OverlapFamily::Star => gen_hyperstar(n, k),
        };
    }
    let stride = k - r;
    let tiling = |feasible: String| GeneratorError::Tiling {
        family: family.name(),
        n,
        k,
        r,
        feasible,
    };
    let edges = match family {
        OverlapFamily::Chain => {
            if !(n - r).is_multiple_of(stride) {
                return Err(tiling(format!("{k} + {stride}*j for j >= 0")));
            }
            let count = (n - r) / stride;
            (0..count)
                .map(|i| (i * stride..i * stride + k).collect())
                .collect()
        }
        OverlapFamily::Ring => {
            if !n.is_multiple_of(stride) || n / stride < 3 {
                return Err(tiling(format!("{stride}*j for j >= 3")));
            }
            cyclic_windows(n, k, stride, n / stride)
        }
        OverlapFamily::Star => {
            if !(n - k).is_multiple_of(stride) {
                return Err(tiling(format!("{k} + {stride}*j for j >= 0")));
            }
            let count = (n - r) / stride;
            (0..count)
                .map(|i| {
                    let mut e: Vec<usize> = (0..r).collect();
                    e.extend(r + i * stride..r + (i + 1) * stride);
                    e
                })
                .collect()
        }
    };
    Ok(build(n, edges))
}

/// Random `k`-uniform hypergraph: each of the `C(n, k)` candidate edges, taken
/// in lexicographic order, is kept when a ChaCha8 draw (`rand_chacha`,
/// `seed_from_u64(seed)`) of a uniform `f64` in `[0, 1)` falls below
/// `density`. One draw is consumed per candidate.
pub fn gen_random(
    n: usize,
    k: usize,
    density: f64,
    seed: u64,
) -> Result<Hypergraph, GeneratorError> {
    check_range(n, k)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(GeneratorError::Density(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..n)
        .combinations(k)
        .filter(|_| rng.random::<f64>() < density)
        .collect();
    Ok(build(n, edges))
}
