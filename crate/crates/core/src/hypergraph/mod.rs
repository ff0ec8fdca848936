//! Hypergraph data model and adjacency-tensor construction.

mod generators;
mod io;

pub use generators::{
    gen_complete, gen_hyperchain, gen_hyperring, gen_hyperstar, gen_overlap_variant, gen_random,
    GeneratorError, OverlapFamily,
};
pub use io::{from_json_str, to_json_string, HypergraphIoError};

use thiserror::Error;

use crate::tensor::{binomial, factorial, AdjacencyTensor, TensorError, MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("hypergraph must have at least one node")]
    NoNodes,
    #[error("edge {index} has {len} nodes; edges need between 2 and {max} nodes")]
    Cardinality { index: usize, len: usize, max: usize },
    #[error("edge {index} references node {node}, but there are only {n} nodes")]
    OutOfRange { index: usize, node: usize, n: usize },
    #[error("edge {index} repeats node {node}")]
    RepeatedNode { index: usize, node: usize },
    #[error("edge {index} duplicates edge {first}")]
    DuplicateEdge { index: usize, first: usize },
    #[error("{got} weights supplied for {edges} edges")]
    WeightCount { edges: usize, got: usize },
    #[error("weight of edge {index} must be positive and finite, got {weight}")]
    Weight { index: usize, weight: f64 },
    #[error("edge {index} has {len} nodes, expected a {k}-uniform hypergraph")]
    NotUniform { index: usize, len: usize, k: usize },
    #[error("requested tensor order {order} is below the largest edge cardinality {max}")]
    OrderTooSmall { order: usize, max: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Undirected hypergraph on nodes `0..n` with optional per-edge weights.
///
/// Edges are stored as sorted node sets in the order given; they are pairwise
/// distinct and have cardinality `2..=min(n, MAX_ORDER)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Option<Vec<f64>>,
}

impl Hypergraph {
    /// Validate and build. Each edge is sorted; node order inside an edge does
    /// not matter.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        Self::with_weights(n, edges, None)
    }

    pub fn with_weights(
        n: usize,
        mut edges: Vec<Vec<usize>>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, HypergraphError> {
        if n == 0 {
            return Err(HypergraphError::NoNodes);
        }
        let max = n.min(MAX_ORDER);
        let mut seen = std::collections::HashMap::new();
        for (index, edge) in edges.iter_mut().enumerate() {
            edge.sort_unstable();
            if edge.len() < 2 || edge.len() > max {
                return Err(HypergraphError::Cardinality {
                    index,
                    len: edge.len(),
                    max,
                });
            }
            if let Some(&node) = edge.iter().find(|&&v| v >= n) {
                return Err(HypergraphError::OutOfRange { index, node, n });
            }
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedNode { index, node: w[0] });
            }
            if let Some(&first) = seen.get(edge) {
                return Err(HypergraphError::DuplicateEdge { index, first });
            }
            seen.insert(edge.clone(), index);
        }
        if let Some(w) = &weights {
            if w.len() != edges.len() {
                return Err(HypergraphError::WeightCount {
                    edges: edges.len(),
                    got: w.len(),
                });
            }
            if let Some((index, &weight)) = w
                .iter()
                .enumerate()
                .find(|(_, w)| !(w.is_finite() && **w > 0.0))
            {
                return Err(HypergraphError::Weight { index, weight });
            }
        }
        Ok(Self { n, edges, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Weight of edge `i` (1 when unweighted).
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Largest edge cardinality, or `None` for an edgeless hypergraph.
    pub fn max_cardinality(&self) -> Option<usize> {
        self.edges.iter().map(Vec::len).max()
    }

    /// Whether every edge has exactly `k` nodes.
    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// Number of edges containing each node.
    pub fn membership_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                c[v] += 1;
            }
        }
        c
    }

    /// Edges sorted lexicographically, with weights permuted alongside.
    pub fn canonical(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.edges.len()).collect();
        idx.sort_by(|&a, &b| self.edges[a].cmp(&self.edges[b]));
        Self {
            n: self.n,
            edges: idx.iter().map(|&i| self.edges[i].clone()).collect(),
            weights: self
                .weights
                .as_ref()
                .map(|w| idx.iter().map(|&i| w[i]).collect()),
        }
    }

    /// Sub-hypergraph induced on `nodes` (sorted), relabelled to `0..len`.
    /// Edges not contained in `nodes` are dropped.
    pub fn induced(&self, nodes: &[usize]) -> Result<Self, HypergraphError> {
        let mut map = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            map[v] = i;
        }
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.iter().all(|&v| map[v] != usize::MAX) {
                edges.push(e.iter().map(|&v| map[v]).collect());
                weights.push(self.weight(i));
            }
        }
        let weights = self.weights.as_ref().map(|_| weights);
        Self::with_weights(nodes.len(), edges, weights)
    }
}

/// Per-node degrees as defined by the tensor row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub degrees: Vec<f64>,
}

/// Degree of every node, summing tensor entries over all trailing indices.
pub fn degrees(a: &AdjacencyTensor) -> DegreeProfile {
    DegreeProfile {
        degrees: a.degrees(),
    }
}

/// Order-`k` tensor of a `k`-uniform hypergraph: every permutation of each
/// edge's node tuple carries `w / (k-1)!`, with `w` the edge weight.
pub fn adjacency_uniform(g: &Hypergraph, k: usize) -> Result<AdjacencyTensor, HypergraphError> {
    if let Some((index, e)) = g.edges.iter().enumerate().find(|(_, e)| e.len() != k) {
        return Err(HypergraphError::NotUniform {
            index,
            len: e.len(),
            k,
        });
    }
    let base = 1.0 / factorial(k - 1) as f64;
    let supports = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), g.weight(i) * base));
    Ok(AdjacencyTensor::from_supports(k, g.n, supports)?)
}

/// Tensor of a hypergraph with mixed edge sizes, of order equal to the
/// largest edge cardinality (2 for an edgeless hypergraph).
pub fn adjacency_general(g: &Hypergraph) -> Result<AdjacencyTensor, HypergraphError> {
    adjacency_general_with_order(g, g.max_cardinality().unwrap_or(2))
}

/// Like [`adjacency_general`] with an explicit order `k >= max cardinality`.
///
/// An edge with `s` nodes spreads weight `s / alpha` over each of the `alpha`
/// length-`k` index tuples that use every edge node at least once, so the
/// row sums recover edge-membership counts.
pub fn adjacency_general_with_order(
    g: &Hypergraph,
    k: usize,
) -> Result<AdjacencyTensor, HypergraphError> {
    let max = g.max_cardinality().unwrap_or(0);
    if k < max {
        return Err(HypergraphError::OrderTooSmall { order: k, max });
    }
    let supports = g.edges.iter().enumerate().map(|(i, e)| {
        let s = e.len();
        (e.clone(), g.weight(i) * s as f64 / surjection_count(k, s) as f64)
    });
    Ok(AdjacencyTensor::from_supports(k, g.n, supports)?)
}

/// `alpha = sum over compositions k1 + .. + ks = k (ki >= 1) of k! / (k1! .. ks!)`:
/// the number of length-`k` tuples over `s` symbols using every symbol.
pub fn surjection_count(k: usize, s: usize) -> u128 {
    fn compositions(remaining: usize, parts: usize, denom: u128, k_fact: u128) -> u128 {
        if parts == 1 {
            return k_fact / (denom * factorial(remaining));
        }
        (1..=remaining + 1 - parts)
            .map(|first| {
                compositions(remaining - first, parts - 1, denom * factorial(first), k_fact)
            })
            .sum()
    }
    if s == 0 || s > k {
        return 0;
    }
    compositions(k, s, 1, factorial(k))
}

/// Number of edges a complete `k`-uniform hypergraph on `n` nodes has.
pub fn complete_edge_count(n: usize, k: usize) -> u128 {
    binomial(n, k)
}
