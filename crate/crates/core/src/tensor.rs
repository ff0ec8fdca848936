//! Sparse supersymmetric adjacency tensors and tensor-vector products.
//!
//! A tensor of order `k` over `n` nodes is stored as a list of *supports*:
//! sorted sets of distinct node indices, each with a per-tuple coefficient.
//! An index tuple `(j1, .., jk)` carries the coefficient of the support equal
//! to the set `{j1, .., jk}`, and zero when no such support is stored. This
//! lookup rule makes every stored tensor supersymmetric by construction.
//!
//! Node indices are 0-based throughout the library API. File formats and the
//! CLI use 1-based indices and convert at the boundary.

use std::collections::HashMap;

use thiserror::Error;

/// Largest tensor order (and hyperedge cardinality) supported.
pub const MAX_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("tensor order {0} is outside the supported range 2..={MAX_ORDER}")]
    Order(usize),
    #[error("tensor dimension must be at least 1")]
    EmptyDimension,
    #[error("support {index} is invalid: {reason}")]
    Support { index: usize, reason: String },
    #[error("expected {expected} vectors for an order-{order} tensor, got {got}")]
    VectorCount {
        order: usize,
        expected: usize,
        got: usize,
    },
    #[error("vector {index} has length {got}, expected {expected}")]
    VectorLength {
        index: usize,
        expected: usize,
        got: usize,
    },
}

/// One stored support of the tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorEdge {
    nodes: Vec<usize>,
    coeff: f64,
}

impl TensorEdge {
    /// Sorted node indices of the support.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Coefficient carried by every index tuple whose node set is this support.
    pub fn coeff(&self) -> f64 {
        self.coeff
    }
}

/// Sparse supersymmetric order-`k`, dimension-`n` tensor.
#[derive(Debug, Clone)]
pub struct AdjacencyTensor {
    order: usize,
    dim: usize,
    edges: Vec<TensorEdge>,
    lookup: HashMap<Vec<usize>, usize>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for AdjacencyTensor {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.dim == other.dim && self.edges == other.edges
    }
}

impl AdjacencyTensor {
    /// Build a tensor from `(support, per-tuple coefficient)` pairs.
    ///
    /// Supports must be strictly increasing, in range, of cardinality at most
    /// `order`, and pairwise distinct. Coefficients must be finite.
    pub fn from_supports<I>(order: usize, dim: usize, supports: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(TensorError::Order(order));
        }
        if dim == 0 {
            return Err(TensorError::EmptyDimension);
        }
        let mut edges = Vec::new();
        let mut lookup = HashMap::new();
        let mut incidence = vec![Vec::new(); dim];
        for (index, (nodes, coeff)) in supports.into_iter().enumerate() {
            let bad = |reason: String| TensorError::Support { index, reason };
            if nodes.is_empty() || nodes.len() > order {
                return Err(bad(format!(
                    "cardinality {} not in 1..={order}",
                    nodes.len()
                )));
            }
            if nodes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad("nodes must be strictly increasing".into()));
            }
            if let Some(&last) = nodes.last() {
                if last >= dim {
                    return Err(bad(format!("node {last} out of range for dimension {dim}")));
                }
            }
            if !coeff.is_finite() {
                return Err(bad(format!("non-finite coefficient {coeff}")));
            }
            if lookup.contains_key(&nodes) {
                return Err(bad("duplicate support".into()));
            }
            let id = edges.len();
            for &v in &nodes {
                incidence[v].push(id);
            }
            lookup.insert(nodes.clone(), id);
            edges.push(TensorEdge { nodes, coeff });
        }
        Ok(Self {
            order,
            dim,
            edges,
            lookup,
            incidence,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[TensorEdge] {
        &self.edges
    }

    /// Entry at an arbitrary index tuple of length `order`.
    pub fn entry(&self, tuple: &[usize]) -> f64 {
        assert_eq!(tuple.len(), self.order, "tuple length must equal the tensor order");
        let mut set = tuple.to_vec();
        set.sort_unstable();
        set.dedup();
        self.lookup
            .get(&set)
            .map_or(0.0, |&id| self.edges[id].coeff)
    }

    /// Tensor-vector product with `order - 1` vectors:
    /// `w[j1] = sum A[j1, j2, .., jk] * vs[0][j2] * .. * vs[k-2][jk]`.
    pub fn ttv_multi(&self, vs: &[&[f64]]) -> Result<Vec<f64>, TensorError> {
        self.check_vectors(vs)?;
        let mut out = vec![0.0; self.dim];
        self.ttv_into(vs, &mut out);
        Ok(out)
    }

    /// Homogeneous drift field `A x^{k-1}`.
    pub fn drift(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        let vs = vec![x; self.order - 1];
        self.ttv_multi(&vs)
    }

    fn check_vectors(&self, vs: &[&[f64]]) -> Result<(), TensorError> {
        if vs.len() != self.order - 1 {
            return Err(TensorError::VectorCount {
                order: self.order,
                expected: self.order - 1,
                got: vs.len(),
            });
        }
        for (index, v) in vs.iter().enumerate() {
            if v.len() != self.dim {
                return Err(TensorError::VectorLength {
                    index,
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// Accumulate the product into `out` (which is overwritten).
    /// Lengths are assumed valid.
    pub(crate) fn ttv_into(&self, vs: &[&[f64]], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let slots = vs.len();

        // Only supports touching the nonzero pattern of the sparsest factor
        // can contribute.
        let mut sparsest: Option<(usize, usize)> = None;
        for (l, v) in vs.iter().enumerate() {
            let nnz = v.iter().filter(|x| **x != 0.0).count();
            if nnz == 0 {
                return;
            }
            if sparsest.is_none_or(|(_, best)| nnz < best) {
                sparsest = Some((l, nnz));
            }
        }
        let mut vals = [[0.0f64; MAX_ORDER]; MAX_ORDER];
        let mut visit = |edge: &TensorEdge, out: &mut [f64]| {
            let s = edge.nodes.len();
            for (l, v) in vs.iter().enumerate() {
                let mut any = false;
                for (p, &node) in edge.nodes.iter().enumerate() {
                    let x = v[node];
                    vals[l][p] = x;
                    any |= x != 0.0;
                }
                if !any {
                    return;
                }
            }
            let full: u32 = (1u32 << s) - 1;
            for (p, &pivot) in edge.nodes.iter().enumerate() {
                let required = full & !(1u32 << p);
                let sum = if s == slots + 1 {
                    permanent(&vals, slots, p)
                } else {
                    covering_sum(&vals, slots, s, required, 0, 0)
                };
                if sum != 0.0 {
                    out[pivot] += edge.coeff * sum;
                }
            }
        };

        let Some((l_star, nnz)) = sparsest else {
            return;
        };
        if nnz * 4 < self.dim {
            let mut ids: Vec<usize> = vs[l_star]
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .flat_map(|(node, _)| self.incidence[node].iter().copied())
                .collect();
            ids.sort_unstable();
            ids.dedup();
            for id in ids {
                visit(&self.edges[id], out);
            }
        } else {
            for edge in &self.edges {
                visit(edge, out);
            }
        }
    }

    /// Degree of every node: `d[j] = sum over j2..jk of A[j, j2, .., jk]`.
    ///
    /// Evaluated per support by counting the index tuples that start at `j`
    /// and realize the support, via inclusion-exclusion.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for edge in &self.edges {
            let count = tuples_covering(self.order - 1, edge.nodes.len()) as f64;
            for &v in &edge.nodes {
                d[v] += edge.coeff * count;
            }
        }
        d
    }

    /// Frobenius norm, `sqrt(sum of A[j1, .., jk]^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let s = e.nodes.len();
                let tuples = s as f64 * tuples_covering(self.order - 1, s) as f64;
                tuples * e.coeff * e.coeff
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Connected components of the support structure, each a sorted node
    /// list, ordered by smallest node. Isolated nodes are singletons.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for edge in &self.edges {
            let root = find(&mut parent, edge.nodes[0]);
            for &v in &edge.nodes[1..] {
                let r = find(&mut parent, v);
                if r != root {
                    let (lo, hi) = if r < root { (r, root) } else { (root, r) };
                    parent[hi] = lo;
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for v in 0..self.dim {
            let r = find(&mut parent, v);
            let next = groups.len();
            let g = *slot.entry(r).or_insert(next);
            if g == groups.len() {
                groups.push(Vec::new());
            }
            groups[g].push(v);
        }
        groups
    }

    /// Component id of each node, matching the order of [`Self::components`].
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.dim];
        for (c, nodes) in self.components().iter().enumerate() {
            for &v in nodes {
                label[v] = c;
            }
        }
        label
    }

    /// The sub-tensor induced on `nodes` (sorted, distinct), relabelled to
    /// `0..nodes.len()`. Supports that leave the node set are dropped.
    pub fn restrict(&self, nodes: &[usize]) -> Result<Self, TensorError> {
        let mut map = vec![usize::MAX; self.dim];
        for (i, &v) in nodes.iter().enumerate() {
            map[v] = i;
        }
        let supports = self.edges.iter().filter_map(|e| {
            let relabelled: Option<Vec<usize>> = e
                .nodes
                .iter()
                .map(|&v| (map[v] != usize::MAX).then_some(map[v]))
                .collect();
            relabelled.map(|r| (r, e.coeff))
        });
        Self::from_supports(self.order, nodes.len(), supports)
    }

    /// Relabel nodes: node `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, TensorError> {
        assert_eq!(perm.len(), self.dim);
        let supports = self.edges.iter().map(|e| {
            let mut nodes: Vec<usize> = e.nodes.iter().map(|&v| perm[v]).collect();
            nodes.sort_unstable();
            (nodes, e.coeff)
        });
        Self::from_supports(self.order, self.dim, supports)
    }
}

/// Permanent of the `slots x slots` block of `vals` whose columns are the
/// support positions other than `skip`.
fn permanent(vals: &[[f64; MAX_ORDER]; MAX_ORDER], slots: usize, skip: usize) -> f64 {
    let mut cols = [0usize; MAX_ORDER];
    let mut c = 0;
    for p in 0..=slots {
        if p != skip {
            cols[c] = p;
            c += 1;
        }
    }
    let v = |l: usize, i: usize| vals[l][cols[i]];
    match slots {
        1 => v(0, 0),
        2 => v(0, 0) * v(1, 1) + v(0, 1) * v(1, 0),
        3 => {
            v(0, 0) * (v(1, 1) * v(2, 2) + v(1, 2) * v(2, 1))
                + v(0, 1) * (v(1, 0) * v(2, 2) + v(1, 2) * v(2, 0))
                + v(0, 2) * (v(1, 0) * v(2, 1) + v(1, 1) * v(2, 0))
        }
        _ => permanent_rec(vals, &cols[..slots], 0, 0),
    }
}

fn permanent_rec(vals: &[[f64; MAX_ORDER]; MAX_ORDER], cols: &[usize], depth: usize, used: u32) -> f64 {
    if depth == cols.len() {
        return 1.0;
    }
    let mut sum = 0.0;
    for (i, &p) in cols.iter().enumerate() {
        if used & (1 << i) != 0 {
            continue;
        }
        let x = vals[depth][p];
        if x != 0.0 {
            sum += x * permanent_rec(vals, cols, depth + 1, used | (1 << i));
        }
    }
    sum
}

/// Sum over `slots`-tuples of support positions whose set covers `required`
/// of the product `vals[0][p0] * vals[1][p1] * ..`.
fn covering_sum(
    vals: &[[f64; MAX_ORDER]; MAX_ORDER],
    slots: usize,
    width: usize,
    required: u32,
    depth: usize,
    covered: u32,
) -> f64 {
    if depth == slots {
        return if covered & required == required { 1.0 } else { 0.0 };
    }
    let remaining = slots - depth;
    let mut sum = 0.0;
    for p in 0..width {
        let x = vals[depth][p];
        if x == 0.0 {
            continue;
        }
        let next = covered | (1u32 << p);
        let missing = (required & !next).count_ones() as usize;
        if missing > remaining - 1 {
            continue;
        }
        sum += x * covering_sum(vals, slots, width, required, depth + 1, next);
    }
    sum
}

/// Number of `len`-tuples over an alphabet of `s` symbols that use each of a
/// fixed `s - 1` symbols at least once.
pub(crate) fn tuples_covering(len: usize, s: usize) -> u128 {
    // sum_i (-1)^i C(s-1, i) (s - i)^len
    let mut total: i128 = 0;
    for i in 0..s {
        let term = binomial(s - 1, i) as i128 * ((s - i) as i128).pow(len as u32);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u128
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Columns of `B`: one unit input per listed node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlMatrix {
    nodes: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ControlError {
    #[error("control node {node} out of range for {dim} nodes")]
    OutOfRange { node: usize, dim: usize },
    #[error("control node {0} listed more than once")]
    Duplicate(usize),
}

impl ControlMatrix {
    pub fn new(nodes: Vec<usize>, dim: usize) -> Result<Self, ControlError> {
        let mut seen = vec![false; dim];
        for &v in &nodes {
            if v >= dim {
                return Err(ControlError::OutOfRange { node: v, dim });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(ControlError::Duplicate(v));
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Dense `dim x m` matrix with standard basis columns.
    pub fn to_matrix(&self, dim: usize) -> nalgebra::DMatrix<f64> {
        let mut b = nalgebra::DMatrix::zeros(dim, self.nodes.len());
        for (j, &v) in self.nodes.iter().enumerate() {
            b[(v, j)] = 1.0;
        }
        b
    }
}
