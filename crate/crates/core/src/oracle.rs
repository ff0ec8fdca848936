//! Dense reference implementations used as test oracles.
//!
//! Nothing here is meant for production workloads: the tensor is
//! materialized entry by entry and products go through explicit Kronecker
//! vectors. Materialization is refused beyond [`DENSE_ENTRY_LIMIT`] entries.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::{numerical_rank, orthonormal_range};
use crate::tensor::AdjacencyTensor;

pub const DENSE_ENTRY_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("dense tensor would hold {entries} entries (limit {DENSE_ENTRY_LIMIT})")]
pub struct TooLarge {
    pub entries: u128,
}

/// All `n^k` entries of a tensor, stored with the first index fastest.
#[derive(Debug, Clone)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn materialize(a: &AdjacencyTensor) -> Result<Self, TooLarge> {
        let (n, k) = (a.dim(), a.order());
        let entries = (n as u128).pow(k as u32);
        if entries > DENSE_ENTRY_LIMIT {
            return Err(TooLarge { entries });
        }
        let mut data = vec![0.0; entries as usize];
        for tuple in (0..k).map(|_| 0..n).multi_cartesian_product() {
            data[Self::offset(n, &tuple)] = a.entry(&tuple);
        }
        Ok(Self { order: k, dim: n, data })
    }

    fn offset(n: usize, tuple: &[usize]) -> usize {
        tuple.iter().rev().fold(0, |acc, &j| acc * n + j)
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.data[Self::offset(self.dim, tuple)]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Naive product: sum over every index tuple.
    pub fn ttv(&self, vs: &[&[f64]]) -> Vec<f64> {
        assert_eq!(vs.len(), self.order - 1);
        let n = self.dim;
        let mut out = vec![0.0; n];
        for tuple in (0..self.order).map(|_| 0..n).multi_cartesian_product() {
            let entry = self.get(&tuple);
            if entry == 0.0 {
                continue;
            }
            let prod: f64 = vs.iter().zip(&tuple[1..]).map(|(v, &j)| v[j]).product();
            out[tuple[0]] += entry * prod;
        }
        out
    }

    /// Mode-1 unfolding `n x n^{k-1}`, column `(j2, .., jk)` at
    /// `j2 * n^{k-2} + .. + jk`, matching `kron(v1, .., v_{k-1})`.
    pub fn unfold(&self) -> DMatrix<f64> {
        let n = self.dim;
        let cols = n.pow(self.order as u32 - 1);
        DMatrix::from_fn(n, cols, |i, c| {
            let mut tuple = vec![i];
            let mut rest = Vec::with_capacity(self.order - 1);
            let mut rem = c;
            for _ in 1..self.order {
                rest.push(rem % n);
                rem /= n;
            }
            rest.reverse();
            tuple.extend(rest);
            self.get(&tuple)
        })
    }
}

fn kron_all(cols: &[DVector<f64>]) -> DVector<f64> {
    let mut acc = cols[0].clone();
    for c in &cols[1..] {
        acc = acc.kronecker(c);
    }
    acc
}

/// `A_unf (X ⊗ .. ⊗ X)` with explicit Kronecker products of the columns.
pub fn dense_kron_products(unfolded: &DMatrix<f64>, order: usize, x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.ncols();
    let n = unfolded.nrows();
    if m == 0 {
        return DMatrix::zeros(n, 0);
    }
    let cols: Vec<DVector<f64>> = (0..m).map(|j| x.column(j).into_owned()).collect();
    let tuples: Vec<Vec<usize>> = (0..order - 1).map(|_| 0..m).multi_cartesian_product().collect();
    let mut out = DMatrix::zeros(n, tuples.len());
    for (c, t) in tuples.iter().enumerate() {
        let picked: Vec<DVector<f64>> = t.iter().map(|&i| cols[i].clone()).collect();
        let col = unfolded * kron_all(&picked);
        out.column_mut(c).copy_from_slice(col.as_slice());
    }
    out
}

/// Rank of the controllability subspace by iterating its defining recursion:
/// `C_q = span(C_{q-1} ∪ {A v1 .. v_{k-1} : v_l in C_{q-1}})` for
/// `q = 1..=n`, through the dense unfolding and full Kronecker products.
pub fn dense_subspace_rank(dense: &DenseTensor, b: &DMatrix<f64>, tol: Option<f64>) -> usize {
    let unfolded = dense.unfold();
    let mut span = orthonormal_range(b, tol);
    for _ in 0..dense.dim() {
        let products = dense_kron_products(&unfolded, dense.order(), &span);
        let joined = DMatrix::from_fn(span.nrows(), span.ncols() + products.ncols(), |i, j| {
            if j < span.ncols() {
                span[(i, j)]
            } else {
                products[(i, j - span.ncols())]
            }
        });
        span = orthonormal_range(&joined, tol);
    }
    numerical_rank(&span, tol)
}

/// Un-reduced columns of the recursion for `rounds` steps, starting from the
/// columns of `b` and never orthonormalizing. Exact duplicates and zero
/// columns are dropped.
pub fn unreduced_columns(a: &AdjacencyTensor, b: &DMatrix<f64>, rounds: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..b.ncols())
        .map(|j| b.column(j).iter().cloned().collect())
        .collect();
    let slots = a.order() - 1;
    for _ in 0..rounds {
        let mut next = cols.clone();
        for ms in (0..cols.len()).combinations_with_replacement(slots) {
            let vs: Vec<&[f64]> = ms.iter().map(|&i| cols[i].as_slice()).collect();
            let w = a.ttv_multi(&vs).expect("columns have tensor dimension");
            if w.iter().any(|x| *x != 0.0) && !next.contains(&w) {
                next.push(w);
            }
        }
        cols = next;
    }
    cols
}
