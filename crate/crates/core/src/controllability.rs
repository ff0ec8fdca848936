//! Reduced controllability matrix, rank verdicts and the column-space
//! check.
//!
//! The controllability subspace is the smallest subspace containing the input
//! columns and closed under `(v1, .., v_{k-1}) -> A v1 .. v_{k-1}`. It is built
//! round by round: each round applies the tensor to multisets of current
//! basis columns, then compresses `[basis | candidates]` back to an
//! orthonormal basis with an SVD of the part of the candidates orthogonal to
//! the basis. Old basis columns are never rotated, so a round only needs the
//! multisets that involve at least one column added by the previous round.
//! The loop stops once a round adds no direction, the rank reaches `n`, or
//! `n` rounds have run.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{map_ordered, Parallelism};
use crate::linalg::{default_cutoff, dot, left_svd, norm, numerical_rank, orthonormal_range};
use crate::linalg::sigma_max_of_columns;
use crate::tensor::{AdjacencyTensor, ControlMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllabilityError {
    #[error("control matrix has {got} rows, tensor dimension is {expected}")]
    Rows { expected: usize, got: usize },
    #[error("control node {node} out of range for {dim} nodes")]
    Node { node: usize, dim: usize },
    #[error("tolerance must be non-negative and finite, got {0}")]
    Tolerance(f64),
}

/// Knobs shared by every rank computation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RankOptions {
    /// Absolute singular-value cutoff. `None` selects, per compression, the
    /// larger of `max(n, cols) * eps * sigma_max` (with `cols` and
    /// `sigma_max` taken over the basis and the new candidates) and the
    /// error propagated into the candidates from earlier rounds.
    pub tol: Option<f64>,
    pub parallelism: Parallelism,
}

impl RankOptions {
    pub fn with_tol(tol: Option<f64>) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ControllabilityError> {
        match self.tol {
            Some(t) if !(t >= 0.0 && t.is_finite()) => Err(ControllabilityError::Tolerance(t)),
            _ => Ok(()),
        }
    }
}

/// Orthonormal basis of the controllability subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedControllabilityMatrix {
    columns: Vec<Vec<f64>>,
    errors: Vec<f64>,
    dim: usize,
    /// Expansion rounds executed, including a final round that added nothing.
    pub iterations: usize,
    /// Cutoff applied in the last compression (0 when nothing was compressed).
    pub tolerance: f64,
}

impl ReducedControllabilityMatrix {
    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n x rank` basis matrix.
    pub fn basis(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.columns.len());
        for (j, c) in self.columns.iter().enumerate() {
            m.column_mut(j).copy_from_slice(c);
        }
        m
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn is_full(&self) -> bool {
        self.columns.len() == self.dim
    }
}

/// Kind of guarantee a full-rank verdict carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    /// Even tensor order: full rank iff strongly controllable.
    StrongControllability,
    /// Odd tensor order: full rank implies accessibility only.
    AccessibilityOnly,
}

impl VerdictKind {
    pub fn for_order(order: usize) -> Self {
        if order.is_multiple_of(2) {
            VerdictKind::StrongControllability
        } else {
            VerdictKind::AccessibilityOnly
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllabilityVerdict {
    pub rank: usize,
    pub n: usize,
    pub full: bool,
    pub kind: VerdictKind,
}

struct Expansion<'a> {
    a: &'a AdjacencyTensor,
    opts: RankOptions,
    columns: Vec<Vec<f64>>,
    /// Estimated absolute error of each basis column.
    errors: Vec<f64>,
    norm_a: f64,
    iterations: usize,
    tolerance: f64,
}

impl<'a> Expansion<'a> {
    fn new(a: &'a AdjacencyTensor, opts: RankOptions) -> Self {
        Self {
            a,
            opts,
            columns: Vec::new(),
            errors: Vec::new(),
            norm_a: a.frobenius_norm(),
            iterations: 0,
            tolerance: 0.0,
        }
    }

    fn from_basis(a: &'a AdjacencyTensor, basis: &ReducedControllabilityMatrix, opts: RankOptions) -> Self {
        Self {
            a,
            opts,
            columns: basis.columns.clone(),
            errors: basis.errors.clone(),
            norm_a: a.frobenius_norm(),
            iterations: basis.iterations,
            tolerance: basis.tolerance,
        }
    }

    /// Add the numerically independent part of `cands`, whose entries carry
    /// absolute errors up to `errs`; returns how many directions were added.
    ///
    /// The default cutoff is the larger of the rounding rule and the norm of
    /// the propagated candidate errors, and a direction taken at singular
    /// value `sigma` inherits error `cutoff / sigma`.
    fn absorb(&mut self, cands: Vec<Vec<f64>>, errs: Vec<f64>) -> usize {
        let n = self.a.dim();
        let (mut cands, errs): (Vec<Vec<f64>>, Vec<f64>) = cands
            .into_iter()
            .zip(errs)
            .filter(|(c, _)| c.iter().any(|x| *x != 0.0))
            .unzip();
        let room = n - self.columns.len();
        if cands.is_empty() || room == 0 {
            return 0;
        }
        let cutoff = self.opts.tol.unwrap_or_else(|| {
            let sigma = sigma_max_of_columns(
                n,
                self.columns.iter().chain(cands.iter()).map(Vec::as_slice),
            );
            let rounding = default_cutoff(n, self.columns.len() + cands.len(), sigma);
            let propagated = errs.iter().map(|e| e * e).sum::<f64>().sqrt();
            rounding.max(propagated)
        });
        self.tolerance = cutoff;

        // Residual against the current basis, projected twice for stability.
        for c in cands.iter_mut() {
            for _ in 0..2 {
                for q in &self.columns {
                    let p = dot(q, c);
                    c.iter_mut().zip(q).for_each(|(ci, qi)| *ci -= p * qi);
                }
            }
        }
        let mut resid = DMatrix::zeros(n, cands.len());
        for (j, c) in cands.iter().enumerate() {
            resid.column_mut(j).copy_from_slice(c);
        }
        let (values, u) = left_svd(&resid);
        let mut added = 0;
        for (i, &sigma) in values.iter().enumerate() {
            if sigma <= cutoff || added == room {
                break;
            }
            let mut v: Vec<f64> = u.column(i).iter().cloned().collect();
            for _ in 0..2 {
                for q in &self.columns {
                    let p = dot(q, &v);
                    v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= p * qi);
                }
            }
            let len = norm(&v);
            if len < 0.5 {
                // Direction numerically inside the span already.
                continue;
            }
            v.iter_mut().for_each(|x| *x /= len);
            self.columns.push(v);
            self.errors.push((cutoff / sigma).min(1.0));
            added += 1;
        }
        added
    }

    /// Candidate columns of one round over multisets whose largest index is
    /// at least `fresh`, with their propagated errors.
    fn candidates(&self, fresh: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let sets = multisets_with_fresh(self.columns.len(), self.a.order() - 1, fresh);
        let a = self.a;
        let cols = &self.columns;
        let cands = map_ordered(self.opts.parallelism, &sets, |ms| {
            let vs: Vec<&[f64]> = ms.iter().map(|&i| cols[i].as_slice()).collect();
            let mut out = vec![0.0; a.dim()];
            a.ttv_into(&vs, &mut out);
            out
        });
        let errs = sets
            .iter()
            .map(|ms| self.norm_a * ms.iter().map(|&i| self.errors[i]).sum::<f64>())
            .collect();
        (cands, errs)
    }

    /// Run rounds until closure, starting from columns `fresh..`.
    fn close(&mut self, mut fresh: usize) {
        let n = self.a.dim();
        let mut rounds = 0;
        while self.columns.len() < n && fresh < self.columns.len() && rounds < n {
            rounds += 1;
            self.iterations += 1;
            let start = self.columns.len();
            let (cands, errs) = self.candidates(fresh);
            let added = self.absorb(cands, errs);
            fresh = start;
            if added == 0 {
                break;
            }
        }
    }

    fn finish(self) -> ReducedControllabilityMatrix {
        ReducedControllabilityMatrix {
            columns: self.columns,
            errors: self.errors,
            dim: self.a.dim(),
            iterations: self.iterations,
            tolerance: self.tolerance,
        }
    }
}

/// All nondecreasing `len`-tuples over `0..s` whose last entry is `>= fresh`,
/// ordered by last entry and then lexicographically.
pub fn multisets_with_fresh(s: usize, len: usize, fresh: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, len: usize, max: usize, out: &mut Vec<Vec<usize>>, last: usize) {
        if prefix.len() == len {
            let mut t = prefix.clone();
            t.push(last);
            out.push(t);
            return;
        }
        let lo = prefix.last().copied().unwrap_or(0);
        for i in lo..=max {
            prefix.push(i);
            rec(prefix, len, max, out, last);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    for last in fresh..s {
        rec(&mut Vec::with_capacity(len), len - 1, last, &mut out, last);
    }
    out
}

fn check_rows(a: &AdjacencyTensor, rows: usize) -> Result<(), ControllabilityError> {
    if rows != a.dim() {
        return Err(ControllabilityError::Rows {
            expected: a.dim(),
            got: rows,
        });
    }
    Ok(())
}

/// Reduced controllability matrix for unit inputs at `controls`.
pub fn reduced_controllability(
    a: &AdjacencyTensor,
    controls: &ControlMatrix,
    opts: RankOptions,
) -> Result<ReducedControllabilityMatrix, ControllabilityError> {
    opts.validate()?;
    let n = a.dim();
    if let Some(&node) = controls.nodes().iter().find(|&&v| v >= n) {
        return Err(ControllabilityError::Node { node, dim: n });
    }
    let mut exp = Expansion::new(a, opts);
    // Distinct unit columns are already orthonormal.
    exp.errors = vec![0.0; controls.len()];
    exp.columns = controls
        .nodes()
        .iter()
        .map(|&v| {
            let mut e = vec![0.0; n];
            e[v] = 1.0;
            e
        })
        .collect();
    exp.close(0);
    Ok(exp.finish())
}

/// Reduced controllability matrix for an arbitrary `n x m` input matrix.
pub fn reduced_controllability_from_matrix(
    a: &AdjacencyTensor,
    b: &DMatrix<f64>,
    opts: RankOptions,
) -> Result<ReducedControllabilityMatrix, ControllabilityError> {
    opts.validate()?;
    check_rows(a, b.nrows())?;
    let mut exp = Expansion::new(a, opts);
    let cols = (0..b.ncols())
        .map(|j| b.column(j).iter().cloned().collect())
        .collect();
    let errs = vec![0.0; b.ncols()];
    exp.absorb(cols, errs);
    exp.close(0);
    Ok(exp.finish())
}

/// Warm start: the subspace generated by an already closed basis plus extra
/// input columns. Only products involving the new directions are evaluated.
pub fn extend_controllability(
    a: &AdjacencyTensor,
    closed: &ReducedControllabilityMatrix,
    extra: &[Vec<f64>],
    opts: RankOptions,
) -> Result<ReducedControllabilityMatrix, ControllabilityError> {
    opts.validate()?;
    if let Some(c) = extra.iter().find(|c| c.len() != a.dim()) {
        return Err(ControllabilityError::Rows {
            expected: a.dim(),
            got: c.len(),
        });
    }
    let mut exp = Expansion::from_basis(a, closed, opts);
    let fresh = exp.columns.len();
    exp.absorb(extra.to_vec(), vec![0.0; extra.len()]);
    exp.close(fresh);
    Ok(exp.finish())
}

/// Directions one full expansion round over *all* multisets of `basis`
/// columns would add. Zero for a closed basis.
pub fn full_round_gain(
    a: &AdjacencyTensor,
    basis: &ReducedControllabilityMatrix,
    opts: RankOptions,
) -> usize {
    let mut exp = Expansion::from_basis(a, basis, opts);
    let (cands, errs) = exp.candidates(0);
    exp.absorb(cands, errs)
}

/// Candidate columns of one expansion round over `columns`, keyed by the
/// multiset of column indices that produced them. Multisets are restricted to
/// those with largest index `>= fresh`.
pub fn expansion_candidates(
    a: &AdjacencyTensor,
    columns: &[Vec<f64>],
    fresh: usize,
) -> Vec<(Vec<usize>, Vec<f64>)> {
    let mut exp = Expansion::new(a, RankOptions::default());
    exp.columns = columns.to_vec();
    exp.errors = vec![0.0; columns.len()];
    let sets = multisets_with_fresh(columns.len(), a.order() - 1, fresh);
    let (cols, _) = exp.candidates(fresh);
    sets.into_iter().zip(cols).collect()
}

/// Rank verdict for unit inputs at `controls`.
pub fn verdict(
    a: &AdjacencyTensor,
    controls: &ControlMatrix,
    opts: RankOptions,
) -> Result<ControllabilityVerdict, ControllabilityError> {
    let rc = reduced_controllability(a, controls, opts)?;
    Ok(ControllabilityVerdict {
        rank: rc.rank(),
        n: a.dim(),
        full: rc.is_full(),
        kind: VerdictKind::for_order(a.order()),
    })
}

/// Whether `A (X ⊗ .. ⊗ X)` and `A (U ⊗ .. ⊗ U)` share a column space, with
/// `U` the left singular vectors of `X` at its numerical rank. Decided by
/// comparing each rank with the rank of the concatenation.
pub fn lemma1_check(a: &AdjacencyTensor, x: &DMatrix<f64>, tol: Option<f64>) -> bool {
    assert_eq!(x.nrows(), a.dim(), "X must have one row per node");
    let u = orthonormal_range(x, tol);
    let p = kron_products(a, x);
    let q = kron_products(a, &u);
    let rp = numerical_rank(&p, tol);
    let rq = numerical_rank(&q, tol);
    let both = DMatrix::from_fn(a.dim(), p.ncols() + q.ncols(), |i, j| {
        if j < p.ncols() {
            p[(i, j)]
        } else {
            q[(i, j - p.ncols())]
        }
    });
    let rpq = numerical_rank(&both, tol);
    rp == rq && rq == rpq
}

/// `A (X ⊗ .. ⊗ X)`: one column per ordered `(k-1)`-tuple of columns of `X`.
fn kron_products(a: &AdjacencyTensor, x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.ncols();
    let slots = a.order() - 1;
    let cols: Vec<Vec<f64>> = (0..m).map(|j| x.column(j).iter().cloned().collect()).collect();
    let count = m.pow(slots as u32);
    let mut out = DMatrix::zeros(a.dim(), if m == 0 { 0 } else { count });
    if m == 0 {
        return out;
    }
    let mut idx = vec![0usize; slots];
    let mut buf = vec![0.0; a.dim()];
    for c in 0..count {
        let mut rem = c;
        for slot in idx.iter_mut().rev() {
            *slot = rem % m;
            rem /= m;
        }
        let vs: Vec<&[f64]> = idx.iter().map(|&i| cols[i].as_slice()).collect();
        a.ttv_into(&vs, &mut buf);
        out.column_mut(c).copy_from_slice(&buf);
    }
    out
}
