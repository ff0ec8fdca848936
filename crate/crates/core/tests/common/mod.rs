//! Shared oracles, generators of random cases, and property checks.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hyperctrl::hypergraph::{
    adjacency_general, adjacency_uniform, gen_overlap_variant, Hypergraph, OverlapFamily,
};
use hyperctrl::ingest::{build_hypergraph, TimeSeriesMatrix};
use hyperctrl::simulate::{simulate, InputSchedule};
use hyperctrl::{
    reduced_controllability, reduced_controllability_from_matrix, AdjacencyTensor, ControlMatrix,
    Parallelism, RankOptions,
};
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), TestCaseError>;

/// Number of length-`k` tuples over `s` symbols using every symbol, counted
/// by brute force.
pub fn surjective_tuples(k: usize, s: usize) -> usize {
    (0..k)
        .map(|_| 0..s)
        .multi_cartesian_product()
        .filter(|t| t.iter().collect::<BTreeSet<_>>().len() == s)
        .count()
}

/// Dense order-`k` tensor straight from the edge list, first index fastest.
pub fn dense_from_edges(g: &Hypergraph, k: usize) -> Vec<f64> {
    let n = g.n();
    let mut data = vec![0.0; n.pow(k as u32)];
    for (i, e) in g.edges().iter().enumerate() {
        let s = e.len();
        let w = g.weight(i) * s as f64 / surjective_tuples(k, s) as f64;
        for t in (0..k).map(|_| e.iter().copied()).multi_cartesian_product() {
            if t.iter().collect::<BTreeSet<_>>().len() == s {
                data[offset(n, &t)] = w;
            }
        }
    }
    data
}

pub fn offset(n: usize, t: &[usize]) -> usize {
    t.iter().rev().fold(0, |acc, &j| acc * n + j)
}

/// `(A v1 .. v_{k-1})_i = sum A[i, j2, .., jk] v1[j2] .. v_{k-1}[jk]`.
pub fn dense_ttv(data: &[f64], n: usize, k: usize, vs: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for t in (0..k).map(|_| 0..n).multi_cartesian_product() {
        let a = data[offset(n, &t)];
        if a != 0.0 {
            out[t[0]] += a * vs.iter().zip(&t[1..]).map(|(v, &j)| v[j]).product::<f64>();
        }
    }
    out
}

fn svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = f.thin_svd().unwrap();
    let (s, u) = (svd.S(), svd.U());
    let values = (0..s.dim()).map(|i| s[i]).collect();
    (values, DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]))
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    let (sv, _) = svd(m);
    let cut = m.nrows().max(m.ncols()) as f64 * f64::EPSILON * sv[0];
    sv.iter().filter(|&&s| s > cut).count()
}

const ORTH_RTOL: f64 = 1e-9;

fn orth(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let (sv, u) = svd(m);
    // Rounding compounds over the repeated rounds, so a fixed relative cutoff.
    let cut = ORTH_RTOL * sv[0];
    let keep: Vec<DVector<f64>> = (0..sv.len())
        .filter(|&i| sv[i] > cut)
        .map(|i| u.column(i).into_owned())
        .collect();
    if keep.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&keep)
    }
}

fn kron(cols: &[DVector<f64>]) -> DVector<f64> {
    cols[1..].iter().fold(cols[0].clone(), |acc, c| acc.kronecker(c))
}

/// Rank of `C = C_0 + C_1 + ..` iterated literally: `C_q` adds
/// `A_unf (v1 ⊗ .. ⊗ v_{k-1})` for every ordered tuple of spanning vectors
/// of `C_{q-1}`, for `q = 1..=n`.
pub fn dense_subspace_rank(g: &Hypergraph, k: usize, b: &DMatrix<f64>) -> usize {
    let n = g.n();
    let data = dense_from_edges(g, k);
    let unf = DMatrix::from_fn(n, n.pow(k as u32 - 1), |i, c| {
        let mut t = vec![i];
        let mut rest = Vec::new();
        let mut rem = c;
        for _ in 1..k {
            rest.push(rem % n);
            rem /= n;
        }
        rest.reverse();
        t.extend(rest);
        data[offset(n, &t)]
    });
    let mut span = orth(b);
    for _ in 0..n {
        let cols: Vec<DVector<f64>> = (0..span.ncols()).map(|j| span.column(j).into_owned()).collect();
        let mut all = cols.clone();
        if !cols.is_empty() {
            for t in (0..k - 1).map(|_| 0..cols.len()).multi_cartesian_product() {
                let picked: Vec<DVector<f64>> = t.iter().map(|&i| cols[i].clone()).collect();
                all.push(&unf * kron(&picked));
            }
        }
        span = if all.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            orth(&DMatrix::from_columns(&all))
        };
    }
    rank(&span)
}

/// Plain Pearson correlation computed from sums.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let t = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / t, b.iter().sum::<f64>() / t);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// `sqrt(1 - det R)` from a cofactor-expanded determinant.
pub fn direct_rho(signals: &[Vec<f64>], tuple: &[usize]) -> f64 {
    let k = tuple.len();
    let r: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| if a == b { 1.0 } else { pearson(&signals[tuple[a]], &signals[tuple[b]]) })
                .collect()
        })
        .collect();
    fn det(m: &[Vec<f64>]) -> f64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * det(&minor)
            })
            .sum()
    }
    (1.0 - det(&r).clamp(0.0, 1.0)).sqrt()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random hypergraph with edge sizes in `2..=kmax`.
pub fn random_mixed(rng: &mut ChaCha8Rng, n: usize, kmax: usize, edges: usize) -> Hypergraph {
    let mut set = BTreeSet::new();
    for _ in 0..edges {
        let s = rng.random_range(2..=kmax.min(n));
        let mut nodes: Vec<usize> = (0..n).collect();
        for i in 0..s {
            let j = rng.random_range(i..n);
            nodes.swap(i, j);
        }
        let mut e = nodes[..s].to_vec();
        e.sort_unstable();
        set.insert(e);
    }
    Hypergraph::new(n, set.into_iter().collect()).unwrap()
}

/// Random `k`-uniform hypergraph with each candidate kept with probability `p`.
pub fn random_uniform(rng: &mut ChaCha8Rng, n: usize, k: usize, p: f64) -> Hypergraph {
    let edges = (0..n).combinations(k).filter(|_| rng.random::<f64>() < p).collect();
    Hypergraph::new(n, edges).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        nodes.swap(i, j);
    }
    let mut s = nodes[..m].to_vec();
    s.sort_unstable();
    s
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn rank_of(a: &AdjacencyTensor, nodes: &[usize]) -> usize {
    let c = ControlMatrix::new(nodes.to_vec(), a.dim()).unwrap();
    reduced_controllability(a, &c, RankOptions::default()).unwrap().rank()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// A random uniform or mixed case: `(hypergraph, order)`.
fn case(seed: u64, nmax: usize, kmax: usize) -> (Hypergraph, usize) {
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=nmax);
    let k = rng.random_range(2..=kmax.min(n));
    if rng.random::<bool>() {
        let g = random_uniform(&mut rng, n, k, 0.5);
        (g, k)
    } else {
        let edges = rng.random_range(1..=2 * n);
        let g = random_mixed(&mut rng, n, k, edges);
        let order = g.max_cardinality().unwrap_or(2);
        (g, order)
    }
}

pub fn multilinearity(seed: u64) -> Check {
    let (g, _) = case(seed, 7, 5);
    let a = adjacency_general(&g).unwrap();
    let mut rng = seeded(seed ^ 0x5eed);
    let n = a.dim();
    let (alpha, beta) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let v = random_vec(&mut rng, n);
    let w = random_vec(&mut rng, n);
    let rest: Vec<Vec<f64>> = (1..a.order() - 1).map(|_| random_vec(&mut rng, n)).collect();
    let mix: Vec<f64> = v.iter().zip(&w).map(|(x, y)| alpha * x + beta * y).collect();
    let eval = |first: &[f64]| {
        let mut vs: Vec<&[f64]> = vec![first];
        vs.extend(rest.iter().map(Vec::as_slice));
        a.ttv_multi(&vs).unwrap()
    };
    let (lhs, fv, fw) = (eval(&mix), eval(&v), eval(&w));
    for i in 0..n {
        let rhs = alpha * fv[i] + beta * fw[i];
        prop_assert!(close(lhs[i], rhs, 1e-12), "{} vs {}", lhs[i], rhs);
    }
    Ok(())
}

pub fn argument_order_invariance(seed: u64) -> Check {
    let (g, _) = case(seed, 7, 5);
    let a = adjacency_general(&g).unwrap();
    let mut rng = seeded(seed ^ 0xa11);
    let vs: Vec<Vec<f64>> = (0..a.order() - 1).map(|_| random_vec(&mut rng, a.dim())).collect();
    let base = a.ttv_multi(&vs.iter().map(Vec::as_slice).collect::<Vec<_>>()).unwrap();
    for perm in (0..vs.len()).permutations(vs.len()).take(24) {
        let p: Vec<&[f64]> = perm.iter().map(|&i| vs[i].as_slice()).collect();
        let out = a.ttv_multi(&p).unwrap();
        for (x, y) in out.iter().zip(&base) {
            prop_assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
    }
    Ok(())
}

pub fn homogeneity(seed: u64) -> Check {
    let (g, _) = case(seed, 7, 5);
    let a = adjacency_general(&g).unwrap();
    let mut rng = seeded(seed ^ 0x40);
    let x = random_vec(&mut rng, a.dim());
    let c = rng.random_range(-3.0..3.0);
    let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
    let lhs = a.drift(&cx).unwrap();
    let f = c.powi(a.order() as i32 - 1);
    for (l, r) in lhs.iter().zip(a.drift(&x).unwrap()) {
        prop_assert!(close(*l, f * r, 1e-12));
    }
    Ok(())
}

pub fn dense_equivalence(seed: u64) -> Check {
    let (g, k) = case(seed, 5, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let data = dense_from_edges(&g, k);
    let mut rng = seeded(seed ^ 0xde);
    let vs: Vec<Vec<f64>> = (0..k - 1).map(|_| random_vec(&mut rng, g.n())).collect();
    let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
    let fast = a.ttv_multi(&refs).unwrap();
    let slow = dense_ttv(&data, g.n(), k, &refs);
    for (x, y) in fast.iter().zip(&slow) {
        prop_assert!((x - y).abs() <= 1e-13 * (1.0 + y.abs()), "{fast:?} vs {slow:?}");
    }
    // Entry lookup agrees with the dense array, in every index order.
    for t in (0..k).map(|_| 0..g.n()).multi_cartesian_product() {
        prop_assert_eq!(a.entry(&t), data[offset(g.n(), &t)]);
    }
    Ok(())
}

fn adjacency_general_or_uniform(g: &Hypergraph, k: usize) -> AdjacencyTensor {
    if g.is_uniform(k) {
        adjacency_uniform(g, k).unwrap()
    } else {
        hyperctrl::adjacency_general_with_order(g, k).unwrap()
    }
}

/// Error of RK4 at `dt` and `dt / 2` against `x' = x^{k-1}` on one
/// `k`-node edge started at `c (1, .., 1)`; returns the error ratio.
pub fn rk4_error_ratio(k: usize, c: f64, t_end: f64, steps: usize) -> f64 {
    let g = Hypergraph::new(k, vec![(0..k).collect()]).unwrap();
    let a = adjacency_uniform(&g, k).unwrap();
    let p = (k - 2) as f64;
    let exact = (c.powf(-p) - p * t_end).powf(-1.0 / p);
    let err = |dt: f64| {
        let traj = simulate(&a, &ControlMatrix::default(), &vec![c; k], &InputSchedule::zero(0), t_end, dt)
            .unwrap();
        let (t, x) = traj.last().unwrap();
        assert_eq!(*t, t_end);
        (x[0] - exact).abs()
    };
    let dt = t_end / steps as f64;
    err(dt) / err(dt / 2.0)
}

pub fn rk4_order(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let k: usize = rng.random_range(3..=4);
    let c: f64 = rng.random_range(0.5..1.0);
    // Stay well before the blow-up time 1 / ((k - 2) c^{k-2}).
    let blow = 1.0 / ((k - 2) as f64 * c.powi(k as i32 - 2));
    let t_end = rng.random_range(0.3..0.6) * blow;
    let steps = rng.random_range(8..=20);
    let ratio = rk4_error_ratio(k, c, t_end, steps);
    prop_assert!((8.0..=32.0).contains(&ratio), "ratio {ratio} (k={k}, c={c}, T={t_end}, steps={steps})");
    Ok(())
}

pub fn rank_monotonicity(seed: u64) -> Check {
    let (g, k) = case(seed, 8, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let mut rng = seeded(seed ^ 0x30);
    let m = rng.random_range(0..g.n());
    let d = random_subset(&mut rng, g.n(), m);
    let base = rank_of(&a, &d);
    for s in (0..g.n()).filter(|s| !d.contains(s)) {
        let mut ds = d.clone();
        ds.push(s);
        ds.sort_unstable();
        prop_assert!(rank_of(&a, &ds) >= base);
    }
    Ok(())
}

pub fn scale_invariance(seed: u64) -> Check {
    let (g, k) = case(seed, 8, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let mut rng = seeded(seed ^ 0x5ca1e);
    let m = rng.random_range(1..=g.n());
    let nodes = random_subset(&mut rng, g.n(), m);
    let unit = ControlMatrix::new(nodes.clone(), g.n()).unwrap();
    let mut b = unit.to_matrix(g.n());
    for j in 0..m {
        let mut s = rng.random_range(0.1..10.0);
        if rng.random::<bool>() {
            s = -s;
        }
        b.column_mut(j).scale_mut(s);
    }
    let r1 = reduced_controllability(&a, &unit, RankOptions::default()).unwrap();
    let r2 = reduced_controllability_from_matrix(&a, &b, RankOptions::default()).unwrap();
    prop_assert_eq!(r1.rank(), r2.rank());
    prop_assert_eq!(r1.is_full(), r2.is_full());
    Ok(())
}

pub fn permutation_equivariance(seed: u64) -> Check {
    let (g, k) = case(seed, 8, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let mut rng = seeded(seed ^ 0x9e);
    let n = g.n();
    let perm = random_subset(&mut rng, n, n);
    let mut perm = perm;
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let m = rng.random_range(0..=n);
    let nodes = random_subset(&mut rng, n, m);
    let pa = a.permuted(&perm).unwrap();
    let mut pn: Vec<usize> = nodes.iter().map(|&v| perm[v]).collect();
    pn.sort_unstable();
    prop_assert_eq!(rank_of(&a, &nodes), rank_of(&pa, &pn));
    Ok(())
}

pub fn fixed_point(seed: u64) -> Check {
    let (g, k) = case(seed, 8, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let mut rng = seeded(seed ^ 0xf1);
    let m = rng.random_range(0..=g.n());
    let nodes = random_subset(&mut rng, g.n(), m);
    let c = ControlMatrix::new(nodes, g.n()).unwrap();
    let rc = reduced_controllability(&a, &c, RankOptions::default()).unwrap();
    prop_assert_eq!(hyperctrl::controllability::full_round_gain(&a, &rc, RankOptions::default()), 0);
    Ok(())
}

pub fn idempotence(seed: u64) -> Check {
    let (g, k) = case(seed, 8, 4);
    let a = adjacency_general_or_uniform(&g, k);
    let mut rng = seeded(seed ^ 0x1d);
    let m = rng.random_range(0..=g.n());
    let nodes = random_subset(&mut rng, g.n(), m);
    let c = ControlMatrix::new(nodes, g.n()).unwrap();
    let rc = reduced_controllability(&a, &c, RankOptions::default()).unwrap();
    let again = reduced_controllability_from_matrix(&a, &rc.basis(), RankOptions::default()).unwrap();
    prop_assert_eq!(rc.rank(), again.rank());
    Ok(())
}

/// Degrees of the tensor equal edge-membership counts (times weights).
pub fn degree_preservation_uniform(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=8);
    let k = rng.random_range(2..=n.min(5));
    let g = random_uniform(&mut rng, n, k, 0.4);
    let d = adjacency_uniform(&g, k).unwrap().degrees();
    prop_assert_eq!(d, membership(&g));
    Ok(())
}

pub fn degree_preservation_general(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=8);
    let kmax = rng.random_range(2..=n.min(5));
    let edges = rng.random_range(1..=3 * n);
    let g = random_mixed(&mut rng, n, kmax, edges);
    let d = adjacency_general(&g).unwrap().degrees();
    for (x, y) in d.iter().zip(membership(&g)) {
        prop_assert!((x - y).abs() < 1e-12, "{d:?}");
    }
    Ok(())
}

fn membership(g: &Hypergraph) -> Vec<f64> {
    let mut m = vec![0.0; g.n()];
    for e in g.edges() {
        for &v in e {
            m[v] += 1.0;
        }
    }
    m
}

/// Consecutive edges share exactly `r` nodes. In chains, edges `i < j`
/// share `max(0, k - (j - i)(k - r))` nodes, so zero whenever `2r <= k`; in
/// stars every pair shares the `r` internal nodes.
pub fn overlap_property(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let k: usize = rng.random_range(3..=6);
    let r: usize = rng.random_range(1..k);
    let stride = k - r;
    let family = [OverlapFamily::Chain, OverlapFamily::Ring, OverlapFamily::Star][rng.random_range(0..3)];
    let j = rng.random_range(1..=4);
    let n = match family {
        OverlapFamily::Chain => r + stride * j,
        OverlapFamily::Ring => stride * ((k + stride).div_ceil(stride).max(3) + j - 1),
        OverlapFamily::Star => k + stride * (j - 1),
    };
    let g = gen_overlap_variant(n, k, r, family).unwrap();
    let es: Vec<BTreeSet<usize>> = g.edges().iter().map(|e| e.iter().copied().collect()).collect();
    let overlap = |a: usize, b: usize| es[a].intersection(&es[b]).count();
    // Generated windows are emitted in stride order.
    let last = es.len() - 1;
    for i in 0..es.len() {
        prop_assert_eq!(es[i].len(), k);
        for j in i + 1..es.len() {
            match family {
                OverlapFamily::Star => prop_assert_eq!(overlap(i, j), r),
                OverlapFamily::Chain => {
                    prop_assert_eq!(overlap(i, j), k.saturating_sub((j - i) * stride))
                }
                OverlapFamily::Ring if j == i + 1 || (i == 0 && j == last) => {
                    prop_assert_eq!(overlap(i, j), r, "n={} k={} r={} edges {:?}", n, k, r, es)
                }
                OverlapFamily::Ring => {}
            }
        }
    }
    Ok(())
}

/// Channels: latent-driven triples plus noise.
pub fn random_series(rng: &mut ChaCha8Rng, n: usize, t: usize) -> TimeSeriesMatrix {
    let latent = random_vec(rng, t);
    let signals = (0..n)
        .map(|i| {
            let mix = if i % 3 == 0 { 0.0 } else { rng.random_range(0.0..1.0) };
            (0..t)
                .map(|s| mix * latent[s] + (1.0 - mix) * rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    TimeSeriesMatrix::new(signals, None).unwrap()
}

pub fn threshold_monotonicity(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let n = rng.random_range(4..=8);
    let k = rng.random_range(2..=4);
    let x = random_series(&mut rng, n, 60);
    let t1 = rng.random_range(0.0..1.0);
    let t2 = rng.random_range(t1..=1.0);
    let low = build_hypergraph(&x, k, t1, Parallelism::Sequential).unwrap();
    let high = build_hypergraph(&x, k, t2, Parallelism::Sequential).unwrap();
    let low: BTreeSet<_> = low.edges().iter().cloned().collect();
    for e in high.edges() {
        prop_assert!(low.contains(e), "edge {e:?} appears only at the higher threshold");
    }
    Ok(())
}

/// Positive affine maps per channel and tuple reordering leave rho alone.
pub fn correlation_invariance(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=6);
    let k = rng.random_range(2..=n.min(4));
    let x = random_series(&mut rng, n, 80);
    let tuple = random_subset(&mut rng, n, k);
    let base = hyperctrl::multi_correlation(&x, &tuple).unwrap().rho;
    let direct = direct_rho(&(0..n).map(|i| x.signal(i).to_vec()).collect::<Vec<_>>(), &tuple);
    prop_assert!((base - direct).abs() < 1e-10, "{base} vs {direct}");
    let mapped: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (a, b) = (rng.random_range(0.01..100.0), rng.random_range(-50.0..50.0));
            x.signal(i).iter().map(|v| a * v + b).collect()
        })
        .collect();
    let y = TimeSeriesMatrix::new(mapped, None).unwrap();
    let mut shuffled = tuple.clone();
    shuffled.reverse();
    let after = hyperctrl::multi_correlation(&y, &shuffled).unwrap().rho;
    prop_assert!((base - after).abs() < 1e-10, "{base} vs {after}");
    prop_assert!((0.0..=1.0 + 1e-10).contains(&base));
    Ok(())
}

/// Witness validity, greedy >= exact, minimality of the exact value,
/// determinism, and agreement of sequential and parallel evaluation.
pub fn mcn_invariants(seed: u64) -> Check {
    use hyperctrl::mcn::{mcn_exact, mcn_greedy, ExactOptions, GreedyOptions};
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=8);
    let k = rng.random_range(3..=4.min(n));
    let g = random_uniform(&mut rng, n, k, 0.5);
    let a = adjacency_uniform(&g, k).unwrap();
    let seq = RankOptions {
        parallelism: Parallelism::Sequential,
        ..RankOptions::default()
    };
    let exact = mcn_exact(&a, &ExactOptions::default()).unwrap();
    let exact_seq = mcn_exact(&a, &ExactOptions { rank: seq, ..ExactOptions::default() }).unwrap();
    prop_assert_eq!(&exact, &exact_seq);
    let greedy = mcn_greedy(&a, &GreedyOptions::default()).unwrap();
    let greedy_seq = mcn_greedy(&a, &GreedyOptions { rank: seq, ..GreedyOptions::default() }).unwrap();
    prop_assert_eq!(&greedy, &greedy_seq);
    prop_assert_eq!(&greedy, &mcn_greedy(&a, &GreedyOptions::default()).unwrap());
    let (ev, gv) = (exact.value.unwrap(), greedy.value.unwrap());
    prop_assert!(gv >= ev);
    prop_assert_eq!(rank_of(&a, &exact.witness), n);
    let mut gw = greedy.witness.clone();
    gw.sort_unstable();
    prop_assert_eq!(rank_of(&a, &gw), n);
    for smaller in (0..n).combinations(ev - 1) {
        prop_assert!(rank_of(&a, &smaller) < n, "{smaller:?} is full");
    }
    Ok(())
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Kalman rank of `[B, AB, .., A^{n-1} B]` for an unweighted graph, exactly.
pub fn exact_kalman_rank(g: &Hypergraph, controls: &[usize]) -> usize {
    let n = g.n();
    let mut adj = vec![vec![0i128; n]; n];
    for e in g.edges() {
        adj[e[0]][e[1]] = 1;
        adj[e[1]][e[0]] = 1;
    }
    let mut rows = vec![Vec::new(); n];
    for &c in controls {
        let mut v: Vec<i128> = (0..n).map(|i| (i == c) as i128).collect();
        for _ in 0..n {
            for i in 0..n {
                rows[i].push(v[i]);
            }
            v = (0..n).map(|i| (0..n).map(|j| adj[i][j] * v[j]).sum()).collect();
        }
    }
    if controls.is_empty() {
        return 0;
    }
    integer_rank(rows)
}

/// For `k = 2` the reduced rank is the classical Kalman rank.
pub fn linear_kalman(seed: u64) -> Check {
    let mut rng = seeded(seed);
    let n = rng.random_range(2..=9);
    let p = rng.random_range(0.1..0.9);
    let g = random_uniform(&mut rng, n, 2, p);
    let a = adjacency_uniform(&g, 2).unwrap();
    let m = rng.random_range(0..=n.min(3));
    let d = random_subset(&mut rng, n, m);
    prop_assert_eq!(rank_of(&a, &d), exact_kalman_rank(&g, &d), "{:?} controls {:?}", g.edges(), d);
    Ok(())
}
