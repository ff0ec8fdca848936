//! Minimum number of control nodes (MCN): exact search, greedy selection,
//! closed forms for the named families and component decomposition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::controllability::{
    extend_controllability, reduced_controllability, ControllabilityError, RankOptions,
    ReducedControllabilityMatrix,
};
use crate::exec::{find_first_ordered, map_ordered};
use crate::hypergraph::{adjacency_general_with_order, Hypergraph, HypergraphError};
use crate::tensor::{AdjacencyTensor, ControlMatrix};

/// Default cap on `n` for exhaustive search.
pub const DEFAULT_EXACT_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McnError {
    #[error("exact search is limited to {limit} nodes, got {n}; use the greedy method")]
    TooLarge { n: usize, limit: usize },
    #[error("no remaining node raises the rank {rank} < {n}; the rank tolerance is likely too loose")]
    RankStalled { rank: usize, n: usize },
    #[error(transparent)]
    Controllability(#[from] ControllabilityError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Greedy,
}

/// One greedy step: the node added and the rank reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankStep {
    pub node: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McnResult {
    /// `None` when even controlling every node does not reach full rank.
    pub value: Option<usize>,
    pub witness: Vec<usize>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_trace: Option<Vec<RankStep>>,
    /// Every minimum control set, when exhaustive enumeration was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_witnesses: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub rank: RankOptions,
    pub max_nodes: usize,
    /// Also collect every minimum control set.
    pub enumerate_all: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            rank: RankOptions::default(),
            max_nodes: DEFAULT_EXACT_LIMIT,
            enumerate_all: false,
        }
    }
}

/// How greedy resolves equal rank gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Highest degree, then lowest index.
    #[default]
    Degree,
    /// Lowest index.
    Index,
    /// Uniformly among the tied nodes, from a ChaCha8 stream seeded once.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreedyOptions {
    pub rank: RankOptions,
    pub tie_break: TieBreak,
}

fn unit(n: usize, v: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[v] = 1.0;
    e
}

/// Subsets held per breadth-first level before switching to depth-first
/// descent from the frontier.
const LEVEL_CAP: usize = 20_000;

/// Exhaustive search: for `m = 1, 2, ..` scan the size-`m` node subsets in
/// lexicographic order and return the first reaching rank `n`.
///
/// Each subset's subspace is obtained by extending the subspace of its
/// prefix. Levels are built breadth first while they stay small, then the
/// remaining sizes are searched depth first below the last level. Subsets
/// are dropped once some connected component can no longer receive a
/// control node.
pub fn mcn_exact(a: &AdjacencyTensor, opts: &ExactOptions) -> Result<McnResult, McnError> {
    let n = a.dim();
    if n > opts.max_nodes {
        return Err(McnError::TooLarge {
            n,
            limit: opts.max_nodes,
        });
    }
    let search = Search::new(a, opts.rank);
    let policy = opts.rank.parallelism;
    let found = |m: usize, witness: Vec<usize>, all: Option<Vec<Vec<usize>>>| McnResult {
        value: Some(m),
        witness,
        method: Method::Exact,
        rank_trace: None,
        all_witnesses: all,
    };

    let mut level = vec![Node {
        prefix: Vec::new(),
        closure: search.empty()?,
    }];
    let mut depth = 0;
    while depth < n {
        let width: usize = level.iter().map(|p| n - p.next_start()).sum();
        if width > LEVEL_CAP {
            break;
        }
        depth += 1;
        let children = map_ordered(policy, &level, |p| search.children(p, None));
        level = children.into_iter().flatten().collect();
        if let Some(hit) = level.iter().position(|c| c.closure.is_full()) {
            let all = opts.enumerate_all.then(|| {
                level
                    .iter()
                    .filter(|c| c.closure.is_full())
                    .map(|c| c.prefix.clone())
                    .collect()
            });
            return Ok(found(depth, level[hit].prefix.clone(), all));
        }
    }

    for m in depth + 1..=n {
        let hit = find_first_ordered(policy, &level, |p| search.first_full(p, m));
        if let Some((_, witness)) = hit {
            let all = opts.enumerate_all.then(|| {
                map_ordered(policy, &level, |p| {
                    let mut out = Vec::new();
                    search.all_full(p, m, &mut out);
                    out
                })
                .into_iter()
                .flatten()
                .collect()
            });
            return Ok(found(m, witness, all));
        }
    }
    Ok(McnResult {
        value: None,
        witness: Vec::new(),
        method: Method::Exact,
        rank_trace: None,
        all_witnesses: None,
    })
}

/// A node subset with the closed subspace its unit inputs generate.
struct Node {
    prefix: Vec<usize>,
    closure: ReducedControllabilityMatrix,
}

impl Node {
    fn next_start(&self) -> usize {
        self.prefix.last().map_or(0, |&v| v + 1)
    }
}

struct Search<'a> {
    a: &'a AdjacencyTensor,
    rank: RankOptions,
    labels: Vec<usize>,
    component_count: usize,
    /// Largest node of each component.
    component_max: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(a: &'a AdjacencyTensor, rank: RankOptions) -> Self {
        let comps = a.components();
        let labels = a.component_labels();
        let component_max = comps.iter().map(|c| *c.last().expect("nonempty")).collect();
        // Inner loops run sequentially; parallelism is spent across branches.
        let rank = RankOptions {
            parallelism: crate::exec::Parallelism::Sequential,
            ..rank
        };
        Self {
            a,
            rank,
            labels,
            component_count: comps.len(),
            component_max,
        }
    }

    fn empty(&self) -> Result<ReducedControllabilityMatrix, McnError> {
        Ok(reduced_controllability(
            self.a,
            &ControlMatrix::default(),
            self.rank,
        )?)
    }

    /// Can `prefix` still be completed to cover every component, within
    /// `target` nodes when a target is given?
    fn feasible(&self, prefix: &[usize], target: Option<usize>) -> bool {
        let last = *prefix.last().expect("nonempty prefix");
        let mut covered = vec![false; self.component_count];
        for &v in prefix {
            covered[self.labels[v]] = true;
        }
        let mut missing = 0;
        for (c, &is_covered) in covered.iter().enumerate() {
            if !is_covered {
                if self.component_max[c] <= last {
                    return false;
                }
                missing += 1;
            }
        }
        target.is_none_or(|m| missing <= m - prefix.len())
    }

    /// Feasible one-node extensions of `p`, in increasing order of the new
    /// node, leaving room for a subset of size `target`.
    fn children(&self, p: &Node, target: Option<usize>) -> Vec<Node> {
        let n = self.a.dim();
        let end = target.map_or(n, |m| n + 1 - (m - p.prefix.len()));
        (p.next_start()..end)
            .filter_map(|v| {
                let mut prefix = p.prefix.clone();
                prefix.push(v);
                if !self.feasible(&prefix, target) {
                    return None;
                }
                let mut e = vec![0.0; n];
                e[v] = 1.0;
                let closure = extend_controllability(self.a, &p.closure, &[e], self.rank)
                    .expect("validated options and dimensions");
                Some(Node { prefix, closure })
            })
            .collect()
    }

    /// First lexicographic completion of `p` to a full-rank set of size `m`.
    fn first_full(&self, p: &Node, m: usize) -> Option<Vec<usize>> {
        if p.prefix.len() == m {
            return p.closure.is_full().then(|| p.prefix.clone());
        }
        self.children(p, Some(m))
            .iter()
            .find_map(|c| self.first_full(c, m))
    }

    fn all_full(&self, p: &Node, m: usize, out: &mut Vec<Vec<usize>>) {
        if p.prefix.len() == m {
            if p.closure.is_full() {
                out.push(p.prefix.clone());
            }
            return;
        }
        for c in self.children(p, Some(m)) {
            self.all_full(&c, m, out);
        }
    }
}

/// Greedy selection: repeatedly add the node with the largest rank gain,
/// resolving ties per `opts.tie_break`, until the rank reaches `n`.
pub fn mcn_greedy(a: &AdjacencyTensor, opts: &GreedyOptions) -> Result<McnResult, McnError> {
    let n = a.dim();
    let degrees = a.degrees();
    let mut rng = match opts.tie_break {
        TieBreak::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut current = reduced_controllability(a, &ControlMatrix::default(), opts.rank)?;
    let mut chosen: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let mut in_set = vec![false; n];
    while current.rank() < n {
        let candidates: Vec<usize> = (0..n).filter(|&v| !in_set[v]).collect();
        let base = &current;
        let extended = map_ordered(opts.rank.parallelism, &candidates, |&v| {
            extend_controllability(a, base, &[unit(n, v)], RankOptions {
                parallelism: crate::exec::Parallelism::Sequential,
                ..opts.rank
            })
        });
        let extended: Vec<ReducedControllabilityMatrix> =
            extended.into_iter().collect::<Result<_, _>>()?;
        let best_rank = extended.iter().map(|r| r.rank()).max().unwrap_or(0);
        if best_rank <= current.rank() {
            return Err(McnError::RankStalled {
                rank: current.rank(),
                n,
            });
        }
        let tied: Vec<usize> = (0..candidates.len())
            .filter(|&i| extended[i].rank() == best_rank)
            .collect();
        let pick = match opts.tie_break {
            TieBreak::Index => tied[0],
            TieBreak::Degree => {
                let top = tied
                    .iter()
                    .map(|&i| degrees[candidates[i]])
                    .fold(f64::NEG_INFINITY, f64::max);
                *tied
                    .iter()
                    .find(|&&i| degrees[candidates[i]] >= top - 1e-9 * top.abs().max(1.0))
                    .expect("nonempty ties")
            }
            TieBreak::Random(_) => {
                let rng = rng.as_mut().expect("seeded for random ties");
                tied[rng.random_range(0..tied.len())]
            }
        };
        let node = candidates[pick];
        in_set[node] = true;
        chosen.push(node);
        current = extended.into_iter().nth(pick).expect("index in range");
        trace.push(RankStep {
            node,
            rank: current.rank(),
        });
    }
    Ok(McnResult {
        value: Some(chosen.len()),
        witness: chosen,
        method: Method::Greedy,
        rank_trace: Some(trace),
        all_witnesses: None,
    })
}

/// Named family for closed-form MCN values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Chain,
    Ring,
    Star,
    Complete,
    RChain,
    RRing,
    RStar,
}

/// Closed-form MCN where one is known, `None` outside the validity range.
///
/// Chains give `k - 1`; rings `k - 1` for `k >= 4`, `n > k + 1`; stars `n - 2`
/// for `n > k`; complete hypergraphs `n - 1`. Overlap variants are tabulated
/// for `k` in `{3, 4}` at sizes where the windows tile exactly (`r` is ignored
/// by the non-variant families).
pub fn mcn_predicted(family: Family, n: usize, k: usize, r: usize) -> Option<usize> {
    if k < 2 || k > n {
        return None;
    }
    match family {
        Family::Chain => Some(k - 1),
        Family::Ring => (k >= 4 && n > k + 1).then_some(k - 1),
        Family::Star => (n > k).then(|| n - 2),
        Family::Complete => Some(n - 1),
        Family::RChain | Family::RRing | Family::RStar => {
            if !(k == 3 || k == 4) || r == 0 || r >= k {
                return None;
            }
            let stride = k - r;
            let tiles = match family {
                Family::RChain => (n - r).is_multiple_of(stride),
                Family::RRing => n.is_multiple_of(stride) && n / stride >= 3,
                _ => (n - k).is_multiple_of(stride),
            };
            if !tiles {
                return None;
            }
            match (k, r, family) {
                (4, 1, Family::RChain) | (4, 1, Family::RStar) => Some((2 * n + 1) / 3),
                (4, 1, Family::RRing) => Some(2 * n / 3),
                (4, 2, _) => Some((n + 2) / 2),
                (3, 1, Family::RChain) | (3, 1, Family::RStar) => Some(n.div_ceil(2)),
                (3, 1, Family::RRing) => Some(n / 2),
                (3, 2, Family::RChain) => Some(2),
                // 3-uniform 2-hyperrings are hyperrings; tabulated as 2.
                (3, 2, Family::RRing) => (n > k + 1).then_some(2),
                (3, 2, Family::RStar) => (n > k).then(|| n - 2),
                (4, 3, Family::RChain) => mcn_predicted(Family::Chain, n, k, r),
                (4, 3, Family::RRing) => mcn_predicted(Family::Ring, n, k, r),
                (4, 3, Family::RStar) => mcn_predicted(Family::Star, n, k, r),
                _ => None,
            }
        }
    }
}

/// A connected component with its node labels in the parent hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub hypergraph: Hypergraph,
}

/// Components under hyperedge reachability, ordered by smallest node.
pub fn connected_components(g: &Hypergraph) -> Vec<Component> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in g.edges() {
        let r0 = find(&mut parent, e[0]);
        for &v in &e[1..] {
            let r = find(&mut parent, v);
            if r != r0 {
                let (lo, hi) = (r.min(r0), r.max(r0));
                parent[hi] = lo;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..g.n() {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut comps: Vec<Component> = groups
        .into_values()
        .map(|nodes| Component {
            hypergraph: g.induced(&nodes).expect("induced subgraph of a valid hypergraph"),
            nodes,
        })
        .collect();
    comps.sort_by_key(|c| c.nodes[0]);
    comps
}

/// Per-component MCN summed over the hypergraph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposedMcn {
    pub value: Option<usize>,
    /// Union of the component witnesses, sorted.
    pub witness: Vec<usize>,
    pub method: Method,
    pub components: Vec<ComponentMcn>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentMcn {
    pub nodes: Vec<usize>,
    /// Witness and trace in parent labels.
    pub result: McnResult,
}

/// Which MCN procedure to run on each component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McnMethod {
    Exact(ExactOptions),
    Greedy(GreedyOptions),
}

/// Split into components, solve each on the adjacency tensor restricted to
/// it (keeping the global tensor order), and sum.
pub fn mcn_by_components(g: &Hypergraph, method: McnMethod) -> Result<DecomposedMcn, McnError> {
    let order = g.max_cardinality().unwrap_or(2);
    let mut total = Some(0usize);
    let mut witness = Vec::new();
    let mut components = Vec::new();
    for comp in connected_components(g) {
        let result = if comp.nodes.len() == 1 {
            McnResult {
                value: Some(1),
                witness: vec![0],
                method: match method {
                    McnMethod::Exact(_) => Method::Exact,
                    McnMethod::Greedy(_) => Method::Greedy,
                },
                rank_trace: matches!(method, McnMethod::Greedy(_))
                    .then(|| vec![RankStep { node: 0, rank: 1 }]),
                all_witnesses: match method {
                    McnMethod::Exact(o) if o.enumerate_all => Some(vec![vec![0]]),
                    _ => None,
                },
            }
        } else {
            let a = adjacency_general_with_order(&comp.hypergraph, order)?;
            match method {
                McnMethod::Exact(o) => mcn_exact(&a, &o)?,
                McnMethod::Greedy(o) => mcn_greedy(&a, &o)?,
            }
        };
        let relabel = |v: &usize| comp.nodes[*v];
        let result = McnResult {
            witness: result.witness.iter().map(relabel).collect(),
            rank_trace: result.rank_trace.map(|t| {
                t.into_iter()
                    .map(|s| RankStep {
                        node: comp.nodes[s.node],
                        rank: s.rank,
                    })
                    .collect()
            }),
            all_witnesses: result
                .all_witnesses
                .map(|ws| ws.iter().map(|w| w.iter().map(relabel).collect()).collect()),
            ..result
        };
        total = total.zip(result.value).map(|(t, v)| t + v);
        witness.extend(result.witness.iter().copied());
        components.push(ComponentMcn {
            nodes: comp.nodes,
            result,
        });
    }
    witness.sort_unstable();
    Ok(DecomposedMcn {
        value: total,
        witness,
        method: match method {
            McnMethod::Exact(_) => Method::Exact,
            McnMethod::Greedy(_) => Method::Greedy,
        },
        components,
    })
}
