//! Structural graph analyses: strongly connected components, cycle sign
//! detection, and the cycle parameters used by the probability bound.

use crate::error::{Error, Result};
use crate::game::{GameGraph, VertexId};

/// Iterative Tarjan. Components are emitted in reverse topological order
/// of the condensation: a component appears before every component that
/// can reach it (sinks first).
pub(crate) fn tarjan_sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut sccs = Vec::new();
    // Explicit DFS frames: (vertex, next successor position).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    sccs.push(comp);
                }
            }
        }
    }
    sccs
}

fn game_adjacency(g: &GameGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n_vertices()];
    for v in g.vertices() {
        adj[v.0] = g.successors(v).map(|(d, _)| d.0).collect();
    }
    adj
}

/// Strongly connected components of the game graph, sinks first.
pub fn sccs(g: &GameGraph) -> Vec<Vec<VertexId>> {
    tarjan_sccs(&game_adjacency(g))
        .into_iter()
        .map(|c| c.into_iter().map(VertexId).collect())
        .collect()
}

/// True iff some cycle lying entirely inside `scc` has negative weight.
pub fn scc_has_negative_cycle(g: &GameGraph, scc: &[VertexId]) -> bool {
    let inside = {
        let mut m = vec![false; g.n_vertices()];
        for v in scc {
            m[v.0] = true;
        }
        m
    };
    let edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .filter(|e| inside[e.src.0] && inside[e.dst.0])
        .map(|e| (e.src.0, e.dst.0, e.weight))
        .collect();
    has_cycle(g.n_vertices(), &edges, Sign::Negative)
}

pub(crate) enum Sign {
    /// A cycle of weight < 0.
    Negative,
    /// A cycle of weight > 0.
    Positive,
    /// A cycle of weight >= 0.
    NonNegative,
}

/// Bellman-Ford style detection over an explicit edge list. Every vertex
/// starts at distance 0 (implicit super-source), so cycles anywhere in the
/// graph are found. Distances are kept in i128: they are bounded by
/// n * max|w'| and the NonNegative reduction scales weights by n + 1.
pub(crate) fn has_cycle(n: usize, edges: &[(usize, usize, i64)], sign: Sign) -> bool {
    if n == 0 || edges.is_empty() {
        return false;
    }
    // A cycle of weight >= 0 on w exists iff a cycle of weight > 0 exists
    // on w * (n+1) + 1: scaling keeps strictly negative cycles negative
    // (their weight is <= -1, so scaled <= -(n+1) + n < 0) while zero
    // cycles become positive.
    let (maximize, scaled): (bool, Vec<(usize, usize, i128)>) = match sign {
        Sign::Negative => (false, edges.iter().map(|&(a, b, w)| (a, b, w as i128)).collect()),
        Sign::Positive => (true, edges.iter().map(|&(a, b, w)| (a, b, w as i128)).collect()),
        Sign::NonNegative => (
            true,
            edges
                .iter()
                .map(|&(a, b, w)| (a, b, w as i128 * (n as i128 + 1) + 1))
                .collect(),
        ),
    };
    let mut dist = vec![0i128; n];
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, w) in &scaled {
            let cand = dist[a] + w;
            let better = if maximize { cand > dist[b] } else { cand < dist[b] };
            if better {
                dist[b] = cand;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
    }
    // Still relaxing after n rounds: an improving cycle exists.
    let mut extra = false;
    for &(a, b, w) in &scaled {
        let cand = dist[a] + w;
        if (maximize && cand > dist[b]) || (!maximize && cand < dist[b]) {
            extra = true;
            break;
        }
    }
    extra
}

/// Cycle parameters of a game graph.
///
/// `c` bounds the length of every elementary cycle, `w_minus` is a positive
/// lower bound on the absolute weight of every negative elementary cycle,
/// and `w_plus` is an upper bound on the weight of every elementary cycle
/// of weight >= 0 (0 when there is none). Safe mode instantiates the
/// trivially valid bounds c = |V|, w_minus = 1, w_plus = |V| * W; exact
/// mode enumerates the elementary cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphParams {
    pub c: usize,
    pub w_minus: i64,
    pub w_plus: i64,
    pub exact: bool,
}

/// Vertex-count cap for exact parameter computation.
pub const EXACT_PARAMS_VERTEX_CAP: usize = 12;
/// Budget on the number of elementary cycles visited in exact mode.
const CYCLE_ENUM_BUDGET: u64 = 1_000_000;

pub fn graph_params(g: &GameGraph, exact: bool) -> Result<GraphParams> {
    graph_params_with_cap(g, exact, EXACT_PARAMS_VERTEX_CAP)
}

pub fn graph_params_with_cap(g: &GameGraph, exact: bool, cap: usize) -> Result<GraphParams> {
    let n = g.n_vertices();
    if !exact {
        let w_plus = (n as i64)
            .checked_mul(g.max_abs_weight())
            .ok_or_else(|| Error::CapExceeded("|V| * W overflows".into()))?;
        return Ok(GraphParams { c: n, w_minus: 1, w_plus, exact: false });
    }
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "exact cycle parameters need |V| <= {cap}, got {n}"
        )));
    }
    let mut stats = CycleStats::default();
    enumerate_cycles(g, &mut stats)?;
    Ok(GraphParams {
        c: stats.max_len,
        w_minus: stats.max_negative_weight.map_or(1, |w| -w),
        w_plus: stats.max_nonneg_weight.unwrap_or(0),
        exact: true,
    })
}

#[derive(Default)]
struct CycleStats {
    max_len: usize,
    max_negative_weight: Option<i64>,
    max_nonneg_weight: Option<i64>,
    visited: u64,
}

impl CycleStats {
    fn record(&mut self, len: usize, weight: i64) -> Result<()> {
        self.visited += 1;
        if self.visited > CYCLE_ENUM_BUDGET {
            return Err(Error::CapExceeded("too many elementary cycles".into()));
        }
        self.max_len = self.max_len.max(len);
        if weight < 0 {
            let cur = self.max_negative_weight.get_or_insert(weight);
            *cur = (*cur).max(weight);
        } else {
            let cur = self.max_nonneg_weight.get_or_insert(weight);
            *cur = (*cur).max(weight);
        }
        Ok(())
    }
}

/// Enumerates every elementary cycle exactly once: each cycle is found
/// from its smallest vertex, visiting only larger vertices in between.
fn enumerate_cycles(g: &GameGraph, stats: &mut CycleStats) -> Result<()> {
    let n = g.n_vertices();
    let mut on_path = vec![false; n];
    for start in 0..n {
        let mut path: Vec<(usize, std::vec::IntoIter<(VertexId, i64)>, i64)> = Vec::new();
        let iter = g.successors(VertexId(start)).collect::<Vec<_>>().into_iter();
        path.push((start, iter, 0));
        on_path[start] = true;
        while let Some((v, iter, weight_so_far)) = path.last_mut() {
            let (v, weight_so_far) = (*v, *weight_so_far);
            match iter.next() {
                Some((dst, w)) => {
                    if dst.0 == start {
                        stats.record(path.len(), weight_so_far + w)?;
                    } else if dst.0 > start && !on_path[dst.0] {
                        let iter = g.successors(dst).collect::<Vec<_>>().into_iter();
                        on_path[dst.0] = true;
                        path.push((dst.0, iter, weight_so_far + w));
                    }
                }
                None => {
                    on_path[v] = false;
                    path.pop();
                }
            }
        }
        on_path[start] = false;
    }
    Ok(())
}
