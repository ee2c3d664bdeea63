//! Game graphs for two-player zero-sum shortest-path games.
//!
//! A game is played on a finite directed graph whose vertices are
//! partitioned between a minimizer, a maximizer and a set of target
//! vertices. Edges carry integer weights and only leave non-target
//! vertices; every non-target vertex has at least one outgoing edge, so
//! the only way a play stops is by entering a target. The payoff of a
//! play that reaches a target is the sum of the weights seen before the
//! first target visit; Min tries to make it small, Max to make it large.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::values::ExtValue;

/// Index of a vertex inside its [`GameGraph`]. Ids are assigned in
/// declaration order and are dense in `0..n_vertices()`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Min,
    Max,
    Target,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: i64,
}

/// Largest admissible |weight|; keeps every value computation inside `i64`
/// (finite values are bounded by (|V|-1)·W and |V| is capped below).
pub const MAX_WEIGHT: i64 = 1 << 40;
/// Largest admissible vertex count.
pub const MAX_VERTICES: usize = 1 << 20;

/// A validated shortest-path game graph.
#[derive(Clone, Debug)]
pub struct GameGraph {
    names: Vec<String>,
    owners: Vec<Owner>,
    edges: Vec<Edge>,
    /// Outgoing edge indices per vertex, in edge declaration order.
    succ: Vec<Vec<usize>>,
    by_name: HashMap<String, VertexId>,
}

impl PartialEq for GameGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.owners == other.owners && self.edges == other.edges
    }
}
impl Eq for GameGraph {}

pub fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl GameGraph {
    /// Builds a game from named vertices and edges, checking every
    /// structural invariant: names well-formed and unique, weights within
    /// bounds, no parallel edge for an ordered pair, no edge out of a
    /// target, and no deadlocked non-target vertex.
    pub fn new(vertices: Vec<(String, Owner)>, edges: Vec<(VertexId, VertexId, i64)>) -> Result<Self> {
        if vertices.len() > MAX_VERTICES {
            return Err(Error::InvalidGame(format!(
                "too many vertices ({} > {MAX_VERTICES})",
                vertices.len()
            )));
        }
        let mut by_name = HashMap::new();
        let mut names = Vec::with_capacity(vertices.len());
        let mut owners = Vec::with_capacity(vertices.len());
        for (i, (name, owner)) in vertices.into_iter().enumerate() {
            if !valid_name(&name) {
                return Err(Error::InvalidGame(format!(
                    "vertex name {name:?} is not of the form [A-Za-z0-9_]+"
                )));
            }
            if by_name.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::InvalidGame(format!("duplicate vertex {name:?}")));
            }
            names.push(name);
            owners.push(owner);
        }
        let n = names.len();
        let mut succ = vec![Vec::new(); n];
        let mut seen_pair = HashMap::new();
        let mut out = Vec::with_capacity(edges.len());
        for (src, dst, weight) in edges {
            for v in [src, dst] {
                if v.0 >= n {
                    return Err(Error::InvalidGame(format!("edge endpoint {v} out of range")));
                }
            }
            if owners[src.0] == Owner::Target {
                return Err(Error::InvalidGame(format!(
                    "edge out of target vertex {:?}",
                    names[src.0]
                )));
            }
            if weight.unsigned_abs() > MAX_WEIGHT as u64 {
                return Err(Error::InvalidGame(format!(
                    "weight {weight} exceeds the supported bound {MAX_WEIGHT}"
                )));
            }
            if seen_pair.insert((src, dst), weight).is_some() {
                return Err(Error::InvalidGame(format!(
                    "parallel edge {:?} -> {:?}",
                    names[src.0], names[dst.0]
                )));
            }
            succ[src.0].push(out.len());
            out.push(Edge { src, dst, weight });
        }
        for v in 0..n {
            if owners[v] != Owner::Target && succ[v].is_empty() {
                return Err(Error::InvalidGame(format!(
                    "non-target vertex {:?} has no outgoing edge",
                    names[v]
                )));
            }
        }
        Ok(GameGraph { names, owners, edges: out, succ, by_name })
    }

    pub fn n_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n_vertices()).map(VertexId)
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.owners[v.0]
    }

    pub fn is_target(&self, v: VertexId) -> bool {
        self.owners[v.0] == Owner::Target
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn find(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Successors of `v` with edge weights, in declaration order.
    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, i64)> + '_ {
        self.succ[v.0].iter().map(|&e| (self.edges[e].dst, self.edges[e].weight))
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.succ[v.0].len()
    }

    pub fn edge_weight(&self, src: VertexId, dst: VertexId) -> Option<i64> {
        self.successors(src).find(|&(d, _)| d == dst).map(|(_, w)| w)
    }

    /// W: largest absolute edge weight (0 for an edgeless game).
    pub fn max_abs_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.weight.abs()).max().unwrap_or(0)
    }

    pub fn targets(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.is_target(v))
    }

    /// Bound (|V|-1)·W outside which a finite value cannot lie.
    pub fn finite_value_bound(&self) -> i64 {
        (self.n_vertices() as i64 - 1).max(0) * self.max_abs_weight()
    }

    /// Restriction of the game to `keep`, dropping removed vertices and all
    /// incident edges. Returns the sub-game together with the map from old
    /// ids to new ids. Fails if the restriction deadlocks a kept vertex.
    pub fn restrict(&self, keep: &[bool]) -> Result<(GameGraph, Vec<Option<VertexId>>)> {
        assert_eq!(keep.len(), self.n_vertices());
        let mut remap = vec![None; self.n_vertices()];
        let mut vertices = Vec::new();
        for v in self.vertices() {
            if keep[v.0] {
                remap[v.0] = Some(VertexId(vertices.len()));
                vertices.push((self.names[v.0].clone(), self.owners[v.0]));
            }
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            if let (Some(s), Some(d)) = (remap[e.src.0], remap[e.dst.0]) {
                edges.push((s, d, e.weight));
            }
        }
        Ok((GameGraph::new(vertices, edges)?, remap))
    }
}

/// A finite path in the game. The sequence is non-empty; consecutive
/// vertices must be joined by edges, and a target may only appear as the
/// final vertex (targets have no outgoing edges, so the parser-level check
/// is for the non-final positions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub vertices: Vec<VertexId>,
}

impl Play {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        assert!(!vertices.is_empty(), "a play has at least one vertex");
        Play { vertices }
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges taken.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, g: &GameGraph) -> Result<()> {
        for v in &self.vertices {
            if v.0 >= g.n_vertices() {
                return Err(Error::InvalidStrategy(format!("play vertex {v} out of range")));
            }
        }
        for w in self.vertices.windows(2) {
            if g.edge_weight(w[0], w[1]).is_none() {
                return Err(Error::InvalidStrategy(format!(
                    "play step {:?} -> {:?} is not an edge",
                    g.name(w[0]),
                    g.name(w[1])
                )));
            }
        }
        Ok(())
    }

    /// Sum of the edge weights along the play.
    pub fn total_weight(&self, g: &GameGraph) -> Result<i64> {
        self.check(g)?;
        let mut sum = 0i64;
        for w in self.vertices.windows(2) {
            let weight = g.edge_weight(w[0], w[1]).unwrap();
            sum = sum
                .checked_add(weight)
                .ok_or_else(|| Error::CapExceeded("play weight overflows i64".into()))?;
        }
        Ok(sum)
    }
}

/// Total payoff of a finite play: the weight sum when the play ends at a
/// target, and the +infinity marker otherwise (a finite non-reaching play
/// stands for a truncation of a play that never reaches the targets).
pub fn total_payoff(g: &GameGraph, p: &Play) -> Result<ExtValue> {
    let sum = p.total_weight(g)?;
    if g.is_target(p.last()) {
        Ok(ExtValue::Finite(sum))
    } else {
        Ok(ExtValue::PlusInf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rejects_duplicate_vertex() {
        let err = GameGraph::new(
            vec![("a".into(), Owner::Target), ("a".into(), Owner::Min)],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn rejects_deadlock() {
        let err = GameGraph::new(
            vec![("a".into(), Owner::Min), ("t".into(), Owner::Target)],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("no outgoing edge"));
    }

    #[test]
    fn rejects_edge_out_of_target() {
        let err = GameGraph::new(
            vec![("a".into(), Owner::Min), ("t".into(), Owner::Target)],
            vec![(VertexId(0), VertexId(1), 0), (VertexId(1), VertexId(0), 0)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("out of target"));
    }

    #[test]
    fn rejects_parallel_edges() {
        let err = GameGraph::new(
            vec![("a".into(), Owner::Min), ("t".into(), Owner::Target)],
            vec![(VertexId(0), VertexId(1), 0), (VertexId(0), VertexId(1), 2)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("parallel edge"));
    }

    #[test]
    fn rejects_bad_name() {
        let err = GameGraph::new(vec![("bad name".into(), Owner::Target)], vec![]).unwrap_err();
        assert!(err.to_string().contains("A-Za-z0-9_"));
    }

    #[test]
    fn self_loops_are_allowed() {
        let g = GameGraph::new(
            vec![("a".into(), Owner::Min), ("t".into(), Owner::Target)],
            vec![(VertexId(0), VertexId(0), -1), (VertexId(0), VertexId(1), 0)],
        )
        .unwrap();
        assert_eq!(g.out_degree(VertexId(0)), 2);
    }

    #[test]
    fn payoff_of_direct_exit() {
        // One-step exit in the two-vertex cycle game pays 0.
        let g = fixtures::fig1();
        let v_min = g.find("v_Min").unwrap();
        let smiley = g.find("smiley").unwrap();
        let p = Play::new(vec![v_min, smiley]);
        assert_eq!(total_payoff(&g, &p).unwrap(), ExtValue::Finite(0));
    }

    #[test]
    fn payoff_of_two_step_exit() {
        let g = fixtures::fig1();
        let p = Play::new(vec![
            g.find("v_Min").unwrap(),
            g.find("v_Max").unwrap(),
            g.find("smiley").unwrap(),
        ]);
        assert_eq!(total_payoff(&g, &p).unwrap(), ExtValue::Finite(-10));
    }

    #[test]
    fn payoff_of_empty_play_at_target() {
        let g = fixtures::fig1();
        let p = Play::new(vec![g.find("smiley").unwrap()]);
        assert_eq!(total_payoff(&g, &p).unwrap(), ExtValue::Finite(0));
    }

    #[test]
    fn payoff_of_non_reaching_play_is_plus_inf() {
        let g = fixtures::fig1();
        let p = Play::new(vec![g.find("v_Min").unwrap(), g.find("v_Max").unwrap()]);
        assert_eq!(total_payoff(&g, &p).unwrap(), ExtValue::PlusInf);
    }

    #[test]
    fn payoff_rejects_non_edge_step() {
        let g = fixtures::fig3();
        // v_0 -> v_0 is not an edge.
        let p = Play::new(vec![VertexId(0), VertexId(0)]);
        assert!(total_payoff(&g, &p).is_err());
    }

    #[test]
    fn weight_is_additive_under_concatenation() {
        let g = fixtures::fig1();
        let v_min = g.find("v_Min").unwrap();
        let v_max = g.find("v_Max").unwrap();
        let smiley = g.find("smiley").unwrap();
        let p1 = Play::new(vec![v_min, v_max, v_min]);
        let p2 = Play::new(vec![v_min, v_max, smiley]);
        let mut joined = p1.vertices.clone();
        joined.extend_from_slice(&p2.vertices[1..]);
        let joined = Play::new(joined);
        assert_eq!(
            joined.total_weight(&g).unwrap(),
            p1.total_weight(&g).unwrap() + p2.total_weight(&g).unwrap()
        );
    }
}
