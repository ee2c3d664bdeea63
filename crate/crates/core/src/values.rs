//! Game values via value iteration.
//!
//! The one-step operator maps a value vector x to F(x) with F(x)_v = 0 on
//! targets, min over successors of (weight + x) at Min vertices and max at
//! Max vertices. Iterating from the vector that is 0 on targets and +inf
//! elsewhere produces the k-step horizon values f^(k); the sequence is
//! componentwise non-increasing and converges to the value of the
//! infinite game. Vertices that cannot be forced into a target by Min stay
//! at +inf forever; vertices whose value is still below -(|V|-1)*W after
//! (2(|V|-1)W + 1)*|V| rounds diverge to -inf; everything else has settled
//! to its exact finite value by then.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{GameGraph, Owner, VertexId};

/// A game value: an integer extended with the two infinities.
///
/// The derived order relies on the variant order below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    MinusInf,
    Finite(i64),
    PlusInf,
}

impl ExtValue {
    /// weight + value, absorbing on both infinities.
    pub fn add_weight(self, w: i64) -> ExtValue {
        match self {
            ExtValue::MinusInf => ExtValue::MinusInf,
            ExtValue::PlusInf => ExtValue::PlusInf,
            ExtValue::Finite(x) => ExtValue::Finite(
                x.checked_add(w).expect("value + weight overflows i64"),
            ),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValue::Finite(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::MinusInf => write!(f, "-inf"),
            ExtValue::PlusInf => write!(f, "+inf"),
            ExtValue::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtValue::MinusInf => s.serialize_str("-inf"),
            ExtValue::PlusInf => s.serialize_str("+inf"),
            ExtValue::Finite(x) => s.serialize_i64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(x) => Ok(ExtValue::Finite(x)),
            Raw::Str(s) if s == "+inf" => Ok(ExtValue::PlusInf),
            Raw::Str(s) if s == "-inf" => Ok(ExtValue::MinusInf),
            Raw::Str(s) => Err(D::Error::custom(format!("not a value: {s:?}"))),
        }
    }
}

/// A value vector together with the number of iterations that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueVector {
    pub values: Vec<ExtValue>,
    pub iteration: usize,
}

impl ValueVector {
    pub fn get(&self, v: VertexId) -> ExtValue {
        self.values[v.0]
    }
}

/// f^(0): 0 on targets, +inf elsewhere.
pub fn initial_vector(g: &GameGraph) -> ValueVector {
    let values = g
        .vertices()
        .map(|v| if g.owner(v) == Owner::Target { ExtValue::Finite(0) } else { ExtValue::PlusInf })
        .collect();
    ValueVector { values, iteration: 0 }
}

/// One application of the operator F.
pub fn bellman_step(g: &GameGraph, x: &ValueVector) -> ValueVector {
    let values = g.vertices().map(|v| bellman_at(g, &x.values, v)).collect();
    ValueVector { values, iteration: x.iteration + 1 }
}

fn bellman_at(g: &GameGraph, x: &[ExtValue], v: VertexId) -> ExtValue {
    match g.owner(v) {
        Owner::Target => ExtValue::Finite(0),
        Owner::Min => g
            .successors(v)
            .map(|(d, w)| x[d.0].add_weight(w))
            .min()
            .expect("non-target vertex has a successor"),
        Owner::Max => g
            .successors(v)
            .map(|(d, w)| x[d.0].add_weight(w))
            .max()
            .expect("non-target vertex has a successor"),
    }
}

/// Vertices of value +inf: the complement of the set from which Min can
/// force reaching a target (computed as the classical attractor).
pub fn classify_plus_infinity(g: &GameGraph) -> Vec<VertexId> {
    let att = crate::det::attractor(g, None);
    g.vertices().filter(|&v| att.distance[v.0].is_none()).collect()
}

/// Iteration budget above which [`solve_values`] refuses to run.
pub const VALUE_ITERATION_BUDGET: u128 = 100_000_000;

/// A solved game.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Limit values, with divergence classified into the infinities.
    pub values: ValueVector,
    /// Last iteration at which each vertex changed. Vertices classified as
    /// -inf never settle and carry the cutoff itself.
    pub stabilized_at: Vec<usize>,
    /// Number of iterations actually performed.
    pub iterations: usize,
}

impl Solution {
    pub fn get(&self, v: VertexId) -> ExtValue {
        self.values.get(v)
    }

    pub fn finite(&self, v: VertexId) -> Option<i64> {
        self.get(v).finite()
    }

    pub fn all_finite(&self) -> bool {
        self.values.values.iter().all(|x| x.is_finite())
    }
}

/// Computes the value of every vertex.
///
/// Runs value iteration up to the cutoff (2(|V|-1)W + 1)*|V|, stopping
/// early once stationary. On early stop every non-(+inf) vertex holds its
/// exact value; at the cutoff, vertices still strictly below -(|V|-1)*W
/// are classified as -inf.
pub fn solve_values(g: &GameGraph) -> Result<Solution> {
    let n = g.n_vertices();
    if n == 0 {
        return Ok(Solution {
            values: ValueVector { values: Vec::new(), iteration: 0 },
            stabilized_at: Vec::new(),
            iterations: 0,
        });
    }
    let w = g.max_abs_weight() as u128;
    let cutoff = (2 * (n as u128 - 1) * w + 1) * n as u128;
    if cutoff > VALUE_ITERATION_BUDGET {
        return Err(Error::CapExceeded(format!(
            "value iteration needs {cutoff} rounds, budget is {VALUE_ITERATION_BUDGET}"
        )));
    }
    let cutoff = cutoff as usize;

    let mut cur = initial_vector(g);
    let mut stabilized_at = vec![0usize; n];
    let mut iterations = 0;
    let mut stationary = false;
    for k in 1..=cutoff {
        let next = bellman_step(g, &cur);
        let mut changed = false;
        for v in 0..n {
            debug_assert!(next.values[v] <= cur.values[v], "F must be non-increasing");
            if next.values[v] != cur.values[v] {
                stabilized_at[v] = k;
                changed = true;
            }
        }
        cur = next;
        iterations = k;
        if !changed {
            stationary = true;
            break;
        }
    }

    if !stationary {
        let bound = g.finite_value_bound();
        for v in 0..n {
            if let ExtValue::Finite(x) = cur.values[v] {
                if x < -bound {
                    cur.values[v] = ExtValue::MinusInf;
                    stabilized_at[v] = iterations;
                }
            }
        }
    }
    Ok(Solution { values: cur, stabilized_at, iterations })
}

/// For each Min vertex of finite stage value, the successors realizing the
/// one-step optimum against the previous stage.
#[derive(Clone, Debug)]
pub struct PermissiveEdges {
    pub allowed: std::collections::BTreeMap<VertexId, Vec<VertexId>>,
    /// The iteration index the sets were taken at.
    pub stage: usize,
}

impl PermissiveEdges {
    /// Allowed successors of a Min vertex; `None` means unrestricted
    /// (vertex not covered by the map).
    pub fn allowed_at(&self, v: VertexId) -> Option<&[VertexId]> {
        self.allowed.get(&v).map(|s| s.as_slice())
    }
}

/// Permissive sets at stage i >= 1: computed while applying F to f^(i-1).
pub fn permissive_edges(g: &GameGraph, i: usize) -> Result<PermissiveEdges> {
    if i == 0 {
        return Err(Error::Domain("permissive edges need a stage >= 1".into()));
    }
    let mut prev = initial_vector(g);
    for _ in 0..i - 1 {
        prev = bellman_step(g, &prev);
    }
    let next = bellman_step(g, &prev);
    Ok(permissive_from(g, &prev, &next))
}

/// The argmin successors at Min vertices: those v' with
/// weight(v,v') + prev(v') = next(v), for vertices where next is finite.
pub(crate) fn permissive_from(g: &GameGraph, prev: &ValueVector, next: &ValueVector) -> PermissiveEdges {
    let mut allowed = std::collections::BTreeMap::new();
    for v in g.vertices() {
        if g.owner(v) != Owner::Min || !next.get(v).is_finite() {
            continue;
        }
        let tight: Vec<VertexId> = g
            .successors(v)
            .filter(|&(d, w)| prev.get(d).add_weight(w) == next.get(v))
            .map(|(d, _)| d)
            .collect();
        debug_assert!(!tight.is_empty(), "finite minimum must be attained");
        allowed.insert(v, tight);
    }
    PermissiveEdges { allowed, stage: next.iteration }
}
