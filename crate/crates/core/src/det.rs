//! Deterministic strategies: attractors, the fake-optimal strategy without
//! non-negative cycles, and switching strategies.
//!
//! A memoryless Min strategy achieving the game values need not exist (Min
//! may need to know how long the play has run). Two memoryless pieces are
//! enough, though: a strategy sigma_1 restricted to value-tight edges whose
//! conforming plays, when they do reach a target, pay at most the value of
//! their start, and an attractor strategy sigma_2 that forces a target
//! within |V| steps. Playing sigma_1 until the play is alpha edges long and
//! sigma_2 afterwards guarantees a payoff of at most
//! max(-n, value) from every vertex when alpha = (2W(|V|-1)+n)|V| + 1.

use std::collections::VecDeque;

use num_bigint::BigUint;

use crate::analysis::{has_cycle, Sign};
use crate::error::{Error, Result};
use crate::game::{GameGraph, Owner, VertexId};
use crate::values::{permissive_from, ExtValue, PermissiveEdges, Solution};

/// A memoryless strategy for Min: one chosen successor per covered Min
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureStrategy {
    choice: Vec<Option<VertexId>>,
}

/// A memoryless strategy for Max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxPureStrategy {
    choice: Vec<Option<VertexId>>,
}

fn validate_choices(
    g: &GameGraph,
    owner: Owner,
    choice: &[Option<VertexId>],
) -> Result<()> {
    if choice.len() != g.n_vertices() {
        return Err(Error::InvalidStrategy(format!(
            "strategy covers {} vertices, game has {}",
            choice.len(),
            g.n_vertices()
        )));
    }
    for v in g.vertices() {
        if let Some(c) = choice[v.0] {
            if g.owner(v) != owner {
                return Err(Error::InvalidStrategy(format!(
                    "choice at {:?}, which the player does not own",
                    g.name(v)
                )));
            }
            if g.edge_weight(v, c).is_none() {
                return Err(Error::InvalidStrategy(format!(
                    "choice {:?} -> {:?} is not an edge",
                    g.name(v),
                    g.name(c)
                )));
            }
        }
    }
    Ok(())
}

macro_rules! strategy_impl {
    ($ty:ident, $owner:expr) => {
        impl $ty {
            pub fn new(g: &GameGraph, choice: Vec<Option<VertexId>>) -> Result<Self> {
                validate_choices(g, $owner, &choice)?;
                Ok(Self { choice })
            }

            pub fn get(&self, v: VertexId) -> Option<VertexId> {
                self.choice[v.0]
            }

            /// True when every vertex of the owner has a choice.
            pub fn is_total(&self, g: &GameGraph) -> bool {
                g.vertices().all(|v| g.owner(v) != $owner || self.choice[v.0].is_some())
            }

            pub(crate) fn require_total(&self, g: &GameGraph) -> Result<()> {
                if self.is_total(g) {
                    Ok(())
                } else {
                    Err(Error::InvalidStrategy(
                        "strategy leaves an owned vertex without a choice".into(),
                    ))
                }
            }

            /// Name-keyed view for serialization.
            pub fn to_name_map(&self, g: &GameGraph) -> std::collections::BTreeMap<String, String> {
                g.vertices()
                    .filter_map(|v| {
                        self.choice[v.0]
                            .map(|c| (g.name(v).to_string(), g.name(c).to_string()))
                    })
                    .collect()
            }

            pub fn from_name_map(
                g: &GameGraph,
                map: &std::collections::BTreeMap<String, String>,
            ) -> Result<Self> {
                let mut choice = vec![None; g.n_vertices()];
                for (from, to) in map {
                    let v = g
                        .find(from)
                        .ok_or_else(|| Error::InvalidStrategy(format!("unknown vertex {from:?}")))?;
                    let c = g
                        .find(to)
                        .ok_or_else(|| Error::InvalidStrategy(format!("unknown vertex {to:?}")))?;
                    choice[v.0] = Some(c);
                }
                Self::new(g, choice)
            }
        }
    };
}

strategy_impl!(PureStrategy, Owner::Min);
strategy_impl!(MaxPureStrategy, Owner::Max);

impl MaxPureStrategy {
    /// Unchecked in-place update; callers pick actual edges.
    pub(crate) fn set(&mut self, v: VertexId, c: VertexId) {
        self.choice[v.0] = Some(c);
    }
}

/// Result of an attractor computation: the rank of each vertex (number of
/// steps within which Min forces a target, `None` when it cannot) and the
/// rank-decreasing strategy on Min vertices of the attractor.
#[derive(Clone, Debug)]
pub struct AttractorResult {
    pub distance: Vec<Option<u64>>,
    pub strategy: PureStrategy,
}

impl AttractorResult {
    pub fn covers_all(&self) -> bool {
        self.distance.iter().all(|d| d.is_some())
    }
}

/// Attractor of the target set, optionally restricting Min to the given
/// permissive edges (a Min vertex absent from the restriction keeps all its
/// edges). Ranks satisfy: 0 on targets, 1 + min over allowed successors on
/// Min vertices, 1 + max over all successors on Max vertices.
pub fn attractor(g: &GameGraph, restriction: Option<&PermissiveEdges>) -> AttractorResult {
    let n = g.n_vertices();
    let allowed: Vec<Vec<VertexId>> = g
        .vertices()
        .map(|v| match g.owner(v) {
            Owner::Target => Vec::new(),
            Owner::Max => g.successors(v).map(|(d, _)| d).collect(),
            Owner::Min => match restriction.and_then(|pe| pe.allowed_at(v)) {
                Some(s) => s.to_vec(),
                None => g.successors(v).map(|(d, _)| d).collect(),
            },
        })
        .collect();

    let mut pred: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in g.vertices() {
        for &d in &allowed[v.0] {
            pred[d.0].push(v);
        }
    }

    let mut distance: Vec<Option<u64>> = vec![None; n];
    let mut remaining: Vec<usize> = allowed.iter().map(|s| s.len()).collect();
    let mut queue = VecDeque::new();
    for v in g.targets() {
        distance[v.0] = Some(0);
        queue.push_back(v);
    }
    // FIFO processing pops vertices in nondecreasing rank order, so a Max
    // vertex is released by its last (max-rank) successor and a Min vertex
    // by its first (min-rank) allowed successor.
    while let Some(u) = queue.pop_front() {
        let du = distance[u.0].unwrap();
        for &p in &pred[u.0] {
            if distance[p.0].is_some() {
                continue;
            }
            match g.owner(p) {
                Owner::Min => {
                    distance[p.0] = Some(du + 1);
                    queue.push_back(p);
                }
                Owner::Max => {
                    remaining[p.0] -= 1;
                    if remaining[p.0] == 0 {
                        distance[p.0] = Some(du + 1);
                        queue.push_back(p);
                    }
                }
                Owner::Target => unreachable!("targets have no outgoing edges"),
            }
        }
    }

    let mut choice = vec![None; n];
    for v in g.vertices() {
        if g.owner(v) != Owner::Min {
            continue;
        }
        if let Some(d) = distance[v.0] {
            // The smallest-id allowed successor one rank below.
            choice[v.0] = allowed[v.0]
                .iter()
                .copied()
                .find(|c| distance[c.0] == Some(d - 1));
            debug_assert!(choice[v.0].is_some());
        }
    }
    let strategy = PureStrategy::new(g, choice).expect("attractor choices are edges");
    AttractorResult { distance, strategy }
}

/// The fake-optimal Min strategy without non-negative cycles.
///
/// Restricted to value-tight edges, every conforming play that reaches a
/// target pays at most the value of its starting vertex; the tie-break
/// below additionally rules out any cycle of weight >= 0 in the graph where
/// Min follows the strategy and Max moves freely. Among the tight
/// successors it prefers (1) smaller rank in the tight-edge-restricted
/// attractor, unreachable last, then (2) earlier value stabilization, then
/// (3) smaller id. Along such choices either the rank or the stabilization
/// stage strictly decreases, and a Max edge on an all-tight cycle would
/// have to decrease the stabilization stage as well, so all-tight cycles
/// are impossible; a cycle with a slack edge has negative weight by a
/// telescoping sum.
pub fn fake_optimal_nc_strategy(g: &GameGraph, sol: &Solution) -> Result<PureStrategy> {
    if !sol.all_finite() {
        return Err(Error::Domain(
            "fake-optimal strategy needs every value finite".into(),
        ));
    }
    let pe = permissive_from(g, &sol.values, &sol.values);
    let att = attractor(g, Some(&pe));
    let mut choice = vec![None; g.n_vertices()];
    for v in g.vertices() {
        if g.owner(v) != Owner::Min {
            continue;
        }
        let tight = pe.allowed_at(v).expect("finite Min vertex has tight edges");
        let best = tight
            .iter()
            .copied()
            .min_by_key(|c| {
                (
                    att.distance[c.0].unwrap_or(u64::MAX),
                    sol.stabilized_at[c.0],
                    c.0,
                )
            })
            .expect("tight edge set is non-empty");
        choice[v.0] = Some(best);
    }
    let sigma = PureStrategy::new(g, choice)?;
    debug_assert_eq!(verify_nc(g, &sigma), Ok(true));
    Ok(sigma)
}

/// Checks that the graph obtained by fixing Min's moves to `sigma` and
/// leaving Max free contains no cycle of weight >= 0.
pub fn verify_nc(g: &GameGraph, sigma: &PureStrategy) -> Result<bool> {
    sigma.require_total(g)?;
    let mut edges = Vec::new();
    for v in g.vertices() {
        match g.owner(v) {
            Owner::Target => {}
            Owner::Max => {
                for (d, w) in g.successors(v) {
                    edges.push((v.0, d.0, w));
                }
            }
            Owner::Min => {
                let c = sigma.get(v).unwrap();
                edges.push((v.0, c.0, g.edge_weight(v, c).unwrap()));
            }
        }
    }
    Ok(!has_cycle(g.n_vertices(), &edges, Sign::NonNegative))
}

/// Value of every vertex when Min's moves are fixed and Max plays
/// adversarially. +inf exactly at the vertices from which Max can reach a
/// cycle of the fixed graph (and then avoid targets forever).
pub fn eval_pure_strategy(g: &GameGraph, sigma: &PureStrategy) -> Result<Vec<ExtValue>> {
    sigma.require_total(g)?;
    let n = g.n_vertices();
    let restricted: Vec<Vec<(VertexId, i64)>> = g
        .vertices()
        .map(|v| match g.owner(v) {
            Owner::Target => Vec::new(),
            Owner::Max => g.successors(v).collect(),
            Owner::Min => {
                let c = sigma.get(v).unwrap();
                vec![(c, g.edge_weight(v, c).unwrap())]
            }
        })
        .collect();
    let adj: Vec<Vec<usize>> = restricted
        .iter()
        .map(|s| s.iter().map(|(d, _)| d.0).collect())
        .collect();

    let mut comp_of = vec![usize::MAX; n];
    let comps = crate::analysis::tarjan_sccs(&adj);
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }

    let mut val = vec![ExtValue::PlusInf; n];
    // Components arrive sinks first, so successor values are ready.
    for comp in &comps {
        let cyclic = comp.len() > 1
            || comp.iter().any(|&v| adj[v].iter().any(|&d| d == v));
        for &v in comp {
            if cyclic {
                val[v] = ExtValue::PlusInf;
            } else if g.is_target(VertexId(v)) {
                val[v] = ExtValue::Finite(0);
            } else {
                val[v] = restricted[v]
                    .iter()
                    .map(|&(d, w)| val[d.0].add_weight(w))
                    .max()
                    .expect("non-target vertex has a successor");
            }
        }
    }
    Ok(val)
}

/// A switching strategy: play `sigma1` while the play is shorter than
/// `alpha` edges, then `sigma2`.
#[derive(Clone, Debug)]
pub struct SwitchingStrategy {
    pub sigma1: PureStrategy,
    pub sigma2: PureStrategy,
    pub alpha: BigUint,
}

impl SwitchingStrategy {
    /// Validates both pieces: total on Min vertices, alpha >= 1, and
    /// sigma2 forces a target from everywhere (its fixed graph has no
    /// cycle, hence finite adversarial value).
    pub fn new(
        g: &GameGraph,
        sigma1: PureStrategy,
        sigma2: PureStrategy,
        alpha: BigUint,
    ) -> Result<Self> {
        use num_traits::Zero;
        sigma1.require_total(g)?;
        sigma2.require_total(g)?;
        if alpha.is_zero() {
            return Err(Error::InvalidStrategy("switching point alpha must be >= 1".into()));
        }
        let tail = eval_pure_strategy(g, &sigma2)?;
        if let Some(v) = g.vertices().find(|&v| !tail[v.0].is_finite()) {
            return Err(Error::InvalidStrategy(format!(
                "sigma2 does not force a target from {:?}",
                g.name(v)
            )));
        }
        Ok(SwitchingStrategy { sigma1, sigma2, alpha })
    }
}

/// Builds the switching strategy for a solved game with finite values: the
/// fake-optimal sigma_1, the attractor sigma_2 and the switching point
/// alpha = (2W(|V|-1) + n)|V| + 1, which guarantees value at most
/// max(-n, dValue(v)) from every vertex v.
pub fn switching_strategy(g: &GameGraph, sol: &Solution, n: u64) -> Result<SwitchingStrategy> {
    if !sol.all_finite() {
        return Err(Error::Domain(
            "switching strategies need every value finite".into(),
        ));
    }
    let sigma1 = fake_optimal_nc_strategy(g, sol)?;
    let att = attractor(g, None);
    debug_assert!(att.covers_all(), "finite values imply a full attractor");
    let nv = g.n_vertices() as u128;
    let w = g.max_abs_weight() as u128;
    let alpha = (2 * w * (nv - 1) + n as u128) * nv + 1;
    SwitchingStrategy::new(g, sigma1, att.strategy, BigUint::from(alpha))
}

/// Default bound on the switching points this crate will evaluate exactly.
pub const DEFAULT_ALPHA_CAP: u64 = 1_000_000;

/// Adversarial value of a switching strategy from `v0`, by backward
/// induction over the play-length layers 0..=alpha. Layer alpha holds the
/// pure sigma2 values; at earlier layers Min follows sigma1 and Max picks
/// its best successor one layer further.
pub fn eval_switching_strategy(
    g: &GameGraph,
    s: &SwitchingStrategy,
    v0: VertexId,
    alpha_cap: u64,
) -> Result<i64> {
    let alpha = usize::try_from(&s.alpha)
        .ok()
        .filter(|&a| a as u64 <= alpha_cap)
        .ok_or_else(|| {
            Error::CapExceeded(format!(
                "switching point {} exceeds the evaluation cap {alpha_cap}",
                s.alpha
            ))
        })?;
    let tail = eval_pure_strategy(g, &s.sigma2)?;
    let mut cur: Vec<i64> = tail
        .iter()
        .map(|x| x.finite().ok_or_else(|| {
            Error::InvalidStrategy("sigma2 does not force a target".into())
        }))
        .collect::<Result<_>>()?;

    let add = |a: i64, w: i64| -> Result<i64> {
        a.checked_add(w)
            .ok_or_else(|| Error::CapExceeded("switching evaluation overflows i64".into()))
    };
    for _layer in (0..alpha).rev() {
        let mut next = vec![0i64; g.n_vertices()];
        for v in g.vertices() {
            next[v.0] = match g.owner(v) {
                Owner::Target => 0,
                Owner::Min => {
                    let c = s.sigma1.get(v).unwrap();
                    add(cur[c.0], g.edge_weight(v, c).unwrap())?
                }
                Owner::Max => {
                    let mut best = i64::MIN;
                    for (d, w) in g.successors(v) {
                        best = best.max(add(cur[d.0], w)?);
                    }
                    best
                }
            };
        }
        cur = next;
    }
    Ok(cur[v0.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::values::solve_values;

    fn id(g: &GameGraph, name: &str) -> VertexId {
        g.find(name).unwrap()
    }

    #[test]
    fn attractor_of_two_vertex_cycle_game() {
        let g = fixtures::fig1();
        let att = attractor(&g, None);
        assert_eq!(att.distance[id(&g, "smiley").0], Some(0));
        assert_eq!(att.distance[id(&g, "v_Min").0], Some(1));
        // Max must wait for all its successors: 1 + max(1, 0).
        assert_eq!(att.distance[id(&g, "v_Max").0], Some(2));
        assert_eq!(att.strategy.get(id(&g, "v_Min")), Some(id(&g, "smiley")));
    }

    #[test]
    fn attractor_without_min_escape_is_partial() {
        let g = fixtures::fig1_no_escape();
        let att = attractor(&g, None);
        assert!(!att.covers_all());
        assert_eq!(att.distance[id(&g, "v_Min").0], None);
        assert_eq!(att.distance[id(&g, "v_Max").0], None);
        assert_eq!(att.distance[id(&g, "smiley").0], Some(0));
    }

    #[test]
    fn restricted_attractor_can_lose_coverage() {
        // At the value fixpoint of the two-vertex cycle game, Min's only
        // tight edge points into the cycle, and Max can keep the play
        // there, so the tight-edge attractor covers only the target.
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        let pe = crate::values::permissive_from(&g, &sol.values, &sol.values);
        let att = attractor(&g, Some(&pe));
        assert_eq!(att.distance[id(&g, "v_Min").0], None);
        assert_eq!(att.distance[id(&g, "v_Max").0], None);
    }

    #[test]
    fn fake_optimal_strategy_of_four_vertex_game() {
        let g = fixtures::fig2();
        let sol = solve_values(&g).unwrap();
        let sigma = fake_optimal_nc_strategy(&g, &sol).unwrap();
        // Both Min vertices have a single tight edge.
        assert_eq!(sigma.get(id(&g, "v_1")), Some(id(&g, "v_0")));
        assert_eq!(sigma.get(id(&g, "v_3")), Some(id(&g, "v_1")));
        assert_eq!(verify_nc(&g, &sigma), Ok(true));
        // Max simply refuses to terminate against sigma1 alone.
        let val = eval_pure_strategy(&g, &sigma).unwrap();
        assert_eq!(val[id(&g, "v_2").0], ExtValue::PlusInf);
    }

    #[test]
    fn fake_optimal_strategy_of_zero_cycle_game_is_optimal() {
        let g = fixtures::fig3();
        let sol = solve_values(&g).unwrap();
        let sigma = fake_optimal_nc_strategy(&g, &sol).unwrap();
        // v_1 has two tight edges; the attractor rank tie-break picks the
        // direct exit (rank 0) over v_0 (rank 2).
        assert_eq!(sigma.get(id(&g, "v_0")), Some(id(&g, "v_1")));
        assert_eq!(sigma.get(id(&g, "v_1")), Some(id(&g, "smiley")));
        let val = eval_pure_strategy(&g, &sigma).unwrap();
        assert_eq!(val[id(&g, "v_0").0], ExtValue::Finite(-2));
        assert_eq!(val[id(&g, "v_1").0], ExtValue::Finite(-1));
    }

    #[test]
    fn nc_check_rejects_plain_loops() {
        // Fixing Min to the cycle edge in the zero-cycle game leaves the
        // zero-weight cycle in place.
        let g = fixtures::fig3();
        let sigma = PureStrategy::new(
            &g,
            vec![Some(id(&g, "v_1")), Some(id(&g, "v_0")), None],
        )
        .unwrap();
        assert_eq!(verify_nc(&g, &sigma), Ok(false));
    }

    #[test]
    fn eval_pure_strategy_values() {
        let g = fixtures::fig1();
        // Min always exits immediately: value 0 at v_Min; Max's best
        // against it is -1 + 0 at v_Max.
        let exit = PureStrategy::new(&g, vec![None, Some(id(&g, "smiley")), None]).unwrap();
        let val = eval_pure_strategy(&g, &exit).unwrap();
        assert_eq!(val[id(&g, "v_Min").0], ExtValue::Finite(0));
        assert_eq!(val[id(&g, "v_Max").0], ExtValue::Finite(-1));

        // Min always re-enters the cycle: Max can loop forever.
        let stay = PureStrategy::new(&g, vec![None, Some(id(&g, "v_Max")), None]).unwrap();
        let val = eval_pure_strategy(&g, &stay).unwrap();
        assert_eq!(val[id(&g, "v_Min").0], ExtValue::PlusInf);
        assert_eq!(val[id(&g, "v_Max").0], ExtValue::PlusInf);
    }

    #[test]
    fn switching_strategy_validation() {
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        let sigma1 = fake_optimal_nc_strategy(&g, &sol).unwrap();
        // sigma1 as the tail is rejected: it never forces the target.
        let err = SwitchingStrategy::new(&g, sigma1.clone(), sigma1, BigUint::from(5u32))
            .unwrap_err();
        assert!(err.to_string().contains("does not force"));
    }

    #[test]
    fn switching_strategy_on_two_vertex_cycle_game() {
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        let s = switching_strategy(&g, &sol, 10).unwrap();
        // alpha = (2*10*2 + 10)*3 + 1.
        assert_eq!(s.alpha, BigUint::from(151u32));
        assert_eq!(s.sigma1.get(id(&g, "v_Min")), Some(id(&g, "v_Max")));
        assert_eq!(s.sigma2.get(id(&g, "v_Min")), Some(id(&g, "smiley")));
        let val = eval_switching_strategy(&g, &s, id(&g, "v_Min"), DEFAULT_ALPHA_CAP).unwrap();
        assert_eq!(val, -10);
        let val = eval_switching_strategy(&g, &s, id(&g, "v_Max"), DEFAULT_ALPHA_CAP).unwrap();
        assert_eq!(val, -10);
    }

    #[test]
    fn switching_guarantee_scales_with_n() {
        // With a tiny alpha budget Min must switch early and the guarantee
        // degrades gracefully: value <= max(-n, dValue).
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        for n in [0u64, 1, 3, 10, 25] {
            let s = switching_strategy(&g, &sol, n).unwrap();
            for v in g.vertices() {
                let val =
                    eval_switching_strategy(&g, &s, v, DEFAULT_ALPHA_CAP).unwrap() as i128;
                let dv = sol.finite(v).unwrap() as i128;
                assert!(val <= (-(n as i128)).max(dv), "n={n} v={v} val={val}");
            }
        }
    }

    #[test]
    fn switching_eval_respects_cap() {
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        let s = switching_strategy(&g, &sol, 10).unwrap();
        let err = eval_switching_strategy(&g, &s, id(&g, "v_Min"), 100).unwrap_err();
        assert!(err.to_string().contains("cap"));
    }

    #[test]
    fn four_vertex_switching_value() {
        let g = fixtures::fig2();
        let sol = solve_values(&g).unwrap();
        let s = switching_strategy(&g, &sol, 8).unwrap();
        assert_eq!(s.alpha, BigUint::from((2u64 * 15 * 4 + 8) * 5 + 1));
        let val = eval_switching_strategy(&g, &s, id(&g, "v_2"), DEFAULT_ALPHA_CAP).unwrap();
        assert_eq!(val, -8);
    }

    #[test]
    fn strategy_name_maps_roundtrip() {
        let g = fixtures::fig2();
        let sol = solve_values(&g).unwrap();
        let sigma = fake_optimal_nc_strategy(&g, &sol).unwrap();
        let map = sigma.to_name_map(&g);
        assert_eq!(PureStrategy::from_name_map(&g, &map).unwrap(), sigma);
    }

    #[test]
    fn strategy_rejects_wrong_owner_and_non_edges() {
        let g = fixtures::fig1();
        // Choice at a Max vertex.
        assert!(PureStrategy::new(&g, vec![Some(id(&g, "v_Min")), None, None]).is_err());
        // Not an edge (self loop does not exist).
        assert!(PureStrategy::new(&g, vec![None, Some(id(&g, "v_Min")), None]).is_err());
        // Max strategies are validated symmetrically.
        assert!(MaxPureStrategy::new(&g, vec![Some(id(&g, "v_Min")), None, None]).is_ok());
        assert!(MaxPureStrategy::new(&g, vec![None, Some(id(&g, "v_Max")), None]).is_err());
    }
}
