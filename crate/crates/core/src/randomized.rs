//! Randomized memoryless Min strategies and ε-optimal synthesis.
//!
//! The synthesized strategy mixes the two pieces of a switching strategy:
//! at each Min vertex of an SCC containing a negative cycle it plays the
//! fake-optimal edge with probability p and the attractor edge with 1 - p;
//! in SCCs without negative cycles it plays the fake-optimal edge surely.
//! For p large enough (depending only on the cycle parameters of the
//! graph, the value achieved by the switching strategy and ε), the
//! expected payoff against Max's best response is at most that value
//! plus ε.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::analysis::{scc_has_negative_cycle, sccs, GraphParams};
use crate::det::{switching_strategy, PureStrategy, SwitchingStrategy, DEFAULT_ALPHA_CAP};
use crate::error::{Error, Result};
use crate::game::{GameGraph, Owner, VertexId};
use crate::rational::{ceil_int, pow2, rat_int, Rational};
use crate::values::{PermissiveEdges, Solution};

/// A memoryless randomized Min strategy: a full-support distribution over
/// successors at every Min vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandStrategy {
    dist: Vec<Option<Vec<(VertexId, Rational)>>>,
}

impl RandStrategy {
    pub fn new(g: &GameGraph, dist: Vec<Option<Vec<(VertexId, Rational)>>>) -> Result<Self> {
        let s = RandStrategy { dist };
        s.check_for(g)?;
        Ok(s)
    }

    /// Validates the strategy against a game: distributions exactly at Min
    /// vertices, over distinct successors, with positive weights summing
    /// to one.
    pub fn check_for(&self, g: &GameGraph) -> Result<()> {
        if self.dist.len() != g.n_vertices() {
            return Err(Error::InvalidStrategy(format!(
                "strategy covers {} vertices, game has {}",
                self.dist.len(),
                g.n_vertices()
            )));
        }
        for v in g.vertices() {
            match (&self.dist[v.0], g.owner(v)) {
                (None, Owner::Min) => {
                    return Err(Error::InvalidStrategy(format!(
                        "no distribution at Min vertex {:?}",
                        g.name(v)
                    )))
                }
                (None, _) => continue,
                (Some(_), o) if o != Owner::Min => {
                    return Err(Error::InvalidStrategy(format!(
                        "distribution at {:?}, which Min does not own",
                        g.name(v)
                    )))
                }
                (Some(row), _) => {
                    if row.is_empty() {
                        return Err(Error::InvalidStrategy(format!(
                            "empty distribution at {:?}",
                            g.name(v)
                        )));
                    }
                    let mut sum = Rational::zero();
                    let mut seen = std::collections::HashSet::new();
                    for (d, p) in row {
                        if g.edge_weight(v, *d).is_none() {
                            return Err(Error::InvalidStrategy(format!(
                                "support edge {:?} -> {:?} does not exist",
                                g.name(v),
                                g.name(*d)
                            )));
                        }
                        if !seen.insert(d.0) {
                            return Err(Error::InvalidStrategy(format!(
                                "duplicate support vertex {:?} at {:?}",
                                g.name(*d),
                                g.name(v)
                            )));
                        }
                        if !p.is_positive() {
                            return Err(Error::InvalidStrategy(format!(
                                "non-positive probability at {:?}",
                                g.name(v)
                            )));
                        }
                        sum += p;
                    }
                    if !sum.is_one() {
                        return Err(Error::InvalidStrategy(format!(
                            "probabilities at {:?} sum to {sum}, not 1",
                            g.name(v)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The distribution at a Min vertex.
    pub fn support(&self, v: VertexId) -> Option<&[(VertexId, Rational)]> {
        self.dist[v.0].as_deref()
    }

    pub fn is_dirac(&self, v: VertexId) -> bool {
        self.dist[v.0].as_ref().map_or(false, |row| row.len() == 1)
    }

    /// The Dirac strategy following a total pure strategy.
    pub fn from_pure(g: &GameGraph, sigma: &PureStrategy) -> Result<Self> {
        let dist = g
            .vertices()
            .map(|v| sigma.get(v).map(|c| vec![(c, Rational::one())]))
            .collect();
        RandStrategy::new(g, dist)
    }

    /// Name-keyed view: vertex -> [(successor, probability)].
    pub fn to_name_map(&self, g: &GameGraph) -> BTreeMap<String, Vec<(String, Rational)>> {
        g.vertices()
            .filter_map(|v| {
                self.dist[v.0].as_ref().map(|row| {
                    (
                        g.name(v).to_string(),
                        row.iter().map(|(d, p)| (g.name(*d).to_string(), p.clone())).collect(),
                    )
                })
            })
            .collect()
    }

    pub fn from_name_map(
        g: &GameGraph,
        map: &BTreeMap<String, Vec<(String, Rational)>>,
    ) -> Result<Self> {
        let mut dist = vec![None; g.n_vertices()];
        for (from, row) in map {
            let v = g
                .find(from)
                .ok_or_else(|| Error::InvalidStrategy(format!("unknown vertex {from:?}")))?;
            let mut entries = Vec::with_capacity(row.len());
            for (to, p) in row {
                let d = g
                    .find(to)
                    .ok_or_else(|| Error::InvalidStrategy(format!("unknown vertex {to:?}")))?;
                entries.push((d, p.clone()));
            }
            dist[v.0] = Some(entries);
        }
        RandStrategy::new(g, dist)
    }
}

/// Restriction of Min to the supports of `rho`, in the shape the attractor
/// computation accepts.
pub(crate) fn support_restriction(g: &GameGraph, rho: &RandStrategy) -> PermissiveEdges {
    let mut allowed = BTreeMap::new();
    for v in g.vertices() {
        if let Some(row) = rho.support(v) {
            allowed.insert(v, row.iter().map(|(d, _)| *d).collect());
        }
    }
    PermissiveEdges { allowed, stage: 0 }
}

/// True iff the chain induced by `rho` reaches a target almost surely
/// whatever Max does: the attractor where Min is restricted to the
/// supports of `rho` must cover every vertex.
pub fn check_almost_sure_reach(g: &GameGraph, rho: &RandStrategy) -> Result<bool> {
    rho.check_for(g)?;
    let restriction = support_restriction(g, rho);
    Ok(crate::det::attractor(g, Some(&restriction)).covers_all())
}

/// The mixed strategy rho_p over the two pieces of a switching strategy.
pub fn build_rho_p(
    g: &GameGraph,
    sigma1: &PureStrategy,
    sigma2: &PureStrategy,
    p: &Rational,
) -> Result<RandStrategy> {
    if !(p.is_positive() && *p < Rational::one()) {
        return Err(Error::Domain(format!("mixing probability must lie in (0,1), got {p}")));
    }
    let comps = sccs(g);
    let mut negative = vec![false; g.n_vertices()];
    for comp in &comps {
        if scc_has_negative_cycle(g, comp) {
            for v in comp {
                negative[v.0] = true;
            }
        }
    }
    let mut dist = vec![None; g.n_vertices()];
    for v in g.vertices() {
        if g.owner(v) != Owner::Min {
            continue;
        }
        let s1 = sigma1.get(v).ok_or_else(|| {
            Error::InvalidStrategy(format!("sigma1 undefined at {:?}", g.name(v)))
        })?;
        let s2 = sigma2.get(v).ok_or_else(|| {
            Error::InvalidStrategy(format!("sigma2 undefined at {:?}", g.name(v)))
        })?;
        dist[v.0] = Some(if !negative[v.0] || s1 == s2 {
            vec![(s1, Rational::one())]
        } else {
            vec![(s1, p.clone()), (s2, Rational::one() - p)]
        });
    }
    RandStrategy::new(g, dist)
}

/// Bits allowed in the exponents of the probability bound.
pub const PROBABILITY_EXPONENT_CAP: u64 = 1_000_000;

/// The lower bound on the mixing probability, together with the two
/// intermediate constants it is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityBound {
    /// Ceil of c(1 + w+/w-): an upper bound on the length of the negative
    /// cycles Min must be able to string together.
    pub a: u64,
    /// ((|dval| + |V| W + w-) / w-) c + |V|: controls how long plays
    /// conforming to the mixed strategy can stay expensive.
    pub b: Rational,
    /// The mixing probability: any p in [p_min, 1) keeps the expected
    /// payoff within epsilon of the switching strategy's value.
    pub p_min: Rational,
    pub epsilon: Rational,
    /// Value of the switching strategy from the initial vertex.
    pub dval_sigma_v0: i64,
}

/// Computes p_min for a game with cycle parameters `params`, `n_vertices`
/// vertices, largest absolute weight `max_w`, switching-strategy value
/// `dval_sigma_v0` from the initial vertex, and tolerance `epsilon`.
pub fn probability_bound(
    params: &GraphParams,
    n_vertices: usize,
    max_w: i64,
    dval_sigma_v0: i64,
    epsilon: &Rational,
) -> Result<ProbabilityBound> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let c = rat_int(params.c as i64);
    let wm = rat_int(params.w_minus);
    let wp = rat_int(params.w_plus);
    let nv = rat_int(n_vertices as i64);
    let vw = rat_int(
        (n_vertices as i64)
            .checked_mul(max_w)
            .ok_or_else(|| Error::CapExceeded("|V| * W overflows".into()))?,
    );

    let a_rat = &c * (Rational::one() + &wp / &wm);
    let a = u64::try_from(ceil_int(&a_rat))
        .ok()
        .filter(|&a| a <= PROBABILITY_EXPONENT_CAP)
        .ok_or_else(|| Error::CapExceeded("exponent a out of range".into()))?;
    let b = (rat_int(dval_sigma_v0.abs()) + &vw + &wm) / &wm * &c + &nv;
    let eb = u64::try_from(ceil_int(&b))
        .ok()
        .filter(|&e| e.checked_add(a + 2).is_some_and(|s| s <= PROBABILITY_EXPONENT_CAP))
        .ok_or_else(|| Error::CapExceeded("exponent b out of range".into()))?;

    let mut p_min = Rational::one() - Rational::new(BigInt::one(), pow2(a + 1));
    // Candidate from the non-negative-cycle cost terms; skipped when both
    // vanish (a graph with no weight at all).
    let d2 = (vw * Rational::from_integer(pow2(eb + a + 1))
        + wp * Rational::from_integer(pow2(eb + a + 2)))
        * rat_int(2);
    if d2.is_positive() {
        p_min = p_min.max(Rational::one() - epsilon / d2);
    }
    // Candidate from the value the strategy must preserve.
    if dval_sigma_v0 < 0 {
        let d3 = Rational::from_integer(pow2(a + eb + 2)) * rat_int(dval_sigma_v0.abs());
        p_min = p_min.max(Rational::one() - epsilon / d3);
    }
    debug_assert!(p_min < Rational::one());
    Ok(ProbabilityBound { a, b, p_min, epsilon: epsilon.clone(), dval_sigma_v0 })
}

/// An ε-optimal randomized strategy with its certificate.
#[derive(Clone, Debug)]
pub struct Synthesized {
    pub strategy: RandStrategy,
    pub bound: ProbabilityBound,
    pub switching: SwitchingStrategy,
}

/// Synthesizes rho_p with p = p_min for a solved game with finite values:
/// builds the switching strategy for the given `n`, evaluates it from
/// `v0`, derives the probability bound and mixes the two pieces.
///
/// The expected payoff of the result from `v0`, against Max's best
/// response, is at most the switching strategy's value there plus epsilon,
/// hence at most max(-n, dValue(v0)) + epsilon.
pub fn synthesize_epsilon_optimal(
    g: &GameGraph,
    sol: &Solution,
    v0: VertexId,
    n: u64,
    epsilon: &Rational,
    params: &GraphParams,
) -> Result<Synthesized> {
    let switching = switching_strategy(g, sol, n)?;
    let dval = crate::det::eval_switching_strategy(g, &switching, v0, DEFAULT_ALPHA_CAP)?;
    let bound = probability_bound(params, g.n_vertices(), g.max_abs_weight(), dval, epsilon)?;
    let strategy = build_rho_p(g, &switching.sigma1, &switching.sigma2, &bound.p_min)?;
    Ok(Synthesized { strategy, bound, switching })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::graph_params;
    use crate::fixtures;
    use crate::rational::rat;
    use crate::values::solve_values;

    fn mixed_pieces(g: &GameGraph, n: u64) -> (PureStrategy, PureStrategy) {
        let sol = solve_values(g).unwrap();
        let s = switching_strategy(g, &sol, n).unwrap();
        (s.sigma1, s.sigma2)
    }

    #[test]
    fn rho_p_mixes_on_negative_cycles() {
        let g = fixtures::fig1();
        let (s1, s2) = mixed_pieces(&g, 10);
        let p = rat(2, 3);
        let rho = build_rho_p(&g, &s1, &s2, &p).unwrap();
        let v_min = g.find("v_Min").unwrap();
        let row = rho.support(v_min).unwrap().to_vec();
        assert_eq!(
            row,
            vec![
                (g.find("v_Max").unwrap(), rat(2, 3)),
                (g.find("smiley").unwrap(), rat(1, 3))
            ]
        );
        assert!(!rho.is_dirac(v_min));
    }

    #[test]
    fn rho_p_is_dirac_without_negative_cycles() {
        // The zero-weight cycle does not count as negative, so both Min
        // vertices follow sigma1 surely and p is irrelevant.
        let g = fixtures::fig3();
        let (s1, s2) = mixed_pieces(&g, 5);
        let rho = build_rho_p(&g, &s1, &s2, &rat(1, 2)).unwrap();
        for name in ["v_0", "v_1"] {
            let v = g.find(name).unwrap();
            assert!(rho.is_dirac(v));
            assert_eq!(rho.support(v).unwrap()[0].0, s1.get(v).unwrap());
        }
    }

    #[test]
    fn rho_p_rejects_degenerate_probabilities() {
        let g = fixtures::fig1();
        let (s1, s2) = mixed_pieces(&g, 10);
        for p in [rat(0, 1), rat(1, 1), rat(3, 2), rat(-1, 2)] {
            assert!(build_rho_p(&g, &s1, &s2, &p).is_err());
        }
    }

    #[test]
    fn almost_sure_reach() {
        let g = fixtures::fig1();
        let (s1, s2) = mixed_pieces(&g, 10);
        let mixed = build_rho_p(&g, &s1, &s2, &rat(1, 2)).unwrap();
        assert!(check_almost_sure_reach(&g, &mixed).unwrap());
        // The pure fake-optimal strategy keeps the play on the cycle and
        // lets Max loop forever.
        let dirac = RandStrategy::from_pure(&g, &s1).unwrap();
        assert!(!check_almost_sure_reach(&g, &dirac).unwrap());
    }

    #[test]
    fn bound_constants_of_four_vertex_game() {
        let g = fixtures::fig2();
        let params = graph_params(&g, true).unwrap();
        let eps = rat(1, 10);
        let bound = probability_bound(&params, 5, 15, -8, &eps).unwrap();
        assert_eq!(bound.a, 12);
        assert_eq!(bound.b, rat_int(257));
        // p2 = 1 - eps / (2 (75 2^270 + 3 2^271)) = 1 - 1/(810 2^271)
        // dominates both other candidates.
        let denom = Rational::from_integer(pow2(271)) * rat_int(810);
        assert_eq!(bound.p_min, Rational::one() - denom.recip());
    }

    #[test]
    fn bound_constants_of_two_vertex_cycle_game() {
        let g = fixtures::fig1();
        let params = graph_params(&g, true).unwrap();
        let eps = rat(1, 10);
        let bound = probability_bound(&params, 3, 10, -10, &eps).unwrap();
        assert_eq!(bound.a, 2);
        assert_eq!(bound.b, rat_int(85));
        // p2 = 1 - eps/(2 * 30 * 2^88) beats p3 = 1 - eps/(2^89 * 10).
        let denom = Rational::from_integer(pow2(88)) * rat_int(600);
        assert_eq!(bound.p_min, Rational::one() - denom.recip());
    }

    #[test]
    fn bound_needs_positive_epsilon() {
        let g = fixtures::fig1();
        let params = graph_params(&g, false).unwrap();
        assert!(probability_bound(&params, 3, 10, -10, &rat(0, 1)).is_err());
        assert!(probability_bound(&params, 3, 10, -10, &rat(-1, 2)).is_err());
    }

    #[test]
    fn bound_is_monotone_in_epsilon() {
        let g = fixtures::fig2();
        let params = graph_params(&g, true).unwrap();
        let mut last: Option<Rational> = None;
        for eps in [rat(1, 100), rat(1, 10), rat(1, 2), rat_int(1), rat_int(4)] {
            let bound = probability_bound(&params, 5, 15, -8, &eps).unwrap();
            if let Some(prev) = last {
                assert!(bound.p_min <= prev, "p_min must shrink as epsilon grows");
            }
            last = Some(bound.p_min);
        }
    }

    #[test]
    fn synthesis_on_two_vertex_cycle_game() {
        let g = fixtures::fig1();
        let sol = solve_values(&g).unwrap();
        let params = graph_params(&g, true).unwrap();
        let v0 = g.find("v_Min").unwrap();
        let out = synthesize_epsilon_optimal(&g, &sol, v0, 10, &rat(1, 10), &params).unwrap();
        assert_eq!(out.bound.dval_sigma_v0, -10);
        assert!(!out.strategy.is_dirac(v0));
        assert!(check_almost_sure_reach(&g, &out.strategy).unwrap());
    }
}
