//! Conversion of a randomized memoryless strategy into a deterministic
//! switching strategy that is at least as good from a chosen start.
//!
//! Given rho reaching the targets almost surely, restrict every Min vertex
//! to the support successors minimizing weight + expected payoff. Inside
//! that restricted game every target-reaching play pays at most the
//! expected payoff of its start, and every cycle weighs <= 0. Choosing at
//! each Min vertex the restricted successor closest to the target (in the
//! support-graph attractor) additionally makes every conforming cycle
//! strictly negative, so the pair (that choice, any attractor strategy)
//! with a long enough switching point undercuts rho's expected payoff.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use crate::det::{attractor, PureStrategy, SwitchingStrategy};
use crate::error::{Error, Result};
use crate::game::{GameGraph, Owner, VertexId};
use crate::markov::{max_best_response, ExpectationVector};
use crate::randomized::{check_almost_sure_reach, support_restriction, RandStrategy};
use crate::rational::{floor_int, rat_int, Rational};

/// A game with Min restricted to the expectation-minimizing support
/// successors.
#[derive(Clone, Debug)]
pub struct RestrictedGame {
    pub base: GameGraph,
    /// The allowed successor set of each Min vertex, in successor
    /// declaration order.
    allowed: Vec<Option<Vec<VertexId>>>,
}

impl RestrictedGame {
    pub fn allowed(&self, v: VertexId) -> Option<&[VertexId]> {
        self.allowed[v.0].as_deref()
    }
}

/// Restricts each Min vertex to the support successors attaining
/// min over supp(rho(v)) of weight(v,v') + mvals(v'), with exact rational
/// comparisons.
pub fn restricted_game(
    g: &GameGraph,
    rho: &RandStrategy,
    mvals: &ExpectationVector,
) -> Result<RestrictedGame> {
    rho.check_for(g)?;
    let value_at = |d: VertexId| -> Result<&Rational> {
        mvals.get(d).ok_or_else(|| {
            Error::Domain(format!(
                "expected payoff undefined at {:?}; the strategy must reach the targets almost surely",
                g.name(d)
            ))
        })
    };
    let mut allowed = vec![None; g.n_vertices()];
    for v in g.vertices() {
        if g.owner(v) != Owner::Min {
            continue;
        }
        value_at(v)?;
        let row = rho.support(v).expect("randomized strategy is total on Min");
        let mut best: Option<Rational> = None;
        for (d, _) in row {
            let cand = rat_int(g.edge_weight(v, *d).unwrap()) + value_at(*d)?;
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        let best = best.expect("support is non-empty");
        let tight: Vec<VertexId> = g
            .successors(v)
            .filter(|(d, _)| row.iter().any(|(s, _)| s == d))
            .filter(|&(d, w)| rat_int(w) + mvals.get(d).unwrap() == best)
            .map(|(d, _)| d)
            .collect();
        allowed[v.0] = Some(tight);
    }
    Ok(RestrictedGame { base: g.clone(), allowed })
}

/// Attractor distances in the support graph of rho (Min restricted to its
/// supports, Max free). Errors when some vertex cannot reach a target
/// there, which contradicts the almost-sure-reach precondition.
pub fn support_distances(g: &GameGraph, rho: &RandStrategy) -> Result<Vec<u64>> {
    rho.check_for(g)?;
    let restriction = support_restriction(g, rho);
    let att = attractor(g, Some(&restriction));
    att.distance
        .iter()
        .enumerate()
        .map(|(v, d)| {
            d.ok_or_else(|| {
                Error::Domain(format!(
                    "{:?} cannot reach a target in the support graph",
                    g.name(VertexId(v))
                ))
            })
        })
        .collect()
}

/// The deterministic choice: at each Min vertex, the allowed successor of
/// smallest support distance, ties broken by smallest id.
pub fn sigma1_from_rho(rg: &RestrictedGame, d: &[u64]) -> Result<PureStrategy> {
    let g = &rg.base;
    let mut choice = vec![None; g.n_vertices()];
    for v in g.vertices() {
        if let Some(tight) = rg.allowed(v) {
            choice[v.0] = tight.iter().copied().min_by_key(|c| (d[c.0], c.0));
            if choice[v.0].is_none() {
                return Err(Error::InvalidStrategy(format!(
                    "empty restricted successor set at {:?}",
                    g.name(v)
                )));
            }
        }
    }
    PureStrategy::new(g, choice)
}

/// The conversion outcome with its intermediate artifacts.
#[derive(Clone, Debug)]
pub struct ConvertOutcome {
    pub switching: SwitchingStrategy,
    /// Max's best response against rho.
    pub tau: crate::det::MaxPureStrategy,
    /// Expected payoffs of rho against that response.
    pub mvals: ExpectationVector,
}

/// Builds a switching strategy whose adversarial value from `v0` is at
/// most rho's expected payoff there: sigma1 as above, sigma2 an attractor
/// strategy, and alpha = max(0, |V| W - floor(mVal(v0))) |V| + 1 (the
/// floor can only enlarge alpha).
pub fn convert_detailed(g: &GameGraph, rho: &RandStrategy, v0: VertexId) -> Result<ConvertOutcome> {
    if !check_almost_sure_reach(g, rho)? {
        return Err(Error::Domain(
            "strategy does not reach the targets almost surely against every Max play".into(),
        ));
    }
    let (tau, mvals) = max_best_response(g, rho)?;
    let rg = restricted_game(g, rho, &mvals)?;
    let d = support_distances(g, rho)?;
    let sigma1 = sigma1_from_rho(&rg, &d)?;
    let att = attractor(g, None);
    debug_assert!(att.covers_all());

    let nv = BigInt::from(g.n_vertices());
    let vw = &nv * BigInt::from(g.max_abs_weight());
    let mval_v0 = mvals
        .get(v0)
        .ok_or_else(|| Error::Domain("expected payoff undefined at the initial vertex".into()))?;
    let span = vw - floor_int(mval_v0);
    let alpha = if span.is_positive() { span * &nv + 1 } else { BigInt::from(1) };
    let alpha = BigUint::try_from(alpha).expect("alpha is positive");

    let switching = SwitchingStrategy::new(g, sigma1, att.strategy, alpha)?;
    Ok(ConvertOutcome { switching, tau, mvals })
}

/// See [`convert_detailed`]; returns only the strategy.
pub fn convert(g: &GameGraph, rho: &RandStrategy, v0: VertexId) -> Result<SwitchingStrategy> {
    Ok(convert_detailed(g, rho, v0)?.switching)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::{eval_switching_strategy, verify_nc, DEFAULT_ALPHA_CAP};
    use crate::fixtures;
    use crate::rational::rat;

    fn id(g: &GameGraph, name: &str) -> VertexId {
        g.find(name).unwrap()
    }

    /// rho'_p on the zero-cycle game: mix between entering the cycle and
    /// exiting, at both vertices.
    fn rho_prime(g: &GameGraph, p: Rational) -> RandStrategy {
        let q = Rational::from_integer(1.into()) - &p;
        let dist = vec![
            // v_0: p to v_1 (the sigma1 edge), 1-p to smiley.
            Some(vec![(id(g, "v_1"), p.clone()), (id(g, "smiley"), q.clone())]),
            // v_1: p to smiley (the sigma1 edge), 1-p to v_0.
            Some(vec![(id(g, "smiley"), p), (id(g, "v_0"), q)]),
            None,
        ];
        RandStrategy::new(g, dist).unwrap()
    }

    #[test]
    fn restricted_game_of_mixed_zero_cycle_strategy() {
        // With p = 9/10: mval(v_0) = -2 p^2 / (1 - p(1-p)) and
        // mval(v_1) = (p^2 - 3p + 1) / (1 - p(1-p)); entering the cycle
        // at v_0 beats exiting, while at v_1 the direct exit wins.
        let g = fixtures::fig3();
        let rho = rho_prime(&g, rat(9, 10));
        let (_, mvals) = max_best_response(&g, &rho).unwrap();
        let denom = rat(91, 100); // 1 - p(1-p)
        assert_eq!(mvals.get(id(&g, "v_0")), Some(&(rat(-162, 100) / denom.clone())));
        assert_eq!(mvals.get(id(&g, "v_1")), Some(&(rat(-89, 100) / denom)));

        let rg = restricted_game(&g, &rho, &mvals).unwrap();
        assert_eq!(rg.allowed(id(&g, "v_0")), Some(&[id(&g, "v_1")][..]));
        assert_eq!(rg.allowed(id(&g, "v_1")), Some(&[id(&g, "smiley")][..]));
    }

    #[test]
    fn restricted_game_of_dirac_strategy() {
        let g = fixtures::fig3();
        let sol = crate::values::solve_values(&g).unwrap();
        let sigma = crate::det::fake_optimal_nc_strategy(&g, &sol).unwrap();
        let rho = RandStrategy::from_pure(&g, &sigma).unwrap();
        let (_, mvals) = max_best_response(&g, &rho).unwrap();
        let rg = restricted_game(&g, &rho, &mvals).unwrap();
        for v in ["v_0", "v_1"] {
            let v = id(&g, v);
            assert_eq!(rg.allowed(v), Some(&[sigma.get(v).unwrap()][..]));
        }
    }

    #[test]
    fn support_distances_of_mixed_strategies() {
        let g = fixtures::fig3();
        let rho = rho_prime(&g, rat(1, 2));
        let d = support_distances(&g, &rho).unwrap();
        assert_eq!(d[id(&g, "smiley").0], 0);
        assert_eq!(d[id(&g, "v_0").0], 1);
        assert_eq!(d[id(&g, "v_1").0], 1);

        let g1 = fixtures::fig1();
        let sol = crate::values::solve_values(&g1).unwrap();
        let s = crate::det::switching_strategy(&g1, &sol, 10).unwrap();
        let rho1 =
            crate::randomized::build_rho_p(&g1, &s.sigma1, &s.sigma2, &rat(1, 2)).unwrap();
        let d1 = support_distances(&g1, &rho1).unwrap();
        assert_eq!(d1[id(&g1, "v_Min").0], 1);
        assert_eq!(d1[id(&g1, "v_Max").0], 2);
    }

    #[test]
    fn support_distances_require_reachability() {
        let g = fixtures::fig1();
        let sol = crate::values::solve_values(&g).unwrap();
        let sigma1 = crate::det::fake_optimal_nc_strategy(&g, &sol).unwrap();
        let rho = RandStrategy::from_pure(&g, &sigma1).unwrap();
        assert!(support_distances(&g, &rho).is_err());
    }

    #[test]
    fn sigma1_choice_on_zero_cycle_game() {
        // rho''_p mixes only at v_1 (between the cycle edge and the exit,
        // which tie in expectation); sigma1 must break the tie toward the
        // target.
        let g = fixtures::fig3();
        let p = rat(1, 2);
        let q = Rational::from_integer(1.into()) - &p;
        let rho = RandStrategy::new(
            &g,
            vec![
                Some(vec![(id(&g, "v_1"), Rational::from_integer(1.into()))]),
                Some(vec![(id(&g, "v_0"), q), (id(&g, "smiley"), p)]),
                None,
            ],
        )
        .unwrap();
        let (_, mvals) = max_best_response(&g, &rho).unwrap();
        // Both vertices still expect -2 and -1: the mixture only delays
        // the inevitable along the zero-weight cycle.
        assert_eq!(mvals.get(id(&g, "v_0")), Some(&rat(-2, 1)));
        assert_eq!(mvals.get(id(&g, "v_1")), Some(&rat(-1, 1)));
        let rg = restricted_game(&g, &rho, &mvals).unwrap();
        assert_eq!(rg.allowed(id(&g, "v_0")), Some(&[id(&g, "v_1")][..]));
        let mut both = rg.allowed(id(&g, "v_1")).unwrap().to_vec();
        both.sort();
        assert_eq!(both, vec![id(&g, "v_0"), id(&g, "smiley")]);

        let d = support_distances(&g, &rho).unwrap();
        let sigma1 = sigma1_from_rho(&rg, &d).unwrap();
        assert_eq!(sigma1.get(id(&g, "v_0")), Some(id(&g, "v_1")));
        assert_eq!(sigma1.get(id(&g, "v_1")), Some(id(&g, "smiley")));
        assert_eq!(verify_nc(&g, &sigma1), Ok(true));
    }

    #[test]
    fn convert_dominates_expected_payoff() {
        let g = fixtures::fig1();
        let sol = crate::values::solve_values(&g).unwrap();
        let s = crate::det::switching_strategy(&g, &sol, 10).unwrap();
        let v0 = id(&g, "v_Min");
        for (pn, pd) in [(9i64, 10i64), (1, 2), (99, 100)] {
            let rho =
                crate::randomized::build_rho_p(&g, &s.sigma1, &s.sigma2, &rat(pn, pd)).unwrap();
            let out = convert_detailed(&g, &rho, v0).unwrap();
            let dval = eval_switching_strategy(&g, &out.switching, v0, DEFAULT_ALPHA_CAP).unwrap();
            let mval = out.mvals.get(v0).unwrap();
            assert!(
                rat_int(dval) <= *mval,
                "p={pn}/{pd}: {dval} > {mval}"
            );
        }
    }

    #[test]
    fn convert_recovers_optimal_switching_on_two_vertex_game() {
        // With p = 9/10 Max's best response still loops, mval(v_Min) =
        // -10p... actually Max retreats to quitting: whichever it picks,
        // the conversion recovers sigma1 into the cycle and the attractor
        // exit, and its value is back to the optimum -10 <= mval.
        let g = fixtures::fig1();
        let sol = crate::values::solve_values(&g).unwrap();
        let s = crate::det::switching_strategy(&g, &sol, 10).unwrap();
        let v0 = id(&g, "v_Min");
        let rho = crate::randomized::build_rho_p(&g, &s.sigma1, &s.sigma2, &rat(9, 10)).unwrap();
        let out = convert_detailed(&g, &rho, v0).unwrap();
        assert_eq!(out.switching.sigma1.get(v0), Some(id(&g, "v_Max")));
        assert_eq!(out.switching.sigma2.get(v0), Some(id(&g, "smiley")));
        let dval = eval_switching_strategy(&g, &out.switching, v0, DEFAULT_ALPHA_CAP).unwrap();
        assert_eq!(dval, -10);
    }

    #[test]
    fn convert_requires_almost_sure_reach() {
        let g = fixtures::fig1();
        let sol = crate::values::solve_values(&g).unwrap();
        let sigma1 = crate::det::fake_optimal_nc_strategy(&g, &sol).unwrap();
        let rho = RandStrategy::from_pure(&g, &sigma1).unwrap();
        assert!(convert(&g, &rho, id(&g, "v_Min")).is_err());
    }
}
