//! Finite Markov chains with weighted transitions, exact expected total
//! payoffs, and Max's best response against a randomized Min strategy.

use num_traits::{One, Signed, Zero};

use crate::analysis::tarjan_sccs;
use crate::det::MaxPureStrategy;
use crate::error::{Error, Result};
use crate::game::{GameGraph, Owner, VertexId};
use crate::randomized::RandStrategy;
use crate::rational::{rat_int, Rational};

/// A Markov chain whose transitions carry weights. Target states are
/// absorbing and carry no transitions; every other state has a full
/// probability distribution over its successors.
#[derive(Clone, Debug)]
pub struct MarkovChain {
    transitions: Vec<Vec<(VertexId, Rational, i64)>>,
    target: Vec<bool>,
}

impl MarkovChain {
    pub fn new(transitions: Vec<Vec<(VertexId, Rational, i64)>>, target: Vec<bool>) -> Result<Self> {
        if transitions.len() != target.len() {
            return Err(Error::InvalidChain("state count mismatch".into()));
        }
        let n = target.len();
        for (v, row) in transitions.iter().enumerate() {
            if target[v] {
                if !row.is_empty() {
                    return Err(Error::InvalidChain(format!(
                        "target state {v} must be absorbing"
                    )));
                }
                continue;
            }
            if row.is_empty() {
                return Err(Error::InvalidChain(format!("state {v} has no transitions")));
            }
            let mut sum = Rational::zero();
            let mut seen = std::collections::HashSet::new();
            for (d, p, w) in row {
                if d.0 >= n {
                    return Err(Error::InvalidChain(format!("successor {d} out of range")));
                }
                if !seen.insert(d.0) {
                    return Err(Error::InvalidChain(format!(
                        "duplicate successor {d} at state {v}"
                    )));
                }
                if !p.is_positive() {
                    return Err(Error::InvalidChain(format!(
                        "non-positive probability at state {v}"
                    )));
                }
                if w.unsigned_abs() > crate::game::MAX_WEIGHT as u64 {
                    return Err(Error::InvalidChain(format!(
                        "weight {w} exceeds the supported bound"
                    )));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidChain(format!(
                    "probabilities at state {v} sum to {sum}, not 1"
                )));
            }
        }
        Ok(MarkovChain { transitions, target })
    }

    pub fn n_states(&self) -> usize {
        self.target.len()
    }

    pub fn is_target(&self, v: VertexId) -> bool {
        self.target[v.0]
    }

    pub fn transitions(&self, v: VertexId) -> &[(VertexId, Rational, i64)] {
        &self.transitions[v.0]
    }
}

/// The chain induced on a game by a randomized Min strategy and a pure Max
/// strategy. States are the game vertices.
pub fn build_mc(g: &GameGraph, rho: &RandStrategy, tau: &MaxPureStrategy) -> Result<MarkovChain> {
    rho.check_for(g)?;
    tau.require_total(g)?;
    let mut transitions = Vec::with_capacity(g.n_vertices());
    let mut target = Vec::with_capacity(g.n_vertices());
    for v in g.vertices() {
        target.push(g.is_target(v));
        let row = match g.owner(v) {
            Owner::Target => Vec::new(),
            Owner::Min => rho
                .support(v)
                .expect("randomized strategy is total on Min")
                .iter()
                .map(|(d, p)| (*d, p.clone(), g.edge_weight(v, *d).unwrap()))
                .collect(),
            Owner::Max => {
                let c = tau.get(v).unwrap();
                vec![(c, Rational::one(), g.edge_weight(v, c).unwrap())]
            }
        };
        transitions.push(row);
    }
    MarkovChain::new(transitions, target)
}

/// Expected total payoffs; `None` where the chain does not reach a target
/// almost surely (the expectation is undefined there).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationVector {
    pub values: Vec<Option<Rational>>,
}

impl ExpectationVector {
    pub fn get(&self, v: VertexId) -> Option<&Rational> {
        self.values[v.0].as_ref()
    }

    pub fn all_defined(&self) -> bool {
        self.values.iter().all(|x| x.is_some())
    }

    /// States with undefined expectation.
    pub fn undefined_states(&self) -> Vec<VertexId> {
        (0..self.values.len()).filter(|&v| self.values[v].is_none()).map(VertexId).collect()
    }
}

/// States from which the chain reaches a target with probability 1: the
/// complement of the states that can reach a target-free bottom component.
fn almost_sure_states(mc: &MarkovChain) -> Vec<bool> {
    let n = mc.n_states();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| mc.transitions(VertexId(v)).iter().map(|(d, _, _)| d.0).collect())
        .collect();
    let comps = tarjan_sccs(&adj);
    let mut comp_of = vec![usize::MAX; n];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }
    let mut bad = vec![false; n];
    // Sinks-first order: every successor's component is already decided.
    for comp in &comps {
        let bottom = comp
            .iter()
            .all(|&v| adj[v].iter().all(|&d| comp_of[d] == comp_of[comp[0]]));
        let has_target = comp.iter().any(|&v| mc.is_target(VertexId(v)));
        let comp_bad = (bottom && !has_target)
            || comp.iter().any(|&v| adj[v].iter().any(|&d| bad[d]));
        if comp_bad {
            for &v in comp {
                bad[v] = true;
            }
        }
    }
    bad.iter().map(|&b| !b).collect()
}

/// Solves the linear system x_v = sum_d P(v,d) (w(v,d) + x_d) with x = 0
/// on targets, exactly, on the almost-surely-reaching part of the chain.
pub fn solve_expectations(mc: &MarkovChain) -> Result<ExpectationVector> {
    let n = mc.n_states();
    let good = almost_sure_states(mc);
    let unknown: Vec<usize> = (0..n).filter(|&v| good[v] && !mc.is_target(VertexId(v))).collect();
    let index_of: std::collections::HashMap<usize, usize> =
        unknown.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let m = unknown.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    let mut b = vec![Rational::zero(); m];
    for (i, &v) in unknown.iter().enumerate() {
        a[i][i] = Rational::one();
        for (d, p, w) in mc.transitions(VertexId(v)) {
            b[i] += p * rat_int(*w);
            if let Some(&j) = index_of.get(&d.0) {
                a[i][j] -= p;
            }
            // Target successors contribute x = 0; a bad successor is
            // impossible from a good state.
            debug_assert!(good[d.0]);
        }
    }
    let x = gaussian_solve(a, b).ok_or_else(|| {
        Error::InvalidChain("expectation system is singular".into())
    })?;

    let mut values = vec![None; n];
    for v in 0..n {
        if mc.is_target(VertexId(v)) {
            values[v] = Some(Rational::zero());
        } else if let Some(&i) = index_of.get(&v) {
            values[v] = Some(x[i].clone());
        }
    }
    Ok(ExpectationVector { values })
}

/// Dense Gaussian elimination with partial pivoting, exact over rationals.
fn gaussian_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).max_by_key(|&r| a[r][col].abs())?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..m {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..m).map(|i| &b[i] / &a[i][i]).collect())
}

/// Max's best memoryless response against `rho`, by policy iteration, with
/// the expected payoffs it achieves.
///
/// Requires `rho` to reach the targets almost surely whatever Max does;
/// then every Max policy induces a proper chain and the iteration ascends
/// to the best response. All switches of a round are applied in vertex
/// order; a switch is skipped if it would cut off the targets (impossible
/// under the precondition, kept as a defensive guard).
pub fn max_best_response(
    g: &GameGraph,
    rho: &RandStrategy,
) -> Result<(MaxPureStrategy, ExpectationVector)> {
    if !crate::randomized::check_almost_sure_reach(g, rho)? {
        return Err(Error::Domain(
            "strategy does not reach the targets almost surely against every Max play".into(),
        ));
    }
    // Start from the rank-decreasing policy of the attractor.
    let att = crate::det::attractor(g, None);
    let mut choice: Vec<Option<VertexId>> = vec![None; g.n_vertices()];
    for v in g.vertices() {
        if g.owner(v) != Owner::Max {
            continue;
        }
        choice[v.0] = g
            .successors(v)
            .map(|(d, _)| d)
            .min_by_key(|d| (att.distance[d.0].unwrap_or(u64::MAX), d.0));
    }
    let mut tau = MaxPureStrategy::new(g, choice)?;

    let mut expectations = solve_expectations(&build_mc(g, rho, &tau)?)?;
    debug_assert!(expectations.all_defined());
    // Each round strictly improves the expectation vector somewhere and
    // never decreases it, so no policy repeats; the bound is defensive.
    for _round in 0..100_000 {
        let mut switched = false;
        for v in g.vertices() {
            if g.owner(v) != Owner::Max {
                continue;
            }
            let cur_val = expectations.get(v).unwrap().clone();
            let mut best: Option<(Rational, VertexId)> = None;
            for (d, w) in g.successors(v) {
                let cand = rat_int(w) + expectations.get(d).unwrap();
                let better = match &best {
                    None => true,
                    Some((bv, bd)) => cand > *bv || (cand == *bv && d.0 < bd.0),
                };
                if better {
                    best = Some((cand, d));
                }
            }
            let (best_val, best_dst) = best.expect("Max vertex has successors");
            if best_val <= cur_val || Some(best_dst) == tau.get(v) {
                continue;
            }
            let mut candidate = tau.clone();
            candidate.set(v, best_dst);
            let mc = build_mc(g, rho, &candidate)?;
            if almost_sure_states(&mc).iter().all(|&b| b) {
                tau = candidate;
                switched = true;
            }
        }
        if !switched {
            break;
        }
        let next = solve_expectations(&build_mc(g, rho, &tau)?)?;
        debug_assert!(next.all_defined());
        debug_assert!(
            g.vertices().all(|v| next.get(v).unwrap() >= expectations.get(v).unwrap()),
            "policy iteration must ascend"
        );
        expectations = next;
    }
    Ok((tau, expectations))
}

/// Value of the best response, extended with +inf for the starting states
/// from which some Max policy avoids the targets with positive probability.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MaxOracleValue {
    Finite(Rational),
    PlusInf,
}

/// Brute-force best response: enumerates every pure Max policy and takes
/// the per-state supremum. Exponential; guarded by `cap` on the number of
/// policies.
pub fn enumerate_max_oracle(
    g: &GameGraph,
    rho: &RandStrategy,
    cap: u64,
) -> Result<Vec<MaxOracleValue>> {
    rho.check_for(g)?;
    let max_vertices: Vec<VertexId> =
        g.vertices().filter(|&v| g.owner(v) == Owner::Max).collect();
    let mut count: u64 = 1;
    for &v in &max_vertices {
        count = count
            .checked_mul(g.out_degree(v) as u64)
            .filter(|&c| c <= cap)
            .ok_or_else(|| Error::CapExceeded(format!("more than {cap} Max policies")))?;
    }

    let mut best: Vec<Option<MaxOracleValue>> = vec![None; g.n_vertices()];
    let mut odometer = vec![0usize; max_vertices.len()];
    loop {
        let mut choice = vec![None; g.n_vertices()];
        for (i, &v) in max_vertices.iter().enumerate() {
            let (d, _) = g.successors(v).nth(odometer[i]).unwrap();
            choice[v.0] = Some(d);
        }
        let tau = MaxPureStrategy::new(g, choice)?;
        let exp = solve_expectations(&build_mc(g, rho, &tau)?)?;
        for v in g.vertices() {
            let val = match exp.get(v) {
                Some(x) => MaxOracleValue::Finite(x.clone()),
                None => MaxOracleValue::PlusInf,
            };
            let slot = &mut best[v.0];
            if slot.as_ref().map_or(true, |cur| val > *cur) {
                *slot = Some(val);
            }
        }

        let mut i = 0;
        loop {
            if i == odometer.len() {
                return Ok(best.into_iter().map(|b| b.unwrap()).collect());
            }
            odometer[i] += 1;
            if odometer[i] < g.out_degree(max_vertices[i]) {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
}
