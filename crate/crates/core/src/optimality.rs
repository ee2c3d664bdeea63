//! Deciding whether Min has an optimal memoryless strategy.
//!
//! On a game with all values finite, value iteration stagnates at the
//! values no later than stage |V| - 1 exactly when an optimal memoryless
//! strategy exists, provided the one-step-optimal edges at that stage let
//! Min reach the targets from everywhere. Both conditions together are
//! also sufficient, and an attractor strategy over those edges is then
//! optimal. The whole decision costs |V| applications of the one-step
//! operator plus one attractor computation.

use serde::{Deserialize, Serialize};

use crate::det::{attractor, PureStrategy};
use crate::error::{Error, Result};
use crate::game::GameGraph;
use crate::values::{bellman_step, initial_vector, permissive_from, solve_values, ValueVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimalityReason {
    /// An optimal memoryless strategy exists.
    Ok,
    /// f^(|V|-1) != f^(|V|): the horizon values have not stagnated yet.
    EarlyStationarityFailed,
    /// Values stagnated but the one-step-optimal edges strand some vertex
    /// away from the targets.
    AttractorFailed,
}

#[derive(Clone, Debug)]
pub struct OptimalityReport {
    pub exists: bool,
    pub reason: OptimalityReason,
    pub optimal_strategy: Option<PureStrategy>,
    /// f^(|V|-1).
    pub f_prev: ValueVector,
    /// f^(|V|).
    pub f_last: ValueVector,
    /// Always |V|.
    pub bellman_applications: usize,
}

/// Decides the existence of an optimal memoryless Min strategy.
///
/// Errors with a domain error when some vertex has an infinite value.
pub fn check_optimal_memoryless(g: &GameGraph) -> Result<OptimalityReport> {
    let sol = solve_values(g)?;
    if !sol.all_finite() {
        return Err(Error::Domain(
            "optimality check requires every value to be finite".into(),
        ));
    }
    let n = g.n_vertices();

    let mut applications = 0usize;
    let mut f_prev = initial_vector(g);
    for _ in 1..n {
        f_prev = bellman_step(g, &f_prev);
        applications += 1;
    }
    let f_last = if n == 0 {
        f_prev.clone()
    } else {
        applications += 1;
        bellman_step(g, &f_prev)
    };
    assert_eq!(applications, n);

    if f_prev.values != f_last.values {
        return Ok(OptimalityReport {
            exists: false,
            reason: OptimalityReason::EarlyStationarityFailed,
            optimal_strategy: None,
            f_prev,
            f_last,
            bellman_applications: applications,
        });
    }
    // A stationary stage-(|V|-1) vector is the fixpoint, hence the values.
    debug_assert_eq!(f_last.values, sol.values.values);

    let pe = permissive_from(g, &f_prev, &f_last);
    let att = attractor(g, Some(&pe));
    if !att.covers_all() {
        return Ok(OptimalityReport {
            exists: false,
            reason: OptimalityReason::AttractorFailed,
            optimal_strategy: None,
            f_prev,
            f_last,
            bellman_applications: applications,
        });
    }
    Ok(OptimalityReport {
        exists: true,
        reason: OptimalityReason::Ok,
        optimal_strategy: Some(att.strategy),
        f_prev,
        f_last,
        bellman_applications: applications,
    })
}

/// The optimal memoryless strategy, when one exists.
pub fn extract_optimal(g: &GameGraph) -> Result<PureStrategy> {
    check_optimal_memoryless(g)?.optimal_strategy.ok_or_else(|| {
        Error::Domain("no optimal memoryless strategy exists for this game".into())
    })
}

/// Ground truth by exhaustion: does some total Min strategy achieve the
/// value of every vertex simultaneously? Errors when the policy count
/// exceeds `cap`.
pub fn exists_optimal_by_enumeration(g: &GameGraph, cap: u128) -> Result<bool> {
    use crate::game::Owner;

    let sol = solve_values(g)?;
    let min_vertices: Vec<_> =
        g.vertices().filter(|&v| g.owner(v) == Owner::Min).collect();
    let degrees: Vec<usize> = min_vertices.iter().map(|&v| g.out_degree(v)).collect();
    let mut count: u128 = 1;
    for &d in &degrees {
        count = count
            .checked_mul(d as u128)
            .filter(|&c| c <= cap)
            .ok_or_else(|| Error::CapExceeded("too many Min strategies to enumerate".into()))?;
    }

    let succ_lists: Vec<Vec<_>> = min_vertices
        .iter()
        .map(|&v| g.successors(v).map(|(d, _)| d).collect())
        .collect();
    let mut odometer = vec![0usize; min_vertices.len()];
    loop {
        let mut choice = vec![None; g.n_vertices()];
        for (i, &v) in min_vertices.iter().enumerate() {
            choice[v.0] = Some(succ_lists[i][odometer[i]]);
        }
        let sigma = PureStrategy::new(g, choice)?;
        let eval = crate::det::eval_pure_strategy(g, &sigma)?;
        if g.vertices().all(|v| eval[v.0] == sol.get(v)) {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == odometer.len() {
                return Ok(false);
            }
            odometer[i] += 1;
            if odometer[i] < degrees[i] {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
}
