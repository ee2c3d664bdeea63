//! Monte-Carlo cross-validation of exact chain expectations.
//!
//! Sampling is exact: each step draws 512 uniform bits and compares the
//! draw against the rational cumulative distribution with integer
//! arithmetic, so probabilities like 1 - 2^{-300} are honored instead of
//! collapsing to 1.0 in a float. Floats only appear in the aggregated
//! report.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::VertexId;
use crate::markov::MarkovChain;

/// Resolution of one uniform draw, in bits.
const DRAW_BITS: usize = 512;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub episodes: u64,
    /// Steps after which a non-terminated episode is abandoned.
    pub step_cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Mean total payoff over the episodes that reached a target; NaN if
    /// none did.
    pub mean_tp: f64,
    /// Standard error of that mean (0 for fewer than two samples).
    pub stderr: f64,
    pub reach_fraction: f64,
    /// Episodes abandoned at the step cap.
    pub truncated: u64,
}

/// One state's sampling table: cumulative thresholds num << 512 over den,
/// paired with the destination and edge weight.
struct CumulativeRow {
    entries: Vec<(BigUint, BigUint, VertexId, i64)>,
}

impl CumulativeRow {
    fn build(row: &[(VertexId, crate::rational::Rational, i64)]) -> CumulativeRow {
        let mut acc = crate::rational::Rational::from_integer(0.into());
        let entries = row
            .iter()
            .map(|(d, p, w)| {
                acc += p;
                let num = BigUint::try_from(acc.numer().clone())
                    .expect("cumulative probability is non-negative");
                let den = BigUint::try_from(acc.denom().clone())
                    .expect("denominator is positive");
                (num << DRAW_BITS, den, *d, *w)
            })
            .collect();
        CumulativeRow { entries }
    }

    /// Inverse CDF at u / 2^512.
    fn pick(&self, u: &BigUint) -> (VertexId, i64) {
        for (num_shifted, den, d, w) in &self.entries {
            if u * den < *num_shifted {
                return (*d, *w);
            }
        }
        // u < 2^512 and the last threshold is exactly 1, so the loop
        // always returns; reaching here would mean the row sums below 1.
        unreachable!("transition probabilities sum to one");
    }
}

/// Samples episodes of the chain from `v0`, reporting the empirical mean
/// total payoff. Deterministic for a fixed (chain, v0, config).
///
/// Out-of-range `episodes`/`step_cap` are clamped up to their minima
/// (1 episode, |states| steps) rather than rejected.
pub fn simulate(mc: &MarkovChain, v0: VertexId, cfg: &SimConfig) -> SimReport {
    let episodes = cfg.episodes.max(1);
    let step_cap = cfg.step_cap.max(mc.n_states() as u64);
    let rows: Vec<Option<CumulativeRow>> = (0..mc.n_states())
        .map(|s| {
            let row = mc.transitions(VertexId(s));
            // Single-destination rows are followed without spending
            // randomness, which keeps the draw stream aligned across
            // chains that differ only in their deterministic parts.
            if row.len() > 1 {
                Some(CumulativeRow::build(row))
            } else {
                None
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut buf = [0u8; DRAW_BITS / 8];
    let mut reached: u64 = 0;
    let mut truncated: u64 = 0;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;

    for _ in 0..episodes {
        let mut state = v0;
        let mut tp: i128 = 0;
        let mut steps = 0u64;
        let outcome = loop {
            if mc.is_target(state) {
                break Some(tp);
            }
            if steps == step_cap {
                break None;
            }
            let (next, w) = match &rows[state.0] {
                Some(cum) => {
                    rng.fill_bytes(&mut buf);
                    let u = BigUint::from_bytes_le(&buf);
                    cum.pick(&u)
                }
                None => {
                    let (d, _, w) = mc.transitions(state)[0].clone();
                    (d, w)
                }
            };
            tp += i128::from(w);
            state = next;
            steps += 1;
        };
        match outcome {
            Some(tp) => {
                reached += 1;
                let x = tp as f64;
                sum += x;
                sum_sq += x * x;
            }
            None => truncated += 1,
        }
    }

    let n = reached as f64;
    let mean_tp = if reached > 0 { sum / n } else { f64::NAN };
    let stderr = if reached > 1 {
        let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    SimReport {
        mean_tp,
        stderr,
        reach_fraction: reached as f64 / episodes as f64,
        truncated,
    }
}
