//! Two-player zero-sum shortest-path games on integer-weighted graphs:
//! exact solving and strategy synthesis.
//!
//! One player (Min) steers the token toward a target set while paying the
//! traversed edge weights; the opponent (Max) maximizes that cost, with
//! +inf for plays that never arrive. The crate computes the optimal
//! values of all vertices by value iteration with divergence
//! classification, synthesizes epsilon-optimal randomized memoryless
//! strategies by mixing a negative-cycle strategy with an attractor
//! strategy, converts randomized strategies back into switching
//! strategies that dominate them, decides whether an optimal memoryless
//! strategy exists, and evaluates strategies exactly (rational
//! arithmetic end to end, including Markov-chain expectations and their
//! Monte-Carlo cross-check).

pub mod analysis;
pub mod convert;
pub mod corpus;
pub mod det;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod markov;
pub mod optimality;
pub mod parse;
pub mod randomized;
pub mod rational;
pub mod simulate;
pub mod values;

pub use error::{Error, Result};
pub use game::{GameGraph, Owner, Play, VertexId};
pub use values::{solve_values, ExtValue, Solution};
