// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! The single-letter region of achievable (rate, exponent, equivocation)
//! tuples and its optimization over auxiliary channels `P(u|x)`.
//!
//! For an auxiliary channel and switch probability `eps`, the region point
//! is
//!
//! * rate needed `I_P(U;X)`,
//! * type-II exponent `I_P(U;Y)`,
//! * null-hypothesis equivocation cap `(1-eps) H_P(X|UZ) + eps H_P(X|Z)`,
//! * alternative-hypothesis cap `(1-eps) H_Q(X|UZ) + eps H_Q(X|Z)`,
//!
//! where `P = P(u|x) P_XYZ` and `Q = P(u|x) P_X P_Y P(z|x,y)`.

mod aux;
mod fast;
mod optimize;
mod oracle;
mod point;
#[cfg(test)]
pub(crate) use point::tests as tests_support;
mod sweep;

pub use aux::{build_joint_h0, build_joint_h1, AuxChannel, AXIS_U, AXIS_X, AXIS_Y, AXIS_Z};
pub use fast::{Evaluator, Metrics};
pub use optimize::{
    baseline_exponent, optimal_exponent, solve, Baseline, ExponentQuery, ExponentSolution,
    OptimizerConfig, SolveStatus,
};
pub use oracle::brute_force_oracle;
pub use point::{evaluate_point, Entropies, RegionPoint};
pub use sweep::{sweep_rate_curve, SweepRow};
