// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-alphabet probability primitives. All information quantities are
//! in bits.

mod joint;
mod measures;
mod model;
mod pmf;
mod typical;

pub use joint::{compose, JointPmf};
pub use measures::{conditional_entropy, entropy, entropy_of, mutual_information};
pub use model::{EveModel, SourceModel};
pub use pmf::{Alphabet, CondPmf, Pmf};
pub use typical::{empirical_pmf, is_typical, is_typical_counts, joint_counts};

/// Sequence symbol. Alphabets are tiny, so one byte suffices.
pub type Symbol = u8;

/// Tolerance used when accepting a vector of probabilities as a pmf.
pub const PMF_SUM_TOL: f64 = 1e-9;
