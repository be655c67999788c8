// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-blocklength likelihood-encoder scheme.
//!
//! Alice flips a Bernoulli(1 - eps) switch. On 0 she sends the dummy
//! message 0. On 1 she samples `M'` from the likelihood encoder over a
//! random codebook and sends it if `(u(M'), x)` is `mu`-typical for `P_UX`,
//! else 0. Bob declares H0 iff the message is nonzero and `(u(m), y)` is
//! `2 mu`-typical for `P_UY`.
//!
//! Messages are numbered `0..=msg_count`; codeword `m` (for `m >= 1`) is
//! row `m - 1` of the codebook.

mod codebook;
mod coding;
mod exact;
mod full_joint;
mod montecarlo;
mod params;

pub use codebook::{generate_codebook, msg_count_for, Codebook, MAX_CODEBOOK_BITS};
pub use coding::{decode, encode, likelihood_posterior, Encoded, Hypothesis, Posterior};
pub use exact::{
    encoder_law, exact_equivocation, exact_equivocation_chain_rule, exact_error_probs,
    soft_covering_tv, ExactErrors, EXACT_STATE_LIMIT,
};
pub use full_joint::construct_full_joint;
pub use montecarlo::{mc_error_estimates, wilson_interval, McEstimates};
pub use params::SchemeParams;
