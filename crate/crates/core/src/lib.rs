// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Type-II error exponents for distributed hypothesis testing against
//! independence when an eavesdropper must be kept uncertain about the
//! sensor's source, together with a finite-blocklength simulator of the
//! likelihood-encoder scheme that achieves them.
//!
//! * [`prob`] holds finite-alphabet pmfs, information measures (bits) and
//!   strong typicality.
//! * [`region`] evaluates the single-letter rate/exponent/equivocation
//!   region and optimizes the exponent over auxiliary channels.
//! * [`scheme`] builds random codebooks, runs the likelihood encoder and
//!   typicality decoder, and measures errors and equivocation exactly or
//!   by Monte Carlo.

// `!(x > 0.0)` style guards are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod prob;
pub mod region;
pub mod rng;
pub mod scheme;

pub use error::{Error, Result};
