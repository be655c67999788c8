// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("empty sequence")]
    EmptySequence,

    #[error("sequence length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard exceeded: {what} needs {needed} states, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        needed: f64,
        limit: f64,
    },

    #[error("operation requires a full eavesdropper model P(z|x,y)")]
    RequiresFullModel,

    #[error("operating condition violated: rate {rate} must exceed I(U;X) = {required}")]
    OperatingCondition { rate: f64, required: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
