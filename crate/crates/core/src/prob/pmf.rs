// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::PMF_SUM_TOL;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
        }
        if size > usize::from(u8::MAX) + 1 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {size} exceeds 256"
            )));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut alphabet = Self::new(labels.len())?;
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidParameter(format!("duplicate label {l:?}")));
            }
        }
        alphabet.labels = Some(labels);
        Ok(alphabet)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, symbol: usize) -> String {
        match &self.labels {
            Some(l) => l[symbol].clone(),
            None => symbol.to_string(),
        }
    }
}

/// A probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates and normalizes. Inputs whose total is off by more than
    /// `PMF_SUM_TOL` are rejected rather than rescaled.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty probability vector".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPmf(format!(
                    "entry {i} = {p} is not a probability"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    /// Normalizes an arbitrary non-negative weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0 || w.is_nan()) {
            return Err(Error::InvalidPmf(format!(
                "cannot normalize weights (total {total})"
            )));
        }
        Ok(Self {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidPmf("empty probability vector".into()));
        }
        Ok(Self {
            probs: vec![1.0 / len as f64; len],
        })
    }

    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::SymbolOutOfRange {
                symbol: at,
                size: len,
            });
        }
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// A row-stochastic matrix: row `i` is the law of the output given input `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondPmf {
    rows: Vec<Pmf>,
    out_size: usize,
}

impl CondPmf {
    pub fn new(rows: Vec<Pmf>) -> Result<Self> {
        let out_size = rows
            .first()
            .map(Pmf::len)
            .ok_or_else(|| Error::InvalidPmf("conditional pmf has no rows".into()))?;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != out_size) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {out_size}",
                r.len()
            )));
        }
        Ok(Self { rows, out_size })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                Pmf::new(r).map_err(|e| match e {
                    Error::InvalidPmf(msg) => Error::InvalidPmf(format!("row {i}: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Every row equal to `row`.
    pub fn constant(in_size: usize, row: Pmf) -> Result<Self> {
        if in_size == 0 {
            return Err(Error::InvalidParameter(
                "conditional pmf needs >= 1 row".into(),
            ));
        }
        Self::new(vec![row; in_size])
    }

    pub fn identity(size: usize) -> Result<Self> {
        (0..size)
            .map(|i| Pmf::point_mass(size, i))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel; outputs are ordered `0, 1, erasure`.
    pub fn bec(pe: f64) -> Result<Self> {
        Self::from_rows(vec![vec![1.0 - pe, 0.0, pe], vec![0.0, 1.0 - pe, pe]])
    }

    pub fn in_size(&self) -> usize {
        self.rows.len()
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn row(&self, i: usize) -> &Pmf {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    /// Output law when the input is distributed as `input`.
    pub fn push_forward(&self, input: &Pmf) -> Result<Pmf> {
        if input.len() != self.in_size() {
            return Err(Error::DimensionMismatch(format!(
                "input pmf has {} entries, channel expects {}",
                input.len(),
                self.in_size()
            )));
        }
        let mut out = vec![0.0; self.out_size];
        for (p, row) in input.probs().iter().zip(&self.rows) {
            for (o, q) in out.iter_mut().zip(row.probs()) {
                *o += p * q;
            }
        }
        Pmf::from_weights(out)
    }

    /// Reverse channel by Bayes' rule. Rows for outputs of zero probability
    /// are set to `input` itself.
    pub fn bayes_reverse(&self, input: &Pmf) -> Result<CondPmf> {
        let out = self.push_forward(input)?;
        let rows = (0..self.out_size)
            .map(|o| {
                if out[o] > 0.0 {
                    Pmf::from_weights(
                        (0..self.in_size())
                            .map(|i| input[i] * self.get(i, o))
                            .collect(),
                    )
                } else {
                    Ok(input.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        CondPmf::new(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_within_tolerance() {
        let p = Pmf::new(vec![0.5, 0.5 + 1e-10]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_badly_scaled_input() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn alphabet_invariants() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::with_labels(vec!["a".into(), "a".into()]).is_err());
        let a = Alphabet::with_labels(vec!["0".into(), "e".into()]).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.label(1), "e");
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(CondPmf::from_rows(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn bayes_reverse_of_bsc() {
        let px = Pmf::new(vec![0.8, 0.2]).unwrap();
        let rev = CondPmf::bsc(0.2).unwrap().bayes_reverse(&px).unwrap();
        // P(Z=0) = 0.68, P(X=0|Z=0) = 0.64 / 0.68
        assert!((rev.get(0, 0) - 0.64 / 0.68).abs() < 1e-15);
    }

    #[test]
    fn bayes_reverse_fills_unreachable_rows_with_prior() {
        let px = Pmf::new(vec![0.3, 0.7]).unwrap();
        let ch = CondPmf::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let rev = ch.bayes_reverse(&px).unwrap();
        assert_eq!(rev.row(2), &px);
    }
}
