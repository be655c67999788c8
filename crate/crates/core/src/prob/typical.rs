// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Types of sequences and strong typicality.
//!
//! A tuple of aligned sequences is `mu`-typical for a reference joint pmf
//! when every joint symbol's empirical frequency is within `mu` of its
//! reference probability and symbols of zero reference probability never
//! occur. `mu` is not scaled by the alphabet size. The comparison is closed
//! (`<=`), with a 1e-12 allowance so that exact ties are not lost to
//! rounding.

use super::{JointPmf, Pmf, Symbol};
use crate::{Error, Result};

const TIE_SLACK: f64 = 1e-12;

pub fn empirical_pmf(seq: &[Symbol], size: usize) -> Result<Pmf> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts = vec![0u64; size];
    for &s in seq {
        let s = usize::from(s);
        if s >= size {
            return Err(Error::SymbolOutOfRange { symbol: s, size });
        }
        counts[s] += 1;
    }
    let n = seq.len() as f64;
    Pmf::from_weights(counts.into_iter().map(|c| c as f64 / n).collect())
}

/// Joint symbol counts of aligned sequences, row-major over `shape`.
pub fn joint_counts(seqs: &[&[Symbol]], shape: &[usize]) -> Result<Vec<u32>> {
    if seqs.len() != shape.len() || seqs.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} sequences for a {}-axis reference",
            seqs.len(),
            shape.len()
        )));
    }
    let n = seqs[0].len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if let Some(s) = seqs.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let mut counts = vec![0u32; shape.iter().product()];
    for t in 0..n {
        let mut flat = 0;
        for (seq, &size) in seqs.iter().zip(shape) {
            let s = usize::from(seq[t]);
            if s >= size {
                return Err(Error::SymbolOutOfRange { symbol: s, size });
            }
            flat = flat * size + s;
        }
        counts[flat] += 1;
    }
    Ok(counts)
}

/// Typicality test on precomputed joint counts of length-`n` sequences.
pub fn is_typical_counts(counts: &[u32], n: usize, reference: &[f64], mu: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(reference).all(|(&c, &r)| {
        if r == 0.0 {
            c == 0
        } else {
            (f64::from(c) / n - r).abs() <= mu + TIE_SLACK
        }
    })
}

pub fn is_typical(seqs: &[&[Symbol]], reference: &JointPmf, mu: f64) -> Result<bool> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "typicality radius {mu} must be > 0"
        )));
    }
    let counts = joint_counts(seqs, &reference.shape())?;
    Ok(is_typical_counts(
        &counts,
        seqs[0].len(),
        reference.mass(),
        mu,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    #[test]
    fn empirical_examples() {
        let p = empirical_pmf(&[0, 1, 0], 2).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            empirical_pmf(&[2, 2, 2], 3).unwrap().probs(),
            &[0.0, 0.0, 1.0]
        );
        assert_eq!(empirical_pmf(&[], 2), Err(Error::EmptySequence));
        assert!(matches!(
            empirical_pmf(&[0, 3], 2),
            Err(Error::SymbolOutOfRange { .. })
        ));
    }

    #[test]
    fn typicality_examples() {
        let uniform = JointPmf::new(vec![Alphabet::new(2).unwrap()], vec![0.5, 0.5]).unwrap();
        let mu = 3f64.powf(-1.0 / 3.0);
        assert!(is_typical(&[&[0, 1, 0]], &uniform, mu).unwrap());
        assert!(!is_typical(&[&[0, 1, 0]], &uniform, 0.1).unwrap());

        let own =
            JointPmf::new(vec![Alphabet::new(2).unwrap()], vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(is_typical(&[&[0, 1, 0]], &own, 1e-9).unwrap());

        let skewed = JointPmf::new(vec![Alphabet::new(2).unwrap()], vec![1.0, 0.0]).unwrap();
        assert!(!is_typical(&[&[0, 0, 1]], &skewed, 0.9).unwrap());
    }

    #[test]
    fn typicality_rejects_ragged_input() {
        let j = JointPmf::new(
            vec![Alphabet::new(2).unwrap(), Alphabet::new(2).unwrap()],
            vec![0.25; 4],
        )
        .unwrap();
        assert!(matches!(
            is_typical(&[&[0, 1], &[0]], &j, 0.5),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(is_typical(&[&[0, 1], &[0, 1]], &j, 0.0).is_err());
    }

    #[test]
    fn closed_boundary_counts_as_typical() {
        let j = JointPmf::new(vec![Alphabet::new(2).unwrap()], vec![0.5, 0.5]).unwrap();
        // deviation is exactly 0.25
        assert!(is_typical(&[&[0, 0, 0, 1]], &j, 0.25).unwrap());
    }
}
