// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use super::{JointPmf, Pmf};
use crate::{Error, Result};

/// Shannon entropy in bits of a (not necessarily normalized) mass vector,
/// with 0 log 0 = 0.
pub fn entropy_of(mass: &[f64]) -> f64 {
    let h: f64 = mass
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs()).min((p.len() as f64).log2())
}

fn joint_entropy(j: &JointPmf, axes: &[usize]) -> Result<f64> {
    if axes.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of(j.marginal(axes)?.mass()))
}

fn disjoint(a: &[usize], b: &[usize]) -> Result<()> {
    if a.iter().any(|x| b.contains(x)) {
        return Err(Error::DimensionMismatch(
            "axis sets must be disjoint".into(),
        ));
    }
    Ok(())
}

/// H(target | given) = H(target, given) - H(given).
pub fn conditional_entropy(j: &JointPmf, target: &[usize], given: &[usize]) -> Result<f64> {
    disjoint(target, given)?;
    let all: Vec<usize> = target.iter().chain(given).copied().collect();
    let h = joint_entropy(j, &all)? - joint_entropy(j, given)?;
    Ok(h.max(0.0))
}

/// I(a; b) = H(a) + H(b) - H(a, b).
pub fn mutual_information(j: &JointPmf, a: &[usize], b: &[usize]) -> Result<f64> {
    disjoint(a, b)?;
    let all: Vec<usize> = a.iter().chain(b).copied().collect();
    let i = joint_entropy(j, a)? + joint_entropy(j, b)? - joint_entropy(j, &all)?;
    Ok(i.max(0.0))
}
