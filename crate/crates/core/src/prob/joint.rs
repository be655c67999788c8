// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use super::{Alphabet, CondPmf, Pmf, PMF_SUM_TOL};
use crate::{Error, Result};

/// Dense joint pmf over an ordered list of axes, row-major with the last
/// axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().map(Alphabet::size).product();
        if axes.is_empty() || mass.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} axes need {expected} entries, got {}",
                axes.len(),
                mass.len()
            )));
        }
        // Reuse the pmf validation on the flattened tensor.
        let flat = Pmf::new(mass)?;
        Ok(Self {
            axes,
            mass: flat.probs().to_vec(),
        })
    }

    pub fn from_pmf(alphabet: Alphabet, pmf: &Pmf) -> Result<Self> {
        Self::new(vec![alphabet], pmf.probs().to_vec())
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.mass[self.flat_index(index)]
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.axes.len());
        index
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.size() + i)
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (k, &a) in axes.iter().enumerate() {
            if a >= self.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "axis {a} out of range for rank-{} joint",
                    self.rank()
                )));
            }
            if axes[..k].contains(&a) {
                return Err(Error::DimensionMismatch(format!("axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Marginal over `keep`, with axes in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf> {
        self.check_axes(keep)?;
        if keep.is_empty() {
            return Err(Error::DimensionMismatch(
                "cannot marginalize to zero axes".into(),
            ));
        }
        let shape = self.shape();
        let out_axes: Vec<Alphabet> = keep.iter().map(|&a| self.axes[a].clone()).collect();
        let out_shape: Vec<usize> = out_axes.iter().map(Alphabet::size).collect();
        let mut out = vec![0.0; out_shape.iter().product()];
        let mut idx = vec![0usize; shape.len()];
        for &m in &self.mass {
            let flat = keep
                .iter()
                .zip(&out_shape)
                .fold(0, |acc, (&a, &s)| acc * s + idx[a]);
            out[flat] += m;
            increment(&mut idx, &shape);
        }
        Ok(JointPmf {
            axes: out_axes,
            mass: out,
        })
    }

    /// Reorders axes; `order[k]` is the source axis placed at position `k`.
    pub fn permute(&self, order: &[usize]) -> Result<JointPmf> {
        if order.len() != self.rank() {
            return Err(Error::DimensionMismatch(
                "permutation must list every axis".into(),
            ));
        }
        self.marginal(order)
    }

    /// Splits off the last axis: returns the marginal of the remaining axes
    /// and the conditional law of the last axis given them. Conditioning
    /// cells of zero mass get a uniform row.
    pub fn split_last(&self) -> Result<(JointPmf, CondPmf)> {
        if self.rank() < 2 {
            return Err(Error::DimensionMismatch("need at least two axes".into()));
        }
        let last = self.axes.last().map(Alphabet::size).unwrap_or(1);
        let head: Vec<usize> = (0..self.rank() - 1).collect();
        let marginal = self.marginal(&head)?;
        let rows = self
            .mass
            .chunks(last)
            .map(|c| {
                if c.iter().sum::<f64>() > 0.0 {
                    Pmf::from_weights(c.to_vec())
                } else {
                    Pmf::uniform(last)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((marginal, CondPmf::new(rows)?))
    }

    /// True iff the joint equals the product of the marginals of `a` and
    /// `b` (which must partition the axes) within `tol`.
    pub fn factorizes(&self, a: &[usize], b: &[usize], tol: f64) -> Result<bool> {
        let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
        self.check_axes(&all)?;
        all.sort_unstable();
        if all.len() != self.rank() {
            return Err(Error::DimensionMismatch(
                "axes must partition the joint".into(),
            ));
        }
        let ma = self.marginal(a)?;
        let mb = self.marginal(b)?;
        let shape = self.shape();
        let mut idx = vec![0usize; shape.len()];
        for &m in &self.mass {
            let ia: Vec<usize> = a.iter().map(|&k| idx[k]).collect();
            let ib: Vec<usize> = b.iter().map(|&k| idx[k]).collect();
            if (m - ma.get(&ia) * mb.get(&ib)).abs() > tol {
                return Ok(false);
            }
            increment(&mut idx, &shape);
        }
        Ok(true)
    }
}

/// Odometer increment of a row-major multi-index.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Appends a new axis distributed as `channel(. | inputs)`, where the
/// conditioning index is the row-major combination of `input_axes`.
pub fn compose(joint: &JointPmf, channel: &CondPmf, input_axes: &[usize]) -> Result<JointPmf> {
    joint.check_axes(input_axes)?;
    let shape = joint.shape();
    let cond_size: usize = input_axes.iter().map(|&a| shape[a]).product();
    if cond_size != channel.in_size() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} rows but the input axes span {cond_size} symbols",
            channel.in_size()
        )));
    }
    let out = channel.out_size();
    let mut mass = Vec::with_capacity(joint.mass.len() * out);
    let mut idx = vec![0usize; shape.len()];
    for &m in &joint.mass {
        let c = input_axes.iter().fold(0, |acc, &a| acc * shape[a] + idx[a]);
        mass.extend(channel.row(c).probs().iter().map(|q| m * q));
        increment(&mut idx, &shape);
    }
    let mut axes = joint.axes.clone();
    axes.push(Alphabet::new(out)?);
    let total: f64 = mass.iter().sum();
    debug_assert!((total - 1.0).abs() < PMF_SUM_TOL);
    Ok(JointPmf { axes, mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn compose_with_bsc() {
        let px = JointPmf::new(vec![bin()], vec![0.8, 0.2]).unwrap();
        let j = compose(&px, &CondPmf::bsc(0.2).unwrap(), &[0]).unwrap();
        assert!((j.get(&[0, 0]) - 0.64).abs() < 1e-15);
        assert!((j.get(&[1, 0]) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn compose_point_mass_identity() {
        let px = JointPmf::new(vec![bin()], vec![0.0, 1.0]).unwrap();
        let j = compose(&px, &CondPmf::identity(2).unwrap(), &[0]).unwrap();
        assert_eq!(j.mass(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn compose_then_marginal_gives_output_law() {
        let px = Pmf::new(vec![0.8, 0.2]).unwrap();
        let ch = CondPmf::bec(0.4).unwrap();
        let j = compose(&JointPmf::from_pmf(bin(), &px).unwrap(), &ch, &[0]).unwrap();
        let py = j.marginal(&[1]).unwrap();
        let expected = ch.push_forward(&px).unwrap();
        for (a, b) in py.mass().iter().zip(expected.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_rejects_mismatch() {
        let px = JointPmf::new(vec![bin()], vec![0.5, 0.5]).unwrap();
        let ch = CondPmf::identity(3).unwrap();
        assert!(matches!(
            compose(&px, &ch, &[0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn split_last_round_trips() {
        let px = JointPmf::new(vec![bin()], vec![0.3, 0.7]).unwrap();
        let j = compose(&px, &CondPmf::bsc(0.1).unwrap(), &[0]).unwrap();
        let (head, cond) = j.split_last().unwrap();
        let back = compose(&head, &cond, &[0]).unwrap();
        for (a, b) in back.mass().iter().zip(j.mass()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permute_swaps_axes() {
        let j = JointPmf::new(
            vec![bin(), Alphabet::new(3).unwrap()],
            vec![0.1, 0.2, 0.3, 0.0, 0.15, 0.25],
        )
        .unwrap();
        let p = j.permute(&[1, 0]).unwrap();
        assert_eq!(p.shape(), vec![3, 2]);
        assert_eq!(p.get(&[2, 0]), 0.3);
        assert_eq!(p.get(&[1, 1]), 0.15);
        assert!(j.permute(&[0]).is_err());
        assert!(j.marginal(&[0, 0]).is_err());
    }
}
