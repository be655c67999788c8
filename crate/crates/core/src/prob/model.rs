// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use super::{compose, Alphabet, CondPmf, JointPmf, Pmf};
use crate::{Error, Result};

/// How the eavesdropper's observation is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum EveModel {
    /// `P(z | x, y)`, rows indexed by `x * |Y| + y`.
    Full { pzxy: CondPmf },
    /// Only the `Z | X` laws under each hypothesis. Enough for the region,
    /// not for simulation.
    Marginal { pzx_h0: CondPmf, qzx_h1: CondPmf },
}

/// Discrete memoryless source: `X ~ px`, `Y | X ~ pyx` under the null
/// hypothesis, `Y ~ P_Y` independent of `X` under the alternative, and the
/// eavesdropper's `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    px: Pmf,
    pyx: CondPmf,
    eve: EveModel,
    py: Pmf,
    pzx_h0: CondPmf,
    qzx_h1: CondPmf,
}

impl SourceModel {
    pub fn full(px: Pmf, pyx: CondPmf, pzxy: CondPmf) -> Result<Self> {
        let (xs, ys) = (px.len(), pyx.out_size());
        check_rows("P(y|x)", &pyx, xs)?;
        check_rows("P(z|x,y)", &pzxy, xs * ys)?;
        let py = pyx.push_forward(&px)?;
        let zs = pzxy.out_size();
        let mix = |weights: &dyn Fn(usize, usize) -> f64| -> Result<CondPmf> {
            CondPmf::new(
                (0..xs)
                    .map(|x| {
                        let mut row = vec![0.0; zs];
                        for y in 0..ys {
                            let w = weights(x, y);
                            for (r, q) in row.iter_mut().zip(pzxy.row(x * ys + y).probs()) {
                                *r += w * q;
                            }
                        }
                        Pmf::from_weights(row)
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let pzx_h0 = mix(&|x, y| pyx.get(x, y))?;
        let qzx_h1 = mix(&|_, y| py[y])?;
        Ok(Self {
            px,
            pyx,
            eve: EveModel::Full { pzxy },
            py,
            pzx_h0,
            qzx_h1,
        })
    }

    pub fn marginal(px: Pmf, pyx: CondPmf, pzx_h0: CondPmf, qzx_h1: CondPmf) -> Result<Self> {
        let xs = px.len();
        check_rows("P(y|x)", &pyx, xs)?;
        check_rows("P(z|x) under H0", &pzx_h0, xs)?;
        check_rows("Q(z|x) under H1", &qzx_h1, xs)?;
        if pzx_h0.out_size() != qzx_h1.out_size() {
            return Err(Error::DimensionMismatch(
                "eavesdropper alphabets differ between hypotheses".into(),
            ));
        }
        let py = pyx.push_forward(&px)?;
        Ok(Self {
            px,
            pyx,
            eve: EveModel::Marginal {
                pzx_h0: pzx_h0.clone(),
                qzx_h1: qzx_h1.clone(),
            },
            py,
            pzx_h0,
            qzx_h1,
        })
    }

    pub fn px(&self) -> &Pmf {
        &self.px
    }

    pub fn py(&self) -> &Pmf {
        &self.py
    }

    pub fn pyx(&self) -> &CondPmf {
        &self.pyx
    }

    pub fn eve(&self) -> &EveModel {
        &self.eve
    }

    pub fn is_full(&self) -> bool {
        matches!(self.eve, EveModel::Full { .. })
    }

    pub fn pzxy(&self) -> Option<&CondPmf> {
        match &self.eve {
            EveModel::Full { pzxy } => Some(pzxy),
            EveModel::Marginal { .. } => None,
        }
    }

    /// `P(z|x)` under the null hypothesis.
    pub fn pzx_h0(&self) -> &CondPmf {
        &self.pzx_h0
    }

    /// `Q(z|x)` under the alternative.
    pub fn qzx_h1(&self) -> &CondPmf {
        &self.qzx_h1
    }

    pub fn x_size(&self) -> usize {
        self.px.len()
    }

    pub fn y_size(&self) -> usize {
        self.pyx.out_size()
    }

    pub fn z_size(&self) -> usize {
        self.pzx_h0.out_size()
    }

    fn x_joint(&self) -> Result<JointPmf> {
        JointPmf::from_pmf(Alphabet::new(self.x_size())?, &self.px)
    }

    /// `P_XY` over axes `(X, Y)`.
    pub fn joint_xy(&self) -> Result<JointPmf> {
        compose(&self.x_joint()?, &self.pyx, &[0])
    }

    /// `(X, Z)` joint under the null (`h1 = false`) or the alternative.
    pub fn joint_xz(&self, h1: bool) -> Result<JointPmf> {
        let ch = if h1 { &self.qzx_h1 } else { &self.pzx_h0 };
        compose(&self.x_joint()?, ch, &[0])
    }

    /// `P_XYZ` over axes `(X, Y, Z)`; needs the full eavesdropper model.
    pub fn joint_xyz(&self) -> Result<JointPmf> {
        let pzxy = self.pzxy().ok_or(Error::RequiresFullModel)?;
        compose(&self.joint_xy()?, pzxy, &[0, 1])
    }
}

fn check_rows(name: &str, ch: &CondPmf, expected: usize) -> Result<()> {
    if ch.in_size() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected {expected}",
            ch.in_size()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mode_derives_marginal_channels() {
        let px = Pmf::new(vec![0.6, 0.4]).unwrap();
        let pyx = CondPmf::bsc(0.1).unwrap();
        // Z = X xor Y passed through nothing else
        let pzxy = CondPmf::from_rows(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ])
        .unwrap();
        let m = SourceModel::full(px, pyx, pzxy).unwrap();
        assert!((m.pzx_h0().get(0, 1) - 0.1).abs() < 1e-15);
        // P_Y(1) = 0.6*0.1 + 0.4*0.9 = 0.42
        assert!((m.py()[1] - 0.42).abs() < 1e-15);
        assert!((m.qzx_h1().get(0, 1) - 0.42).abs() < 1e-15);
        assert!((m.qzx_h1().get(1, 1) - 0.58).abs() < 1e-15);
    }

    #[test]
    fn marginal_mode_has_no_full_joint() {
        let m = SourceModel::marginal(
            Pmf::new(vec![0.8, 0.2]).unwrap(),
            CondPmf::bec(0.4).unwrap(),
            CondPmf::bsc(0.2).unwrap(),
            CondPmf::bsc(0.3).unwrap(),
        )
        .unwrap();
        assert!(!m.is_full());
        assert_eq!(m.joint_xyz(), Err(Error::RequiresFullModel));
        assert_eq!(m.y_size(), 3);
    }

    #[test]
    fn dimension_checks() {
        let r = SourceModel::full(
            Pmf::new(vec![0.5, 0.5]).unwrap(),
            CondPmf::bsc(0.1).unwrap(),
            CondPmf::bsc(0.1).unwrap(),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
