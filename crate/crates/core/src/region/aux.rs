// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::prob::{compose, Alphabet, CondPmf, JointPmf, Pmf, SourceModel};
use crate::{Error, Result};

pub const AXIS_U: usize = 0;
pub const AXIS_X: usize = 1;
pub const AXIS_Y: usize = 2;
pub const AXIS_Z: usize = 3;

/// An auxiliary channel `P(u|x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxChannel {
    pux: CondPmf,
}

impl AuxChannel {
    pub fn new(pux: CondPmf) -> Self {
        Self { pux }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        CondPmf::from_rows(rows).map(Self::new)
    }

    /// `U` independent of `X`, a point mass on symbol 0.
    pub fn constant(x_size: usize, u_size: usize) -> Result<Self> {
        CondPmf::constant(x_size, Pmf::point_mass(u_size, 0)?).map(Self::new)
    }

    /// `U = X`.
    pub fn identity(x_size: usize) -> Result<Self> {
        CondPmf::identity(x_size).map(Self::new)
    }

    pub fn pux(&self) -> &CondPmf {
        &self.pux
    }

    pub fn u_size(&self) -> usize {
        self.pux.out_size()
    }

    pub fn x_size(&self) -> usize {
        self.pux.in_size()
    }

    /// Row-major `x_size * u_size` matrix.
    pub fn flat(&self) -> Vec<f64> {
        self.pux
            .rows()
            .iter()
            .flat_map(|r| r.probs().iter().copied())
            .collect()
    }

    pub fn from_flat(flat: &[f64], x_size: usize) -> Result<Self> {
        if x_size == 0 || !flat.len().is_multiple_of(x_size) {
            return Err(Error::DimensionMismatch("flat aux matrix is ragged".into()));
        }
        let u = flat.len() / x_size;
        CondPmf::new(
            flat.chunks(u)
                .map(|r| Pmf::from_weights(r.to_vec()))
                .collect::<Result<Vec<_>>>()?,
        )
        .map(Self::new)
    }

    /// `P_U` induced by `px`.
    pub fn pu(&self, px: &Pmf) -> Result<Pmf> {
        self.pux.push_forward(px)
    }

    /// `P(x|u)` by Bayes' rule; rows of unused `u` symbols equal `px`.
    pub fn pxu(&self, px: &Pmf) -> Result<CondPmf> {
        self.pux.bayes_reverse(px)
    }
}

fn check(model: &SourceModel, aux: &AuxChannel) -> Result<()> {
    if aux.x_size() != model.x_size() {
        return Err(Error::DimensionMismatch(format!(
            "auxiliary channel has {} rows but |X| = {}",
            aux.x_size(),
            model.x_size()
        )));
    }
    Ok(())
}

fn with_u_first(xyz: &JointPmf, aux: &AuxChannel) -> Result<JointPmf> {
    compose(xyz, aux.pux(), &[0])?.permute(&[3, 0, 1, 2])
}

/// `P_UXYZ = P(u|x) P_XYZ` on axes `(U, X, Y, Z)`.
///
/// With a marginal eavesdropper model `Z` is drawn from `P(z|x)`, which
/// makes `Y` and `Z` conditionally independent given `X`; only the `(U,X,Y)`
/// and `(U,X,Z)` marginals are meaningful then.
pub fn build_joint_h0(model: &SourceModel, aux: &AuxChannel) -> Result<JointPmf> {
    check(model, aux)?;
    let xyz = match model.pzxy() {
        Some(pzxy) => compose(&model.joint_xy()?, pzxy, &[0, 1])?,
        None => compose(&model.joint_xy()?, model.pzx_h0(), &[0])?,
    };
    with_u_first(&xyz, aux)
}

/// `Q_UXYZ = P(u|x) P_X P_Y P(z|x,y)` on axes `(U, X, Y, Z)`.
pub fn build_joint_h1(model: &SourceModel, aux: &AuxChannel) -> Result<JointPmf> {
    check(model, aux)?;
    let x = JointPmf::from_pmf(Alphabet::new(model.x_size())?, model.px())?;
    let xy = compose(
        &x,
        &CondPmf::constant(model.x_size(), model.py().clone())?,
        &[0],
    )?;
    let xyz = match model.pzxy() {
        Some(pzxy) => compose(&xy, pzxy, &[0, 1])?,
        None => compose(&xy, model.qzx_h1(), &[0])?,
    };
    with_u_first(&xyz, aux)
}
