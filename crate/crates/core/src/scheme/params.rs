// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use crate::prob::{mutual_information, CondPmf, Pmf, SourceModel};
use crate::region::{build_joint_h0, AuxChannel, AXIS_U, AXIS_X, AXIS_Y};
use crate::{Error, Result};

/// A scheme instance: source, auxiliary channel, rate, switch probability,
/// blocklength and typicality radius, plus the derived reference laws.
#[derive(Debug, Clone)]
pub struct SchemeParams {
    model: SourceModel,
    aux: AuxChannel,
    rate: f64,
    epsilon: f64,
    n: usize,
    mu: f64,
    rate_needed: f64,
    pu: Pmf,
    pxu: CondPmf,
    p_ux: Vec<f64>,
    p_uy: Vec<f64>,
}

impl SchemeParams {
    /// `mu` defaults to `n^(-1/3)`.
    pub fn new(
        model: SourceModel,
        aux: AuxChannel,
        rate: f64,
        epsilon: f64,
        n: usize,
        mu: Option<f64>,
    ) -> Result<Self> {
        if !model.is_full() {
            return Err(Error::RequiresFullModel);
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must lie in [0, 1]"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("blocklength must be >= 1".into()));
        }
        let mu = mu.unwrap_or_else(|| (n as f64).powf(-1.0 / 3.0));
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu {mu} must be > 0")));
        }
        let joint = build_joint_h0(&model, &aux)?;
        let rate_needed = mutual_information(&joint, &[AXIS_U], &[AXIS_X])?;
        if !(rate > rate_needed) {
            return Err(Error::OperatingCondition {
                rate,
                required: rate_needed,
            });
        }
        let pu = aux.pu(model.px())?;
        let pxu = aux.pxu(model.px())?;
        Ok(Self {
            p_ux: joint.marginal(&[AXIS_U, AXIS_X])?.mass().to_vec(),
            p_uy: joint.marginal(&[AXIS_U, AXIS_Y])?.mass().to_vec(),
            model,
            aux,
            rate,
            epsilon,
            n,
            mu,
            rate_needed,
            pu,
            pxu,
        })
    }

    /// Like `new` but accepts `rate <= I(U;X)`. Useful only for analysis
    /// quantities such as `soft_covering_tv` that are defined at any rate.
    pub fn new_unconstrained(
        model: SourceModel,
        aux: AuxChannel,
        rate: f64,
        epsilon: f64,
        n: usize,
        mu: Option<f64>,
    ) -> Result<Self> {
        match Self::new(model.clone(), aux.clone(), f64::INFINITY, epsilon, n, mu) {
            Ok(p) => Ok(Self { rate, ..p }),
            Err(e) => Err(e),
        }
    }

    /// Same instance with a different switch probability.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            epsilon,
            ..self.clone()
        })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu {mu} must be > 0")));
        }
        Ok(Self { mu, ..self.clone() })
    }

    pub fn model(&self) -> &SourceModel {
        &self.model
    }

    pub fn aux(&self) -> &AuxChannel {
        &self.aux
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Encoder typicality radius.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Decoder typicality radius.
    pub fn decoder_mu(&self) -> f64 {
        2.0 * self.mu
    }

    /// `I_P(U;X)`, the rate the codebook must exceed.
    pub fn rate_needed(&self) -> f64 {
        self.rate_needed
    }

    /// Codeword symbol law.
    pub fn pu(&self) -> &Pmf {
        &self.pu
    }

    /// `P(x|u)`, the likelihood used by the encoder.
    pub fn pxu(&self) -> &CondPmf {
        &self.pxu
    }

    /// `P_UX` mass, row-major `(u, x)`.
    pub fn p_ux(&self) -> &[f64] {
        &self.p_ux
    }

    /// `P_UY` mass under the null hypothesis, row-major `(u, y)`.
    pub fn p_uy(&self) -> &[f64] {
        &self.p_uy
    }
}
