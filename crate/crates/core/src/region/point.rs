// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::aux::{build_joint_h0, build_joint_h1, AuxChannel, AXIS_U, AXIS_X, AXIS_Y, AXIS_Z};
use crate::prob::{conditional_entropy, mutual_information, SourceModel};
use crate::{Error, Result};

/// Raw conditional entropies behind the equivocation caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub hp_x_uz: f64,
    pub hq_x_uz: f64,
    pub hp_x_z: f64,
    pub hq_x_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    /// `I_P(U;X)`
    pub rate_needed: f64,
    /// `I_P(U;Y)`
    pub exponent: f64,
    pub delta0_cap: f64,
    pub delta1_cap: f64,
    pub epsilon: f64,
    pub entropies: Entropies,
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} must lie in [0, 1)"
        )));
    }
    Ok(())
}

/// Evaluates the region point of `aux` through the generic joint-pmf path.
pub fn evaluate_point(model: &SourceModel, aux: &AuxChannel, epsilon: f64) -> Result<RegionPoint> {
    check_epsilon(epsilon)?;
    let p = build_joint_h0(model, aux)?;
    let q = build_joint_h1(model, aux)?;
    let entropies = Entropies {
        hp_x_uz: conditional_entropy(&p, &[AXIS_X], &[AXIS_U, AXIS_Z])?,
        hq_x_uz: conditional_entropy(&q, &[AXIS_X], &[AXIS_U, AXIS_Z])?,
        hp_x_z: conditional_entropy(&p, &[AXIS_X], &[AXIS_Z])?,
        hq_x_z: conditional_entropy(&q, &[AXIS_X], &[AXIS_Z])?,
    };
    Ok(RegionPoint {
        rate_needed: mutual_information(&p, &[AXIS_U], &[AXIS_X])?,
        exponent: mutual_information(&p, &[AXIS_U], &[AXIS_Y])?,
        delta0_cap: (1.0 - epsilon) * entropies.hp_x_uz + epsilon * entropies.hp_x_z,
        delta1_cap: (1.0 - epsilon) * entropies.hq_x_uz + epsilon * entropies.hq_x_z,
        epsilon,
        entropies,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::prob::{CondPmf, Pmf};

    pub(crate) const HP_X_Z: f64 = 0.539_474_732_050_230_9;
    pub(crate) const HQ_X_Z: f64 = 0.645_176_971_891_755_4;
    pub(crate) const I_XY: f64 = 0.433_156_856_932_417_4;
    pub(crate) const H_X: f64 = 0.721_928_094_887_362_3;

    /// Binary source with P_X(0) = 0.8, BEC(0.4) to the detector and
    /// BSC(0.2) / BSC(0.3) to the eavesdropper under H0 / H1.
    pub(crate) fn example_model() -> SourceModel {
        SourceModel::marginal(
            Pmf::new(vec![0.8, 0.2]).unwrap(),
            CondPmf::bec(0.4).unwrap(),
            CondPmf::bsc(0.2).unwrap(),
            CondPmf::bsc(0.3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_aux_point() {
        let m = example_model();
        for eps in [0.0, 0.2, 0.7] {
            let pt = evaluate_point(&m, &AuxChannel::constant(2, 4).unwrap(), eps).unwrap();
            assert!(pt.rate_needed.abs() < 1e-12);
            assert!(pt.exponent.abs() < 1e-12);
            assert!((pt.delta0_cap - HP_X_Z).abs() < 1e-12);
            assert!((pt.delta1_cap - HQ_X_Z).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_aux_violates_example_constraint() {
        let m = example_model();
        let pt = evaluate_point(&m, &AuxChannel::identity(2).unwrap(), 0.2).unwrap();
        assert!((pt.rate_needed - H_X).abs() < 1e-12);
        assert!((pt.exponent - I_XY).abs() < 1e-12);
        assert!((pt.delta0_cap - 0.2 * HP_X_Z).abs() < 1e-12);
        assert!(pt.delta0_cap < 0.13);
    }

    #[test]
    fn epsilon_out_of_range() {
        let m = example_model();
        let aux = AuxChannel::identity(2).unwrap();
        assert!(evaluate_point(&m, &aux, 1.0).is_err());
        assert!(evaluate_point(&m, &aux, -0.1).is_err());
    }
}
