// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form evaluation of the region quantities directly from a flat
//! `P(u|x)` matrix, used in the optimizer's inner loop. Relies on the
//! Markov chain `U - X - (Y, Z)`:
//!
//! * `I(U;X) = H(U) - H(U|X)`
//! * `H(X|UZ) = H(XZ) + H(U|X) - H(UZ)`

use crate::prob::{entropy_of, SourceModel};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub i_ux: f64,
    pub i_uy: f64,
    pub hp_x_uz: f64,
    pub hq_x_uz: f64,
}

#[derive(Debug, Clone)]
pub struct Evaluator {
    xs: usize,
    ys: usize,
    zs: usize,
    px: Vec<f64>,
    pxy: Vec<f64>,
    pxz_h0: Vec<f64>,
    pxz_h1: Vec<f64>,
    h_y: f64,
    h_xz_h0: f64,
    h_xz_h1: f64,
    pub hp_x_z: f64,
    pub hq_x_z: f64,
}

impl Evaluator {
    pub fn new(model: &SourceModel) -> Result<Self> {
        let pxy = model.joint_xy()?.mass().to_vec();
        let xz0 = model.joint_xz(false)?;
        let xz1 = model.joint_xz(true)?;
        let h_z =
            |j: &crate::prob::JointPmf| -> Result<f64> { Ok(entropy_of(j.marginal(&[1])?.mass())) };
        let h_xz_h0 = entropy_of(xz0.mass());
        let h_xz_h1 = entropy_of(xz1.mass());
        Ok(Self {
            xs: model.x_size(),
            ys: model.y_size(),
            zs: model.z_size(),
            px: model.px().probs().to_vec(),
            pxy,
            h_y: entropy_of(model.py().probs()),
            h_xz_h0,
            h_xz_h1,
            hp_x_z: (h_xz_h0 - h_z(&xz0)?).max(0.0),
            hq_x_z: (h_xz_h1 - h_z(&xz1)?).max(0.0),
            pxz_h0: xz0.mass().to_vec(),
            pxz_h1: xz1.mass().to_vec(),
        })
    }

    pub fn x_size(&self) -> usize {
        self.xs
    }

    /// `pux` is row-major `|X| x |U|`.
    pub fn eval(&self, pux: &[f64]) -> Metrics {
        let us = pux.len() / self.xs;
        let mut pu = vec![0.0; us];
        let mut h_u_x = 0.0;
        for x in 0..self.xs {
            let row = &pux[x * us..(x + 1) * us];
            h_u_x += self.px[x] * entropy_of(row);
            for (acc, p) in pu.iter_mut().zip(row) {
                *acc += self.px[x] * p;
            }
        }
        let h_u = entropy_of(&pu);
        let mix = |pxw: &[f64], w: usize| -> f64 {
            let mut out = vec![0.0; us * w];
            for x in 0..self.xs {
                let row = &pux[x * us..(x + 1) * us];
                let side = &pxw[x * w..(x + 1) * w];
                for (u, &pu_x) in row.iter().enumerate() {
                    if pu_x == 0.0 {
                        continue;
                    }
                    for (o, s) in out[u * w..(u + 1) * w].iter_mut().zip(side) {
                        *o += pu_x * s;
                    }
                }
            }
            entropy_of(&out)
        };
        let h_uy = mix(&self.pxy, self.ys);
        let h_uz0 = mix(&self.pxz_h0, self.zs);
        let h_uz1 = mix(&self.pxz_h1, self.zs);
        Metrics {
            i_ux: (h_u - h_u_x).max(0.0),
            i_uy: (h_u + self.h_y - h_uy).max(0.0),
            hp_x_uz: (self.h_xz_h0 + h_u_x - h_uz0).max(0.0),
            hq_x_uz: (self.h_xz_h1 + h_u_x - h_uz1).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::point::tests::example_model;
    use crate::region::{evaluate_point, AuxChannel};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn agrees_with_generic_path(raw in proptest::collection::vec(0.0f64..1.0, 10)) {
            let m = example_model();
            let ev = Evaluator::new(&m).unwrap();
            let rows: Vec<Vec<f64>> = raw.chunks(5).map(|c| {
                let s: f64 = c.iter().sum::<f64>() + 1e-3;
                c.iter().map(|v| (v + 2e-4) / s).collect()
            }).collect();
            let aux = AuxChannel::from_flat(&rows.concat(), 2).unwrap();
            let fast = ev.eval(&aux.flat());
            let pt = evaluate_point(&m, &aux, 0.0).unwrap();
            prop_assert!((fast.i_ux - pt.rate_needed).abs() < 1e-12);
            prop_assert!((fast.i_uy - pt.exponent).abs() < 1e-12);
            prop_assert!((fast.hp_x_uz - pt.entropies.hp_x_uz).abs() < 1e-12);
            prop_assert!((fast.hq_x_uz - pt.entropies.hq_x_uz).abs() < 1e-12);
            prop_assert!((ev.hp_x_z - pt.entropies.hp_x_z).abs() < 1e-12);
            prop_assert!((ev.hq_x_z - pt.entropies.hq_x_z).abs() < 1e-12);
        }
    }
}
