// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use super::fast::Evaluator;
use super::optimize::{Baseline, ExponentQuery};
use super::point::check_epsilon;
use crate::prob::SourceModel;
use crate::{Error, Result};

/// All points of the simplex in `parts` dimensions whose coordinates are
/// multiples of `1 / steps`.
fn simplex_grid(parts: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(parts: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(parts - 1, left - k, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(parts, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive search over row-stochastic `P(u|x)` with entries on the grid
/// `{0, step, ..., 1}`. Returns `-inf` when no grid point is feasible.
/// Limited to binary `X` and `|U| <= 3`.
pub fn brute_force_oracle(
    model: &SourceModel,
    q: &ExponentQuery,
    grid_step: f64,
    u_size: usize,
) -> Result<f64> {
    if model.x_size() != 2 || !(1..=3).contains(&u_size) {
        return Err(Error::InvalidParameter(format!(
            "oracle enumerates only |X| = 2 and |U| <= 3 (got |X| = {}, |U| = {u_size})",
            model.x_size()
        )));
    }
    check_epsilon(q.epsilon)?;
    let steps = (1.0 / grid_step).round();
    if !(grid_step > 0.0) || (steps * grid_step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "grid_step {grid_step} must divide 1"
        )));
    }
    let rows = simplex_grid(u_size, steps as usize);
    let ev = Evaluator::new(model)?;
    let eps = q.epsilon;
    let mut best = f64::NEG_INFINITY;
    let mut pux = vec![0.0; 2 * u_size];
    for r0 in &rows {
        pux[..u_size].copy_from_slice(r0);
        for r1 in &rows {
            pux[u_size..].copy_from_slice(r1);
            let m = ev.eval(&pux);
            if m.i_ux > q.rate + 1e-12 {
                continue;
            }
            let cap0 = (1.0 - eps) * m.hp_x_uz + eps * ev.hp_x_z;
            let cap1 = (1.0 - eps) * m.hq_x_uz + eps * ev.hq_x_z;
            let ok = match q.baseline {
                Baseline::Optimal => cap0 >= q.delta0 - 1e-12 && cap1 >= q.delta1 - 1e-12,
                Baseline::EpsZeroH0Only => m.hp_x_uz >= q.delta0 - 1e-12,
                Baseline::NoSecurity => true,
            };
            if ok && m.i_uy > best {
                best = m.i_uy;
            }
        }
    }
    Ok(best)
}
