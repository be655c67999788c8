// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use crate::prob::{CondPmf, Pmf};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 200_000;
const STEP_TOL: f64 = 1e-15;
const FEAS_TOL: f64 = 1e-9;

/// Finds `P(z|x,y)` (rows indexed `x * |Y| + y`) whose `(X,Z)` marginal is
/// `pzx_h0` and whose marginal under `P_X P_Y` is `qzx_h1`, as close as
/// possible to the `y`-independent channel `pzx_h0`. `None` when no such
/// channel exists.
pub fn construct_full_joint(
    pzx_h0: &CondPmf,
    qzx_h1: &CondPmf,
    pyx: &CondPmf,
    px: &Pmf,
) -> Result<Option<CondPmf>> {
    let xs = px.len();
    let ys = pyx.out_size();
    let zs = pzx_h0.out_size();
    if pyx.in_size() != xs
        || pzx_h0.in_size() != xs
        || qzx_h1.in_size() != xs
        || qzx_h1.out_size() != zs
    {
        return Err(Error::DimensionMismatch(format!(
            "need P(y|x) {xs}x_, P(z|x) and Q(z|x) {xs}x{zs}"
        )));
    }
    let py = pyx.push_forward(px)?;
    let mut rows = Vec::with_capacity(xs * ys);
    for x in 0..xs {
        match project_row_block(pzx_h0.row(x), qzx_h1.row(x), pyx.row(x), &py) {
            Some(block) => rows.extend(block),
            None => return Ok(None),
        }
    }
    Ok(Some(CondPmf::new(rows)?))
}

/// Unknowns `t[y * zs + z]`.
fn project_row_block(
    target_h0: &Pmf,
    target_h1: &Pmf,
    pyx_row: &Pmf,
    py: &Pmf,
) -> Option<Vec<Pmf>> {
    let ys = py.len();
    let zs = target_h0.len();
    let vars = ys * zs;
    let eqs = 2 * zs + ys;
    let mut a = DMatrix::<f64>::zeros(eqs, vars);
    let mut b = DVector::<f64>::zeros(eqs);
    for z in 0..zs {
        for y in 0..ys {
            a[(z, y * zs + z)] = pyx_row[y];
            a[(zs + z, y * zs + z)] = py[y];
        }
        b[z] = target_h0[z];
        b[zs + z] = target_h1[z];
    }
    for y in 0..ys {
        for z in 0..zs {
            a[(2 * zs + y, y * zs + z)] = 1.0;
        }
        b[2 * zs + y] = 1.0;
    }
    let pinv = a.clone().pseudo_inverse(1e-12).ok()?;
    if (&a * (&pinv * &b) - &b).amax() > FEAS_TOL {
        return None;
    }
    let project_affine = |v: &DVector<f64>| v - &pinv * (&a * v - &b);

    let start = DVector::from_iterator(
        vars,
        (0..ys).flat_map(|_| target_h0.probs().iter().copied()),
    );
    let mut v = start.clone();
    let mut p = DVector::<f64>::zeros(vars);
    let mut q = DVector::<f64>::zeros(vars);
    for _ in 0..MAX_SWEEPS {
        let w = project_affine(&(&v + &p));
        p = &v + &p - &w;
        let next = (&w + &q).map(|e| e.max(0.0));
        q = &w + &q - &next;
        let step = (&next - &v).amax();
        v = next;
        if step < STEP_TOL {
            break;
        }
    }
    if (&a * &v - &b).amax() > FEAS_TOL {
        return None;
    }
    Some(
        v.as_slice()
            .chunks(zs)
            .map(|row| Pmf::from_weights(row.to_vec()).expect("nonnegative row with unit sum"))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::SourceModel;
    use crate::rng::stream;
    use rand::Rng;

    fn check(t: &CondPmf, h0: &CondPmf, h1: &CondPmf, pyx: &CondPmf, px: &Pmf) {
        let m = SourceModel::full(px.clone(), pyx.clone(), t.clone()).unwrap();
        for x in 0..px.len() {
            for z in 0..h0.out_size() {
                assert!((m.pzx_h0().get(x, z) - h0.get(x, z)).abs() < 1e-8);
                assert!((m.qzx_h1().get(x, z) - h1.get(x, z)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn equal_marginals_give_y_independent_channel() {
        let px = Pmf::new(vec![0.8, 0.2]).unwrap();
        let pyx = CondPmf::bec(0.4).unwrap();
        let h = CondPmf::bsc(0.2).unwrap();
        let t = construct_full_joint(&h, &h, &pyx, &px).unwrap().unwrap();
        for x in 0..2 {
            for y in 0..3 {
                for z in 0..2 {
                    assert!((t.get(x * 3 + y, z) - h.get(x, z)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn example_channels_are_consistent() {
        let px = Pmf::new(vec![0.8, 0.2]).unwrap();
        let pyx = CondPmf::bec(0.4).unwrap();
        let h0 = CondPmf::bsc(0.2).unwrap();
        let h1 = CondPmf::bsc(0.3).unwrap();
        let t = construct_full_joint(&h0, &h1, &pyx, &px)
            .unwrap()
            .expect("feasible");
        check(&t, &h0, &h1, &pyx, &px);
    }

    #[test]
    fn independent_y_forces_equal_marginals() {
        let px = Pmf::new(vec![0.5, 0.5]).unwrap();
        let pyx = CondPmf::constant(2, Pmf::new(vec![0.3, 0.7]).unwrap()).unwrap();
        let h0 = CondPmf::bsc(0.2).unwrap();
        let h1 = CondPmf::bsc(0.3).unwrap();
        assert_eq!(construct_full_joint(&h0, &h1, &pyx, &px).unwrap(), None);
    }

    #[test]
    fn invertible_deterministic_links_are_feasible() {
        let mut rng = stream(17, &[]);
        for _ in 0..10 {
            let p0: f64 = rng.random_range(0.1..0.9);
            let px = Pmf::new(vec![p0, 1.0 - p0]).unwrap();
            let pyx = CondPmf::identity(2).unwrap();
            let mut row = || {
                let a: f64 = rng.random_range(0.05..0.95);
                vec![a, 1.0 - a]
            };
            let h0 = CondPmf::from_rows(vec![row(), row()]).unwrap();
            let h1 = CondPmf::from_rows(vec![row(), row()]).unwrap();
            // With Y = X, t(.|x,x) must equal h0(.|x); the H1 constraint then
            // pins t(.|x,x') and is feasible whenever it lands in the simplex.
            let solved = construct_full_joint(&h0, &h1, &pyx, &px).unwrap();
            let needed: Vec<f64> = (0..2)
                .map(|x| {
                    let own = px[x];
                    (h1.get(x, 0) - own * h0.get(x, 0)) / (1.0 - own)
                })
                .collect();
            let expect_feasible = needed.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v));
            assert_eq!(solved.is_some(), expect_feasible, "{needed:?}");
            if let Some(t) = solved {
                check(&t, &h0, &h1, &pyx, &px);
            }
        }
    }
}
