// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::optimize::{
    satisfies, solve, Baseline, ExponentQuery, ExponentSolution, OptimizerConfig,
};
use super::point::evaluate_point;
use crate::prob::SourceModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub rate: f64,
    pub optimal: ExponentSolution,
    pub eps0: ExponentSolution,
    pub nosec: ExponentSolution,
    /// `eps0 <= optimal <= nosec` wherever the compared entries are feasible.
    pub nesting_ok: bool,
}

impl SweepRow {
    pub fn get(&self, b: Baseline) -> &ExponentSolution {
        match b {
            Baseline::Optimal => &self.optimal,
            Baseline::EpsZeroH0Only => &self.eps0,
            Baseline::NoSecurity => &self.nosec,
        }
    }
}

/// Replaces `sol` by `other`'s argmax when that argmax is feasible for `q`
/// and scores higher.
fn adopt(
    model: &SourceModel,
    q: &ExponentQuery,
    cfg: &OptimizerConfig,
    sol: &mut ExponentSolution,
    other: &ExponentSolution,
) -> Result<()> {
    let (Some(aux), true) = (&other.aux, sol.is_feasible()) else {
        return Ok(());
    };
    let pt = evaluate_point(model, aux, q.epsilon)?;
    if satisfies(q, &pt, cfg.tol) && pt.exponent > sol.theta {
        sol.theta = pt.exponent;
        sol.aux = Some(aux.clone());
        sol.point = Some(pt);
    }
    Ok(())
}

/// Exponent-versus-rate curves for the three constraint sets.
///
/// Each rate warm-starts from the previous rate's argmax and keeps the
/// running maximum, since the feasible set only grows with the rate. Within
/// a rate the reduced-constraint solution seeds the next larger constraint
/// set (`eps0` then `optimal` then `nosec`) whenever it is feasible there.
pub fn sweep_rate_curve(
    model: &SourceModel,
    rates: &[f64],
    delta0: f64,
    delta1: f64,
    epsilon: f64,
    cfg: &OptimizerConfig,
) -> Result<Vec<SweepRow>> {
    if rates.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter(
            "rates must be sorted ascending".into(),
        ));
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(rates.len());
    for (i, &rate) in rates.iter().enumerate() {
        let q = |baseline| ExponentQuery {
            rate,
            delta0,
            delta1,
            epsilon,
            baseline,
        };
        let prev = rows.last();
        let warm = |b: Baseline, extra: Option<&ExponentSolution>| {
            prev.and_then(|r| r.get(b).aux.clone())
                .into_iter()
                .chain(extra.and_then(|s| s.aux.clone()))
                .collect::<Vec<_>>()
        };
        let stream = 3 * i as u64;

        let qe = q(Baseline::EpsZeroH0Only);
        let mut eps0 = solve(
            model,
            &qe,
            cfg,
            &warm(Baseline::EpsZeroH0Only, None),
            stream,
        )?;
        if let Some(p) = prev {
            adopt(model, &qe, cfg, &mut eps0, &p.eps0)?;
        }

        let qo = q(Baseline::Optimal);
        let mut optimal = solve(
            model,
            &qo,
            cfg,
            &warm(Baseline::Optimal, Some(&eps0)),
            stream + 1,
        )?;
        if let Some(p) = prev {
            adopt(model, &qo, cfg, &mut optimal, &p.optimal)?;
        }
        adopt(model, &qo, cfg, &mut optimal, &eps0)?;

        let qn = q(Baseline::NoSecurity);
        let mut nosec = solve(
            model,
            &qn,
            cfg,
            &warm(Baseline::NoSecurity, Some(&optimal)),
            stream + 2,
        )?;
        if let Some(p) = prev {
            adopt(model, &qn, cfg, &mut nosec, &p.nosec)?;
        }
        adopt(model, &qn, cfg, &mut nosec, &optimal)?;

        for s in [&eps0, &optimal, &nosec] {
            if s.is_feasible() && s.theta.is_nan() {
                return Err(Error::Numerical(format!("NaN exponent at rate {rate}")));
            }
        }
        let le = |a: &ExponentSolution, b: &ExponentSolution| {
            !(a.is_feasible() && b.is_feasible()) || a.theta <= b.theta + 1e-9
        };
        let nesting_ok = le(&optimal, &nosec)
            && (!eps0_feasible_for_optimal(model, &qo, cfg, &eps0)? || le(&eps0, &optimal));
        rows.push(SweepRow {
            rate,
            optimal,
            eps0,
            nosec,
            nesting_ok,
        });
    }
    Ok(rows)
}

fn eps0_feasible_for_optimal(
    model: &SourceModel,
    qo: &ExponentQuery,
    cfg: &OptimizerConfig,
    eps0: &ExponentSolution,
) -> Result<bool> {
    match &eps0.aux {
        Some(aux) => Ok(satisfies(
            qo,
            &evaluate_point(model, aux, qo.epsilon)?,
            cfg.tol,
        )),
        None => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::point::tests::example_model;
    use crate::region::SolveStatus;

    #[test]
    fn rate_zero_rows_are_zero() {
        let rows = sweep_rate_curve(
            &example_model(),
            &[0.0],
            0.13,
            0.13,
            0.2,
            &OptimizerConfig::default(),
        )
        .unwrap();
        for b in Baseline::ALL {
            assert!(rows[0].get(b).theta.abs() < 1e-7);
        }
    }

    #[test]
    fn infeasible_rows_carry_status() {
        let rows = sweep_rate_curve(
            &example_model(),
            &[0.0, 0.5],
            0.6,
            0.0,
            0.2,
            &OptimizerConfig::default(),
        )
        .unwrap();
        for r in &rows {
            assert_eq!(r.optimal.status, SolveStatus::Infeasible);
            assert_eq!(r.eps0.status, SolveStatus::Infeasible);
            assert!(r.optimal.theta.is_nan());
            assert!(r.nosec.is_feasible());
        }
    }

    #[test]
    fn unsorted_rates_rejected() {
        assert!(sweep_rate_curve(
            &example_model(),
            &[0.5, 0.1],
            0.0,
            0.0,
            0.2,
            &OptimizerConfig::default()
        )
        .is_err());
    }

    #[test]
    fn curves_are_monotone_and_nested() {
        let rates: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let rows = sweep_rate_curve(
            &example_model(),
            &rates,
            0.13,
            0.13,
            0.2,
            &OptimizerConfig::default(),
        )
        .unwrap();
        for w in rows.windows(2) {
            for b in Baseline::ALL {
                assert!(w[1].get(b).theta >= w[0].get(b).theta);
            }
        }
        assert!(rows.iter().all(|r| r.nesting_ok));
    }
}
