// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Multi-start maximization of `I_P(U;Y)` over auxiliary channels.
//!
//! Each row of `P(u|x)` is parametrized by `|U| - 1` stick-breaking
//! coordinates in `[0, 1]`. A restart runs derivative-free coordinate
//! descent on `I(U;Y) - w * sum(violation^2)`, escalating `w` tenfold up to
//! three times while the incumbent is infeasible. An infeasible incumbent
//! is then pulled toward a `U`-constant channel by bisection (the feasible
//! set is convex and contains every constant channel once the pre-check
//! passes), and finally polished by a (1+1) evolution strategy that only
//! accepts feasible moves.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fast::{Evaluator, Metrics};
use super::point::{check_epsilon, evaluate_point, RegionPoint};
use super::AuxChannel;
use crate::prob::SourceModel;
use crate::rng::{stream, tag};
use crate::{Error, Result};

/// Violations below this count as satisfied during the search.
const FEASIBILITY_SLACK: f64 = 1e-12;
const PENALTY_ESCALATIONS: usize = 3;
const POLISH_EVALS_PER_DIM: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Rate plus both equivocation constraints with the switch probability.
    Optimal,
    /// Rate plus `H_P(X|UZ) >= delta0` only, i.e. no switch and no
    /// alternative-hypothesis constraint.
    #[serde(alias = "eps0")]
    EpsZeroH0Only,
    /// Rate constraint only.
    #[serde(alias = "nosec")]
    NoSecurity,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [
        Baseline::Optimal,
        Baseline::EpsZeroH0Only,
        Baseline::NoSecurity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Optimal => "optimal",
            Baseline::EpsZeroH0Only => "eps0",
            Baseline::NoSecurity => "nosec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentQuery {
    pub rate: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub epsilon: f64,
    pub baseline: Baseline,
}

impl ExponentQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate {} must be >= 0",
                self.rate
            )));
        }
        if !(self.delta0.is_finite() && self.delta1.is_finite()) {
            return Err(Error::InvalidParameter(
                "equivocation targets must be finite".into(),
            ));
        }
        check_epsilon(self.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Auxiliary alphabet size; `None` means `|X| + 3`.
    pub u_size: Option<usize>,
    pub restarts: usize,
    /// Grid spacing of the brute-force oracle.
    pub grid_step: f64,
    /// Sweep limit per coordinate-descent stage.
    pub max_iters: usize,
    pub tol: f64,
    pub penalty_weight: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            u_size: None,
            restarts: 12,
            grid_step: 0.02,
            max_iters: 5000,
            tol: 1e-7,
            penalty_weight: 100.0,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "grid_step {} must lie in (0, 0.5]",
                self.grid_step
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be > 0".into()));
        }
        if !(self.penalty_weight > 0.0) {
            return Err(Error::InvalidParameter("penalty_weight must be > 0".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if self.u_size == Some(0) {
            return Err(Error::InvalidParameter("u_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn u_size_for(&self, x_size: usize) -> usize {
        self.u_size.unwrap_or(x_size + 3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    /// Feasible and certified, but the best restart hit its iteration limit.
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSolution {
    /// Certified exponent; NaN when infeasible.
    pub theta: f64,
    pub aux: Option<AuxChannel>,
    pub point: Option<RegionPoint>,
    pub status: SolveStatus,
}

impl ExponentSolution {
    fn infeasible() -> Self {
        Self {
            theta: f64::NAN,
            aux: None,
            point: None,
            status: SolveStatus::Infeasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status != SolveStatus::Infeasible
    }
}

/// Maximizes the exponent under rate and both equivocation constraints.
pub fn optimal_exponent(
    model: &SourceModel,
    q: &ExponentQuery,
    cfg: &OptimizerConfig,
) -> Result<ExponentSolution> {
    if q.baseline != Baseline::Optimal {
        return Err(Error::InvalidParameter(
            "optimal_exponent needs the optimal baseline".into(),
        ));
    }
    solve(model, q, cfg, &[], 0)
}

/// Maximizes the exponent under one of the reduced constraint sets.
pub fn baseline_exponent(
    model: &SourceModel,
    q: &ExponentQuery,
    cfg: &OptimizerConfig,
) -> Result<ExponentSolution> {
    if q.baseline == Baseline::Optimal {
        return Err(Error::InvalidParameter(
            "baseline_exponent needs a reduced baseline".into(),
        ));
    }
    solve(model, q, cfg, &[], 0)
}

/// Shared driver. `warm` channels are tried as extra starting points;
/// `stream` separates RNG streams of otherwise identical calls.
pub fn solve(
    model: &SourceModel,
    q: &ExponentQuery,
    cfg: &OptimizerConfig,
    warm: &[AuxChannel],
    stream_id: u64,
) -> Result<ExponentSolution> {
    q.validate()?;
    cfg.validate()?;
    let ev = Evaluator::new(model)?;
    let problem = Problem {
        ev: &ev,
        q: *q,
        cfg,
        xs: model.x_size(),
        us: cfg.u_size_for(model.x_size()),
    };
    if !problem.precheck() {
        return Ok(ExponentSolution::infeasible());
    }
    if q.rate == 0.0 {
        // Only U-constant channels fit, and they give a zero exponent.
        let aux = AuxChannel::constant(problem.xs, problem.us)?;
        let point = evaluate_point(model, &aux, q.epsilon)?;
        return Ok(ExponentSolution {
            theta: 0.0,
            aux: Some(aux),
            point: Some(point),
            status: SolveStatus::Feasible,
        });
    }

    let mut starts: Vec<Start> = (0..cfg.restarts).map(Start::Restart).collect();
    starts.extend(warm.iter().map(|a| Start::Warm(problem.embed(a))));
    let candidates: Vec<Candidate> = starts
        .par_iter()
        .enumerate()
        .map(|(i, start)| {
            let mut rng = stream(cfg.seed, &[tag::RESTART, stream_id, i as u64]);
            problem.run(start, &mut rng)
        })
        .collect();

    let best_theta = candidates
        .iter()
        .map(|c| c.metrics.i_uy)
        .fold(f64::NEG_INFINITY, f64::max);
    if best_theta.is_nan() {
        return Err(Error::Numerical("optimizer produced NaN exponent".into()));
    }
    let chosen = candidates
        .iter()
        .filter(|c| c.metrics.i_uy >= best_theta - cfg.tol)
        .min_by(|a, b| a.metrics.i_ux.total_cmp(&b.metrics.i_ux))
        .ok_or_else(|| Error::Numerical("no optimizer candidate".into()))?;

    let aux = AuxChannel::from_flat(&chosen.pux, problem.xs)?;
    let point = evaluate_point(model, &aux, q.epsilon)?;
    problem.certify(&point)?;
    Ok(ExponentSolution {
        theta: point.exponent,
        aux: Some(aux),
        point: Some(point),
        status: if chosen.converged {
            SolveStatus::Feasible
        } else {
            SolveStatus::NotConverged
        },
    })
}

/// Whether an evaluated point meets the query's constraints within `tol`.
pub(crate) fn satisfies(q: &ExponentQuery, pt: &RegionPoint, tol: f64) -> bool {
    let rate_ok = pt.rate_needed <= q.rate + tol;
    match q.baseline {
        Baseline::Optimal => {
            rate_ok && pt.delta0_cap >= q.delta0 - tol && pt.delta1_cap >= q.delta1 - tol
        }
        Baseline::EpsZeroH0Only => rate_ok && pt.entropies.hp_x_uz >= q.delta0 - tol,
        Baseline::NoSecurity => rate_ok,
    }
}

enum Start {
    Restart(usize),
    Warm(Vec<f64>),
}

struct Candidate {
    pux: Vec<f64>,
    metrics: Metrics,
    converged: bool,
}

struct Problem<'a> {
    ev: &'a Evaluator,
    q: ExponentQuery,
    cfg: &'a OptimizerConfig,
    xs: usize,
    us: usize,
}

impl Problem<'_> {
    /// A `U`-constant channel maximizes both caps and needs zero rate.
    fn precheck(&self) -> bool {
        match self.q.baseline {
            Baseline::Optimal => self.q.delta0 <= self.ev.hp_x_z && self.q.delta1 <= self.ev.hq_x_z,
            Baseline::EpsZeroH0Only => self.q.delta0 <= self.ev.hp_x_z,
            Baseline::NoSecurity => true,
        }
    }

    fn violations(&self, m: &Metrics) -> [f64; 3] {
        let eps = self.q.epsilon;
        let rate = m.i_ux - self.q.rate;
        let (v0, v1) = match self.q.baseline {
            Baseline::Optimal => (
                self.q.delta0 - ((1.0 - eps) * m.hp_x_uz + eps * self.ev.hp_x_z),
                self.q.delta1 - ((1.0 - eps) * m.hq_x_uz + eps * self.ev.hq_x_z),
            ),
            Baseline::EpsZeroH0Only => (self.q.delta0 - m.hp_x_uz, 0.0),
            Baseline::NoSecurity => (0.0, 0.0),
        };
        [rate.max(0.0), v0.max(0.0), v1.max(0.0)]
    }

    fn feasible(&self, m: &Metrics) -> bool {
        self.violations(m).iter().all(|&v| v <= FEASIBILITY_SLACK)
    }

    fn penalized(&self, m: &Metrics, w: f64) -> f64 {
        m.i_uy - w * self.violations(m).iter().map(|v| v * v).sum::<f64>()
    }

    fn certify(&self, pt: &RegionPoint) -> Result<()> {
        if !satisfies(&self.q, pt, self.cfg.tol) || pt.exponent.is_nan() {
            return Err(Error::Numerical(format!(
                "optimizer argmax fails re-verification ({pt:?})"
            )));
        }
        Ok(())
    }

    fn dims(&self) -> usize {
        self.xs * (self.us - 1)
    }

    fn decode(&self, s: &[f64]) -> Vec<f64> {
        let k = self.us - 1;
        let mut pux = Vec::with_capacity(self.xs * self.us);
        for x in 0..self.xs {
            let mut rem = 1.0;
            for &c in &s[x * k..(x + 1) * k] {
                let p = rem * c;
                pux.push(p);
                rem -= p;
            }
            pux.push(rem.max(0.0));
        }
        pux
    }

    fn encode(&self, pux: &[f64]) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.dims());
        for row in pux.chunks(self.us) {
            let mut rem = 1.0;
            for &p in &row[..self.us - 1] {
                s.push(if rem > 1e-300 {
                    (p / rem).clamp(0.0, 1.0)
                } else {
                    0.0
                });
                rem -= p;
            }
        }
        s
    }

    /// Pads or truncates a caller-supplied channel to the working alphabet.
    fn embed(&self, aux: &AuxChannel) -> Vec<f64> {
        let mut pux = Vec::with_capacity(self.xs * self.us);
        for r in aux.pux().rows() {
            let mut row = vec![0.0; self.us];
            for (u, &p) in r.probs().iter().enumerate() {
                row[u.min(self.us - 1)] += p;
            }
            pux.extend(row);
        }
        pux
    }

    fn initial(&self, start: &Start, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match start {
            Start::Warm(pux) => pux.clone(),
            Start::Restart(0) => {
                let mut pux = vec![0.0; self.xs * self.us];
                for x in 0..self.xs {
                    pux[x * self.us + x.min(self.us - 1)] = 1.0;
                }
                pux
            }
            Start::Restart(_) => (0..self.xs)
                .flat_map(|_| {
                    let w: Vec<f64> = (0..self.us).map(|_| Exp1.sample(&mut *rng)).collect();
                    let t: f64 = w.iter().sum();
                    w.into_iter().map(move |v| v / t)
                })
                .collect(),
        }
    }

    fn run(&self, start: &Start, rng: &mut ChaCha8Rng) -> Candidate {
        if self.us == 1 {
            let pux = vec![1.0; self.xs];
            return Candidate {
                metrics: self.ev.eval(&pux),
                pux,
                converged: true,
            };
        }
        let mut s = self.encode(&self.initial(start, rng));
        let mut w = self.cfg.penalty_weight;
        let mut converged = true;
        for stage in 0..=PENALTY_ESCALATIONS {
            converged = self.coordinate_descent(&mut s, w);
            if self.feasible(&self.ev.eval(&self.decode(&s))) || stage == PENALTY_ESCALATIONS {
                break;
            }
            w *= 10.0;
        }
        let pux = self.repair(self.decode(&s));
        let (pux, metrics) = self.polish(pux, rng);
        Candidate {
            pux,
            metrics,
            converged,
        }
    }

    /// One exploratory coordinate sweep around `s` with step `h`.
    fn explore(&self, s: &mut [f64], f: &mut f64, h: f64, w: f64) {
        for i in 0..s.len() {
            let old = s[i];
            for dir in [1.0, -1.0] {
                let cand = (old + dir * h).clamp(0.0, 1.0);
                if cand == old {
                    continue;
                }
                s[i] = cand;
                let fc = self.penalized(&self.ev.eval(&self.decode(s)), w);
                if fc > *f {
                    *f = fc;
                    break;
                }
                s[i] = old;
            }
        }
    }

    /// Hooke-Jeeves pattern search over the coordinates. Returns false when
    /// the sweep limit is hit before the step collapses.
    fn coordinate_descent(&self, s: &mut Vec<f64>, w: f64) -> bool {
        let mut h = 0.25;
        let mut f = self.penalized(&self.ev.eval(&self.decode(s)), w);
        let mut sweeps = 0;
        while sweeps < self.cfg.max_iters {
            let mut x = s.clone();
            let mut fx = f;
            self.explore(&mut x, &mut fx, h, w);
            sweeps += 1;
            if fx <= f {
                h *= 0.5;
                if h < 1e-10 {
                    return true;
                }
                continue;
            }
            // pattern moves along the last displacement
            loop {
                let mut p: Vec<f64> = x
                    .iter()
                    .zip(s.iter())
                    .map(|(a, b)| (2.0 * a - b).clamp(0.0, 1.0))
                    .collect();
                *s = x.clone();
                f = fx;
                let mut fp = self.penalized(&self.ev.eval(&self.decode(&p)), w);
                self.explore(&mut p, &mut fp, h, w);
                sweeps += 1;
                if fp > f && sweeps < self.cfg.max_iters {
                    x = p;
                    fx = fp;
                } else {
                    break;
                }
            }
        }
        false
    }

    /// Smallest mixture weight toward the `U`-marginal that restores
    /// feasibility.
    fn repair(&self, pux: Vec<f64>) -> Vec<f64> {
        if self.feasible(&self.ev.eval(&pux)) {
            return pux;
        }
        let mut pu = vec![0.0; self.us];
        for row in pux.chunks(self.us) {
            for (a, p) in pu.iter_mut().zip(row) {
                *a += p / self.xs as f64;
            }
        }
        let mix = |lambda: f64| -> Vec<f64> {
            pux.chunks(self.us)
                .flat_map(|row| {
                    row.iter()
                        .zip(&pu)
                        .map(|(p, c)| (1.0 - lambda) * p + lambda * c)
                        .collect::<Vec<_>>()
                })
                .collect()
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(&self.ev.eval(&mix(mid))) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        mix(hi)
    }

    fn polish(&self, pux: Vec<f64>, rng: &mut ChaCha8Rng) -> (Vec<f64>, Metrics) {
        let mut metrics = self.ev.eval(&pux);
        if !self.feasible(&metrics) {
            // Only reachable if even the constant channel is infeasible,
            // which the pre-check excludes.
            return (pux, metrics);
        }
        let mut s = self.encode(&pux);
        let mut best = pux;
        let mut sigma = 0.05;
        let budget = POLISH_EVALS_PER_DIM * self.dims().max(1);
        for _ in 0..budget {
            let cand: Vec<f64> = s
                .iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut *rng);
                    (v + sigma * z).clamp(0.0, 1.0)
                })
                .collect();
            let pc = self.decode(&cand);
            let mc = self.ev.eval(&pc);
            let better =
                mc.i_uy > metrics.i_uy || (mc.i_uy == metrics.i_uy && mc.i_ux < metrics.i_ux);
            if better && self.feasible(&mc) {
                s = cand;
                best = pc;
                metrics = mc;
                sigma *= 1.5;
            } else {
                sigma *= 0.9;
                if sigma < 1e-9 {
                    // occasional restart of the step keeps ridges explorable
                    if rng.random::<f64>() < 0.5 {
                        break;
                    }
                    sigma = 1e-3;
                }
            }
        }
        (best, metrics)
    }
}
