// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use ht_secrecy_core::prob::{conditional_entropy, SourceModel};
use ht_secrecy_core::region::{
    evaluate_point, sweep_rate_curve, AuxChannel, Baseline, RegionPoint, SolveStatus,
};
use ht_secrecy_core::rng::derive_seed;
use ht_secrecy_core::scheme::{
    construct_full_joint, exact_equivocation, exact_error_probs, generate_codebook,
    mc_error_estimates, soft_covering_tv, Hypothesis, SchemeParams,
};
use ht_secrecy_core::Error;
use serde::{Deserialize, Serialize};

use crate::config::{load_aux, RunConfig};
use crate::format::{fmt_float, fmt_opt};
use crate::{CliError, SCHEMA_VERSION};

/// What a command produced: an optional CSV table and a JSON document.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: Option<String>,
    pub json: String,
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Feasible => "feasible",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::NotConverged => "not_converged",
    }
}

/// `H_P(X|Z)` and `H_Q(X|Z)`, the largest useful equivocation targets.
fn caps(model: &SourceModel) -> Result<(f64, f64), CliError> {
    let h0 = conditional_entropy(&model.joint_xz(false)?, &[0], &[1])?;
    let h1 = conditional_entropy(&model.joint_xz(true)?, &[0], &[1])?;
    Ok((h0, h1))
}

fn finite_or_nan(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub baseline: Baseline,
    /// Absent when infeasible.
    pub theta: Option<f64>,
    pub status: SolveStatus,
    /// Maximizing `P(u|x)`, rows indexed by x.
    pub aux: Option<Vec<Vec<f64>>>,
    pub rate_needed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub rate: f64,
    pub results: Vec<BaselineResult>,
    pub nesting_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub schema_version: u32,
    pub command: String,
    pub delta0: f64,
    pub delta1: f64,
    pub epsilon: f64,
    pub hp_x_z: f64,
    pub hq_x_z: f64,
    pub rows: Vec<RegionRow>,
    pub wall_time_s: f64,
}

fn aux_rows(aux: &AuxChannel) -> Vec<Vec<f64>> {
    aux.pux()
        .rows()
        .iter()
        .map(|r| r.probs().to_vec())
        .collect()
}

pub fn cmd_region(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let start = Instant::now();
    let spec = cfg.region.as_ref().ok_or_else(|| {
        CliError::Config(crate::config::FieldError {
            field: "region".into(),
            message: "the region command needs a \"region\" block".into(),
        })
    })?;
    let model = cfg.model.build()?;
    let rates = spec.rate_grid()?;
    cfg.optimizer.validate()?;
    let sweep = sweep_rate_curve(
        &model,
        &rates,
        spec.delta0,
        spec.delta1,
        spec.epsilon,
        &cfg.optimizer,
    )?;
    let baselines: Vec<Baseline> = Baseline::ALL
        .into_iter()
        .filter(|b| spec.baselines.contains(b))
        .collect();

    let mut header = vec!["rate".to_string()];
    header.extend(baselines.iter().map(|b| format!("theta_{}", b.name())));
    header.extend(baselines.iter().map(|b| format!("status_{}", b.name())));
    let mut table = Vec::with_capacity(sweep.len());
    let mut rows = Vec::with_capacity(sweep.len());
    for row in &sweep {
        let mut line = vec![fmt_float(row.rate)];
        line.extend(baselines.iter().map(|&b| fmt_float(row.get(b).theta)));
        line.extend(
            baselines
                .iter()
                .map(|&b| status_name(row.get(b).status).to_string()),
        );
        table.push(line);
        rows.push(RegionRow {
            rate: row.rate,
            results: baselines
                .iter()
                .map(|&b| {
                    let s = row.get(b);
                    BaselineResult {
                        baseline: b,
                        theta: finite_or_nan(s.theta),
                        status: s.status,
                        aux: s.aux.as_ref().map(aux_rows),
                        rate_needed: s.point.as_ref().map(|p| p.rate_needed),
                    }
                })
                .collect(),
            nesting_ok: row.nesting_ok,
        });
    }
    let (hp_x_z, hq_x_z) = caps(&model)?;
    let summary = RegionSummary {
        schema_version: SCHEMA_VERSION,
        command: "region".into(),
        delta0: spec.delta0,
        delta1: spec.delta1,
        epsilon: spec.epsilon,
        hp_x_z,
        hq_x_z,
        rows,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(CommandOutput {
        csv: Some(csv_table(&header, &table)?),
        json: to_json(&summary)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateSummary {
    pub schema_version: u32,
    pub command: String,
    pub point: RegionPoint,
}

/// Evaluates the region point of the auxiliary channel stored at `aux_path`.
pub fn cmd_evaluate(
    cfg: &RunConfig,
    aux_path: &std::path::Path,
) -> Result<CommandOutput, CliError> {
    let model = cfg.model.build()?;
    let epsilon = cfg
        .evaluate
        .as_ref()
        .map(|e| e.epsilon)
        .or_else(|| cfg.region.as_ref().map(|r| r.epsilon))
        .ok_or_else(|| {
            CliError::Config(crate::config::FieldError {
                field: "evaluate.epsilon".into(),
                message: "needed (or region.epsilon)".into(),
            })
        })?;
    let aux = load_aux(aux_path, model.x_size())?;
    let point = evaluate_point(&model, &aux, epsilon)?;
    let summary = EvaluateSummary {
        schema_version: SCHEMA_VERSION,
        command: "evaluate".into(),
        point,
    };
    Ok(CommandOutput {
        csv: None,
        json: to_json(&summary)?,
    })
}

/// One blocklength's results. `exact` marks `alpha`/`beta` from enumeration
/// (confidence half-widths then zero); equivocations and the soft-covering
/// distance are present only when their enumeration fits the size guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n: usize,
    pub alpha_hat: f64,
    pub alpha_ci: f64,
    pub beta_hat: f64,
    pub beta_ci: f64,
    /// `-(1/n) log2 beta`; with `beta_zero` from Monte Carlo, a lower bound.
    /// Absent (infinite) when the exact beta is zero.
    pub beta_exponent: Option<f64>,
    pub equiv_h0: Option<f64>,
    pub equiv_h1: Option<f64>,
    pub tv_ideal: Option<f64>,
    pub exact: bool,
    pub seed: u64,
    pub beta_zero: bool,
    pub trials: u64,
    pub msg_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub schema_version: u32,
    pub command: String,
    pub rate: f64,
    pub epsilon: f64,
    /// `I_P(U;X)`, the bound the rate must exceed.
    pub rate_needed: f64,
    /// `I_P(U;Y)`, the limiting type-II exponent.
    pub exponent_limit: f64,
    pub delta0_cap: f64,
    pub delta1_cap: f64,
    pub hp_x_z: f64,
    pub hq_x_z: f64,
    /// `"given"` or `"constructed"` from the marginal eavesdropper channels.
    pub eve_joint: String,
    pub pzxy: Vec<Vec<f64>>,
    pub rows: Vec<SimRow>,
    pub wall_time_s: f64,
}

pub const SIMULATE_HEADER: [&str; 12] = [
    "n",
    "alpha_hat",
    "alpha_ci",
    "beta_hat",
    "beta_ci",
    "beta_exponent",
    "equiv_h0",
    "equiv_h1",
    "tv_ideal",
    "exact_flag",
    "seed",
    "beta_zero",
];

fn guarded<T>(r: ht_secrecy_core::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SizeGuard { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let start = Instant::now();
    let field = |f: &str, m: &str| {
        CliError::Config(crate::config::FieldError {
            field: f.into(),
            message: m.into(),
        })
    };
    let spec = cfg.simulate.as_ref().ok_or_else(|| {
        field(
            "simulate",
            "the simulate command needs a \"simulate\" block",
        )
    })?;
    let given = cfg.model.build()?;
    let (model, eve_joint) = if given.is_full() {
        (given, "given")
    } else {
        let t = construct_full_joint(given.pzx_h0(), given.qzx_h1(), given.pyx(), given.px())?
            .ok_or_else(|| {
                field(
                    "model",
                    "no P(z|x,y) reproduces both marginal eavesdropper channels",
                )
            })?;
        (
            SourceModel::full(given.px().clone(), given.pyx().clone(), t)?,
            "constructed",
        )
    };
    let aux = spec.aux_channel(model.x_size())?;
    if spec.n.is_empty() || spec.n.contains(&0) {
        return Err(field(
            "simulate.n",
            "need a nonempty list of blocklengths >= 1",
        ));
    }
    if spec.trials == 0 {
        return Err(field("simulate.trials", "must be >= 1"));
    }
    let point = evaluate_point(&model, &aux, 0.0)?;
    let eps = spec.epsilon;
    let ent = &point.entropies;
    let rate = match (spec.rate, spec.rate_offset) {
        (Some(r), None) => r,
        (None, Some(off)) => point.rate_needed + off,
        _ => {
            return Err(field(
                "simulate",
                "give exactly one of \"rate\" or \"rate_offset\"",
            ))
        }
    };

    let mut rows = Vec::with_capacity(spec.n.len());
    for &n in &spec.n {
        let params = SchemeParams::new(model.clone(), aux.clone(), rate, spec.epsilon, n, spec.mu)?;
        let cb = generate_codebook(params.pu(), n, rate, derive_seed(spec.seed, &[n as u64, 0]))?;
        let row = match guarded(exact_error_probs(&params, &cb))? {
            Some(e) => SimRow {
                n,
                alpha_hat: e.alpha,
                alpha_ci: 0.0,
                beta_hat: e.beta,
                beta_ci: 0.0,
                beta_exponent: (e.beta > 0.0).then(|| -e.beta.log2() / n as f64),
                equiv_h0: None,
                equiv_h1: None,
                tv_ideal: None,
                exact: true,
                seed: spec.seed,
                beta_zero: e.beta == 0.0,
                trials: 0,
                msg_count: cb.msg_count(),
            },
            None => {
                let est = mc_error_estimates(
                    &params,
                    &cb,
                    spec.trials,
                    derive_seed(spec.seed, &[n as u64, 1]),
                )?;
                SimRow {
                    n,
                    alpha_hat: est.alpha_hat,
                    alpha_ci: (est.alpha_ci.1 - est.alpha_ci.0) / 2.0,
                    beta_hat: est.beta_hat,
                    beta_ci: (est.beta_ci.1 - est.beta_ci.0) / 2.0,
                    beta_exponent: Some(est.beta_exponent),
                    equiv_h0: None,
                    equiv_h1: None,
                    tv_ideal: None,
                    exact: false,
                    seed: spec.seed,
                    beta_zero: est.beta_zero,
                    trials: spec.trials,
                    msg_count: cb.msg_count(),
                }
            }
        };
        let row = SimRow {
            equiv_h0: guarded(exact_equivocation(&params, &cb, Hypothesis::H0))?,
            equiv_h1: guarded(exact_equivocation(&params, &cb, Hypothesis::H1))?,
            tv_ideal: guarded(soft_covering_tv(&params, &cb))?,
            ..row
        };
        let values = [
            Some(row.alpha_hat),
            Some(row.beta_hat),
            row.equiv_h0,
            row.equiv_h1,
            row.tv_ideal,
        ];
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(CliError::Numerical(format!(
                "NaN in simulation results at n = {n}"
            )));
        }
        rows.push(row);
    }

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_float(r.alpha_hat),
                fmt_float(r.alpha_ci),
                fmt_float(r.beta_hat),
                fmt_float(r.beta_ci),
                r.beta_exponent.map_or_else(|| "inf".to_string(), fmt_float),
                fmt_opt(r.equiv_h0),
                fmt_opt(r.equiv_h1),
                fmt_opt(r.tv_ideal),
                u8::from(r.exact).to_string(),
                r.seed.to_string(),
                u8::from(r.beta_zero).to_string(),
            ]
        })
        .collect();
    let header: Vec<String> = SIMULATE_HEADER.iter().map(|s| s.to_string()).collect();
    let (hp_x_z, hq_x_z) = caps(&model)?;
    let summary = SimulateSummary {
        schema_version: SCHEMA_VERSION,
        command: "simulate".into(),
        rate,
        epsilon: spec.epsilon,
        rate_needed: point.rate_needed,
        exponent_limit: point.exponent,
        delta0_cap: (1.0 - eps) * ent.hp_x_uz + eps * ent.hp_x_z,
        delta1_cap: (1.0 - eps) * ent.hq_x_uz + eps * ent.hq_x_z,
        hp_x_z,
        hq_x_z,
        eve_joint: eve_joint.into(),
        pzxy: model
            .pzxy()
            .expect("full model")
            .rows()
            .iter()
            .map(|r| r.probs().to_vec())
            .collect(),
        rows,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(CommandOutput {
        csv: Some(csv_table(&header, &table)?),
        json: to_json(&summary)?,
    })
}
