// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a JSON tree with a `model` block plus one block per
//! command. Probabilities may be numbers or exact `"a/b"` strings.

use std::fmt;
use std::path::Path;

use ht_secrecy_core::prob::{CondPmf, Pmf, SourceModel};
use ht_secrecy_core::region::{AuxChannel, Baseline, OptimizerConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A probability as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prob {
    Number(f64),
    Text(String),
}

impl Prob {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Prob::Number(v) => Ok(*v),
            Prob::Text(s) => parse_prob_text(s),
        }
    }
}

/// Parses `"a/b"` with integer `a` and `b`, or a plain decimal.
fn parse_prob_text(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let den: u64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if den == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        // Both sides below 2^53 convert exactly, so one rounding happens.
        if num >= 1 << 53 || den >= 1 << 53 {
            return Err(format!("{s:?} has terms too large to represent exactly"));
        }
        return Ok(num as f64 / den as f64);
    }
    s.parse::<f64>()
        .map_err(|_| format!("{s:?} is neither a decimal nor a fraction a/b"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EveMode {
    Full,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub z_size: usize,
    pub px: Vec<Prob>,
    pub pyx: Vec<Vec<Prob>>,
    pub eve_mode: EveMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pzxy: Option<Vec<Vec<Prob>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pzx_h0: Option<Vec<Vec<Prob>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qzx_h1: Option<Vec<Vec<Prob>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_range: Option<RateRange>,
    pub delta0: f64,
    pub delta1: f64,
    pub epsilon: f64,
    #[serde(default = "all_baselines")]
    pub baselines: Vec<Baseline>,
}

fn all_baselines() -> Vec<Baseline> {
    Baseline::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSpec {
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    /// Auxiliary channel, rows indexed by x.
    pub aux: Vec<Vec<Prob>>,
    /// Absolute codebook rate; exclusive with `rate_offset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Rate as `I(U;X) + rate_offset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_offset: Option<f64>,
    pub epsilon: f64,
    pub n: Vec<usize>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Encoder typicality radius; `n^(-1/3)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluate: Option<EvaluateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A validation failure tied to a config path such as `model.pyx[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config(FieldError {
        field: field.into(),
        message: message.into(),
    })
}

pub fn probs(field: &str, row: &[Prob], len: usize) -> Result<Vec<f64>, CliError> {
    if row.len() != len {
        return Err(field_err(
            field,
            format!("expected {len} entries, found {}", row.len()),
        ));
    }
    row.iter()
        .enumerate()
        .map(|(i, p)| p.value().map_err(|m| field_err(format!("{field}[{i}]"), m)))
        .collect()
}

pub fn pmf(field: &str, row: &[Prob], len: usize) -> Result<Pmf, CliError> {
    Pmf::new(probs(field, row, len)?).map_err(|e| field_err(field, e.to_string()))
}

pub fn matrix(
    field: &str,
    rows: &[Vec<Prob>],
    n_rows: usize,
    n_cols: usize,
) -> Result<CondPmf, CliError> {
    if rows.len() != n_rows {
        return Err(field_err(
            field,
            format!("expected {n_rows} rows, found {}", rows.len()),
        ));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| pmf(&format!("{field}[{i}]"), r, n_cols))
        .collect::<Result<Vec<_>, _>>()?;
    CondPmf::new(rows).map_err(|e| field_err(field, e.to_string()))
}

impl ModelSpec {
    pub fn build(&self) -> Result<SourceModel, CliError> {
        let (xs, ys, zs) = (self.x_size, self.y_size, self.z_size);
        for (name, v) in [
            ("model.x_size", xs),
            ("model.y_size", ys),
            ("model.z_size", zs),
        ] {
            if !(1..=256).contains(&v) {
                return Err(field_err(name, format!("{v} is not in 1..=256")));
            }
        }
        let px = pmf("model.px", &self.px, xs)?;
        let pyx = matrix("model.pyx", &self.pyx, xs, ys)?;
        let model = match self.eve_mode {
            EveMode::Full => {
                let rows = self
                    .pzxy
                    .as_ref()
                    .ok_or_else(|| field_err("model.pzxy", "required when eve_mode is \"full\""))?;
                let pzxy = matrix("model.pzxy", rows, xs * ys, zs)?;
                SourceModel::full(px, pyx, pzxy)
            }
            EveMode::Marginal => {
                let h0 = self.pzx_h0.as_ref().ok_or_else(|| {
                    field_err("model.pzx_h0", "required when eve_mode is \"marginal\"")
                })?;
                let h1 = self.qzx_h1.as_ref().ok_or_else(|| {
                    field_err("model.qzx_h1", "required when eve_mode is \"marginal\"")
                })?;
                SourceModel::marginal(
                    px,
                    pyx,
                    matrix("model.pzx_h0", h0, xs, zs)?,
                    matrix("model.qzx_h1", h1, xs, zs)?,
                )
            }
        };
        model.map_err(|e| field_err("model", e.to_string()))
    }
}

impl RegionSpec {
    /// Ascending rate grid.
    pub fn rate_grid(&self) -> Result<Vec<f64>, CliError> {
        let rates = match (&self.rates, &self.rate_range) {
            (Some(r), None) => r.clone(),
            (None, Some(g)) => {
                if !(g.step > 0.0) || !(g.stop >= g.start) {
                    return Err(field_err(
                        "region.rate_range",
                        "need step > 0 and stop >= start",
                    ));
                }
                let count = ((g.stop - g.start) / g.step + 1e-9).floor() as usize;
                // Round to 12 decimals so 0.1 + 3 * 0.02 style drift does not leak.
                (0..=count)
                    .map(|k| ((g.start + k as f64 * g.step) * 1e12).round() / 1e12)
                    .collect()
            }
            _ => {
                return Err(field_err(
                    "region",
                    "give exactly one of \"rates\" or \"rate_range\"",
                ))
            }
        };
        if rates.is_empty() {
            return Err(field_err("region.rates", "empty rate list"));
        }
        if rates.windows(2).any(|w| !(w[0] < w[1])) || rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(field_err(
                "region.rates",
                "rates must be non-negative and strictly ascending",
            ));
        }
        Ok(rates)
    }
}

impl SimulateSpec {
    pub fn aux_channel(&self, x_size: usize) -> Result<AuxChannel, CliError> {
        let u_size = self.aux.first().map(Vec::len).unwrap_or(0);
        Ok(AuxChannel::new(matrix(
            "simulate.aux",
            &self.aux,
            x_size,
            u_size,
        )?))
    }
}

/// Reads an auxiliary channel file: a JSON matrix with rows indexed by x.
pub fn load_aux(path: &Path, x_size: usize) -> Result<AuxChannel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let rows: Vec<Vec<Prob>> = serde_json::from_str(&text).map_err(|e| {
        field_err(
            format!(
                "{} (line {}, column {})",
                path.display(),
                e.line(),
                e.column()
            ),
            e.to_string(),
        )
    })?;
    let u_size = rows.first().map(Vec::len).unwrap_or(0);
    Ok(AuxChannel::new(matrix("aux", &rows, x_size, u_size)?))
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| {
        field_err(
            format!("config (line {}, column {})", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"x_size": 2, "y_size": 2, "z_size": 2,
                  "px": ["4/5", 0.2], "pyx": [[1, 0], [0, 1]],
                  "eve_mode": "marginal",
                  "pzx_h0": [["4/5", "1/5"], ["1/5", "4/5"]],
                  "qzx_h1": [["7/10", "3/10"], ["3/10", "7/10"]]}
    }"#;

    #[test]
    fn fractions_are_exact() {
        assert_eq!(parse_prob_text("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_prob_text(" 3 / 10 ").unwrap(), 0.3);
        assert_eq!(parse_prob_text("0.25").unwrap(), 0.25);
        assert!(parse_prob_text("1/0").is_err());
        assert!(parse_prob_text("a/2").is_err());
    }

    #[test]
    fn minimal_config_builds() {
        let cfg = parse_config(MINIMAL).unwrap();
        let m = cfg.model.build().unwrap();
        assert_eq!(m.px().probs(), &[0.8, 0.2]);
        assert_eq!(cfg.optimizer, OptimizerConfig::default());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = MINIMAL.replace(r#"[[1, 0], [0, 1]]"#, r#"[[1, 0], [0.5, 0.6]]"#);
        let err = parse_config(&bad).unwrap().model.build().unwrap_err();
        assert!(err.to_string().contains("model.pyx[1]"), "{err}");
        let short = MINIMAL.replace(r#"[[1, 0], [0, 1]]"#, r#"[[1, 0]]"#);
        let err = parse_config(&short).unwrap().model.build().unwrap_err();
        assert!(err.to_string().contains("model.pyx"), "{err}");
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_config("{\n  \"model\": [,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn full_mode_needs_pzxy() {
        let full = MINIMAL.replace("\"marginal\"", "\"full\"");
        let err = parse_config(&full).unwrap().model.build().unwrap_err();
        assert!(err.to_string().contains("model.pzxy"), "{err}");
    }

    #[test]
    fn rate_grid_from_range() {
        let spec = RegionSpec {
            rates: None,
            rate_range: Some(RateRange {
                start: 0.0,
                stop: 1.0,
                step: 0.02,
            }),
            delta0: 0.1,
            delta1: 0.1,
            epsilon: 0.2,
            baselines: all_baselines(),
        };
        let g = spec.rate_grid().unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[3], 0.06);
        assert_eq!(g[50], 1.0);
    }
}
