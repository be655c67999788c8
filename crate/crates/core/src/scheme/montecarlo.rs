// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::codebook::{seq_planes, Codebook};
use super::coding::{log_likelihoods, normalize_log};
use super::params::SchemeParams;
use crate::prob::{is_typical_counts, Pmf, Symbol};
use crate::rng::{stream, tag};
use crate::{Error, Result};

const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Totals below this fall back to the log-domain posterior.
const UNDERFLOW_FLOOR: f64 = 1e-250;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimates {
    pub trials: u64,
    pub alpha_hat: f64,
    pub alpha_ci: (f64, f64),
    pub beta_hat: f64,
    pub beta_ci: (f64, f64),
    /// No type-II error was observed; `beta_exponent` is then a lower bound.
    pub beta_zero: bool,
    pub beta_exponent: f64,
    /// Trials whose posterior had every codeword at zero likelihood.
    pub degenerate_posteriors: u64,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn cumulative(p: &Pmf) -> Vec<f64> {
    p.probs()
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

fn draw(cum: &[f64], rng: &mut ChaCha8Rng) -> Symbol {
    let r: f64 = rng.random::<f64>() * cum[cum.len() - 1];
    cum.iter().position(|&c| r < c).unwrap_or(cum.len() - 1) as Symbol
}

/// Encoder and decoder specialised to one codebook. Likelihoods come from
/// joint-type counts and per-cell power tables instead of per-symbol logs.
struct Kernel<'a> {
    params: &'a SchemeParams,
    cb: &'a Codebook,
    n: usize,
    xs: usize,
    ys: usize,
    us: usize,
    pow: Vec<f64>,
    /// Binary alphabets with `n <= 64`: plane of symbol 1 and its weight per codeword.
    binary: Option<Vec<(u64, u32)>>,
    px: Vec<f64>,
    pyx: Vec<Vec<f64>>,
    py: Vec<f64>,
}

#[derive(Default)]
struct Scratch {
    x: Vec<Symbol>,
    y: Vec<Symbol>,
    xplanes: Vec<u64>,
    yplanes: Vec<u64>,
    counts: Vec<u32>,
    totals: Vec<u32>,
    weights: Vec<f64>,
    table: Vec<f64>,
}

fn symbol_totals(seq: &[Symbol], size: usize, out: &mut Vec<u32>) {
    out.clear();
    out.resize(size, 0);
    for &s in seq {
        out[usize::from(s)] += 1;
    }
}

impl<'a> Kernel<'a> {
    fn new(params: &'a SchemeParams, cb: &'a Codebook) -> Self {
        let n = cb.n();
        let us = cb.u_size();
        let model = params.model();
        let xs = model.x_size();
        let pxu = params.pxu();
        let mut pow = vec![0.0; us * xs * (n + 1)];
        for b in 0..xs {
            let col_max = (0..us)
                .map(|a| pxu.get(a, b).ln())
                .fold(f64::NEG_INFINITY, f64::max);
            for a in 0..us {
                let shift = pxu.get(a, b).ln() - col_max;
                for k in 0..=n {
                    pow[(a * xs + b) * (n + 1) + k] = if k == 0 {
                        1.0
                    } else if shift.is_finite() {
                        (k as f64 * shift).exp()
                    } else {
                        0.0
                    };
                }
            }
        }
        let binary = (us == 2 && xs == 2 && n <= 64).then(|| {
            (1..=cb.msg_count())
                .map(|m| (cb.plane_word(m, 1), cb.symbol_count(m, 1)))
                .collect()
        });
        Self {
            params,
            cb,
            n,
            binary,
            xs,
            ys: model.y_size(),
            us,
            pow,
            px: cumulative(model.px()),
            pyx: model.pyx().rows().iter().map(cumulative).collect(),
            py: cumulative(model.py()),
        }
    }

    /// Weight of a codeword with `k` ones agreeing with `x` in `j` of them,
    /// tabulated over `(k, j)` for the current `x`.
    fn binary_weights(&self, words: &[(u64, u32)], s: &mut Scratch) -> f64 {
        let n = self.n;
        let ones_x = s.totals[1] as usize;
        let cell = |a: usize, b: usize, k: usize| self.pow[(a * 2 + b) * (n + 1) + k];
        let stride = n + 1;
        s.table.clear();
        s.table.resize(stride * stride, 0.0);
        for k in 0..=n {
            for j in k.saturating_sub(n - ones_x)..=k.min(ones_x) {
                let n11 = j;
                let n10 = k - j;
                let n01 = ones_x - j;
                let n00 = n - k - n01;
                s.table[k * stride + j] =
                    cell(0, 0, n00) * cell(0, 1, n01) * cell(1, 0, n10) * cell(1, 1, n11);
            }
        }
        let x1 = s.xplanes[1];
        let mut total = 0.0;
        s.weights.extend(words.iter().map(|&(u1, k)| {
            let j = (u1 & x1).count_ones();
            let w = s.table[k as usize * stride + j as usize];
            total += w;
            w
        }));
        total
    }

    /// Draws `M'` for the sequence in `s.x`; returns `(message, degenerate)`.
    fn sample_message(&self, s: &mut Scratch, rng: &mut ChaCha8Rng) -> (usize, bool) {
        let count = self.cb.msg_count();
        s.weights.clear();
        let cells = self.us * self.xs;
        let mut total = 0.0;
        if let Some(words) = &self.binary {
            total = self.binary_weights(words, s);
        } else {
            for m in 1..=count {
                self.cb
                    .pair_counts_with(m, &s.xplanes, &s.totals, &mut s.counts);
                let mut w = 1.0;
                for (c, &k) in s.counts[..cells].iter().enumerate() {
                    w *= self.pow[c * (self.n + 1) + k as usize];
                }
                total += w;
                s.weights.push(w);
            }
        }
        let mut degenerate = false;
        if !(total > UNDERFLOW_FLOOR) {
            let (probs, flag) = normalize_log(&log_likelihoods(self.cb, self.params.pxu(), &s.x));
            s.weights = probs;
            total = 1.0;
            degenerate = flag;
        }
        let r = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &w) in s.weights.iter().enumerate() {
            if w > 0.0 {
                last_positive = i;
            }
            acc += w;
            if r < acc {
                return (i + 1, degenerate);
            }
        }
        (last_positive + 1, degenerate)
    }

    /// Runs one trial; returns `(decided H0, degenerate posterior)`.
    fn trial(&self, h1: bool, rng: &mut ChaCha8Rng, s: &mut Scratch) -> (bool, bool) {
        s.x.clear();
        s.y.clear();
        for _ in 0..self.n {
            let x = draw(&self.px, rng);
            let y = if h1 {
                draw(&self.py, rng)
            } else {
                draw(&self.pyx[usize::from(x)], rng)
            };
            s.x.push(x);
            s.y.push(y);
        }
        let xi = rng.random::<f64>() < 1.0 - self.params.epsilon();
        if !xi {
            return (false, false);
        }
        seq_planes(&s.x, self.xs, &mut s.xplanes);
        symbol_totals(&s.x, self.xs, &mut s.totals);
        let (m, degenerate) = self.sample_message(s, rng);
        self.cb
            .pair_counts_with(m, &s.xplanes, &s.totals, &mut s.counts);
        if !is_typical_counts(
            &s.counts[..self.us * self.xs],
            self.n,
            self.params.p_ux(),
            self.params.mu(),
        ) {
            return (false, degenerate);
        }
        seq_planes(&s.y, self.ys, &mut s.yplanes);
        self.cb.pair_counts(m, &s.yplanes, self.ys, &mut s.counts);
        let h0 = is_typical_counts(
            &s.counts[..self.us * self.ys],
            self.n,
            self.params.p_uy(),
            self.params.decoder_mu(),
        );
        (h0, degenerate)
    }

    fn run(&self, h1: bool, trials: u64, seed: u64) -> (u64, u64) {
        let hyp = if h1 { tag::H1 } else { tag::H0 };
        let width = self.us * self.xs.max(self.ys);
        (0..trials)
            .into_par_iter()
            .map_init(
                || Scratch {
                    counts: vec![0; width],
                    ..Scratch::default()
                },
                |s, i| {
                    let mut rng = stream(seed, &[tag::MONTE_CARLO, hyp, i]);
                    let (h0, degenerate) = self.trial(h1, &mut rng, s);
                    (u64::from(h0), u64::from(degenerate))
                },
            )
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    }
}

/// Type-I and type-II error estimates from `trials` runs under each hypothesis.
pub fn mc_error_estimates(
    params: &SchemeParams,
    cb: &Codebook,
    trials: u64,
    seed: u64,
) -> Result<McEstimates> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if cb.n() != params.n() || cb.u_size() != params.aux().u_size() {
        return Err(Error::DimensionMismatch(
            "codebook does not match scheme parameters".into(),
        ));
    }
    let kernel = Kernel::new(params, cb);
    let (accept_h0, deg0) = kernel.run(false, trials, seed);
    let (accept_h1, deg1) = kernel.run(true, trials, seed);
    let misses = trials - accept_h0;
    let n = params.n() as f64;
    let beta_hat = accept_h1 as f64 / trials as f64;
    let beta_zero = accept_h1 == 0;
    let beta_exponent = if beta_zero {
        (trials as f64).log2() / n
    } else {
        -beta_hat.log2() / n
    };
    Ok(McEstimates {
        trials,
        alpha_hat: misses as f64 / trials as f64,
        alpha_ci: wilson_interval(misses, trials),
        beta_hat,
        beta_ci: wilson_interval(accept_h1, trials),
        beta_zero,
        beta_exponent,
        degenerate_posteriors: deg0 + deg1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::AuxChannel;
    use crate::scheme::exact::tests::binary_model;
    use crate::scheme::{exact_error_probs, generate_codebook, likelihood_posterior};

    fn setup(eps: f64, n: usize, rate: f64, seed: u64) -> (SchemeParams, Codebook) {
        let aux = AuxChannel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let p = SchemeParams::new(binary_model(), aux, rate, eps, n, None).unwrap();
        let cb = generate_codebook(p.pu(), n, rate, seed).unwrap();
        (p, cb)
    }

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo.abs() < 1e-15);
        assert!((hi - 0.036_994).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
    }

    #[test]
    fn switch_always_off() {
        let (p, cb) = setup(1.0, 10, 0.8, 1);
        let est = mc_error_estimates(&p, &cb, 500, 3).unwrap();
        assert_eq!(est.alpha_hat, 1.0);
        assert_eq!(est.beta_hat, 0.0);
        assert!(est.beta_zero);
        assert!((est.beta_exponent - 500f64.log2() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn power_tables_match_log_domain_posterior() {
        let (p, cb) = setup(0.0, 40, 0.3, 7);
        let k = Kernel::new(&p, &cb);
        let mut rng = stream(2, &[]);
        let mut s = Scratch {
            counts: vec![0; 4],
            ..Scratch::default()
        };
        for _ in 0..20 {
            s.x = (0..40).map(|_| draw(&k.px, &mut rng)).collect();
            seq_planes(&s.x, 2, &mut s.xplanes);
            symbol_totals(&s.x, 2, &mut s.totals);
            let _ = k.sample_message(&mut s, &mut rng);
            let total: f64 = s.weights.iter().sum();
            let post = likelihood_posterior(&cb, p.pxu(), &s.x).unwrap();
            for (w, q) in s.weights.iter().zip(post.pmf.probs()) {
                assert!((w / total - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn agrees_with_exact_enumeration() {
        let (p, cb) = setup(0.2, 6, 0.9, 4);
        let exact = exact_error_probs(&p, &cb).unwrap();
        let est = mc_error_estimates(&p, &cb, 20_000, 8).unwrap();
        let slack = 1e-3;
        assert!(
            est.alpha_ci.0 - slack <= exact.alpha && exact.alpha <= est.alpha_ci.1 + slack,
            "{est:?} {exact:?}"
        );
        assert!(
            est.beta_ci.0 - slack <= exact.beta && exact.beta <= est.beta_ci.1 + slack,
            "{est:?} {exact:?}"
        );
    }

    #[test]
    fn deterministic_in_seed() {
        let (p, cb) = setup(0.2, 12, 0.8, 1);
        let a = mc_error_estimates(&p, &cb, 2000, 5).unwrap();
        let b = mc_error_estimates(&p, &cb, 2000, 5).unwrap();
        assert_eq!(a, b);
    }
}
