// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::codebook::Codebook;
use super::coding::{check_seq, encoder_typical, log_likelihoods, normalize_log, Hypothesis};
use super::params::SchemeParams;
use crate::prob::{is_typical_counts, joint_counts, CondPmf, Pmf, Symbol};
use crate::{Error, Result};

/// Largest state count any exact enumeration may visit.
pub const EXACT_STATE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactErrors {
    pub alpha: f64,
    pub beta: f64,
}

fn guard(what: &'static str, factors: &[(usize, usize)], msgs: usize) -> Result<()> {
    let needed = factors
        .iter()
        .map(|&(b, n)| (b as f64).powi(n as i32))
        .product::<f64>()
        * msgs as f64;
    if needed > EXACT_STATE_LIMIT {
        return Err(Error::SizeGuard {
            what,
            needed,
            limit: EXACT_STATE_LIMIT,
        });
    }
    Ok(())
}

fn check_codebook(params: &SchemeParams, cb: &Codebook) -> Result<()> {
    if cb.n() != params.n() || cb.u_size() != params.aux().u_size() {
        return Err(Error::DimensionMismatch(
            "codebook does not match scheme parameters".into(),
        ));
    }
    Ok(())
}

/// Sequence number `idx` in lexicographic order, first position most significant.
fn unrank(mut idx: usize, size: usize, out: &mut [Symbol]) {
    for s in out.iter_mut().rev() {
        *s = (idx % size) as Symbol;
        idx /= size;
    }
}

/// Product law over all length-`n` sequences, same order as `unrank`.
fn product_law<'r>(rows: impl Iterator<Item = &'r [f64]>) -> Vec<f64> {
    let mut law = vec![1.0];
    for row in rows {
        law = law
            .iter()
            .flat_map(|&p| row.iter().map(move |&q| p * q))
            .collect();
    }
    law
}

fn seq_prob(p: &Pmf, seq: &[Symbol]) -> f64 {
    seq.iter().map(|&s| p[usize::from(s)]).product()
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Full encoder law `P(m | x^n)` for `m = 0..=msg_count`, including the
/// switch and the typicality override. Second value flags a degenerate posterior.
pub fn encoder_law(
    params: &SchemeParams,
    cb: &Codebook,
    xseq: &[Symbol],
) -> Result<(Vec<f64>, bool)> {
    check_codebook(params, cb)?;
    check_seq(xseq, cb.n(), params.model().x_size())?;
    let (post, degenerate) = normalize_log(&log_likelihoods(cb, params.pxu(), xseq));
    let on = 1.0 - params.epsilon();
    let mut law = vec![0.0; cb.msg_count() + 1];
    law[0] = params.epsilon();
    for (i, &p) in post.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if encoder_typical(params, cb, i + 1, xseq) {
            law[i + 1] = on * p;
        } else {
            law[0] += on * p;
        }
    }
    Ok((law, degenerate))
}

/// Exact type-I and type-II error probabilities by enumeration.
pub fn exact_error_probs(params: &SchemeParams, cb: &Codebook) -> Result<ExactErrors> {
    check_codebook(params, cb)?;
    let model = params.model();
    let (n, xs, ys, msgs) = (cb.n(), model.x_size(), model.y_size(), cb.msg_count());
    guard("exact error enumeration", &[(xs, n), (ys, n)], msgs)?;
    let y_count = ys.pow(n as u32);

    // accept[m - 1][y] is true iff the decoder says H0.
    let accept: Vec<Vec<bool>> = (1..=msgs)
        .into_par_iter()
        .map(|m| {
            let mut y = vec![0; n];
            (0..y_count)
                .map(|j| {
                    unrank(j, ys, &mut y);
                    let c = joint_counts(&[cb.word(m), &y], &[cb.u_size(), ys]).expect("in range");
                    is_typical_counts(&c, n, params.p_uy(), params.decoder_mu())
                })
                .collect()
        })
        .collect();

    let per_x: Vec<Result<(f64, Vec<f64>)>> = (0..xs.pow(n as u32))
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0; n];
            unrank(i, xs, &mut x);
            let px = seq_prob(model.px(), &x);
            if px == 0.0 {
                return Ok((0.0, Vec::new()));
            }
            let (law, _) = encoder_law(params, cb, &x)?;
            let ylaw = product_law(x.iter().map(|&s| model.pyx().row(usize::from(s)).probs()));
            let mut miss = law[0];
            for (m, &l) in law.iter().enumerate().skip(1) {
                if l > 0.0 {
                    let hit: f64 = ylaw
                        .iter()
                        .zip(&accept[m - 1])
                        .filter(|(_, &a)| a)
                        .map(|(p, _)| p)
                        .sum();
                    miss += l * (1.0 - hit);
                }
            }
            Ok((px * miss, law.into_iter().map(|l| px * l).collect()))
        })
        .collect();

    let mut alpha = 0.0;
    let mut pm = vec![0.0; msgs + 1];
    for r in per_x {
        let (a, weighted) = r?;
        alpha += a;
        for (acc, w) in pm.iter_mut().zip(weighted) {
            *acc += w;
        }
    }
    let py_law = product_law((0..n).map(|_| model.py().probs()));
    let beta = (1..=msgs)
        .map(|m| {
            let hit: f64 = py_law
                .iter()
                .zip(&accept[m - 1])
                .filter(|(_, &a)| a)
                .map(|(p, _)| p)
                .sum();
            pm[m] * hit
        })
        .sum();
    Ok(ExactErrors { alpha, beta })
}

fn eve_channel(params: &SchemeParams, hypothesis: Hypothesis) -> &CondPmf {
    match hypothesis {
        Hypothesis::H0 => params.model().pzx_h0(),
        Hypothesis::H1 => params.model().qzx_h1(),
    }
}

/// Returns `(H(X M Z) - H(M Z), H(X Z) + H(M | X) - H(M Z))`, both per symbol.
fn equivocation_paths(
    params: &SchemeParams,
    cb: &Codebook,
    hypothesis: Hypothesis,
) -> Result<(f64, f64)> {
    check_codebook(params, cb)?;
    let model = params.model();
    let (n, xs, zs, msgs) = (cb.n(), model.x_size(), model.z_size(), cb.msg_count());
    guard("exact equivocation enumeration", &[(xs, n), (zs, n)], msgs)?;
    let pzx = eve_channel(params, hypothesis);
    let z_count = zs.pow(n as u32);
    let mut mz = vec![0.0; (msgs + 1) * z_count];
    let (mut h_xmz, mut h_xz, mut h_m_given_x) = (0.0, 0.0, 0.0);
    let mut x = vec![0; n];
    for i in 0..xs.pow(n as u32) {
        unrank(i, xs, &mut x);
        let px = seq_prob(model.px(), &x);
        if px == 0.0 {
            continue;
        }
        let (law, _) = encoder_law(params, cb, &x)?;
        let zlaw = product_law(x.iter().map(|&s| pzx.row(usize::from(s)).probs()));
        h_m_given_x += px * law.iter().map(|&l| plogp(l)).sum::<f64>();
        for (k, &pz) in zlaw.iter().enumerate() {
            let pxz = px * pz;
            if pxz == 0.0 {
                continue;
            }
            h_xz += plogp(pxz);
            for (m, &l) in law.iter().enumerate() {
                if l > 0.0 {
                    let p = pxz * l;
                    h_xmz += plogp(p);
                    mz[m * z_count + k] += p;
                }
            }
        }
    }
    let h_mz: f64 = mz.iter().map(|&p| plogp(p)).sum();
    let n = n as f64;
    Ok(((h_xmz - h_mz) / n, (h_xz + h_m_given_x - h_mz) / n))
}

/// `(1/n) H(X^n | M, Z^n)` under the given hypothesis, from the exact joint.
pub fn exact_equivocation(
    params: &SchemeParams,
    cb: &Codebook,
    hypothesis: Hypothesis,
) -> Result<f64> {
    Ok(equivocation_paths(params, cb, hypothesis)?.0)
}

/// Same quantity through `H(X^n Z^n) + H(M | X^n) - H(M, Z^n)`.
pub fn exact_equivocation_chain_rule(
    params: &SchemeParams,
    cb: &Codebook,
    hypothesis: Hypothesis,
) -> Result<f64> {
    Ok(equivocation_paths(params, cb, hypothesis)?.1)
}

/// Total variation between the likelihood-encoder joint of `(M', X^n)` and
/// the joint with `M` uniform and `X^n` drawn through `P(x|u(M))`.
pub fn soft_covering_tv(params: &SchemeParams, cb: &Codebook) -> Result<f64> {
    check_codebook(params, cb)?;
    let model = params.model();
    let (n, xs, msgs) = (cb.n(), model.x_size(), cb.msg_count());
    guard("soft-covering enumeration", &[(xs, n)], msgs)?;
    let inv = 1.0 / msgs as f64;
    let parts: Vec<f64> = (0..xs.pow(n as u32))
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0; n];
            unrank(i, xs, &mut x);
            let px = seq_prob(model.px(), &x);
            let (post, _) = normalize_log(&log_likelihoods(cb, params.pxu(), &x));
            (1..=msgs)
                .zip(&post)
                .map(|(m, &q)| {
                    let ideal: f64 = cb
                        .word(m)
                        .iter()
                        .zip(&x)
                        .map(|(&u, &s)| params.pxu().get(usize::from(u), usize::from(s)))
                        .product();
                    (px * q - ideal * inv).abs()
                })
                .sum::<f64>()
        })
        .collect();
    Ok((0.5 * parts.iter().sum::<f64>()).clamp(0.0, 1.0))
}
