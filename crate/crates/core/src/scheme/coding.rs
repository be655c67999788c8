// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::codebook::Codebook;
use super::params::SchemeParams;
use crate::prob::{is_typical_counts, joint_counts, CondPmf, Pmf, Symbol};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

/// Likelihood-encoder posterior over messages `1..=msg_count`
/// (entry `m - 1` belongs to message `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub pmf: Pmf,
    /// Every codeword had zero likelihood; `pmf` is then uniform.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    pub message: usize,
    pub degenerate: bool,
}

pub(crate) fn check_seq(seq: &[Symbol], n: usize, size: usize) -> Result<()> {
    if seq.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: seq.len(),
        });
    }
    match seq.iter().find(|&&s| usize::from(s) >= size) {
        Some(&s) => Err(Error::SymbolOutOfRange {
            symbol: usize::from(s),
            size,
        }),
        None => Ok(()),
    }
}

/// Log-likelihoods `ln P(x^n | u^n(m))` for every message.
pub(crate) fn log_likelihoods(cb: &Codebook, pxu: &CondPmf, xseq: &[Symbol]) -> Vec<f64> {
    let xs = pxu.out_size();
    let table: Vec<f64> = pxu
        .rows()
        .iter()
        .flat_map(|r| r.probs().iter().map(|p| p.ln()))
        .collect();
    (1..=cb.msg_count())
        .map(|m| {
            cb.word(m)
                .iter()
                .zip(xseq)
                .map(|(&u, &x)| table[usize::from(u) * xs + usize::from(x)])
                .sum()
        })
        .collect()
}

pub(crate) fn normalize_log(ll: &[f64]) -> (Vec<f64>, bool) {
    let max = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        let k = ll.len() as f64;
        return (vec![1.0 / k; ll.len()], true);
    }
    let w: Vec<f64> = ll.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    (w.into_iter().map(|v| v / total).collect(), false)
}

pub fn likelihood_posterior(cb: &Codebook, pxu: &CondPmf, xseq: &[Symbol]) -> Result<Posterior> {
    if pxu.in_size() != cb.u_size() {
        return Err(Error::DimensionMismatch(format!(
            "P(x|u) has {} inputs, codebook alphabet has {}",
            pxu.in_size(),
            cb.u_size()
        )));
    }
    check_seq(xseq, cb.n(), pxu.out_size())?;
    let (probs, degenerate) = normalize_log(&log_likelihoods(cb, pxu, xseq));
    Ok(Posterior {
        pmf: Pmf::from_weights(probs)?,
        degenerate,
    })
}

pub(crate) fn encoder_typical(
    params: &SchemeParams,
    cb: &Codebook,
    m: usize,
    xseq: &[Symbol],
) -> bool {
    let xs = params.model().x_size();
    let counts = joint_counts(&[cb.word(m), xseq], &[cb.u_size(), xs]).expect("validated inputs");
    is_typical_counts(&counts, cb.n(), params.p_ux(), params.mu())
}

fn check_codebook(params: &SchemeParams, cb: &Codebook) -> Result<()> {
    if cb.n() != params.n() || cb.u_size() != params.aux().u_size() {
        return Err(Error::DimensionMismatch(format!(
            "codebook is {}x{} over {} symbols, scheme expects length {} over {}",
            cb.msg_count(),
            cb.n(),
            cb.u_size(),
            params.n(),
            params.aux().u_size()
        )));
    }
    Ok(())
}

/// Message for `xseq` given the switch bit `xi` (true with probability `1 - eps`).
pub fn encode<R: Rng + ?Sized>(
    params: &SchemeParams,
    cb: &Codebook,
    xseq: &[Symbol],
    xi: bool,
    rng: &mut R,
) -> Result<Encoded> {
    check_codebook(params, cb)?;
    let post = likelihood_posterior(cb, params.pxu(), xseq)?;
    if !xi {
        return Ok(Encoded {
            message: 0,
            degenerate: false,
        });
    }
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut pick = post.pmf.len();
    for (i, &p) in post.pmf.probs().iter().enumerate() {
        acc += p;
        if r < acc {
            pick = i + 1;
            break;
        }
    }
    // Rounding can leave `acc` just below 1; fall back to the last supported message.
    if pick == post.pmf.len() && post.pmf.probs()[pick - 1] == 0.0 {
        pick = post
            .pmf
            .probs()
            .iter()
            .rposition(|&p| p > 0.0)
            .map_or(pick, |i| i + 1);
    }
    let message = if encoder_typical(params, cb, pick, xseq) {
        pick
    } else {
        0
    };
    Ok(Encoded {
        message,
        degenerate: post.degenerate,
    })
}

pub fn decode(
    params: &SchemeParams,
    cb: &Codebook,
    m: usize,
    yseq: &[Symbol],
) -> Result<Hypothesis> {
    check_codebook(params, cb)?;
    if m > cb.msg_count() {
        return Err(Error::InvalidParameter(format!(
            "message {m} outside 0..={}",
            cb.msg_count()
        )));
    }
    let ys = params.model().y_size();
    check_seq(yseq, cb.n(), ys)?;
    if m == 0 {
        return Ok(Hypothesis::H1);
    }
    let counts = joint_counts(&[cb.word(m), yseq], &[cb.u_size(), ys])?;
    Ok(
        if is_typical_counts(&counts, cb.n(), params.p_uy(), params.decoder_mu()) {
            Hypothesis::H0
        } else {
            Hypothesis::H1
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::AuxChannel;
    use crate::rng::stream;
    use crate::scheme::exact::tests::binary_model;
    use crate::scheme::generate_codebook;

    fn cb(words: Vec<Vec<Symbol>>) -> Codebook {
        Codebook::from_words(words, Pmf::uniform(2).unwrap(), 0).unwrap()
    }

    #[test]
    fn identical_words_split_evenly() {
        let p = likelihood_posterior(
            &cb(vec![vec![0, 1], vec![0, 1]]),
            &CondPmf::bsc(0.3).unwrap(),
            &[1, 1],
        )
        .unwrap();
        assert_eq!(p.pmf.probs(), &[0.5, 0.5]);
        assert!(!p.degenerate);
    }

    #[test]
    fn zero_likelihood_word_gets_nothing() {
        let pxu = CondPmf::identity(2).unwrap();
        let p = likelihood_posterior(&cb(vec![vec![0, 0], vec![1, 1]]), &pxu, &[1, 1]).unwrap();
        assert_eq!(p.pmf.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn all_zero_likelihoods_flagged() {
        let pxu = CondPmf::identity(2).unwrap();
        let p = likelihood_posterior(&cb(vec![vec![0, 0], vec![1, 1]]), &pxu, &[0, 1]).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.pmf.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn bsc_posterior_by_formula() {
        let bsc = CondPmf::bsc(0.1).unwrap();
        let p = likelihood_posterior(&cb(vec![vec![0, 0], vec![1, 1]]), &bsc, &[0, 0]).unwrap();
        assert!((p.pmf[0] - 0.81 / 0.82).abs() < 1e-12);
        let p = likelihood_posterior(&cb(vec![vec![0; 4], vec![1; 4]]), &bsc, &[0; 4]).unwrap();
        assert!((p.pmf[0] - 0.999_847_607_436_757_2).abs() < 1e-12);
    }

    #[test]
    fn long_sequences_do_not_underflow() {
        let words = vec![vec![0; 2000], vec![1; 2000]];
        let x = vec![0; 2000];
        let p = likelihood_posterior(&cb(words), &CondPmf::bsc(0.4).unwrap(), &x).unwrap();
        assert!(!p.degenerate);
        assert_eq!(p.pmf.probs(), &[1.0, 0.0]);
    }

    fn params(eps: f64, n: usize) -> SchemeParams {
        SchemeParams::new(
            binary_model(),
            AuxChannel::identity(2).unwrap(),
            1.2,
            eps,
            n,
            None,
        )
        .unwrap()
    }

    #[test]
    fn switch_off_sends_dummy() {
        let p = params(0.2, 4);
        let book = generate_codebook(p.pu(), 4, 1.2, 1).unwrap();
        let mut rng = stream(0, &[]);
        for x in [[0, 0, 0, 0], [1, 0, 1, 1]] {
            assert_eq!(encode(&p, &book, &x, false, &mut rng).unwrap().message, 0);
        }
    }

    #[test]
    fn single_typical_word_is_sent() {
        let p = params(0.0, 5);
        // Identity aux: P_UX puts 0.8 on (0,0) and 0.2 on (1,1).
        let book = Codebook::from_words(vec![vec![0, 0, 0, 0, 1]], p.pu().clone(), 0).unwrap();
        let mut rng = stream(3, &[]);
        let e = encode(&p, &book, &[0, 0, 0, 0, 1], true, &mut rng).unwrap();
        assert_eq!(e.message, 1);
    }

    #[test]
    fn decoder_rules() {
        let p = params(0.2, 4);
        let book = generate_codebook(p.pu(), 4, 1.2, 5).unwrap();
        assert_eq!(decode(&p, &book, 0, &[0, 1, 0, 1]).unwrap(), Hypothesis::H1);
        // Under the test model, P(y = 1 | u = 0) is zero.
        let m = (1..=book.msg_count())
            .find(|&m| book.word(m)[0] == 0)
            .unwrap();
        let mut y = book.word(m).to_vec();
        y[0] = 1;
        assert_eq!(decode(&p, &book, m, &y).unwrap(), Hypothesis::H1);
        assert!(decode(&p, &book, book.msg_count() + 1, &y).is_err());
    }

    #[test]
    fn decoder_accepts_conditional_draws() {
        let p = params(0.0, 200);
        let pu = Pmf::new(vec![0.8, 0.2]).unwrap();
        let word: Vec<Symbol> = (0..200).map(|t| u8::from(t % 5 == 0)).collect();
        let book = Codebook::from_words(vec![word.clone()], pu, 0).unwrap();
        let pyx = p.model().pyx().clone();
        let mut rng = stream(11, &[]);
        let mut accepted = 0;
        for _ in 0..200 {
            let y: Vec<Symbol> = word
                .iter()
                .map(|&u| {
                    let r: f64 = rng.random();
                    let row = pyx.row(usize::from(u));
                    let mut acc = 0.0;
                    let mut out = row.len() - 1;
                    for (i, &q) in row.probs().iter().enumerate() {
                        acc += q;
                        if r < acc {
                            out = i;
                            break;
                        }
                    }
                    out as Symbol
                })
                .collect();
            if decode(&p, &book, 1, &y).unwrap() == Hypothesis::H0 {
                accepted += 1;
            }
        }
        assert!(accepted >= 195, "accepted {accepted}");
    }
}
