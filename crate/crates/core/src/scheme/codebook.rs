// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::prob::{Pmf, Symbol};
use crate::rng::{stream, tag};
use crate::{Error, Result};

/// Upper bound on `n * rate`, i.e. at most 2^24 codewords.
pub const MAX_CODEBOOK_BITS: f64 = 24.0;

/// `ceil(2^(n R))`, exact when `n R` is an integer.
pub fn msg_count_for(n: usize, rate: f64) -> Result<usize> {
    let bits = n as f64 * rate;
    if !(rate > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "codebook needs rate > 0 and n >= 1 (rate {rate}, n {n})"
        )));
    }
    if bits > MAX_CODEBOOK_BITS + 1e-9 {
        return Err(Error::SizeGuard {
            what: "codebook (n * rate bits)",
            needed: bits,
            limit: MAX_CODEBOOK_BITS,
        });
    }
    let rounded = bits.round();
    if (bits - rounded).abs() < 1e-9 {
        return Ok(1usize << rounded as u32);
    }
    Ok(bits.exp2().ceil() as usize)
}

/// `msg_count` codewords of length `n` over the auxiliary alphabet, with
/// per-symbol bit planes for fast joint-type counting.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    u_size: usize,
    words: Vec<Symbol>,
    pu: Pmf,
    seed: u64,
    /// `planes[(m * u_size + a) * wps + w]` has bit `t % 64` of word `w`
    /// set iff codeword `m` has symbol `a` at position `t`.
    planes: Vec<u64>,
    wps: usize,
    /// `symbol_counts[m * u_size + a]`: occurrences of `a` in codeword `m`.
    symbol_counts: Vec<u32>,
}

pub(crate) fn words_per_seq(n: usize) -> usize {
    n.div_ceil(64)
}

pub(crate) fn seq_planes(seq: &[Symbol], size: usize, out: &mut Vec<u64>) {
    let wps = words_per_seq(seq.len());
    out.clear();
    out.resize(size * wps, 0);
    for (t, &s) in seq.iter().enumerate() {
        out[usize::from(s) * wps + t / 64] |= 1u64 << (t % 64);
    }
}

impl Codebook {
    /// Wraps explicit codewords.
    pub fn from_words(words: Vec<Vec<Symbol>>, pu: Pmf, seed: u64) -> Result<Self> {
        let n = words.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidParameter(
                "codebook needs nonempty codewords".into(),
            ));
        }
        let u_size = pu.len();
        let mut flat = Vec::with_capacity(n * words.len());
        for w in &words {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            if let Some(&s) = w.iter().find(|&&s| usize::from(s) >= u_size) {
                return Err(Error::SymbolOutOfRange {
                    symbol: usize::from(s),
                    size: u_size,
                });
            }
            flat.extend_from_slice(w);
        }
        Ok(Self::build(n, u_size, flat, pu, seed))
    }

    fn build(n: usize, u_size: usize, words: Vec<Symbol>, pu: Pmf, seed: u64) -> Self {
        let wps = words_per_seq(n);
        let count = words.len() / n;
        let mut planes = vec![0u64; count * u_size * wps];
        for (m, w) in words.chunks(n).enumerate() {
            let base = m * u_size * wps;
            for (t, &s) in w.iter().enumerate() {
                planes[base + usize::from(s) * wps + t / 64] |= 1u64 << (t % 64);
            }
        }
        let symbol_counts = planes
            .chunks(wps)
            .map(|p| p.iter().map(|w| w.count_ones()).sum())
            .collect();
        Self {
            n,
            u_size,
            words,
            pu,
            seed,
            planes,
            wps,
            symbol_counts,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn msg_count(&self) -> usize {
        self.words.len() / self.n
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn pu(&self) -> &Pmf {
        &self.pu
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Codeword of message `m` in `1..=msg_count`.
    pub fn word(&self, m: usize) -> &[Symbol] {
        &self.words[(m - 1) * self.n..m * self.n]
    }

    /// First plane word of symbol `a` in codeword `m` (the whole plane when `n <= 64`).
    pub(crate) fn plane_word(&self, m: usize, a: usize) -> u64 {
        self.planes[((m - 1) * self.u_size + a) * self.wps]
    }

    pub(crate) fn symbol_count(&self, m: usize, a: usize) -> u32 {
        self.symbol_counts[(m - 1) * self.u_size + a]
    }

    /// Same as `pair_counts`, given the symbol counts of the other
    /// sequence; the last row and column are filled by subtraction.
    pub(crate) fn pair_counts_with(
        &self,
        m: usize,
        other: &[u64],
        other_counts: &[u32],
        out: &mut [u32],
    ) {
        let wps = self.wps;
        let os = other_counts.len();
        let base = (m - 1) * self.u_size * wps;
        let own = &self.symbol_counts[(m - 1) * self.u_size..m * self.u_size];
        let last = self.u_size - 1;
        out[last * os..(last + 1) * os].copy_from_slice(other_counts);
        for a in 0..last {
            let up = &self.planes[base + a * wps..base + (a + 1) * wps];
            let mut row_used = 0;
            for b in 0..os - 1 {
                let op = &other[b * wps..(b + 1) * wps];
                let c: u32 = up.iter().zip(op).map(|(x, y)| (x & y).count_ones()).sum();
                out[a * os + b] = c;
                out[last * os + b] -= c;
                row_used += c;
            }
            out[a * os + os - 1] = own[a] - row_used;
            out[last * os + os - 1] -= own[a] - row_used;
        }
    }

    /// Joint counts of `(u(m), s)` for a sequence given by its planes,
    /// row-major `(u, s)`.
    pub(crate) fn pair_counts(&self, m: usize, other: &[u64], other_size: usize, out: &mut [u32]) {
        let wps = self.wps;
        let base = (m - 1) * self.u_size * wps;
        for a in 0..self.u_size {
            let up = &self.planes[base + a * wps..base + (a + 1) * wps];
            for b in 0..other_size {
                let op = &other[b * wps..(b + 1) * wps];
                out[a * other_size + b] =
                    up.iter().zip(op).map(|(x, y)| (x & y).count_ones()).sum();
            }
        }
    }
}

/// Draws `ceil(2^(n rate))` codewords with i.i.d. `pu` entries.
pub fn generate_codebook(pu: &Pmf, n: usize, rate: f64, seed: u64) -> Result<Codebook> {
    let count = msg_count_for(n, rate)?;
    let dist = WeightedIndex::new(pu.probs())
        .map_err(|e| Error::InvalidPmf(format!("codeword law: {e}")))?;
    let mut rng = stream(seed, &[tag::CODEBOOK]);
    let words: Vec<Symbol> = (0..count * n)
        .map(|_| dist.sample(&mut rng) as Symbol)
        .collect();
    Ok(Codebook::build(n, pu.len(), words, pu.clone(), seed))
}
