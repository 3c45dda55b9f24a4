//! Belief-propagation decoding on the polar factor graph.
//!
//! Column 0 of the graph holds `u`, column `n` holds the codeword `x`.
//! Stage `s` joins columns `s` and `s + 1` with butterflies of span
//! `2^s`: `x[i] = u[i] ^ u[i + h]`, `x[i + h] = u[i + h]`.

use crate::bits::polar_transform_in_place;
use crate::construct::CodeSpec;
use crate::encode::encode_systematic_streaming;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Prior magnitude placed on frozen positions.
pub const FROZEN_PRIOR: f64 = 40.0;
pub const DEFAULT_MAX_ITERS: usize = 60;
pub const ML_MAX_K: usize = 16;

/// Per-position channel log-likelihood ratios, positive favouring 0.
/// Positions never transmitted carry exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelLLRs(pub Vec<f64>);

impl ChannelLLRs {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Noiseless observation of a codeword at magnitude `mag`.
    pub fn from_codeword(bits: &[u8], mag: f64) -> Self {
        Self(bits.iter().map(|&b| if b == 0 { mag } else { -mag }).collect())
    }

    /// Hard decisions; an exact zero decides 0.
    pub fn hard(&self) -> Vec<u8> {
        self.0.iter().map(|&l| hard(l)).collect()
    }
}

#[inline]
fn hard(l: f64) -> u8 {
    u8::from(l < 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum UpdateRule {
    #[default]
    ExactTanh,
    MinSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum EarlyStop {
    None,
    /// Stop once the graph's two sides agree: re-encoding the left-side
    /// decisions reproduces the right-side decisions.
    #[default]
    FrozenConsistency,
    /// Frozen consistency plus a caller-supplied check on the info bits.
    Crc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub max_iters: usize,
    pub update_rule: UpdateRule,
    pub early_stop: EarlyStop,
    pub frozen_prior: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            update_rule: UpdateRule::ExactTanh,
            early_stop: EarlyStop::FrozenConsistency,
            frozen_prior: FROZEN_PRIOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Decoded info bits in ascending info-position order.
    pub info_bits: Vec<u8>,
    /// Hard decisions on `frozen_llrs`, ascending frozen order.
    pub frozen_hard: Vec<u8>,
    /// Left-side LLRs at frozen positions after the first right-to-left
    /// sweep, before any frozen prior has flowed back into them. Exactly
    /// zero where puncturing leaves a position without channel evidence.
    pub frozen_llrs: Vec<f64>,
    pub fber: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Re-encoding of the left-side decisions.
    pub codeword: Vec<u8>,
}

/// Fraction of evidenced frozen positions whose prior-free decision is 1.
pub fn compute_fber(result: &DecodeResult) -> f64 {
    fber_of(&result.frozen_llrs)
}

/// Positions with an exactly-zero LLR carry no channel evidence and are
/// left out; with none evidenced the ratio is 0.
fn fber_of(frozen_llrs: &[f64]) -> f64 {
    let seen = frozen_llrs.iter().filter(|&&l| l != 0.0).count();
    if seen == 0 {
        return 0.0;
    }
    frozen_llrs.iter().filter(|&&l| hard(l) == 1).count() as f64 / seen as f64
}

/// Positionwise sum of per-frame LLRs.
pub fn combine_llrs(frames: &[ChannelLLRs]) -> Result<ChannelLLRs> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Config("nothing to combine".into()))?;
    let mut acc = first.clone();
    for f in &frames[1..] {
        if f.len() != acc.len() {
            return Err(Error::LengthMismatch { expected: acc.len(), got: f.len() });
        }
        for (a, b) in acc.0.iter_mut().zip(&f.0) {
            *a += b;
        }
    }
    Ok(acc)
}

#[inline]
fn boxplus_exact(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[inline]
fn boxplus_minsum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

/// Reusable BP decoder holding the message arrays for one code.
#[derive(Debug, Clone)]
pub struct BpDecoder {
    spec: CodeSpec,
    left: Vec<f64>,
    right: Vec<f64>,
    u_hat: Vec<u8>,
    x_dec: Vec<u8>,
}

impl BpDecoder {
    pub fn new(spec: &CodeSpec) -> Self {
        let cells = (spec.n_log2() as usize + 1) * spec.n();
        Self {
            spec: spec.clone(),
            left: vec![0.0; cells],
            right: vec![0.0; cells],
            u_hat: vec![0; spec.n()],
            x_dec: vec![0; spec.n()],
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn decode(&mut self, llrs: &ChannelLLRs, cfg: &BpConfig) -> Result<DecodeResult> {
        self.decode_with_check(llrs, cfg, |_| true)
    }

    /// Decodes; with [`EarlyStop::Crc`], iteration also stops only once
    /// `check` accepts the current info decisions.
    pub fn decode_with_check(
        &mut self,
        llrs: &ChannelLLRs,
        cfg: &BpConfig,
        check: impl Fn(&[u8]) -> bool,
    ) -> Result<DecodeResult> {
        let n = self.spec.n();
        let stages = self.spec.n_log2() as usize;
        if llrs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: llrs.len() });
        }
        if let Some(i) = llrs.0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLlr(i));
        }
        if cfg.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        let f = match cfg.update_rule {
            UpdateRule::ExactTanh => boxplus_exact,
            UpdateRule::MinSum => boxplus_minsum,
        };

        self.left.fill(0.0);
        self.right.fill(0.0);
        self.left[stages * n..].copy_from_slice(&llrs.0);
        for (i, r) in self.right[..n].iter_mut().enumerate() {
            if !self.spec.is_info(i) {
                *r = cfg.frozen_prior;
            }
        }

        let mut iterations_used = 0;
        let mut converged = false;
        let mut frozen_llrs = Vec::new();
        for _ in 0..cfg.max_iters {
            iterations_used += 1;
            for s in (0..stages).rev() {
                self.left_stage(s, f);
            }
            if iterations_used == 1 {
                frozen_llrs = self.spec.frozen_set().iter().map(|&j| self.left[j]).collect();
            }
            for s in 0..stages {
                self.right_stage(s, f);
            }
            if cfg.early_stop == EarlyStop::None {
                continue;
            }
            converged = self.harden();
            if converged
                && (cfg.early_stop != EarlyStop::Crc || check(&self.info_from_codeword()))
            {
                break;
            }
        }
        if cfg.early_stop == EarlyStop::None {
            converged = self.harden();
        }

        let frozen_hard: Vec<u8> = frozen_llrs.iter().map(|&l| hard(l)).collect();
        Ok(DecodeResult {
            info_bits: self.info_from_codeword(),
            fber: fber_of(&frozen_llrs),
            frozen_hard,
            frozen_llrs,
            iterations_used,
            converged,
            codeword: self.u_hat.clone(),
        })
    }

    fn left_stage(&mut self, s: usize, f: fn(f64, f64) -> f64) {
        let n = self.spec.n();
        let h = 1usize << s;
        let (lo, hi) = self.left.split_at_mut((s + 1) * n);
        let l_out = &mut lo[s * n..];
        let l_in = &hi[..n];
        let r_in = &self.right[s * n..(s + 1) * n];
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let j = i + h;
                l_out[i] = f(l_in[i], l_in[j] + r_in[j]);
                l_out[j] = f(r_in[i], l_in[i]) + l_in[j];
            }
        }
    }

    fn right_stage(&mut self, s: usize, f: fn(f64, f64) -> f64) {
        let n = self.spec.n();
        let h = 1usize << s;
        let (lo, hi) = self.right.split_at_mut((s + 1) * n);
        let r_in = &lo[s * n..];
        let r_out = &mut hi[..n];
        let l_in = &self.left[(s + 1) * n..(s + 2) * n];
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let j = i + h;
                r_out[i] = f(r_in[i], l_in[j] + r_in[j]);
                r_out[j] = f(r_in[i], l_in[i]) + r_in[j];
            }
        }
    }

    /// Hard-decides `u` on the info set (frozen forced to 0), re-encodes it
    /// in place, and reports whether that matches the right-side decisions.
    fn harden(&mut self) -> bool {
        let n = self.spec.n();
        let stages = self.spec.n_log2() as usize;
        for i in 0..n {
            self.u_hat[i] = if self.spec.is_info(i) {
                hard(self.left[i] + self.right[i])
            } else {
                0
            };
            let post = self.left[stages * n + i] + self.right[stages * n + i];
            self.x_dec[i] = hard(post);
        }
        polar_transform_in_place(&mut self.u_hat);
        self.u_hat == self.x_dec
    }

    fn info_from_codeword(&self) -> Vec<u8> {
        self.spec.info_set().iter().map(|&i| self.u_hat[i]).collect()
    }
}

/// One-shot BP decode.
pub fn bp_decode(llrs: &ChannelLLRs, spec: &CodeSpec, cfg: &BpConfig) -> Result<DecodeResult> {
    BpDecoder::new(spec).decode(llrs, cfg)
}

/// Exhaustive maximum-likelihood decode by LLR correlation. Ties go to the
/// lexicographically smallest info vector.
pub fn ml_decode_oracle(llrs: &ChannelLLRs, spec: &CodeSpec) -> Result<Vec<u8>> {
    let (n, k) = (spec.n(), spec.k());
    if k > ML_MAX_K {
        return Err(Error::Config(format!("ML enumeration limited to K <= {ML_MAX_K}, got {k}")));
    }
    if llrs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: llrs.len() });
    }
    let basis: Vec<Vec<u8>> = (0..k)
        .map(|i| {
            let mut e = vec![0u8; k];
            e[i] = 1;
            encode_systematic_streaming(&e, spec).map(|c| c.into_bits())
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, u32)> = None;
    let mut word = vec![0u8; n];
    for m in 0..(1u32 << k) {
        word.fill(0);
        for (i, row) in basis.iter().enumerate() {
            if (m >> (k - 1 - i)) & 1 == 1 {
                for (w, &r) in word.iter_mut().zip(row) {
                    *w ^= r;
                }
            }
        }
        let score: f64 = word
            .iter()
            .zip(&llrs.0)
            .map(|(&b, &l)| if b == 0 { l } else { -l })
            .sum();
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, m));
        }
    }
    let m = best.map_or(0, |(_, m)| m);
    Ok((0..k).map(|i| ((m >> (k - 1 - i)) & 1) as u8).collect())
}
