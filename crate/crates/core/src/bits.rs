//! Bit-vector helpers shared across the codec: hex packing and a metered
//! word-packed buffer used by the streaming encoder.

use crate::error::{Error, Result};
use std::cell::Cell;

/// Packs bits into hex, most-significant bit first, position 0 first.
/// The final nibble is zero-padded on the right.
pub fn bits_to_hex(bits: &[u8]) -> String {
    const DIGITS: &[u8; 16] = b"0123456789abcdef";
    bits.chunks(4)
        .map(|chunk| {
            let mut nibble = 0usize;
            for (i, &b) in chunk.iter().enumerate() {
                nibble |= usize::from(b & 1) << (3 - i);
            }
            DIGITS[nibble] as char
        })
        .collect()
}

/// Inverse of [`bits_to_hex`]; `len` selects how many leading bits to keep.
pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<u8>> {
    let hex = hex.trim().trim_start_matches("0x");
    if hex.len() * 4 < len || hex.len() > len.div_ceil(4) {
        return Err(Error::Malformed(format!(
            "hex string of {} digits cannot hold exactly {len} bits",
            hex.len()
        )));
    }
    let mut out = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let v = c
            .to_digit(16)
            .ok_or_else(|| Error::Malformed(format!("invalid hex digit {c:?}")))?;
        for shift in (0..4).rev() {
            out.push(((v >> shift) & 1) as u8);
        }
    }
    if out[len..].iter().any(|&b| b != 0) {
        return Err(Error::Malformed("non-zero padding bits".into()));
    }
    out.truncate(len);
    Ok(out)
}

/// Tallies auxiliary bit storage allocated through [`BitBuf`].
#[derive(Debug, Default)]
pub struct AuxMeter {
    live: Cell<usize>,
    peak: Cell<usize>,
}

impl AuxMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Largest number of auxiliary bits held at once.
    pub fn peak_bits(&self) -> usize {
        self.peak.get()
    }

    fn grab(&self, bits: usize) {
        let live = self.live.get() + bits;
        self.live.set(live);
        self.peak.set(self.peak.get().max(live));
    }

    fn release(&self, bits: usize) {
        self.live.set(self.live.get() - bits);
    }
}

/// Fixed-length word-packed bit buffer that reports its footprint to an
/// [`AuxMeter`].
pub(crate) struct BitBuf<'m> {
    words: Vec<u64>,
    len: usize,
    meter: &'m AuxMeter,
}

impl<'m> BitBuf<'m> {
    pub(crate) fn zeroed(len: usize, meter: &'m AuxMeter) -> Self {
        let words = vec![0u64; len.div_ceil(64)];
        meter.grab(words.capacity() * 64);
        Self { words, len, meter }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, bit: u8) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit & 1 == 1 {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Parity of the bitwise AND with `other`.
    pub(crate) fn dot(&self, other: &BitBuf<'_>) -> u8 {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        (ones & 1) as u8
    }
}

impl Drop for BitBuf<'_> {
    fn drop(&mut self) {
        self.meter.release(self.words.capacity() * 64);
    }
}

/// In-place GF(2) transform `x = u · F^{⊗n}` with `F = [[1,0],[1,1]]`.
pub fn polar_transform_in_place(v: &mut [u8]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                v[i] ^= v[i + h];
            }
        }
        h *= 2;
    }
}

pub(crate) fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Config(format!("length {n} is not a power of two")));
    }
    Ok(n.trailing_zeros())
}
