//! Systematic polar encoding without a stored generator matrix.
//!
//! Generator entries are produced on demand from the index bits, and the
//! two matrix-vector products run row by row through a `K`-bit buffer.

use crate::bits::{AuxMeter, BitBuf};
use crate::construct::CodeSpec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// `[F^{⊗n}]_{row,col}` for 0-based indices: 1 iff every bit set in `col`
/// is also set in `row`.
#[inline]
pub fn g(row: usize, col: usize) -> u8 {
    u8::from(row & col == col)
}

/// Range-checked form of [`g`].
pub fn g_element(n_log2: u32, row: usize, col: usize) -> Result<u8> {
    let n = 1usize << n_log2;
    for idx in [row, col] {
        if idx >= n {
            return Err(Error::OutOfRange { index: idx, len: n });
        }
    }
    Ok(g(row, col))
}

/// A length-N systematic codeword: info bits sit verbatim on the info set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    bits: Vec<u8>,
}

impl Codeword {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Bits at the info set, ascending position order.
    pub fn info(&self, spec: &CodeSpec) -> Vec<u8> {
        spec.info_set().iter().map(|&i| self.bits[i]).collect()
    }

    /// Bits at the frozen set, ascending position order.
    pub fn parity(&self, spec: &CodeSpec) -> Vec<u8> {
        spec.frozen_set().iter().map(|&i| self.bits[i]).collect()
    }

    pub fn to_hex(&self) -> String {
        crate::bits::bits_to_hex(&self.bits)
    }
}

/// Streaming encoder. See [`encode_systematic_streaming_metered`].
pub fn encode_systematic_streaming(info: &[u8], spec: &CodeSpec) -> Result<Codeword> {
    encode_systematic_streaming_metered(info, spec, &AuxMeter::new())
}

/// Computes `u_A = x_A · G_AA` and then parity `x_B = u_A · G_AB`, holding
/// only one `K`-bit generator row and the `K`-bit vector `u_A` at a time.
/// Every auxiliary buffer is reported to `meter`.
pub fn encode_systematic_streaming_metered(
    info: &[u8],
    spec: &CodeSpec,
    meter: &AuxMeter,
) -> Result<Codeword> {
    let k = spec.k();
    if info.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: info.len() });
    }
    if !spec.is_domination_closed() {
        return Err(Error::NotDominationClosed);
    }
    let a = spec.info_set();

    let mut row = BitBuf::zeroed(k, meter);
    let mut u_a = BitBuf::zeroed(k, meter);
    for (j, &aj) in a.iter().enumerate() {
        for (i, &ai) in a.iter().enumerate() {
            row.set(i, g(ai, aj));
        }
        let bit = (0..k).fold(0u8, |acc, i| acc ^ (row.get(i) & info[i]));
        u_a.set(j, bit);
    }

    let mut bits = vec![0u8; spec.n()];
    for (&pos, &b) in a.iter().zip(info) {
        bits[pos] = b & 1;
    }
    for &b in spec.frozen_set() {
        for (j, &aj) in a.iter().enumerate() {
            row.set(j, g(aj, b));
        }
        bits[b] = row.dot(&u_a);
    }
    Ok(Codeword { bits })
}

/// Storage under a simple accounting model: a stored dense generator
/// versus an order table plus two `K`-bit working vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageAccount {
    pub n: usize,
    pub k: usize,
    pub conventional_bits: u64,
    pub lowcost_bits: u64,
}

impl StorageAccount {
    pub fn ratio(&self) -> f64 {
        self.conventional_bits as f64 / self.lowcost_bits as f64
    }
}

pub fn storage_report(n_log2: u32, k: usize) -> Result<StorageAccount> {
    if !(3..=12).contains(&n_log2) {
        return Err(Error::Config(format!("storage model covers n_log2 in 3..=12, got {n_log2}")));
    }
    let n = 1usize << n_log2;
    if !(1..=n).contains(&k) {
        return Err(Error::Config(format!("k = {k} outside 1..={n}")));
    }
    let (n64, k64) = (n as u64, k as u64);
    Ok(StorageAccount {
        n,
        k,
        conventional_bits: n64 * n64,
        lowcost_bits: n64 * u64::from(n_log2) + 2 * k64,
    })
}
