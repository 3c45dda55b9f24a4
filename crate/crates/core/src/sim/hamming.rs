//! Hamming(7,4) baseline. Codeword bit `i` sits at position `i + 1`;
//! parity occupies positions 1, 2 and 4, so a nonzero syndrome names the
//! flipped position directly.

use crate::error::{Error, Result};

const DATA_POS: [usize; 4] = [3, 5, 6, 7];

fn encode_block(d: &[u8]) -> [u8; 7] {
    let mut c = [0u8; 7];
    for (&p, &b) in DATA_POS.iter().zip(d) {
        c[p - 1] = b & 1;
    }
    for parity in [1usize, 2, 4] {
        c[parity - 1] = (1..=7usize)
            .filter(|&p| p != parity && p & parity != 0)
            .fold(0, |acc, p| acc ^ c[p - 1]);
    }
    c
}

/// Returns the data bits and whether a correction was applied.
fn decode_block(c: &[u8]) -> ([u8; 4], bool) {
    let syndrome = (1..=7usize).filter(|&p| c[p - 1] == 1).fold(0, |acc, p| acc ^ p);
    let mut fixed = [0u8; 7];
    fixed.copy_from_slice(c);
    if syndrome != 0 {
        fixed[syndrome - 1] ^= 1;
    }
    (DATA_POS.map(|p| fixed[p - 1]), syndrome != 0)
}

pub fn hamming74_encode(bits: &[u8]) -> Result<Vec<u8>> {
    if !bits.len().is_multiple_of(4) {
        return Err(Error::LengthMismatch { expected: bits.len().next_multiple_of(4), got: bits.len() });
    }
    Ok(bits.chunks(4).flat_map(encode_block).collect())
}

/// Syndrome decoding of hard bits; also reports how many blocks were corrected.
pub fn hamming74_decode_report(bits: &[u8]) -> Result<(Vec<u8>, usize)> {
    if !bits.len().is_multiple_of(7) {
        return Err(Error::LengthMismatch { expected: bits.len().next_multiple_of(7), got: bits.len() });
    }
    let mut out = Vec::with_capacity(bits.len() / 7 * 4);
    let mut corrected = 0;
    for block in bits.chunks(7) {
        let (d, fixed) = decode_block(block);
        out.extend_from_slice(&d);
        corrected += fixed as usize;
    }
    Ok((out, corrected))
}

pub fn hamming74_decode(bits: &[u8]) -> Result<Vec<u8>> {
    Ok(hamming74_decode_report(bits)?.0)
}

/// Hard decisions on LLR signs (negative means 1), then syndrome decoding.
pub fn hamming74_decode_llrs(llrs: &[f64]) -> Result<Vec<u8>> {
    let hard: Vec<u8> = llrs.iter().map(|&l| (l < 0.0) as u8).collect();
    hamming74_decode(&hard)
}
