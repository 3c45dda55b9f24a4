//! CRC-16/CCITT-FALSE over bit strings (poly 0x1021, init 0xFFFF, no
//! reflection, no final xor).

const POLY: u16 = 0x1021;
const INIT: u16 = 0xFFFF;

pub fn crc16(bits: &[u8]) -> u16 {
    bits.iter().fold(INIT, |reg, &b| {
        let feedback = ((reg >> 15) as u8 ^ (b & 1)) == 1;
        let shifted = reg << 1;
        if feedback {
            shifted ^ POLY
        } else {
            shifted
        }
    })
}

pub fn crc16_verify(bits: &[u8], crc: u16) -> bool {
    crc16(bits) == crc
}

/// Expands bytes MSB-first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1))
        .collect()
}

pub fn crc16_bytes(bytes: &[u8]) -> u16 {
    crc16(&bytes_to_bits(bytes))
}

pub fn crc_to_bits(crc: u16) -> [u8; 16] {
    std::array::from_fn(|i| ((crc >> (15 - i)) & 1) as u8)
}
