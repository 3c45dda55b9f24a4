use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const HEADER_BITS: usize = 7;

/// 7-bit frame header: rate (2) | length (4) | packet id (1), MSB first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketHeader {
    rate_code: u8,
    length_code: u8,
    packet_id: u8,
}

impl PacketHeader {
    pub fn new(rate_code: u8, length_code: u8, packet_id: u8) -> Result<Self> {
        if rate_code > 0b11 || length_code > 0b1111 || packet_id > 1 {
            return Err(Error::Config(format!(
                "header fields out of range: rate {rate_code}, length {length_code}, id {packet_id}"
            )));
        }
        Ok(Self { rate_code, length_code, packet_id })
    }

    pub fn rate_code(&self) -> u8 {
        self.rate_code
    }

    pub fn length_code(&self) -> u8 {
        self.length_code
    }

    pub fn packet_id(&self) -> u8 {
        self.packet_id
    }

    pub fn to_byte(&self) -> u8 {
        (self.rate_code << 5) | (self.length_code << 1) | self.packet_id
    }

    pub fn from_byte(v: u8) -> Result<Self> {
        if v >= 1 << HEADER_BITS {
            return Err(Error::Malformed(format!("header value {v:#x} exceeds 7 bits")));
        }
        Self::new(v >> 5, (v >> 1) & 0b1111, v & 1)
    }
}

pub fn header_encode(h: &PacketHeader) -> [u8; HEADER_BITS] {
    let v = h.to_byte();
    std::array::from_fn(|i| (v >> (HEADER_BITS - 1 - i)) & 1)
}

pub fn header_decode(bits: &[u8]) -> Result<PacketHeader> {
    if bits.len() != HEADER_BITS {
        return Err(Error::LengthMismatch { expected: HEADER_BITS, got: bits.len() });
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Malformed("header bits must be 0 or 1".into()));
    }
    PacketHeader::from_byte(bits.iter().fold(0u8, |acc, &b| (acc << 1) | b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let h = PacketHeader::new(0b10, 0b0101, 1).unwrap();
        assert_eq!(header_encode(&h), [1, 0, 0, 1, 0, 1, 1]);
        assert_eq!(h.to_byte(), 0b1001011);
    }

    #[test]
    fn exhaustive_round_trip() {
        for v in 0u8..128 {
            let bits: Vec<u8> = (0..7).rev().map(|i| (v >> i) & 1).collect();
            let h = header_decode(&bits).unwrap();
            assert_eq!(header_encode(&h).to_vec(), bits);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(header_decode(&[1, 0, 1]).is_err());
        assert!(header_decode(&[2, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(PacketHeader::new(4, 0, 0).is_err());
        assert!(PacketHeader::new(0, 16, 0).is_err());
        assert!(PacketHeader::new(0, 0, 2).is_err());
        assert!(PacketHeader::from_byte(0x80).is_err());
    }
}
