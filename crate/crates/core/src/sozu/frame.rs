use super::header::PacketHeader;
use crate::bits::{bits_to_hex, hex_to_bits};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One on-air frame: header, the mother-code positions it carries, their
/// bits, and a CRC over the info bits on the first frame only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub header: PacketHeader,
    pub positions: Vec<usize>,
    pub payload: Vec<u8>,
    pub crc16: Option<u16>,
}

impl Frame {
    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.payload.len() {
            return Err(Error::LengthMismatch {
                expected: self.positions.len(),
                got: self.payload.len(),
            });
        }
        match (self.header.packet_id(), self.crc16) {
            (0, None) => Err(Error::Malformed("first frame is missing its CRC".into())),
            (1, Some(_)) => Err(Error::Malformed("second frame must not carry a CRC".into())),
            _ => Ok(()),
        }
    }

    /// Coded bits on air, excluding header and CRC.
    pub fn coded_bits(&self) -> usize {
        self.payload.len()
    }

    /// `<header hex> <pos,pos,...> <payload hex> [<crc hex>]`
    pub fn to_line(&self) -> String {
        let positions: Vec<String> = self.positions.iter().map(usize::to_string).collect();
        let mut line = format!(
            "{:02x} {} {}",
            self.header.to_byte(),
            positions.join(","),
            bits_to_hex(&self.payload)
        );
        if let Some(crc) = self.crc16 {
            line.push_str(&format!(" {crc:04x}"));
        }
        line
    }

    pub fn parse_line(line: &str) -> Result<Frame> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(Error::Malformed(format!("expected 3 or 4 fields, got {}", fields.len())));
        }
        let byte = u8::from_str_radix(fields[0], 16)
            .map_err(|e| Error::Malformed(format!("header: {e}")))?;
        let header = PacketHeader::from_byte(byte)?;
        let positions = fields[1]
            .split(',')
            .map(|p| p.parse::<usize>().map_err(|e| Error::Malformed(format!("position {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let payload = hex_to_bits(fields[2], positions.len())?;
        let crc16 = fields
            .get(3)
            .map(|c| u16::from_str_radix(c, 16).map_err(|e| Error::Malformed(format!("crc: {e}"))))
            .transpose()?;
        let frame = Frame { header, positions, payload, crc16 };
        frame.validate()?;
        Ok(frame)
    }
}
