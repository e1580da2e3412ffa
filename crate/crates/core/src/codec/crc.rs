//! Bitwise CRCs: MSB-first shift register, zero initial value, no
//! reflection, no output inversion.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// CRC attached to the payload ahead of polar encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CrcKind {
    #[default]
    None,
    /// `x^8 + x^2 + x + 1`
    Crc8,
    /// `x^16 + x^12 + x^5 + 1`
    Crc16,
}

impl CrcKind {
    pub fn len(self) -> usize {
        match self {
            CrcKind::None => 0,
            CrcKind::Crc8 => 8,
            CrcKind::Crc16 => 16,
        }
    }

    pub fn is_none(self) -> bool {
        self == CrcKind::None
    }

    fn poly(self) -> u32 {
        match self {
            CrcKind::None => 0,
            CrcKind::Crc8 => 0x07,
            CrcKind::Crc16 => 0x1021,
        }
    }

    /// CRC-8 for blocks of up to 128 bits, CRC-16 beyond.
    pub fn for_block_length(n: usize) -> CrcKind {
        if n <= 128 {
            CrcKind::Crc8
        } else {
            CrcKind::Crc16
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CrcKind::None => "none",
            CrcKind::Crc8 => "crc8",
            CrcKind::Crc16 => "crc16",
        }
    }
}

impl fmt::Display for CrcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CrcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "0" => Ok(CrcKind::None),
            "crc8" | "8" => Ok(CrcKind::Crc8),
            "crc16" | "16" => Ok(CrcKind::Crc16),
            other => Err(invalid(format!("unknown CRC {other:?}"))),
        }
    }
}

fn remainder(bits: &[u8], kind: CrcKind) -> u32 {
    let width = kind.len() as u32;
    if width == 0 {
        return 0;
    }
    let top = 1u32 << (width - 1);
    let mask = (1u32 << width) - 1;
    let mut reg = 0u32;
    for &b in bits {
        let feedback = ((reg & top) != 0) ^ (b & 1 == 1);
        reg = (reg << 1) & mask;
        if feedback {
            reg ^= kind.poly();
        }
    }
    reg
}

/// CRC bits of `payload`, most significant first. Empty for [`CrcKind::None`].
pub fn crc_compute(payload: &[u8], kind: CrcKind) -> Vec<u8> {
    let reg = remainder(payload, kind);
    let width = kind.len();
    (0..width).map(|i| ((reg >> (width - 1 - i)) & 1) as u8).collect()
}

/// True when the last `kind.len()` bits of `block` are the CRC of the rest.
pub fn crc_check(block: &[u8], kind: CrcKind) -> bool {
    if block.len() < kind.len() {
        return false;
    }
    let (payload, tail) = block.split_at(block.len() - kind.len());
    crc_compute(payload, kind) == tail
}

/// `payload` followed by its CRC.
pub fn crc_append(payload: &[u8], kind: CrcKind) -> Vec<u8> {
    let mut out = payload.to_vec();
    out.extend(crc_compute(payload, kind));
    out
}
