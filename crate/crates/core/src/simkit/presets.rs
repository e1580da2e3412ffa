use crate::codec::CrcKind;
use crate::error::{invalid, Result};
use crate::puncturing::PatternKind;

use super::sweep::{DecoderKind, DecoderSetup};

/// A simulation scenario: code dimensions, puncturing methods and decoders.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub n_prime: usize,
    /// Payload bits per frame (CRC excluded).
    pub k: usize,
    pub patterns: Vec<PatternKind>,
    pub decoders: Vec<DecoderSetup>,
    /// Base Bhattacharyya value used for construction.
    pub z0: f64,
    pub ebn0_db: Vec<f64>,
}

pub const PRESET_NAMES: [&str; 6] =
    ["mmtc-sc", "urllc-sc", "embb-sc", "urllc-lists", "embb-lists", "mmtc-lists"];

fn db_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|i| lo + step * i as f64).collect()
}

/// Named scenario presets for the three 5G use cases.
pub fn preset(name: &str) -> Result<Scenario> {
    let sc = vec![DecoderSetup::sc()];
    let (n_prime, k) = match name {
        "mmtc-sc" | "mmtc-lists" => (100, 64),
        "urllc-sc" | "urllc-lists" => (480, 256),
        "embb-sc" | "embb-lists" => (1920, 1600),
        other => {
            return Err(invalid(format!(
                "unknown scenario {other:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let (patterns, decoders) = if name.ends_with("-sc") {
        (PatternKind::ALL.to_vec(), sc)
    } else if name == "urllc-lists" {
        let mut d = Vec::new();
        for crc in [CrcKind::Crc8, CrcKind::Crc16] {
            for l in [2, 4, 8] {
                d.push(DecoderSetup { kind: DecoderKind::CaScl, list_size: l, crc });
            }
        }
        (vec![PatternKind::Pd], d)
    } else {
        let crc = CrcKind::for_block_length(n_prime);
        let d = [2, 4, 8]
            .into_iter()
            .map(|l| DecoderSetup { kind: DecoderKind::CaScl, list_size: l, crc })
            .collect();
        (vec![PatternKind::Pd], d)
    };
    let ebn0_db = match n_prime {
        1920 => db_range(2.0, 4.0, 0.5),
        _ => db_range(1.0, 4.0, 0.5),
    };
    Ok(Scenario { name: name.to_string(), n_prime, k, patterns, decoders, z0: 0.5, ebn0_db })
}
