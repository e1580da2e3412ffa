//! Polar encoder, CRCs and the successive-cancellation family of decoders.
//!
//! Decoders take an LLR frame of mother length `n` (punctured positions
//! already re-inserted, see [`crate::puncturing::expand_llr`]) and a
//! [`CodePlan`]. Internally they walk the polarization tree with the first
//! stage on the least significant index bit, i.e. input bits are decided in
//! bit-reversed index order.

mod crc;
mod encoder;
pub mod kernels;
mod sc;
mod scl;
mod state;

use std::fmt;
use std::str::FromStr;

pub use crc::{crc_append, crc_check, crc_compute, CrcKind};
pub use encoder::{encode, encode_in_place};
pub use sc::{sc_decode, ScDecoder};
pub use scl::{ca_scl_decode, scl_decode, DecodeTrace, ListDecoder};

use crate::error::{invalid, Error, Result};
use crate::puncturing::{CodePlan, LLR_SAT};

/// Check-node rule used when combining LLRs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LlrRule {
    #[default]
    Exact,
    MinSum,
}

impl LlrRule {
    pub fn name(self) -> &'static str {
        match self {
            LlrRule::Exact => "exact",
            LlrRule::MinSum => "min-sum",
        }
    }
}

impl fmt::Display for LlrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LlrRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(LlrRule::Exact),
            "min-sum" | "minsum" | "min_sum" => Ok(LlrRule::MinSum),
            other => Err(invalid(format!("unknown LLR rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    /// Maximum number of surviving paths (`L`).
    pub list_size: usize,
    /// Relative pruning threshold `T` in `[0, 1]`; 0 disables pruning.
    pub prune_threshold: f64,
    pub crc: CrcKind,
    pub llr_rule: LlrRule,
    /// Magnitude at which internal LLRs are clamped.
    pub saturation: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            list_size: 1,
            prune_threshold: 0.0,
            crc: CrcKind::None,
            llr_rule: LlrRule::Exact,
            saturation: LLR_SAT,
        }
    }
}

impl DecoderConfig {
    pub fn sc() -> Self {
        Self::default()
    }

    pub fn list(list_size: usize) -> Self {
        Self { list_size, ..Self::default() }
    }

    pub fn crc_aided(list_size: usize, crc: CrcKind) -> Self {
        Self { list_size, crc, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.list_size < 1 {
            return Err(invalid("list size must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.prune_threshold) {
            return Err(invalid(format!(
                "pruning threshold must lie in [0, 1], got {}",
                self.prune_threshold
            )));
        }
        if !(self.saturation > 0.0 && self.saturation.is_finite()) {
            return Err(invalid("LLR saturation must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Estimated payload, CRC bits stripped.
    pub payload: Vec<u8>,
    /// CRC verdict of the selected path; `None` without a CRC.
    pub crc_ok: Option<bool>,
    /// Log-domain metric of the selected path (0 is certain, more negative
    /// is less likely).
    pub selected_path_metric: f64,
}

/// Decoder-side view of a plan: where the data bits live and how many of
/// them are payload.
#[derive(Debug, Clone)]
pub(crate) struct DataLayout {
    positions: Vec<usize>,
    k_payload: usize,
    crc: CrcKind,
}

impl DataLayout {
    pub(crate) fn new(plan: &CodePlan, crc: CrcKind) -> Result<Self> {
        let positions = plan.data_positions(crc.len())?;
        Ok(Self { k_payload: plan.k_info() - crc.len(), positions, crc })
    }

    pub(crate) fn data(&self, u: &[u8]) -> Vec<u8> {
        self.positions.iter().map(|&p| u[p - 1]).collect()
    }

    pub(crate) fn crc_passes(&self, u: &[u8]) -> bool {
        crc_check(&self.data(u), self.crc)
    }

    pub(crate) fn result(&self, u: &[u8], metric: f64) -> DecodeResult {
        let mut data = self.data(u);
        let crc_ok = (!self.crc.is_none()).then(|| crc_check(&data, self.crc));
        data.truncate(self.k_payload);
        DecodeResult { payload: data, crc_ok, selected_path_metric: metric }
    }
}

pub(crate) fn check_frame(frame: &[f64], plan: &CodePlan) -> Result<()> {
    if frame.len() != plan.n() {
        return Err(Error::LengthMismatch { expected: plan.n(), actual: frame.len() });
    }
    Ok(())
}
