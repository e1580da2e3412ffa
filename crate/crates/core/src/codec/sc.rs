use super::kernels::{hard, penalty};
use super::state::{Geometry, PathState};
use super::{check_frame, DataLayout, DecodeResult, DecoderConfig};
use crate::error::Result;
use crate::puncturing::CodePlan;

/// Successive-cancellation decoder with reusable work buffers.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    geo: Geometry,
    frozen: Vec<bool>,
    layout: DataLayout,
    cfg: DecoderConfig,
    path: PathState,
    channel: Vec<f64>,
    n: usize,
}

impl ScDecoder {
    pub fn new(plan: &CodePlan, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let geo = Geometry::new(plan.n());
        let frozen = geo.rev.iter().map(|&i| plan.frozen_mask()[i]).collect();
        Ok(Self {
            path: PathState::new(&geo),
            layout: DataLayout::new(plan, cfg.crc)?,
            cfg: *cfg,
            frozen,
            channel: Vec::with_capacity(plan.n()),
            n: plan.n(),
            geo,
        })
    }

    /// Hard decisions on the whole input vector plus the accumulated penalty.
    pub fn decode_input(&mut self, frame: &[f64]) -> (Vec<u8>, f64) {
        assert_eq!(frame.len(), self.n);
        self.geo.permute_frame(frame, &mut self.channel);
        self.path.pm = 0.0;
        for phi in 0..self.n {
            let llr = self.path.leaf_llr(
                &self.geo,
                &self.channel,
                phi,
                self.cfg.llr_rule,
                self.cfg.saturation,
            );
            let bit = if self.frozen[phi] { 0 } else { hard(llr) };
            self.path.pm += penalty(llr, bit);
            self.path.set_leaf(&self.geo, phi, bit);
        }
        (self.path.input_vector(&self.geo), self.path.pm)
    }

    pub fn decode(&mut self, frame: &[f64]) -> Result<DecodeResult> {
        if frame.len() != self.n {
            return Err(crate::Error::LengthMismatch { expected: self.n, actual: frame.len() });
        }
        let (u, pm) = self.decode_input(frame);
        Ok(self.layout.result(&u, -pm))
    }
}

/// Decodes one frame by successive cancellation.
pub fn sc_decode(frame: &[f64], plan: &CodePlan, cfg: &DecoderConfig) -> Result<DecodeResult> {
    check_frame(frame, plan)?;
    ScDecoder::new(plan, cfg)?.decode(frame)
}
