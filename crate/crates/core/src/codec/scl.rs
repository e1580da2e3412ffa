use std::cmp::Ordering;

use super::kernels::{hard, penalty};
use super::state::{Geometry, PathState};
use super::{check_frame, DataLayout, DecodeResult, DecoderConfig};
use crate::error::{invalid, Result};
use crate::puncturing::CodePlan;

/// Per-step bookkeeping recorded by [`ListDecoder::decode_traced`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecodeTrace {
    /// Number of surviving paths after each decoded bit.
    pub list_sizes: Vec<usize>,
    /// `(parent, child)` penalty pairs for every path extension.
    pub extensions: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    pm: f64,
    disagrees: bool,
    bit: u8,
    /// Position in the active list.
    pos: usize,
}

impl Candidate {
    // Smaller penalty first; exact ties go to the child that follows the
    // LLR's hard decision (bit 0 on a zero LLR), then to the older path.
    fn rank(&self, other: &Self) -> Ordering {
        self.pm
            .total_cmp(&other.pm)
            .then(self.disagrees.cmp(&other.disagrees))
            .then(self.bit.cmp(&other.bit))
            .then(self.pos.cmp(&other.pos))
    }
}

/// Successive-cancellation list decoder with optional threshold pruning and
/// CRC-aided final selection.
#[derive(Debug, Clone)]
pub struct ListDecoder {
    geo: Geometry,
    frozen: Vec<bool>,
    layout: DataLayout,
    cfg: DecoderConfig,
    pool: Vec<PathState>,
    active: Vec<usize>,
    free: Vec<usize>,
    channel: Vec<f64>,
    leaf: Vec<f64>,
    cands: Vec<Candidate>,
}

/// How the final path is picked among the survivors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Selection {
    Likelihood,
    CrcAided,
}

impl ListDecoder {
    pub fn new(plan: &CodePlan, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let geo = Geometry::new(plan.n());
        let frozen = geo.rev.iter().map(|&i| plan.frozen_mask()[i]).collect();
        let pool = (0..cfg.list_size).map(|_| PathState::new(&geo)).collect();
        Ok(Self {
            layout: DataLayout::new(plan, cfg.crc)?,
            cfg: *cfg,
            frozen,
            pool,
            active: Vec::with_capacity(cfg.list_size),
            free: Vec::with_capacity(cfg.list_size),
            channel: Vec::with_capacity(plan.n()),
            leaf: Vec::with_capacity(cfg.list_size),
            cands: Vec::with_capacity(2 * cfg.list_size),
            geo,
        })
    }

    /// Plain SCL: the survivor with the largest channel likelihood wins.
    pub fn decode(&mut self, frame: &[f64]) -> Result<DecodeResult> {
        self.check(frame)?;
        self.run(frame, None);
        Ok(self.select(Selection::Likelihood))
    }

    /// CA-SCL: the most likely survivor that passes the CRC wins; without
    /// one, the most likely survivor is returned with `crc_ok == Some(false)`.
    pub fn decode_crc_aided(&mut self, frame: &[f64]) -> Result<DecodeResult> {
        if self.cfg.crc.is_none() {
            return Err(invalid("CRC-aided decoding needs a CRC"));
        }
        self.check(frame)?;
        self.run(frame, None);
        Ok(self.select(Selection::CrcAided))
    }

    /// [`ListDecoder::decode`] that also returns the list bookkeeping.
    pub fn decode_traced(&mut self, frame: &[f64]) -> Result<(DecodeResult, DecodeTrace)> {
        self.check(frame)?;
        let mut trace = DecodeTrace::default();
        self.run(frame, Some(&mut trace));
        Ok((self.select(Selection::Likelihood), trace))
    }

    fn check(&self, frame: &[f64]) -> Result<()> {
        if frame.len() != self.geo.n {
            return Err(crate::Error::LengthMismatch { expected: self.geo.n, actual: frame.len() });
        }
        Ok(())
    }

    fn run(&mut self, frame: &[f64], mut trace: Option<&mut DecodeTrace>) {
        let n = self.geo.n;
        let cap = self.cfg.list_size;
        self.geo.permute_frame(frame, &mut self.channel);
        self.active.clear();
        self.active.push(0);
        self.free.clear();
        self.free.extend((1..cap).rev());
        self.pool[0].pm = 0.0;

        for phi in 0..n {
            self.leaf.clear();
            for &s in &self.active {
                let llr = self.pool[s].leaf_llr(
                    &self.geo,
                    &self.channel,
                    phi,
                    self.cfg.llr_rule,
                    self.cfg.saturation,
                );
                self.leaf.push(llr);
            }

            if self.frozen[phi] {
                for (pos, &s) in self.active.iter().enumerate() {
                    let path = &mut self.pool[s];
                    let parent = path.pm;
                    path.pm += penalty(self.leaf[pos], 0);
                    path.set_leaf(&self.geo, phi, 0);
                    if let Some(t) = trace.as_deref_mut() {
                        t.extensions.push((parent, path.pm));
                    }
                }
            } else {
                self.extend(phi, trace.as_deref_mut());
            }

            if self.cfg.prune_threshold > 0.0 {
                self.prune();
            }
            if let Some(t) = trace.as_deref_mut() {
                t.list_sizes.push(self.active.len());
            }
        }
    }

    fn extend(&mut self, phi: usize, mut trace: Option<&mut DecodeTrace>) {
        let cap = self.cfg.list_size;
        self.cands.clear();
        for (pos, &s) in self.active.iter().enumerate() {
            let llr = self.leaf[pos];
            let pm = self.pool[s].pm;
            for bit in 0..2u8 {
                self.cands.push(Candidate {
                    pm: pm + penalty(llr, bit),
                    disagrees: bit != hard(llr),
                    bit,
                    pos,
                });
            }
        }
        if self.cands.len() > cap {
            self.cands.sort_by(Candidate::rank);
            self.cands.truncate(cap);
        }

        let mut keep = vec![[None::<f64>; 2]; self.active.len()];
        for c in &self.cands {
            keep[c.pos][c.bit as usize] = Some(c.pm);
        }
        for (pos, k) in keep.iter().enumerate() {
            if k[0].is_none() && k[1].is_none() {
                self.free.push(self.active[pos]);
            }
        }

        let mut next = Vec::with_capacity(cap);
        for (pos, k) in keep.iter().enumerate() {
            let s = self.active[pos];
            let parent = self.pool[s].pm;
            match *k {
                [None, None] => continue,
                [Some(pm0), Some(pm1)] => {
                    let t = self.free.pop().expect("list capacity exceeded");
                    let (src, dst) = pair_mut(&mut self.pool, s, t);
                    dst.copy_from(src);
                    src.pm = pm0;
                    src.set_leaf(&self.geo, phi, 0);
                    dst.pm = pm1;
                    dst.set_leaf(&self.geo, phi, 1);
                    next.push(s);
                    next.push(t);
                }
                [Some(pm), None] | [None, Some(pm)] => {
                    let bit = k[1].is_some() as u8;
                    let path = &mut self.pool[s];
                    path.pm = pm;
                    path.set_leaf(&self.geo, phi, bit);
                    next.push(s);
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                for pm in k.iter().flatten() {
                    t.extensions.push((parent, *pm));
                }
            }
        }
        self.active = next;
    }

    // Drops paths whose likelihood falls below T times the best one.
    fn prune(&mut self) {
        let best = self
            .active
            .iter()
            .map(|&s| self.pool[s].pm)
            .fold(f64::INFINITY, f64::min);
        let limit = best - self.cfg.prune_threshold.ln();
        let pool = &self.pool;
        let free = &mut self.free;
        self.active.retain(|&s| {
            let keep = pool[s].pm <= limit;
            if !keep {
                free.push(s);
            }
            keep
        });
    }

    fn select(&self, mode: Selection) -> DecodeResult {
        // Log-likelihood of each re-encoded survivor up to a common constant:
        // ln W(y|x) = ln W(y|0) - x * LLR(y).
        let mut ranked: Vec<(f64, f64, usize)> = self
            .active
            .iter()
            .map(|&s| {
                let path = &self.pool[s];
                let ll: f64 = path
                    .codeword(&self.geo)
                    .iter()
                    .zip(&self.channel)
                    .filter(|(&x, _)| x == 1)
                    .map(|(_, &llr)| -llr)
                    .sum();
                (ll, path.pm, s)
            })
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));

        let inputs: Vec<(Vec<u8>, f64)> = ranked
            .iter()
            .map(|&(_, pm, s)| (self.pool[s].input_vector(&self.geo), pm))
            .collect();
        let chosen = match mode {
            Selection::CrcAided => inputs
                .iter()
                .find(|(u, _)| self.layout.crc_passes(u))
                .unwrap_or(&inputs[0]),
            Selection::Likelihood => &inputs[0],
        };
        self.layout.result(&chosen.0, -chosen.1)
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Decodes one frame with a list of `cfg.list_size` paths; the survivor with
/// the largest channel likelihood is returned.
pub fn scl_decode(frame: &[f64], plan: &CodePlan, cfg: &DecoderConfig) -> Result<DecodeResult> {
    check_frame(frame, plan)?;
    ListDecoder::new(plan, cfg)?.decode(frame)
}

/// CRC-aided list decoding; `cfg.crc` must name a CRC and `plan.k_info()`
/// must include its bits.
pub fn ca_scl_decode(frame: &[f64], plan: &CodePlan, cfg: &DecoderConfig) -> Result<DecodeResult> {
    check_frame(frame, plan)?;
    ListDecoder::new(plan, cfg)?.decode_crc_aided(frame)
}
