use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codec::{crc_append, encode, CrcKind, DecoderConfig, ListDecoder, ScDecoder};
use crate::error::{invalid, Error, Result};
use crate::puncturing::{apply_puncture, expand_llr_with, plan_for, CodePlan};

use super::channel::{add_awgn, bpsk_modulate, llr_from_awgn, ChannelParams};
use super::presets::Scenario;

/// Exact CSV header of a sweep file.
pub const CSV_HEADER: [&str; 12] = [
    "scenario",
    "pattern",
    "decoder",
    "list_size",
    "crc",
    "ebn0_db",
    "frames",
    "bit_errors",
    "frame_errors",
    "ber",
    "fer",
    "seed",
];

const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Sc,
    Scl,
    CaScl,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Sc => "sc",
            DecoderKind::Scl => "scl",
            DecoderKind::CaScl => "ca-scl",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sc" => Ok(DecoderKind::Sc),
            "scl" => Ok(DecoderKind::Scl),
            "ca-scl" | "cascl" | "ca_scl" => Ok(DecoderKind::CaScl),
            other => Err(invalid(format!("unknown decoder {other:?}"))),
        }
    }
}

/// Decoder family plus its list size and CRC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecoderSetup {
    pub kind: DecoderKind,
    pub list_size: usize,
    pub crc: CrcKind,
}

impl DecoderSetup {
    pub fn sc() -> Self {
        Self { kind: DecoderKind::Sc, list_size: 1, crc: CrcKind::None }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DecoderKind::Sc if self.list_size != 1 => {
                Err(invalid("the SC decoder has list size 1"))
            }
            DecoderKind::CaScl if self.crc.is_none() => {
                Err(invalid("CA-SCL needs crc8 or crc16"))
            }
            _ if self.list_size < 1 => Err(invalid("list size must be at least 1")),
            _ => Ok(()),
        }
    }

    fn config(&self, base: &DecoderConfig) -> DecoderConfig {
        DecoderConfig { list_size: self.list_size, crc: self.crc, ..*base }
    }
}

/// Frame budget of one simulation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialBudget {
    pub max_frames: u64,
    /// Stop once this many frame errors are seen; 0 disables early stopping.
    pub min_frame_errors: u64,
    pub master_seed: u64,
}

impl Default for TrialBudget {
    fn default() -> Self {
        Self { max_frames: 1_000_000, min_frame_errors: 100, master_seed: 0 }
    }
}

impl TrialBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_frames < 1 {
            return Err(invalid("max_frames must be at least 1"));
        }
        Ok(())
    }
}

/// Error counts of one simulation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointStats {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub scenario: String,
    pub pattern: String,
    pub decoder: DecoderKind,
    pub list_size: usize,
    pub crc: CrcKind,
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub records: Vec<PointRecord>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.scenario.clone(),
                r.pattern.clone(),
                r.decoder.to_string(),
                r.list_size.to_string(),
                r.crc.to_string(),
                r.ebn0_db.to_string(),
                r.frames.to_string(),
                r.bit_errors.to_string(),
                r.frame_errors.to_string(),
                r.ber.to_string(),
                r.fer.to_string(),
                r.seed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let text = self.to_csv_string()?;
        std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Random stream of one frame. The key is `(master_seed, point_index)`; the
/// frame index selects the ChaCha stream, so any frame can be regenerated
/// independently of the others.
pub fn frame_rng(master_seed: u64, point_index: u64, frame_index: u64) -> ChaCha8Rng {
    let mut state = splitmix64(master_seed) ^ point_index.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(frame_index);
    rng
}

#[derive(Clone)]
enum Engine {
    Sc(ScDecoder),
    List(ListDecoder, bool),
}

impl Engine {
    fn new(plan: &CodePlan, kind: DecoderKind, cfg: &DecoderConfig) -> Result<Self> {
        Ok(match kind {
            DecoderKind::Sc => Engine::Sc(ScDecoder::new(plan, cfg)?),
            DecoderKind::Scl => Engine::List(ListDecoder::new(plan, cfg)?, false),
            DecoderKind::CaScl => Engine::List(ListDecoder::new(plan, cfg)?, true),
        })
    }

    fn decode(&mut self, frame: &[f64]) -> Vec<u8> {
        let r = match self {
            Engine::Sc(d) => d.decode(frame),
            Engine::List(d, false) => d.decode(frame),
            Engine::List(d, true) => d.decode_crc_aided(frame),
        };
        r.expect("frame length fixed by the plan").payload
    }
}

struct Trial<'a> {
    plan: &'a CodePlan,
    crc: CrcKind,
    k_payload: usize,
    sigma: f64,
    saturation: f64,
}

impl Trial<'_> {
    // Returns the number of payload bit errors of one frame.
    fn run(&self, rng: &mut ChaCha8Rng, engine: &mut Engine) -> u64 {
        let payload: Vec<u8> = (0..self.k_payload).map(|_| rng.gen::<bool>() as u8).collect();
        let data = crc_append(&payload, self.crc);
        let u = self.plan.place(&data, self.crc.len()).expect("data length fixed by the plan");
        let c = encode(&u).expect("mother length is a power of two");
        let tx = apply_puncture(&c, self.plan.pattern()).expect("codeword length fixed");
        let mut y = bpsk_modulate(&tx);
        add_awgn(&mut y, self.sigma, rng);
        let llr = llr_from_awgn(&y, self.sigma).expect("sigma validated");
        let frame = expand_llr_with(&llr, self.plan.pattern(), self.saturation)
            .expect("received length fixed");
        let decoded = engine.decode(&frame);
        decoded.iter().zip(&payload).filter(|(a, b)| a != b).count() as u64
    }
}

/// Simulates one operating point.
///
/// Frame `i` uses [`frame_rng`]`(seed, point_index, i)`. Frames run in
/// parallel batches but are tallied in index order, and early stopping
/// happens exactly at the frame that reaches `min_frame_errors`, so the
/// result equals that of a sequential run regardless of thread count.
pub fn run_point(
    plan: &CodePlan,
    setup: &DecoderSetup,
    base: &DecoderConfig,
    channel: &ChannelParams,
    budget: &TrialBudget,
    point_index: u64,
) -> Result<PointStats> {
    setup.validate()?;
    budget.validate()?;
    let cfg = setup.config(base);
    cfg.validate()?;
    if setup.crc.len() > plan.k_info() {
        return Err(invalid("CRC longer than the information set"));
    }
    if !(channel.sigma > 0.0) {
        return Err(invalid("noise standard deviation must be positive"));
    }
    let engine = Engine::new(plan, setup.kind, &cfg)?;
    let trial = Trial {
        plan,
        crc: setup.crc,
        k_payload: plan.k_info() - setup.crc.len(),
        sigma: channel.sigma,
        saturation: cfg.saturation,
    };

    let mut stats = PointStats::default();
    let mut next = 0u64;
    while next < budget.max_frames {
        let end = (next + BATCH).min(budget.max_frames);
        let errors: Vec<u64> = (next..end)
            .into_par_iter()
            .map_init(
                || engine.clone(),
                |eng, i| {
                    let mut rng = frame_rng(budget.master_seed, point_index, i);
                    trial.run(&mut rng, eng)
                },
            )
            .collect();
        for e in errors {
            stats.frames += 1;
            stats.bit_errors += e;
            stats.frame_errors += (e > 0) as u64;
            if budget.min_frame_errors > 0 && stats.frame_errors >= budget.min_frame_errors {
                return Ok(stats);
            }
        }
        next = end;
    }
    Ok(stats)
}

/// Runs every (pattern, decoder, Eb/N0) combination of a scenario.
///
/// The point index of a row is the position of its Eb/N0 value, so all
/// patterns and decoders at one Eb/N0 see the same payloads and noise.
/// `progress` is called after each finished row.
pub fn run_sweep(
    scenario: &Scenario,
    base: &DecoderConfig,
    budget: &TrialBudget,
    mut progress: impl FnMut(&PointRecord),
) -> Result<SweepResult> {
    budget.validate()?;
    base.validate()?;
    for d in &scenario.decoders {
        d.validate()?;
    }
    if scenario.k == 0 || scenario.k > scenario.n_prime {
        return Err(invalid(format!(
            "payload size must be in 1..=n' ({}), got {}",
            scenario.n_prime, scenario.k
        )));
    }
    let rate = scenario.k as f64 / scenario.n_prime as f64;
    let channels = scenario
        .ebn0_db
        .iter()
        .map(|&e| ChannelParams::new(e, rate))
        .collect::<Result<Vec<_>>>()?;
    let mut plans = Vec::new();
    for &pattern in &scenario.patterns {
        for d in &scenario.decoders {
            let plan = plan_for(pattern, scenario.n_prime, scenario.k + d.crc.len(), scenario.z0)?;
            plans.push((pattern, *d, plan));
        }
    }

    let mut result = SweepResult::default();
    for (pattern, setup, plan) in &plans {
        for (i, ch) in channels.iter().enumerate() {
            let s = run_point(plan, setup, base, ch, budget, i as u64)?;
            let record = PointRecord {
                scenario: scenario.name.clone(),
                pattern: pattern.to_string(),
                decoder: setup.kind,
                list_size: setup.list_size,
                crc: setup.crc,
                ebn0_db: ch.ebn0_db,
                frames: s.frames,
                bit_errors: s.bit_errors,
                frame_errors: s.frame_errors,
                ber: s.bit_errors as f64 / (s.frames * scenario.k as u64) as f64,
                fer: s.frame_errors as f64 / s.frames as f64,
                seed: budget.master_seed,
            };
            progress(&record);
            result.records.push(record);
        }
    }
    Ok(result)
}
