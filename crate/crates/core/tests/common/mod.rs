#![allow(dead_code)]

use polarforge::codec::{crc_append, encode, CrcKind};
use polarforge::puncturing::{apply_puncture, expand_llr, CodePlan, LLR_SAT};
use polarforge::simkit::{add_awgn, bpsk_modulate, llr_from_awgn};
use rand::Rng;

pub struct Frame {
    pub payload: Vec<u8>,
    pub codeword: Vec<u8>,
    /// Expanded length-n LLRs fed to the decoders.
    pub llr: Vec<f64>,
}

/// Draws a payload, sends it over BPSK/AWGN and expands the received LLRs.
/// `sigma = None` gives a noiseless frame with saturated LLRs.
pub fn transmit<R: Rng>(plan: &CodePlan, crc: CrcKind, sigma: Option<f64>, rng: &mut R) -> Frame {
    let k = plan.k_info() - crc.len();
    let payload: Vec<u8> = (0..k).map(|_| rng.gen::<bool>() as u8).collect();
    let u = plan.place(&crc_append(&payload, crc), crc.len()).unwrap();
    let codeword = encode(&u).unwrap();
    let sent = apply_puncture(&codeword, plan.pattern()).unwrap();
    let received = match sigma {
        Some(s) => {
            let mut y = bpsk_modulate(&sent);
            add_awgn(&mut y, s, rng);
            llr_from_awgn(&y, s).unwrap()
        }
        None => sent.iter().map(|&b| if b == 0 { LLR_SAT } else { -LLR_SAT }).collect(),
    };
    let llr = expand_llr(&received, plan.pattern()).unwrap();
    Frame { payload, codeword, llr }
}

/// Maximum-likelihood payload by enumerating every codeword of the plan.
pub fn ml_decode(plan: &CodePlan, llr: &[f64]) -> Vec<u8> {
    let k = plan.k_info();
    assert!(k <= 20, "enumeration would be too large");
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for m in 0u32..1 << k {
        let payload: Vec<u8> = (0..k).map(|b| (m >> b & 1) as u8).collect();
        let c = encode(&plan.place(&payload, 0).unwrap()).unwrap();
        let score: f64 = c.iter().zip(llr).map(|(&b, &l)| if b == 0 { l } else { -l }).sum();
        if score > best.0 {
            best = (score, payload);
        }
    }
    best.1
}
