//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! status 1 if any criterion fails. Run with
//! `cargo test --release -p polarforge-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{ml_decode, transmit};
use polarforge::codec::{encode, CrcKind, DecoderConfig, ListDecoder, ScDecoder};
use polarforge::construction::{bhattacharyya_vector, reliability_order, MotherCodeParams};
use polarforge::puncturing::{
    apply_puncture, build_code_plan, plan_for, pd_pattern, PatternKind, PuncturePattern,
};
use polarforge::simkit::{
    preset, run_point, run_sweep, ChannelParams, DecoderKind, DecoderSetup, PointStats, Scenario,
    SweepResult, TrialBudget,
};
use polarforge::spectra::{sdc, spectra_polynomial, DenominatorConvention, PatternSpectra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EQ8_TOL: f64 = 1e-3;
const ML_FRAMES: usize = 1000;
const ML_EBN0_DB: f64 = 1.0;
const ML_TIME_LIMIT: Duration = Duration::from_secs(30);
const IDENTITY_FRAMES: u64 = 1000;
const NOISELESS_FRAMES: usize = 1000;
const NOISELESS_TIME_LIMIT: Duration = Duration::from_secs(60);
const FIG2_EBN0_DB: f64 = 3.0;
const FIG2_SEEDS: [u64; 3] = [11, 22, 33];
const FIG2_REQUIRED: usize = 2;
const MIN_ERRORS: u64 = 300;
const MAX_FRAMES: u64 = 2_000_000;
const FIG3_EBN0_DB: f64 = 2.0;
const FIG3_SEED: u64 = 7;
const MONOTONE_SIGMAS: f64 = 2.0;
const MONOTONE_MIN_ERRORS: u64 = 100;
const MONOTONE_MAX_FRAMES: u64 = 200_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn order_for(n: usize) -> polarforge::construction::ReliabilityOrder {
    reliability_order(&bhattacharyya_vector(MotherCodeParams::for_length(n, 0.5).unwrap()))
}

fn worked_examples() -> Outcome {
    let mut failures = Vec::new();
    let b = bhattacharyya_vector(MotherCodeParams::with_levels(3).unwrap());
    let printed = [0.996, 0.683, 0.808, 0.121, 0.878, 0.191, 0.316, 0.003];
    let worst = b.values().iter().zip(printed).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    if worst >= EQ8_TOL {
        failures.push(format!("polarization vector off by {worst}"));
    }
    let order = reliability_order(&b);
    if order.indices() != [8, 4, 6, 7, 2, 3, 5, 1] {
        failures.push(format!("reliability order {:?}", order.indices()));
    }

    let p = pd_pattern(&order, 5).unwrap();
    if p.removed() != [8, 4, 6] {
        failures.push(format!("pattern {:?}", p.removed()));
    }

    // Symbolic payload u1..u4 encoded as the values 1..4 in the input vector.
    let layout = |pattern: &PuncturePattern| {
        let plan = build_code_plan(&order, pattern, 4).unwrap();
        let mut u = vec![0usize; 8];
        for (sym, &pos) in plan.data_positions(0).unwrap().iter().enumerate() {
            u[pos - 1] = sym + 1;
        }
        u
    };
    let unpunctured = layout(&PuncturePattern::empty(8).unwrap());
    if unpunctured != [0, 0, 0, 1, 0, 2, 3, 4] {
        failures.push(format!("unpunctured input vector {unpunctured:?}"));
    }
    let punctured = layout(&p);
    if punctured != [0, 1, 2, 0, 3, 0, 4, 0] {
        failures.push(format!("punctured input vector {punctured:?}"));
    }

    let c: Vec<usize> = (1..=8).collect();
    let kept = apply_puncture(&c, &p).unwrap();
    if kept != [1, 2, 3, 5, 7] {
        failures.push(format!("kept codeword positions {kept:?}"));
    }
    // Punctured positions carry known zeros for every payload.
    let plan = build_code_plan(&order, &p, 4).unwrap();
    for m in 0u8..16 {
        let data: Vec<u8> = (0..4).map(|i| m >> i & 1).collect();
        let cw = encode(&plan.place(&data, 0).unwrap()).unwrap();
        if p.removed().iter().any(|&i| cw[i - 1] != 0) {
            failures.push(format!("payload {m:04b} puts a one on a punctured bit"));
            break;
        }
    }

    let full = spectra_polynomial(4, &[]).unwrap();
    let cut = spectra_polynomial(4, &[13, 14, 15, 16]).unwrap();
    let lambda = |poly| sdc(poly, DenominatorConvention::MotherN).unwrap();
    if full.coeffs() != [1, 4, 6, 4, 1] || lambda(&full) != 2.0 {
        failures.push(format!("unpunctured spectra {:?}", full.coeffs()));
    }
    if cut.coeffs() != [0, 2, 5, 4, 1] || lambda(&cut) != 1.75 {
        failures.push(format!("punctured spectra {:?} / {}", cut.coeffs(), lambda(&cut)));
    }

    if failures.is_empty() {
        outcome(true, "vector, order, pattern (8,4,6), input mappings, kept bits, C(X) and 2 -> 1.75")
    } else {
        outcome(false, failures.join("; "))
    }
}

fn spectra_ordering() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n_prime, k) in [(100usize, 64), (480, 256), (1920, 1600)] {
        let n = n_prime.next_power_of_two();
        let order = order_for(n);
        let rows: Vec<PatternSpectra> = PatternKind::ALL
            .iter()
            .map(|kind| PatternSpectra::new(kind.name(), &kind.build(&order, n_prime).unwrap()).unwrap())
            .collect();
        let (pd, rqup, cw) = (&rows[0], &rows[1], &rows[2]);
        let holds = |f: fn(&PatternSpectra) -> f64| f(pd) > f(rqup) && f(pd) > f(cw);
        let ok = holds(|r| r.mother.sdc) || holds(|r| r.punctured.sdc);
        pass &= ok;
        parts.push(format!(
            "({n_prime},{k}) /n pd={:.4} rqup={:.4} cw={:.4}, /n' pd={:.4} rqup={:.4} cw={:.4}{}",
            pd.mother.sdc,
            rqup.mother.sdc,
            cw.mother.sdc,
            pd.punctured.sdc,
            rqup.punctured.sdc,
            cw.punctured.sdc,
            if ok { "" } else { " [ordering violated]" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn ml_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for (n, k) in [(8, 4), (16, 8)] {
        let plan = plan_for(PatternKind::Pd, n, k, 0.5).unwrap();
        let mut dec = ListDecoder::new(&plan, &DecoderConfig::list(1 << k)).unwrap();
        let sigma = ChannelParams::new(ML_EBN0_DB, k as f64 / n as f64).unwrap().sigma;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..ML_FRAMES {
            let f = transmit(&plan, CrcKind::None, Some(sigma), &mut rng);
            if dec.decode(&f.llr).unwrap().payload != ml_decode(&plan, &f.llr) {
                mismatches += 1;
            }
        }
    }
    let took = start.elapsed();
    outcome(
        mismatches == 0 && took < ML_TIME_LIMIT,
        format!("{mismatches} mismatches over 2 x {ML_FRAMES} frames in {took:.2?}"),
    )
}

fn list_identity() -> Outcome {
    let plan = plan_for(PatternKind::Pd, 480, 256, 0.5).unwrap();
    let cfg = DecoderConfig::list(1);
    let mut sc = ScDecoder::new(&plan, &cfg).unwrap();
    let mut list = ListDecoder::new(&plan, &cfg).unwrap();
    let sigma = ChannelParams::new(2.0, 256.0 / 480.0).unwrap().sigma;
    let mut differing = 0;
    for i in 0..IDENTITY_FRAMES {
        let f = transmit(&plan, CrcKind::None, Some(sigma), &mut ChaCha8Rng::seed_from_u64(i));
        if sc.decode(&f.llr).unwrap() != list.decode(&f.llr).unwrap() {
            differing += 1;
        }
    }
    outcome(differing == 0, format!("{differing} of {IDENTITY_FRAMES} frames differ"))
}

fn noiseless_presets() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["mmtc-sc", "urllc-sc", "embb-sc"] {
        let s = preset(name).unwrap();
        for &kind in &s.patterns {
            let plan = plan_for(kind, s.n_prime, s.k, s.z0).unwrap();
            let mut dec = ScDecoder::new(&plan, &DecoderConfig::sc()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let ok = (0..NOISELESS_FRAMES)
                .filter(|_| {
                    let f = transmit(&plan, CrcKind::None, None, &mut rng);
                    dec.decode(&f.llr).unwrap().payload == f.payload
                })
                .count();
            pass &= ok == NOISELESS_FRAMES;
            parts.push(format!("{name}/{kind} {ok}/{NOISELESS_FRAMES}"));
        }
    }
    let took = start.elapsed();
    pass &= took < NOISELESS_TIME_LIMIT;
    outcome(pass, format!("{} in {took:.2?}", parts.join(", ")))
}

fn point(
    kind: PatternKind,
    n_prime: usize,
    k: usize,
    setup: DecoderSetup,
    ebn0: f64,
    seed: u64,
) -> PointStats {
    let plan = plan_for(kind, n_prime, k + setup.crc.len(), 0.5).unwrap();
    let channel = ChannelParams::new(ebn0, k as f64 / n_prime as f64).unwrap();
    let budget = TrialBudget { max_frames: MAX_FRAMES, min_frame_errors: MIN_ERRORS, master_seed: seed };
    run_point(&plan, &setup, &DecoderConfig::default(), &channel, &budget, 0).unwrap()
}

fn ber(s: &PointStats, k: usize) -> f64 {
    s.bit_errors as f64 / (s.frames * k as u64) as f64
}

fn fig2_ordering() -> Outcome {
    let mut held = 0;
    let mut parts = Vec::new();
    for seed in FIG2_SEEDS {
        let b: Vec<f64> = PatternKind::ALL
            .iter()
            .map(|&kind| ber(&point(kind, 480, 256, DecoderSetup::sc(), FIG2_EBN0_DB, seed), 256))
            .collect();
        let ok = b[0] <= b[1] && b[0] <= b[2];
        held += ok as usize;
        parts.push(format!("seed {seed}: pd={:.3e} rqup={:.3e} cw={:.3e}", b[0], b[1], b[2]));
    }
    outcome(
        held >= FIG2_REQUIRED,
        format!("ordering held for {held}/{} seeds at {FIG2_EBN0_DB} dB; {}", FIG2_SEEDS.len(), parts.join("; ")),
    )
}

fn fig3_list_gain() -> Outcome {
    let setup = |list_size, crc| DecoderSetup { kind: DecoderKind::CaScl, list_size, crc };
    let small = point(PatternKind::Pd, 480, 256, setup(2, CrcKind::Crc8), FIG3_EBN0_DB, FIG3_SEED);
    let large = point(PatternKind::Pd, 480, 256, setup(8, CrcKind::Crc16), FIG3_EBN0_DB, FIG3_SEED);
    let fer = |s: &PointStats| s.frame_errors as f64 / s.frames as f64;
    let enough = small.frame_errors >= MIN_ERRORS && large.frame_errors >= MIN_ERRORS;
    outcome(
        enough && fer(&large) < fer(&small),
        format!(
            "at {FIG3_EBN0_DB} dB: L=8/crc16 fer={:.3e} ({} errors) vs L=2/crc8 fer={:.3e} ({} errors)",
            fer(&large),
            large.frame_errors,
            fer(&small),
            small.frame_errors
        ),
    )
}

/// Least-squares non-increasing fit (pool adjacent violators).
fn antitonic_fit(y: &[f64], w: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&v, &wt) in y.iter().zip(w) {
        blocks.push((v, wt, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 < blocks[blocks.len() - 1].0 {
            let (v2, w2, c2) = blocks.pop().unwrap();
            let (v1, w1, c1) = blocks.pop().unwrap();
            blocks.push(((v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2, c1 + c2));
        }
    }
    blocks.into_iter().flat_map(|(v, _, c)| std::iter::repeat(v).take(c)).collect()
}

/// Largest deviation from the monotone fit, in estimator standard deviations.
fn worst_violation(result: &SweepResult) -> f64 {
    let mut worst: f64 = 0.0;
    let mut groups: Vec<Vec<&polarforge::simkit::PointRecord>> = Vec::new();
    for r in &result.records {
        match groups.last_mut() {
            Some(g) if g[0].pattern == r.pattern && g[0].list_size == r.list_size && g[0].crc == r.crc => {
                g.push(r)
            }
            _ => groups.push(vec![r]),
        }
    }
    for g in groups {
        // Standard deviation estimated from the count of erroneous frames.
        let std: Vec<f64> = g
            .iter()
            .map(|r| {
                if r.frame_errors > 0 {
                    r.ber / (r.frame_errors as f64).sqrt()
                } else {
                    1.0 / r.frames as f64
                }
            })
            .collect();
        let y: Vec<f64> = g.iter().map(|r| r.ber).collect();
        let w: Vec<f64> = std.iter().map(|s| 1.0 / (s * s)).collect();
        let fit = antitonic_fit(&y, &w);
        for i in 0..y.len() {
            worst = worst.max((y[i] - fit[i]).abs() / std[i]);
        }
    }
    worst
}

fn ber_monotone() -> Outcome {
    let budget =
        TrialBudget { max_frames: MONOTONE_MAX_FRAMES, min_frame_errors: MONOTONE_MIN_ERRORS, master_seed: 3 };
    let mut sweeps: Vec<Scenario> = vec![preset("mmtc-sc").unwrap()];
    let mut urllc = preset("urllc-sc").unwrap();
    urllc.ebn0_db = vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5];
    sweeps.push(urllc);
    let mut lists = preset("urllc-lists").unwrap();
    lists.decoders.retain(|d| d.list_size == 2 || d.list_size == 8);
    lists.ebn0_db = vec![1.0, 1.5, 2.0, 2.5];
    sweeps.push(lists);
    let mut parts = Vec::new();
    let mut pass = true;
    for s in &sweeps {
        let result = run_sweep(s, &DecoderConfig::default(), &budget, |_| {}).unwrap();
        let v = worst_violation(&result);
        pass &= v < MONOTONE_SIGMAS;
        parts.push(format!("{} ({} rows) worst {v:.2} sd", s.name, result.records.len()));
    }
    outcome(pass, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked examples", worked_examples),
        ("spectra ordering (PD above RQUP and CW)", spectra_ordering),
        ("full-list SCL equals ML", ml_equivalence),
        ("SCL with L=1 equals SC", list_identity),
        ("noiseless round trip on all presets", noiseless_presets),
        ("SC BER ordering PD <= RQUP, CW at n'=480", fig2_ordering),
        ("CA-SCL L=8/crc16 beats L=2/crc8", fig3_list_gain),
        ("BER non-increasing in Eb/N0", ber_monotone),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "{} {name}: {} [{:.1?}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
