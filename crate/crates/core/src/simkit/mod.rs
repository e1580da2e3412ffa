//! Monte Carlo BER/FER evaluation over BPSK and AWGN.

mod channel;
mod presets;
mod sweep;

pub use channel::{add_awgn, bpsk_modulate, llr_from_awgn, ChannelParams};
pub use presets::{preset, Scenario, PRESET_NAMES};
pub use sweep::{
    frame_rng, run_point, run_sweep, DecoderKind, DecoderSetup, PointRecord, PointStats,
    SweepResult, TrialBudget, CSV_HEADER,
};
