//! Rate-compatible polar coding toolkit.
//!
//! The crate is organised along the processing chain of a punctured polar
//! link:
//!
//! * [`construction`] computes Bhattacharyya reliabilities of the synthetic
//!   channels of a length-`2^l` mother code and sorts them.
//! * [`puncturing`] builds puncture patterns (polarization-index driven PD,
//!   plus the RQUP and CW baselines), the information set and the
//!   codeword/LLR bookkeeping.
//! * [`codec`] holds the encoder, CRCs, and the SC, SCL and CRC-aided SCL
//!   decoders.
//! * [`spectra`] evaluates polar spectra distances of a puncture pattern.
//! * [`simkit`] runs reproducible Monte Carlo BER/FER sweeps over BPSK/AWGN.
//!
//! Channel and bit indices are 1-based wherever they cross a module boundary.

pub mod codec;
pub mod construction;
mod error;
pub mod puncturing;
pub mod simkit;
pub mod spectra;

pub use error::{Error, Result};
