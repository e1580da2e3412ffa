use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// AWGN operating point for unit-energy BPSK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    /// Payload bits per transmitted bit.
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    /// `sigma^2 = 1 / (2 * rate * 10^(ebn0_db / 10))`.
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(invalid(format!("code rate must lie in (0, 1], got {rate}")));
        }
        if !ebn0_db.is_finite() {
            return Err(invalid(format!("Eb/N0 must be finite, got {ebn0_db}")));
        }
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
        Ok(Self { ebn0_db, rate, sigma })
    }
}

/// Bit `b` maps to the symbol `1 - 2b`.
pub fn bpsk_modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| 1.0 - 2.0 * (b & 1) as f64).collect()
}

pub fn add_awgn<R: Rng + ?Sized>(symbols: &mut [f64], sigma: f64, rng: &mut R) {
    for s in symbols {
        *s += sigma * rng.sample::<f64, _>(StandardNormal);
    }
}

/// Channel LLRs `2y / sigma^2`; positive values favour bit 0.
pub fn llr_from_awgn(received: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("noise standard deviation must be positive, got {sigma}")));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(received.iter().map(|&y| scale * y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn noiseless_symbol_and_llr() {
        let s = bpsk_modulate(&[0, 1]);
        assert_eq!(s, vec![1.0, -1.0]);
        assert_eq!(llr_from_awgn(&s, 1.0).unwrap(), vec![2.0, -2.0]);
        assert!(llr_from_awgn(&s, 0.0).is_err());
        assert!(llr_from_awgn(&s, -1.0).is_err());
    }

    #[test]
    fn llr_signs_recover_bits_without_noise() {
        let bits = [0, 1, 1, 0, 1, 0, 0, 0, 1];
        let llr = llr_from_awgn(&bpsk_modulate(&bits), 0.3).unwrap();
        let back: Vec<u8> = llr.iter().map(|&l| (l < 0.0) as u8).collect();
        assert_eq!(back, bits);
    }

    #[test]
    fn llr_mean_for_zero_bit() {
        // For bit 0 at sigma = 1 the LLR is 2(1 + w), mean 2, variance 4.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let count = 100_000;
        let mut sym = vec![1.0; count];
        add_awgn(&mut sym, 1.0, &mut rng);
        let llr = llr_from_awgn(&sym, 1.0).unwrap();
        let mean = llr.iter().sum::<f64>() / count as f64;
        let tol = 3.0 * (4.0 / count as f64).sqrt();
        assert!((mean - 2.0).abs() < tol, "mean {mean}");
    }

    #[test]
    fn noise_calibration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sigma = 0.731;
        let count = 1_000_000;
        let mut sym = vec![0.0; count];
        add_awgn(&mut sym, sigma, &mut rng);
        let var = sym.iter().map(|x| x * x).sum::<f64>() / count as f64;
        assert!((var.sqrt() / sigma - 1.0).abs() < 0.01);
    }

    #[test]
    fn sigma_from_ebn0() {
        let ch = ChannelParams::new(3.0, 0.5).unwrap();
        let expected = 1.0 / (2.0 * 0.5 * 10f64.powf(0.3));
        assert!((ch.sigma * ch.sigma - expected).abs() < 1e-15);
        assert!(ChannelParams::new(3.0, 0.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.5).is_err());
    }
}
