//! BPSK over AWGN: modulation, noise, and channel LLRs.
//!
//! SNR values are Eb/N0 in dB, so the noise variance depends on the code
//! rate: `sigma^2 = 1 / (2 R 10^(snr/10))`. Bit 0 maps to +1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::code::BinaryWord;
use crate::error::{Error, Result};

/// Generator used for every random draw in the workbench.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub snr_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(snr_db: f64, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if !snr_db.is_finite() {
            return Err(Error::InvalidParams(format!("SNR must be finite, got {snr_db}")));
        }
        Ok(Self { snr_db, rate, sigma: snr_to_sigma(snr_db, rate) })
    }

    /// Parameters for an explicit noise level; `sigma = 0` is a noiseless channel.
    pub fn from_sigma(sigma: f64, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        let snr_db = 10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10();
        Ok(Self { snr_db, rate, sigma })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("code rate must lie in (0, 1], got {rate}")))
    }
}

pub fn snr_to_sigma(snr_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))).sqrt()
}

pub fn modulate_bpsk(w: &BinaryWord) -> Vec<f64> {
    w.bits().iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

pub fn add_awgn<R: Rng + ?Sized>(signal: &[f64], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    signal
        .iter()
        .map(|&s| {
            let n: f64 = rng.sample(StandardNormal);
            s + params.sigma * n
        })
        .collect()
}

/// `gamma_i = 2 y_i / sigma^2`, never clipped.
pub fn llr_awgn(received: &[f64], params: &ChannelParams) -> Result<Vec<f64>> {
    if params.sigma == 0.0 {
        return Err(Error::InvalidParams("LLRs are undefined for sigma = 0".into()));
    }
    let scale = 2.0 / params.variance();
    Ok(received.iter().map(|&y| scale * y).collect())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of stream identifiers into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Independent generator for one (stream, index) pair under a master seed.
pub fn stream_rng(master: u64, stream: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, &[stream, index]))
}
