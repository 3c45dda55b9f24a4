//! Bit error rate of one frame's LLRs against the sum of two independent
//! frames' LLRs for the same bits.

use super::config::SimConfig;
use super::stats::{wilson, Interval};
use super::trial::derive_trial_seed;
use crate::error::Result;
use crate::phy::{random_peak, synthesize_with_rng, NoiseModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombiningPoint {
    pub snr_db: f64,
    pub symbols: usize,
    pub single_errors: usize,
    pub combined_errors: usize,
    pub single_ci: Interval,
    pub combined_ci: Interval,
}

impl CombiningPoint {
    pub fn single_ber(&self) -> f64 {
        self.single_errors as f64 / self.symbols as f64
    }

    pub fn combined_ber(&self) -> f64 {
        self.combined_errors as f64 / self.symbols as f64
    }
}

fn hard(l: f64) -> u8 {
    (l < 0.0) as u8
}

pub fn combining_point(cfg: &SimConfig, snr_db: f64, symbols: usize, seed: u64) -> Result<CombiningPoint> {
    let noise = NoiseModel::from_snr_db(snr_db, cfg.sigma2, cfg.n_fft)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut single, mut combined) = (0, 0);
    for _ in 0..symbols {
        let bit = rng.gen_range(0..=1u8);
        let mut llr = || -> Result<f64> {
            let s = random_peak(cfg.n_fft, &mut rng);
            let obs = synthesize_with_rng(bit, s, &noise, &cfg.leakage, cfg.n_fft, &mut rng)?;
            Ok(cfg.llr.llr(&obs, &noise))
        };
        let first = llr()?;
        let second = llr()?;
        single += (hard(first) != bit) as usize;
        combined += (hard(first + second) != bit) as usize;
    }
    Ok(CombiningPoint {
        snr_db,
        symbols,
        single_errors: single,
        combined_errors: combined,
        single_ci: wilson(single as u64, symbols as u64),
        combined_ci: wilson(combined as u64, symbols as u64),
    })
}

/// One point per configured SNR, seeded from the master seed.
pub fn combining_sweep(cfg: &SimConfig, symbols: usize) -> Result<Vec<CombiningPoint>> {
    let job = |(i, &snr): (usize, &f64)| {
        combining_point(cfg, snr, symbols, derive_trial_seed(cfg.seed ^ COMBINING_SALT, i, 0))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cfg.snr_db.par_iter().enumerate().map(job).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cfg.snr_db.iter().enumerate().map(job).collect()
    }
}

/// Keeps the combining draws apart from the packet trials.
const COMBINING_SALT: u64 = 0xC0B1_4E00;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combining_helps_at_moderate_snr() {
        let cfg = SimConfig::default();
        let p = combining_point(&cfg, -14.0, 4000, 1).unwrap();
        assert!(p.combined_errors < p.single_errors, "{p:?}");
        assert_eq!(p, combining_point(&cfg, -14.0, 4000, 1).unwrap());
    }
}
