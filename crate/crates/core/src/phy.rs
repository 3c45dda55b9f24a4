//! FFT-bin model of a two-antenna chirp backscatter symbol and the soft
//! demodulators that turn one observation into a bit LLR.
//!
//! Bit 0 leaves the tag's peak on the excitation peak bin `s`; bit 1 moves
//! it half the band away, to `s̄ = (s + n_fft/2) mod n_fft`, where the
//! amplitude step between the two antennas smears power over
//! `s̄ - 1, s̄, s̄ + 1`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

/// Floor applied to bin magnitudes before taking logs.
pub const MAG_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolObservation {
    pub bins: Vec<Complex64>,
    pub excitation_peak: usize,
}

impl SymbolObservation {
    pub fn n_fft(&self) -> usize {
        self.bins.len()
    }

    fn mag(&self, bin: usize) -> f64 {
        self.bins[bin % self.bins.len()].norm().max(MAG_FLOOR)
    }

    fn power(&self, bin: usize) -> f64 {
        self.bins[bin % self.bins.len()].norm_sqr()
    }

    fn shifted_peak(&self) -> usize {
        (self.excitation_peak + self.n_fft() / 2) % self.n_fft()
    }
}

/// Per-component Gaussian variance `sigma2` (complex variance `2·sigma2`)
/// and the peak-bin signal power `signal_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma2: f64,
    pub signal_power: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64, signal_power: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::Config(format!("sigma2 must be positive, got {sigma2}")));
        }
        if !(signal_power >= 0.0 && signal_power.is_finite()) {
            return Err(Error::Config(format!("signal power must be >= 0, got {signal_power}")));
        }
        Ok(Self { sigma2, signal_power })
    }

    /// Model for an input SNR in dB measured before dechirping, per
    /// sample. The `n_fft`-point FFT concentrates the chirp into one bin,
    /// so the peak-bin power is `2σ²·n_fft·10^(snr/10)`.
    pub fn from_snr_db(snr_db: f64, sigma2: f64, n_fft: usize) -> Result<Self> {
        Self::new(sigma2, 2.0 * sigma2 * n_fft as f64 * 10f64.powf(snr_db / 10.0))
    }

    /// Peak-bin SNR `P / (2σ²)`, linear.
    pub fn bin_snr(&self) -> f64 {
        self.signal_power / (2.0 * self.sigma2)
    }
}

/// Power split over bins `s̄ - 1, s̄, s̄ + 1` when bit 1 is sent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageModel {
    fractions: [f64; 3],
}

impl LeakageModel {
    pub const NONE: LeakageModel = LeakageModel { fractions: [0.0, 1.0, 0.0] };

    pub fn new(fractions: [f64; 3]) -> Result<Self> {
        let [lo, mid, hi] = fractions;
        if fractions.iter().any(|f| f.is_nan() || *f < 0.0) {
            return Err(Error::Config(format!("negative leakage fraction in {fractions:?}")));
        }
        if (lo + mid + hi - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("leakage fractions {fractions:?} do not sum to 1")));
        }
        if mid < lo.max(hi) {
            return Err(Error::Config(format!("centre bin must dominate in {fractions:?}")));
        }
        Ok(Self { fractions })
    }

    pub fn fractions(&self) -> [f64; 3] {
        self.fractions
    }
}

impl Default for LeakageModel {
    fn default() -> Self {
        Self { fractions: [0.25, 0.5, 0.25] }
    }
}

fn check_fft(n_fft: usize, min: usize) -> Result<()> {
    if !n_fft.is_power_of_two() || n_fft < min {
        return Err(Error::Config(format!(
            "n_fft must be a power of two >= {min}, got {n_fft}"
        )));
    }
    Ok(())
}

/// Bin where the tag's peak lands for `bit`.
pub fn tag_peak_position(bit: u8, s_i: usize, n_fft: usize) -> Result<usize> {
    check_fft(n_fft, 2)?;
    if s_i >= n_fft {
        return Err(Error::OutOfRange { index: s_i, len: n_fft });
    }
    match bit {
        0 => Ok(s_i),
        1 => Ok((s_i + n_fft / 2) % n_fft),
        _ => Err(Error::Config(format!("invalid bit {bit}"))),
    }
}

/// Seeded form of [`synthesize_with_rng`].
pub fn synthesize_observation(
    bit: u8,
    s_i: usize,
    noise: &NoiseModel,
    leak: &LeakageModel,
    n_fft: usize,
    rng_seed: u64,
) -> Result<SymbolObservation> {
    synthesize_with_rng(bit, s_i, noise, leak, n_fft, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Draws one symbol's FFT bins: complex Gaussian noise everywhere plus the
/// tag's peak amplitude where `bit` puts it.
pub fn synthesize_with_rng<R: Rng + ?Sized>(
    bit: u8,
    s_i: usize,
    noise: &NoiseModel,
    leak: &LeakageModel,
    n_fft: usize,
    rng: &mut R,
) -> Result<SymbolObservation> {
    check_fft(n_fft, 4)?;
    let peak = tag_peak_position(bit, s_i, n_fft)?;
    let normal = Normal::new(0.0, noise.sigma2.sqrt())
        .map_err(|e| Error::Config(format!("noise model: {e}")))?;
    let mut bins: Vec<Complex64> = (0..n_fft)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    let p = noise.signal_power;
    if bit == 0 {
        bins[peak].re += p.sqrt();
    } else {
        for (offset, frac) in [n_fft - 1, 0, 1].into_iter().zip(leak.fractions) {
            bins[(peak + offset) % n_fft].re += (frac * p).sqrt();
        }
    }
    Ok(SymbolObservation { bins, excitation_peak: s_i })
}

/// Uniformly random excitation peak.
pub fn random_peak<R: Rng + ?Sized>(n_fft: usize, rng: &mut R) -> usize {
    Uniform::new(0, n_fft).sample(rng)
}

/// Rayleigh log-density ratio of "no peak at `s̄`" to "no peak at `s`".
/// Needs only the noise variance.
pub fn llr_basic(obs: &SymbolObservation, sigma2: f64) -> f64 {
    let s = obs.excitation_peak;
    let a_s = obs.mag(s);
    let a_bar = obs.mag(obs.shifted_peak());
    (a_bar / a_s).ln() + (a_s * a_s - a_bar * a_bar) / (2.0 * sigma2)
}

/// As [`llr_basic`], but with the bit-1 evidence taken as the power summed
/// over `s̄ - 1, s̄, s̄ + 1` (cyclic).
pub fn llr_leakage(obs: &SymbolObservation, sigma2: f64) -> f64 {
    let s = obs.excitation_peak;
    let bar = obs.shifted_peak();
    let n = obs.n_fft();
    let a_s = obs.mag(s);
    let spread = obs.power(bar + n - 1) + obs.power(bar) + obs.power(bar + 1);
    let root = spread.sqrt().max(MAG_FLOOR);
    (root / a_s).ln() + (a_s * a_s - spread) / (2.0 * sigma2)
}

/// Power-based baseline: Rician (peak amplitude `sqrt(p_hat)`) against
/// Rayleigh on bins `s` and `s̄`. Depends on the power estimate.
pub fn llr_conventional(obs: &SymbolObservation, sigma2: f64, p_hat: f64) -> f64 {
    let nu = p_hat.max(0.0).sqrt();
    let a_s = obs.mag(obs.excitation_peak);
    let a_bar = obs.mag(obs.shifted_peak());
    ln_bessel_i0(a_s * nu / sigma2) - ln_bessel_i0(a_bar * nu / sigma2)
}

/// `ln I0(x)` for `x >= 0`: power series below 50, asymptotic above.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < 50.0 {
        let q = x * x / 4.0;
        let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum.ln()
    } else {
        let inv = 1.0 / (8.0 * x);
        // 1 + Σ ((2k-1)!!)² / (k! (8x)^k)
        let series = 1.0
            + inv
            + 4.5 * inv.powi(2)
            + 37.5 * inv.powi(3)
            + 459.375 * inv.powi(4)
            + 7441.875 * inv.powi(5);
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series.ln()
    }
}

/// Which soft demodulator turns an observation into an LLR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LlrMethod {
    Basic,
    #[default]
    Leakage,
    /// Power-based baseline fed a power estimate off by `p_hat_offset_db`.
    Conventional { p_hat_offset_db: f64 },
}

impl LlrMethod {
    pub fn llr(&self, obs: &SymbolObservation, noise: &NoiseModel) -> f64 {
        match *self {
            LlrMethod::Basic => llr_basic(obs, noise.sigma2),
            LlrMethod::Leakage => llr_leakage(obs, noise.sigma2),
            LlrMethod::Conventional { p_hat_offset_db } => {
                let p_hat = noise.signal_power * 10f64.powf(p_hat_offset_db / 10.0);
                llr_conventional(obs, noise.sigma2, p_hat)
            }
        }
    }
}

/// Anything that carries coded bits and hands back one LLR per bit.
pub trait SoftChannel {
    fn transmit(&mut self, bits: &[u8]) -> Result<Vec<f64>>;
}

/// One chirp symbol per bit through the FFT-bin model.
#[derive(Debug, Clone)]
pub struct BinChannel {
    pub noise: NoiseModel,
    pub leakage: LeakageModel,
    pub n_fft: usize,
    pub method: LlrMethod,
    rng: ChaCha8Rng,
}

impl BinChannel {
    pub fn new(
        noise: NoiseModel,
        leakage: LeakageModel,
        n_fft: usize,
        method: LlrMethod,
        seed: u64,
    ) -> Result<Self> {
        check_fft(n_fft, 4)?;
        Ok(Self { noise, leakage, n_fft, method, rng: ChaCha8Rng::seed_from_u64(seed) })
    }
}

impl SoftChannel for BinChannel {
    fn transmit(&mut self, bits: &[u8]) -> Result<Vec<f64>> {
        bits.iter()
            .map(|&b| {
                let s = random_peak(self.n_fft, &mut self.rng);
                let obs =
                    synthesize_with_rng(b, s, &self.noise, &self.leakage, self.n_fft, &mut self.rng)?;
                Ok(self.method.llr(&obs, &self.noise))
            })
            .collect()
    }
}
