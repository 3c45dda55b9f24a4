use super::config::Scheme;
use super::stats::{wilson, Interval};
use super::trial::TrialResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub trials: usize,
    pub ber: f64,
    pub ber_ci: Interval,
    pub prr: f64,
    pub prr_ci: Interval,
    pub brr: f64,
    pub brr_ci: Interval,
    /// Clean info bits per coded bit on air.
    pub goodput: f64,
    /// PRR interval scaled by the mean effective rate.
    pub goodput_ci: Interval,
    /// Info bits per coded bit on air, clean or not.
    pub mean_effective_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub metrics: Metrics,
}

/// Σ clean info bits / Σ coded bits; 0 for an empty set.
pub fn goodput(results: &[TrialResult]) -> f64 {
    let sent: usize = results.iter().map(|r| r.bits_sent).sum();
    if sent == 0 {
        return 0.0;
    }
    results.iter().map(TrialResult::clean_bits).sum::<usize>() as f64 / sent as f64
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(results: &[TrialResult]) -> Metrics {
    let n = results.len();
    let bits: usize = results.iter().map(|r| r.k).sum();
    let errors: usize = results.iter().map(|r| r.bit_errors).sum();
    let clean = results.iter().filter(|r| r.clean).count();
    let bytes: usize = results.iter().map(|r| r.bytes_total).sum();
    let bytes_clean: usize = results.iter().map(|r| r.bytes_clean).sum();
    let sent: usize = results.iter().map(|r| r.bits_sent).sum();
    let mean_effective_rate = ratio(bits, sent);
    let prr_ci = wilson(clean as u64, n as u64);
    Metrics {
        trials: n,
        ber: ratio(errors, bits),
        ber_ci: wilson(errors as u64, bits as u64),
        prr: ratio(clean, n),
        prr_ci,
        brr: ratio(bytes_clean, bytes),
        brr_ci: wilson(bytes_clean as u64, bytes as u64),
        goodput: goodput(results),
        goodput_ci: Interval {
            low: prr_ci.low * mean_effective_rate,
            high: prr_ci.high * mean_effective_rate,
        },
        mean_effective_rate,
    }
}

impl Metrics {
    /// `(name, value, interval)` in output order.
    pub fn rows(&self) -> [(&'static str, f64, Option<Interval>); 5] {
        [
            ("ber", self.ber, Some(self.ber_ci)),
            ("prr", self.prr, Some(self.prr_ci)),
            ("brr", self.brr, Some(self.brr_ci)),
            ("goodput", self.goodput, Some(self.goodput_ci)),
            ("mean_effective_rate", self.mean_effective_rate, None),
        ]
    }
}
