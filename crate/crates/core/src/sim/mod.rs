//! Monte-Carlo harness: trials, metrics, sweeps and their outputs.

pub mod combining;
pub mod config;
pub mod hamming;
pub mod metrics;
pub mod stats;
pub mod sweep;
pub mod trial;

pub use combining::{combining_point, combining_sweep, CombiningPoint};
pub use config::{Scheme, SimConfig};
pub use hamming::{hamming74_decode, hamming74_decode_llrs, hamming74_encode};
pub use metrics::{compute_metrics, goodput, Metrics, PointMetrics};
pub use stats::{wilson, Interval};
pub use sweep::{run_sweep, run_sweep_with, Execution, SweepOutput, SNR_DEFINITION};
pub use trial::{derive_trial_seed, run_trial, TrialResult};
