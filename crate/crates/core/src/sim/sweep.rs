use super::combining::{combining_sweep, CombiningPoint};
use super::config::SimConfig;
use super::metrics::{compute_metrics, PointMetrics};
use super::trial::{derive_trial_seed, run_trial, TrialResult};
use crate::error::Result;
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub const SNR_DEFINITION: &str = "snr_db is the per-sample input SNR before dechirping, \
10*log10(P / (2*sigma2*n_fft)) with P the peak-bin power after the n_fft-point FFT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool; identical output to `Sequential`. Without the
    /// `parallel` feature this runs sequentially.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub config: SimConfig,
    pub points: Vec<PointMetrics>,
    pub trials: Vec<TrialResult>,
    pub combining: Vec<CombiningPoint>,
}

/// All schemes for one (point, trial) pair, so they share the trial seed.
fn job(cfg: &SimConfig, point: usize, trial: usize) -> Result<Vec<TrialResult>> {
    let seed = derive_trial_seed(cfg.seed, point, trial);
    cfg.schemes
        .iter()
        .map(|&scheme| {
            let mut r = run_trial(cfg, scheme, cfg.snr_db[point], seed)?;
            r.trial = trial;
            Ok(r)
        })
        .collect()
}

fn run_jobs(cfg: &SimConfig, exec: Execution) -> Result<Vec<Vec<TrialResult>>> {
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_db.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| jobs.par_iter().map(|&(p, t)| job(cfg, p, t)).collect())
        }
        _ => jobs.iter().map(|&(p, t)| job(cfg, p, t)).collect(),
    }
}

pub fn run_sweep_with(cfg: &SimConfig, exec: Execution) -> Result<SweepOutput> {
    cfg.validate()?;
    let by_job = run_jobs(cfg, exec)?;

    // Jobs come back in (point, trial) order; regroup as (scheme, point, trial).
    let mut trials = Vec::with_capacity(by_job.len() * cfg.schemes.len());
    let mut points = Vec::with_capacity(cfg.schemes.len() * cfg.snr_db.len());
    for (si, &scheme) in cfg.schemes.iter().enumerate() {
        for (pi, &snr_db) in cfg.snr_db.iter().enumerate() {
            let start = trials.len();
            trials.extend(by_job[pi * cfg.trials..(pi + 1) * cfg.trials].iter().map(|rs| rs[si].clone()));
            points.push(PointMetrics { scheme, snr_db, metrics: compute_metrics(&trials[start..]) });
        }
    }
    let combining = match cfg.combining_symbols {
        0 => Vec::new(),
        n => combining_sweep(cfg, n)?,
    };
    Ok(SweepOutput { config: cfg.clone(), points, trials, combining })
}

/// Parallel when the `parallel` feature is on.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepOutput> {
    run_sweep_with(cfg, Execution::Parallel)
}

#[derive(Serialize)]
struct Summary<'a> {
    snr_definition: &'a str,
    config: &'a SimConfig,
    points: &'a [PointMetrics],
    combining: &'a [CombiningPoint],
}

impl SweepOutput {
    pub fn summary_json(&self) -> String {
        let s = Summary {
            snr_definition: SNR_DEFINITION,
            config: &self.config,
            points: &self.points,
            combining: &self.combining,
        };
        serde_json::to_string_pretty(&s).expect("summary serialises")
    }

    /// One row per (scheme, snr, metric) after a `#` line stating the SNR
    /// definition.
    pub fn write_metrics_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# {SNR_DEFINITION}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "snr_db", "metric", "value", "ci_low", "ci_high"])?;
        let fmt = |x: f64| x.to_string();
        for p in &self.points {
            for (name, value, ci) in p.metrics.rows() {
                let (lo, hi) = ci.map_or((String::new(), String::new()), |c| (fmt(c.low), fmt(c.high)));
                w.write_record([p.scheme.to_string(), fmt(p.snr_db), name.to_string(), fmt(value), lo, hi])?;
            }
        }
        for c in &self.combining {
            for (scheme, value, ci) in [
                ("single_frame", c.single_ber(), c.single_ci),
                ("two_frame_combined", c.combined_ber(), c.combined_ci),
            ] {
                w.write_record([scheme.to_string(), fmt(c.snr_db), "ber".into(), fmt(value), fmt(ci.low), fmt(ci.high)])?;
            }
        }
        w.flush()
    }

    pub fn write_trials_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for t in &self.trials {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Writes `metrics.csv`, `trials.jsonl` and `summary.json` into `dir`,
    /// creating it if needed.
    pub fn write_all(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_metrics_csv(BufWriter::new(File::create(dir.join("metrics.csv"))?))?;
        self.write_trials_jsonl(BufWriter::new(File::create(dir.join("trials.jsonl"))?))?;
        std::fs::write(dir.join("summary.json"), self.summary_json() + "\n")
    }
}
