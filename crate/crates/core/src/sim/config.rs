//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! n_fft = 128
//! sigma2 = 1.0
//! snr_db = -20:2:-8        # start:step:stop, or a comma list
//! k = 48
//! leakage = 0.25,0.5,0.25
//! feedback_loss = 0
//! trials = 200
//! seed = 1
//! schemes = sozu,hamming74,fixed:1/2
//! llr = leakage            # basic | leakage | conventional:<p_hat offset dB>
//! bp_iters = 60
//! bp_rule = tanh           # tanh | minsum
//! threads = 0              # 0 lets the pool decide
//! design_erasure = 0.875   # mother-code design BEC; omit for the stage-1 punctured fraction
//! combining_symbols = 0    # >0 adds the two-frame combining BER rows
//! ```

use crate::decode::{BpConfig, UpdateRule};
use crate::error::{Error, Result};
use crate::phy::{LeakageModel, LlrMethod};
use crate::sozu::Rate;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rate", rename_all = "snake_case")]
pub enum Scheme {
    Sozu,
    Hamming74,
    /// One frame from the same mother code at a fixed rate, CRC-checked.
    FixedRate(Rate),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Sozu => f.write_str("sozu"),
            Scheme::Hamming74 => f.write_str("hamming74"),
            Scheme::FixedRate(r) => write!(f, "fixed:{r}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sozu" => Ok(Scheme::Sozu),
            "hamming74" => Ok(Scheme::Hamming74),
            _ => match s.strip_prefix("fixed:") {
                Some(r) => Ok(Scheme::FixedRate(r.parse()?)),
                None => Err(Error::Config(format!("unknown scheme {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_fft: usize,
    pub sigma2: f64,
    pub snr_db: Vec<f64>,
    pub k: usize,
    pub leakage: LeakageModel,
    pub feedback_loss: f64,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub llr: LlrMethod,
    pub bp: BpConfig,
    pub threads: usize,
    pub combining_symbols: usize,
    pub design_erasure: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_fft: 128,
            sigma2: 1.0,
            snr_db: vec![-14.0],
            k: 48,
            leakage: LeakageModel::default(),
            feedback_loss: 0.0,
            trials: 100,
            seed: 1,
            schemes: vec![Scheme::Sozu, Scheme::Hamming74],
            llr: LlrMethod::Leakage,
            bp: BpConfig::default(),
            threads: 0,
            combining_symbols: 0,
            design_erasure: None,
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e| Error::Config(format!("{key}: cannot parse {v:?}: {e}")))
}

fn float_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| num(key, x.trim())).collect()
}

/// `start:step:stop` (inclusive) or a comma list.
fn snr_list(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) =
                (num("snr_db", start)?, num("snr_db", step)?, num("snr_db", stop)?);
            if step == 0.0 || (stop - start) / step < 0.0 {
                return Err(Error::Config(format!("snr_db range {v:?} is empty or unbounded")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => float_list("snr_db", v),
        _ => Err(Error::Config(format!("snr_db: malformed range {v:?}"))),
    }
}

fn llr_method(v: &str) -> Result<LlrMethod> {
    match v {
        "basic" => Ok(LlrMethod::Basic),
        "leakage" => Ok(LlrMethod::Leakage),
        _ => match v.strip_prefix("conventional") {
            Some("") => Ok(LlrMethod::Conventional { p_hat_offset_db: 0.0 }),
            Some(rest) => match rest.strip_prefix(':') {
                Some(off) => Ok(LlrMethod::Conventional { p_hat_offset_db: num("llr", off)? }),
                None => Err(Error::Config(format!("llr: unknown method {v:?}"))),
            },
            None => Err(Error::Config(format!("llr: unknown method {v:?}"))),
        },
    }
}

impl SimConfig {
    pub fn plan(&self) -> Result<crate::sozu::SessionPlan> {
        let plan = crate::sozu::plan_session(self.k)?;
        match self.design_erasure {
            Some(eps) => plan.with_design_erasure(eps),
            None => Ok(plan),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, v) = (key.trim(), value.trim());
            match key {
                "n_fft" => cfg.n_fft = num(key, v)?,
                "sigma2" => cfg.sigma2 = num(key, v)?,
                "snr_db" => cfg.snr_db = snr_list(v)?,
                "k" => cfg.k = num(key, v)?,
                "leakage" => {
                    let f = float_list(key, v)?;
                    let arr: [f64; 3] = f
                        .try_into()
                        .map_err(|_| Error::Config("leakage needs three fractions".into()))?;
                    cfg.leakage = LeakageModel::new(arr)?;
                }
                "feedback_loss" => cfg.feedback_loss = num(key, v)?,
                "trials" => cfg.trials = num(key, v)?,
                "seed" => cfg.seed = num(key, v)?,
                "schemes" => {
                    cfg.schemes = v.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?
                }
                "llr" => cfg.llr = llr_method(v)?,
                "bp_iters" => cfg.bp.max_iters = num(key, v)?,
                "bp_rule" => {
                    cfg.bp.update_rule = match v {
                        "tanh" => UpdateRule::ExactTanh,
                        "minsum" => UpdateRule::MinSum,
                        _ => return Err(Error::Config(format!("bp_rule: unknown rule {v:?}"))),
                    }
                }
                "threads" => cfg.threads = num(key, v)?,
                "combining_symbols" => cfg.combining_symbols = num(key, v)?,
                "design_erasure" => cfg.design_erasure = Some(num(key, v)?),
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_db must be a non-empty list of finite values".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        if !self.n_fft.is_power_of_two() || self.n_fft < 4 {
            return bad(format!("n_fft must be a power of two >= 4, got {}", self.n_fft));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if !(0.0..1.0).contains(&self.feedback_loss) {
            return bad(format!("feedback_loss must be in [0, 1), got {}", self.feedback_loss));
        }
        if self.bp.max_iters == 0 {
            return bad("bp_iters must be at least 1".into());
        }
        let plan = self.plan()?;
        for s in &self.schemes {
            if let Scheme::FixedRate(r) = s {
                if r.budget(self.k) > plan.n_mother {
                    return bad(format!("fixed rate {r} needs more than {} coded bits", plan.n_mother));
                }
            }
        }
        if self.schemes.contains(&Scheme::Hamming74) && !self.k.is_multiple_of(4) {
            return bad(format!("hamming74 needs k divisible by 4, got {}", self.k));
        }
        Ok(())
    }
}
