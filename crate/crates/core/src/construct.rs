//! Polar code construction over a binary erasure design channel.
//!
//! Virtual channels are laid out in natural index order for `G_N = F^{⊗n}`
//! (no bit reversal): bit `n-1-t` of an index selects the minus (0) or
//! plus (1) branch at recursion level `t`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const MAX_LOG2: u32 = 16;
pub const DEFAULT_DESIGN_EPS: f64 = 0.5;

/// Binary erasure channel used to rank virtual channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignChannel {
    erasure_prob: f64,
}

impl DesignChannel {
    pub fn new(erasure_prob: f64) -> Result<Self> {
        check_unit("erasure probability", erasure_prob)?;
        Ok(Self { erasure_prob })
    }

    pub fn erasure_prob(&self) -> f64 {
        self.erasure_prob
    }

    pub fn capacity(&self) -> f64 {
        1.0 - self.erasure_prob
    }
}

impl Default for DesignChannel {
    fn default() -> Self {
        Self { erasure_prob: DEFAULT_DESIGN_EPS }
    }
}

fn check_unit(what: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("{what} {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_log2(n_log2: u32) -> Result<()> {
    if !(1..=MAX_LOG2).contains(&n_log2) {
        return Err(Error::Config(format!(
            "n_log2 = {n_log2} outside 1..={MAX_LOG2}"
        )));
    }
    Ok(())
}

/// One recursion level: each entry spawns its (minus, plus) children.
fn evolve<T: Copy>(seed: T, n_log2: u32, minus: impl Fn(T) -> T, plus: impl Fn(T) -> T) -> Vec<T> {
    let mut cur = vec![seed];
    for _ in 0..n_log2 {
        cur = cur.iter().flat_map(|&v| [minus(v), plus(v)]).collect();
    }
    cur
}

/// Bhattacharyya parameters of all `2^n_log2` virtual channels of a BEC(eps).
/// Smaller is more reliable.
pub fn bhattacharyya_evolve(eps: f64, n_log2: u32) -> Result<Vec<f64>> {
    check_unit("erasure probability", eps)?;
    check_log2(n_log2)?;
    Ok(evolve(eps, n_log2, |z| 2.0 * z - z * z, |z| z * z))
}

/// Symmetric capacities of all virtual channels of a BEC with the given
/// capacity. The mean of the output equals the input.
pub fn capacity_evolve(capacity: f64, n_log2: u32) -> Result<Vec<f64>> {
    check_unit("capacity", capacity)?;
    check_log2(n_log2)?;
    Ok(evolve(capacity, n_log2, |i| i * i, |i| 2.0 * i - i * i))
}

/// Virtual channel indices, most reliable first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReliabilityOrder {
    n_log2: u32,
    order: Vec<usize>,
}

/// Sorts indices by ascending Bhattacharyya parameter; equal values keep
/// the lower index first.
pub fn build_reliability_order(z: &[f64]) -> Result<ReliabilityOrder> {
    let n_log2 = crate::bits::log2_exact(z.len())?;
    check_log2(n_log2)?;
    if let Some(i) = z.iter().position(|v| !v.is_finite()) {
        return Err(Error::Config(format!("non-finite reliability at index {i}")));
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
    Ok(ReliabilityOrder { n_log2, order })
}

/// ln Z and ln(1 - Z) carried together so neither tail rounds to 0 or 1.
#[derive(Clone, Copy)]
struct LogBhatt {
    ln_z: f64,
    ln_w: f64,
}

impl LogBhatt {
    fn cmp_z(&self, other: &Self) -> Ordering {
        let half = -std::f64::consts::LN_2;
        match (self.ln_z < half, other.ln_z < half) {
            (true, true) => self.ln_z.total_cmp(&other.ln_z),
            (false, false) => other.ln_w.total_cmp(&self.ln_w),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
        }
    }
}

impl ReliabilityOrder {
    /// Order for a BEC design channel, computed in the log domain so that
    /// long codes do not collapse distinct parameters into ties at 0 or 1.
    pub fn from_bec(channel: DesignChannel, n_log2: u32) -> Result<Self> {
        check_log2(n_log2)?;
        let eps = channel.erasure_prob();
        if eps == 0.0 || eps == 1.0 {
            return Ok(Self { n_log2, order: (0..1usize << n_log2).collect() });
        }
        let seed = LogBhatt { ln_z: eps.ln(), ln_w: (-eps).ln_1p() };
        let params = evolve(
            seed,
            n_log2,
            |p| LogBhatt { ln_z: p.ln_z + p.ln_w.exp().ln_1p(), ln_w: 2.0 * p.ln_w },
            |p| LogBhatt { ln_z: 2.0 * p.ln_z, ln_w: p.ln_w + p.ln_z.exp().ln_1p() },
        );
        let mut order: Vec<usize> = (0..params.len()).collect();
        order.sort_by(|&a, &b| params[a].cmp_z(&params[b]));
        Ok(Self { n_log2, order })
    }

    /// Validates an externally supplied permutation.
    pub fn from_permutation(order: Vec<usize>) -> Result<Self> {
        let n_log2 = crate::bits::log2_exact(order.len())?;
        check_log2(n_log2)?;
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Config(format!("order is not a permutation (index {i})")));
            }
        }
        Ok(Self { n_log2, order })
    }

    pub fn n_log2(&self) -> u32 {
        self.n_log2
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// 1-based presentation, as reliability tables are usually printed.
    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|i| i + 1).collect()
    }
}

/// Code length, information set and frozen set derived from one
/// reliability order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    n_log2: u32,
    k: usize,
    order: ReliabilityOrder,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    is_info: Vec<bool>,
}

/// Takes the `k` most reliable indices as the information set.
pub fn make_code_spec(order: &ReliabilityOrder, k: usize) -> Result<CodeSpec> {
    let n = order.len();
    if !(1..=n).contains(&k) {
        return Err(Error::Config(format!("k = {k} outside 1..={n}")));
    }
    let mut is_info = vec![false; n];
    for &i in &order.as_slice()[..k] {
        is_info[i] = true;
    }
    let info_set = (0..n).filter(|&i| is_info[i]).collect();
    let frozen_set = (0..n).filter(|&i| !is_info[i]).collect();
    Ok(CodeSpec {
        n_log2: order.n_log2(),
        k,
        order: order.clone(),
        info_set,
        frozen_set,
        is_info,
    })
}

impl CodeSpec {
    /// BEC construction at the default design erasure probability.
    pub fn bec(n_log2: u32, k: usize) -> Result<Self> {
        make_code_spec(&ReliabilityOrder::from_bec(DesignChannel::default(), n_log2)?, k)
    }

    pub fn n(&self) -> usize {
        1 << self.n_log2
    }

    pub fn n_log2(&self) -> u32 {
        self.n_log2
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Information positions in ascending index order.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen positions in ascending index order.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn order(&self) -> &ReliabilityOrder {
        &self.order
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.is_info[i]
    }

    pub fn info_mask(&self) -> &[bool] {
        &self.is_info
    }

    /// Frozen positions in descending reliability: the order in which
    /// parity is released for incremental redundancy.
    pub fn parity_schedule(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.as_slice()[self.k..].iter().copied()
    }

    /// True when every superset (bitwise) of an info index is also an info
    /// index. Required for `G_AA` to be its own inverse.
    pub fn is_domination_closed(&self) -> bool {
        let n = self.n();
        self.info_set.iter().all(|&i| {
            (0..self.n_log2)
                .map(|b| i | (1 << b))
                .all(|j| j >= n || self.is_info[j])
        })
    }
}
