use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A code rate `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rate {
    num: u32,
    den: u32,
}

impl Rate {
    pub const THREE_QUARTERS: Rate = Rate { num: 3, den: 4 };
    pub const TWO_THIRDS: Rate = Rate { num: 2, den: 3 };
    pub const HALF: Rate = Rate { num: 1, den: 2 };
    pub const QUARTER: Rate = Rate { num: 1, den: 4 };
    pub const EIGHTH: Rate = Rate { num: 1, den: 8 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || num > den {
            return Err(Error::Config(format!("rate {num}/{den} outside (0, 1]")));
        }
        let (mut a, mut b) = (num, den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        Ok(Self { num: num / a, den: den / a })
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// Coded bits needed to carry `k` info bits: `round(k / rate)`, halves
    /// rounded up.
    pub fn budget(&self, k: usize) -> usize {
        let (num, den) = (self.num as usize, self.den as usize);
        (2 * k * den + num) / (2 * num)
    }

    /// Index into [`RATE_TABLE`], the 2-bit header code.
    pub fn code(&self) -> Option<u8> {
        RATE_TABLE.iter().position(|r| r == self).map(|i| i as u8)
    }

    pub fn from_code(code: u8) -> Result<Self> {
        RATE_TABLE
            .get(code as usize)
            .copied()
            .ok_or_else(|| Error::Malformed(format!("rate code {code} out of range")))
    }
}

/// Second-stage rates selectable by the gateway, in header-code order.
pub const RATE_TABLE: [Rate; 4] = [Rate::TWO_THIRDS, Rate::HALF, Rate::QUARTER, Rate::EIGHTH];

/// Lower FBER edge of each [`RATE_TABLE`] entry; the first entry also
/// absorbs FBER below its edge.
pub const FBER_EDGES: [f64; 4] = [0.1, 0.3, 0.5, 0.7];

/// Maps a frozen-bit error ratio to the rate to request.
pub fn estimate_rate(fber: f64) -> Rate {
    if fber.is_nan() {
        return Rate::EIGHTH;
    }
    let idx = FBER_EDGES.iter().rposition(|&edge| fber >= edge).unwrap_or(0);
    RATE_TABLE[idx]
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Config(format!("rate {s:?} is not of the form a/b")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u32>()
                .map_err(|e| Error::Config(format!("rate {s:?}: {e}")))
        };
        Rate::new(parse(n)?, parse(d)?)
    }
}

impl From<Rate> for String {
    fn from(r: Rate) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Rate {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
