//! Shared data types and the prefix-max primitives every max statistic uses.
//!
//! A max statistic over a growing index set is always evaluated through
//! [`running_max_abs`], so the monotonicity `max_{i<=k} <= max_{i<=k+1}` is a
//! property of one function rather than of each caller.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular panel of `n` time observations on `k` series.
///
/// Stored series-major: `values[i]` is the full time path of series `i`,
/// oldest observation first.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    n: usize,
    k: usize,
    values: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl PanelData {
    pub fn new(labels: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let k = columns.len();
        if k == 0 {
            return Err(Error::InvalidPanel("panel has no series".into()));
        }
        if labels.len() != k {
            return Err(Error::InvalidPanel(format!(
                "{} labels for {} series",
                labels.len(),
                k
            )));
        }
        let n = columns[0].len();
        if n < 2 {
            return Err(Error::InvalidPanel(format!("need n >= 2, got {n}")));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidPanel(format!(
                    "series {i} has length {}, expected {n}",
                    col.len()
                )));
            }
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidPanel(format!(
                    "non-finite value in series {i} at t={t}"
                )));
            }
        }
        let mut seen = HashSet::with_capacity(k);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidPanel(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            n,
            k,
            values: columns,
            labels,
        })
    }

    /// Panel with default labels `y1..yk`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (1..=columns.len()).map(|i| format!("y{i}")).collect();
        Self::new(labels, columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Copy with every observation multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let cols = self
            .values
            .iter()
            .map(|s| s.iter().map(|v| v * c).collect())
            .collect();
        Self::new(self.labels.clone(), cols)
    }
}

/// Growth form of the width sequence `L_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LagForm {
    /// `max(1, floor(c * n^delta))`
    Power { c: f64, delta: f64 },
    /// `max(1, floor(c * ln n))`
    Log { c: f64 },
    /// `round(c)`, independent of `n`
    Fixed { c: f64 },
}

/// Rule mapping a sample size `n` to the number of coordinates `L_n` that
/// enter a max statistic. Only existence of a valid `L_n -> inf` is known,
/// so the rule is configuration; the default grows slowly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LagRule {
    pub form: LagForm,
    pub cap: Option<usize>,
}

impl Default for LagRule {
    fn default() -> Self {
        Self {
            form: LagForm::Power {
                c: 1.0,
                delta: 0.25,
            },
            cap: None,
        }
    }
}

impl LagRule {
    pub fn power(c: f64, delta: f64) -> Result<Self> {
        Self::validated(LagForm::Power { c, delta }, None)
    }

    pub fn log(c: f64) -> Result<Self> {
        Self::validated(LagForm::Log { c }, None)
    }

    pub fn fixed(l: usize) -> Result<Self> {
        Self::validated(LagForm::Fixed { c: l as f64 }, None)
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidArgument("lag cap must be positive".into()));
        }
        self.cap = Some(cap);
        Ok(self)
    }

    fn validated(form: LagForm, cap: Option<usize>) -> Result<Self> {
        let c = match form {
            LagForm::Power { c, delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "power rule exponent must lie in (0,1), got {delta}"
                    )));
                }
                c
            }
            LagForm::Log { c } | LagForm::Fixed { c } => c,
        };
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lag rule scale must be positive, got {c}"
            )));
        }
        if cap == Some(0) {
            return Err(Error::InvalidArgument("lag cap must be positive".into()));
        }
        Ok(Self { form, cap })
    }
}

/// Evaluate `L_n` for sample size `n` (`n >= 2`).
///
/// The result is at least 1 and at most `min(cap, n - 1)`.
pub fn lag_sequence(rule: &LagRule, n: usize) -> usize {
    let n = n.max(2);
    let raw = match rule.form {
        LagForm::Power { c, delta } => (c * (n as f64).powf(delta)).floor(),
        LagForm::Log { c } => (c * (n as f64).ln()).floor(),
        LagForm::Fixed { c } => c.round(),
    };
    let raw = if raw >= 1.0 { raw as usize } else { 1 };
    let upper = rule.cap.map_or(n - 1, |cap| cap.min(n - 1));
    raw.min(upper).max(1)
}

impl FromStr for LagRule {
    type Err = Error;

    /// Grammar: `form:c[:delta][/cap]`, e.g. `power:1:0.25`, `log:2`,
    /// `fixed:5`, `power:1:0.25/8`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse lag rule {s:?}"));
        let (body, cap) = match s.split_once('/') {
            Some((b, c)) => (b, Some(c.trim().parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let parts: Vec<&str> = body.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())
        };
        let form = match (parts[0].trim(), parts.len()) {
            ("power", 2) => LagForm::Power {
                c: num(1)?,
                delta: 0.25,
            },
            ("power", 3) => LagForm::Power {
                c: num(1)?,
                delta: num(2)?,
            },
            ("log", 2) => LagForm::Log { c: num(1)? },
            ("fixed", 2) => LagForm::Fixed { c: num(1)? },
            _ => return Err(bad()),
        };
        Self::validated(form, cap)
    }
}

impl TryFrom<String> for LagRule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for LagRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.form {
            LagForm::Power { c, delta } => write!(f, "power:{c}:{delta}")?,
            LagForm::Log { c } => write!(f, "log:{c}")?,
            LagForm::Fixed { c } => write!(f, "fixed:{c}")?,
        }
        if let Some(cap) = self.cap {
            write!(f, "/{cap}")?;
        }
        Ok(())
    }
}

impl From<LagRule> for String {
    fn from(r: LagRule) -> Self {
        r.to_string()
    }
}

/// Master seed from which every random stream is derived.
///
/// `stream(i)` hashes `(master, i)`, so replication `i` sees the same draws
/// no matter which thread runs it or in what order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(master: u64) -> Self {
        Self(master)
    }

    /// Child seed for sub-stream `index`.
    pub fn stream(self, index: u64) -> Self {
        Self(splitmix64(
            self.0 ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA) ^ 0x6A09_E667_F3BC_C909),
        ))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// `out[j] = max_{i<=j} |values[i]|`.
pub fn running_max_abs(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    check_finite(values)?;
    let mut acc = 0.0_f64;
    Ok(values
        .iter()
        .map(|v| {
            acc = acc.max(v.abs());
            acc
        })
        .collect())
}

/// `max_i |values[i]|`.
pub fn max_abs(values: &[f64]) -> Result<f64> {
    running_max_abs(values).map(|r| r[r.len() - 1])
}

/// `1 - exp(-max_i |values[i]|)`, a bounded monotone image of the max used
/// as a convergence diagnostic. Lies in `[0, 1)` for finite input.
pub fn bounded_max_transform(values: &[f64]) -> Result<f64> {
    let m = max_abs(values)?;
    Ok(-(-m).exp_m1())
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}
