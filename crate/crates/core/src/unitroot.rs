//! Max-type unit root test over a panel of AR(1) series.
//!
//! Under the null every series has a unit root. The statistic is the largest
//! absolute normalized bias `n |phi_hat(i) - 1|` over the first `L_n` series,
//! optionally with the serial-correlation correction that makes each
//! coordinate's limit the Dickey-Fuller functional
//! `1/2 (W(1)^2 - 1) / int_0^1 W^2`. Critical values come from simulating
//! the max of independent copies of that functional.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{lag_sequence, running_max_abs, LagRule, PanelData, RngSeed};
use crate::error::{Error, Result};
use crate::estimate::{default_bandwidth, ols_ar1_no_intercept, variance_pair_with, LrvKernel};

/// Per-series statistics and their running max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelStatistic {
    pub per_series: Vec<f64>,
    pub max_stat: f64,
}

fn check_k(panel: &PanelData, k: usize) -> Result<()> {
    if k == 0 || k > panel.k() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            panel.k()
        )));
    }
    Ok(())
}

fn collect_stat(per_series: Vec<f64>) -> Result<PanelStatistic> {
    let max_stat = *running_max_abs(&per_series)?.last().expect("nonempty");
    Ok(PanelStatistic {
        per_series,
        max_stat,
    })
}

/// `n (phi_hat - 1)` for one series.
pub fn normalized_bias(series: &[f64]) -> Result<f64> {
    let phi = ols_ar1_no_intercept(series)?;
    Ok(series.len() as f64 * (phi - 1.0))
}

/// Serial-correlation corrected `n (phi_hat - 1)`:
/// `n (phi_hat - 1) - 1/2 (s2_lr - s2_eps) / (n^{-2} sum y_{t-1}^2)` where
/// both variances are estimated on the AR(1) residuals with the default
/// [`LrvKernel`].
pub fn adjusted_bias(series: &[f64], bandwidth: usize) -> Result<f64> {
    adjusted_bias_with(series, bandwidth, LrvKernel::default())
}

pub fn adjusted_bias_with(series: &[f64], bandwidth: usize, kernel: LrvKernel) -> Result<f64> {
    let phi = ols_ar1_no_intercept(series)?;
    let n = series.len() as f64;
    let resid: Vec<f64> = series.windows(2).map(|w| w[1] - phi * w[0]).collect();
    let vp = variance_pair_with(&resid, bandwidth, kernel)?;
    let sxx: f64 = series[..series.len() - 1].iter().map(|y| y * y).sum();
    let correction = 0.5 * (vp.sigma2_hat - vp.sigma2_eps_hat) / (sxx / (n * n));
    Ok(n * (phi - 1.0) - correction)
}

/// Raw statistic `T_n(k) = n max_{i<=k} |phi_hat(i) - 1|`.
pub fn t_stat_raw(panel: &PanelData, k: usize) -> Result<PanelStatistic> {
    check_k(panel, k)?;
    let per = (0..k)
        .map(|i| normalized_bias(panel.series(i)))
        .collect::<Result<Vec<_>>>()?;
    collect_stat(per)
}

/// Corrected statistic `max_{i<=k} |T~_{n,i}|` with the default [`LrvKernel`].
pub fn t_stat_adjusted(panel: &PanelData, k: usize, bandwidth: usize) -> Result<PanelStatistic> {
    t_stat_adjusted_with(panel, k, bandwidth, LrvKernel::default())
}

pub fn t_stat_adjusted_with(
    panel: &PanelData,
    k: usize,
    bandwidth: usize,
    kernel: LrvKernel,
) -> Result<PanelStatistic> {
    check_k(panel, k)?;
    let per = (0..k)
        .map(|i| adjusted_bias_with(panel.series(i), bandwidth, kernel))
        .collect::<Result<Vec<_>>>()?;
    collect_stat(per)
}

/// `1/2 (W(1)^2 - ratio) / int_0^1 W^2` for the random walk built from
/// `increments` (`W(j/m) = S_j / sqrt(m)`, `int W^2 ~ m^{-2} sum_j S_j^2`).
pub fn wiener_functional(increments: &[f64], ratio: f64) -> f64 {
    functional_from(increments.iter().copied(), increments.len(), ratio)
}

fn functional_from(increments: impl Iterator<Item = f64>, m: usize, ratio: f64) -> f64 {
    let mut s = 0.0;
    let mut ss = 0.0;
    for z in increments {
        s += z;
        ss += s * s;
    }
    let mf = m as f64;
    let w1_sq = s * s / mf;
    let int_w2 = ss / (mf * mf);
    0.5 * (w1_sq - ratio) / int_w2
}

fn draw_functional(seed: RngSeed, m_steps: usize, ratio: f64) -> f64 {
    let mut rng = seed.rng();
    let incs = (0..m_steps).map(|_| StandardNormal.sample(&mut rng));
    functional_from(incs, m_steps, ratio)
}

fn validate_law_args(m_steps: usize, reps: usize, ratio: f64) -> Result<()> {
    if m_steps < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 Wiener steps, got {m_steps}"
        )));
    }
    if reps == 0 {
        return Err(Error::InvalidArgument(
            "need at least one replication".into(),
        ));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "variance ratio must be positive, got {ratio}"
        )));
    }
    Ok(())
}

/// Simulated draws of `max_{i<=k} |T(i)|` for independent `T(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitLawSample {
    pub k: usize,
    pub m_steps: usize,
    pub reps: usize,
    pub ratio: f64,
    /// Sorted ascending.
    pub draws: Vec<f64>,
}

impl LimitLawSample {
    /// Index into the sorted draws of the `(1 - level)` critical value.
    ///
    /// With `c = ceil(level * reps)`, the critical value is the `c`-th
    /// largest draw, so `stat > cv` exactly when fewer than `c` draws are
    /// `>= stat`.
    fn critical_index(&self, level: f64) -> usize {
        let c = ((level * self.reps as f64).ceil() as usize).clamp(1, self.reps);
        self.reps - c
    }

    pub fn critical_value(&self, level: f64) -> f64 {
        self.draws[self.critical_index(level)]
    }

    /// Fraction of draws `>= stat`.
    pub fn p_value(&self, stat: f64) -> f64 {
        let below = self.draws.partition_point(|d| *d < stat);
        (self.reps - below) as f64 / self.reps as f64
    }

    /// Empirical quantile by linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> f64 {
        crate::harness::quantile_sorted(&self.draws, q)
    }
}

/// Draw `reps` realizations of `max_{i<=k} |1/2 (W_i(1)^2 - ratio) / int W_i^2|`
/// over `k` independent discretized Wiener processes.
pub fn simulate_limit_law(
    k: usize,
    m_steps: usize,
    reps: usize,
    seed: RngSeed,
    ratio: f64,
) -> Result<LimitLawSample> {
    validate_law_args(m_steps, reps, ratio)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let mut draws: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let rs = seed.stream(r);
            (0..k as u64)
                .map(|i| draw_functional(rs.stream(i), m_steps, ratio).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    Ok(LimitLawSample {
        k,
        m_steps,
        reps,
        ratio,
        draws,
    })
}

/// Signed single-coordinate draws `1/2 (W(1)^2 - ratio) / int W^2`, in
/// replication order.
pub fn simulate_signed_limit(
    m_steps: usize,
    reps: usize,
    seed: RngSeed,
    ratio: f64,
) -> Result<Vec<f64>> {
    validate_law_args(m_steps, reps, ratio)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| draw_functional(seed.stream(r).stream(0), m_steps, ratio))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnitRootMode {
    /// Corrected statistic with a pivotal limit.
    #[default]
    Adjusted,
    /// `n (phi_hat - 1)`; critical values use the supplied variance ratio.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnitRootConfig {
    pub rule: LagRule,
    pub level: f64,
    /// Limit-law replications.
    pub reps: usize,
    pub m_steps: usize,
    /// `None` selects [`default_bandwidth`].
    pub bandwidth: Option<usize>,
    /// Long-run variance estimator for the correction.
    pub kernel: LrvKernel,
    pub mode: UnitRootMode,
    /// `sigma_eps^2 / sigma^2` used by the raw-mode limit law.
    pub ratio: f64,
}

impl Default for UnitRootConfig {
    fn default() -> Self {
        Self {
            rule: LagRule::default(),
            level: 0.05,
            reps: 10_000,
            m_steps: 10_000,
            bandwidth: None,
            kernel: LrvKernel::default(),
            mode: UnitRootMode::Adjusted,
            ratio: 1.0,
        }
    }
}

impl UnitRootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "level must lie in (0,1), got {}",
                self.level
            )));
        }
        validate_law_args(self.m_steps, self.reps, self.ratio)
    }

    fn law_ratio(&self) -> f64 {
        match self.mode {
            UnitRootMode::Adjusted => 1.0,
            UnitRootMode::Raw => self.ratio,
        }
    }

    /// Width `L_n` for a panel, checked against the available series.
    pub fn width(&self, panel: &PanelData) -> Result<usize> {
        let l = lag_sequence(&self.rule, panel.n());
        if l > panel.k() {
            return Err(Error::LagRuleExceedsWidth);
        }
        Ok(l)
    }

    /// Limit-law sample matching this configuration at width `l`.
    pub fn limit_law(&self, l: usize, seed: RngSeed) -> Result<LimitLawSample> {
        simulate_limit_law(l, self.m_steps, self.reps, seed, self.law_ratio())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitRootResult {
    /// Statistic for every panel series (all `k`, not only the first `L`).
    pub per_series: Vec<f64>,
    pub max_stat: f64,
    pub l_used: usize,
    pub bandwidth: usize,
    pub kernel: LrvKernel,
    pub critical_value: f64,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
    pub mode: UnitRootMode,
}

/// Run the test against a precomputed limit-law sample (whose `k` must be
/// the width the rule yields for this panel).
pub fn unit_root_test_with_law(
    panel: &PanelData,
    cfg: &UnitRootConfig,
    law: &LimitLawSample,
) -> Result<UnitRootResult> {
    cfg.validate()?;
    let l = cfg.width(panel)?;
    if law.k != l {
        return Err(Error::DimensionMismatch(format!(
            "limit law simulated for k={}, panel width L={l}",
            law.k
        )));
    }
    let bandwidth = cfg
        .bandwidth
        .unwrap_or_else(|| default_bandwidth(panel.n()));
    let stat = match cfg.mode {
        UnitRootMode::Adjusted => t_stat_adjusted_with(panel, panel.k(), bandwidth, cfg.kernel)?,
        UnitRootMode::Raw => t_stat_raw(panel, panel.k())?,
    };
    let max_stat = running_max_abs(&stat.per_series)?[l - 1];
    let critical_value = law.critical_value(cfg.level);
    Ok(UnitRootResult {
        per_series: stat.per_series,
        max_stat,
        l_used: l,
        bandwidth,
        kernel: cfg.kernel,
        critical_value,
        p_value: law.p_value(max_stat),
        level: cfg.level,
        reject: max_stat > critical_value,
        mode: cfg.mode,
    })
}

/// High-dimensional unit root test: every series has a unit root under H0.
pub fn unit_root_test(
    panel: &PanelData,
    cfg: &UnitRootConfig,
    seed: RngSeed,
) -> Result<UnitRootResult> {
    cfg.validate()?;
    let l = cfg.width(panel)?;
    // fail on degenerate data before paying for the simulation
    match cfg.mode {
        UnitRootMode::Adjusted => {
            let bw = cfg
                .bandwidth
                .unwrap_or_else(|| default_bandwidth(panel.n()));
            t_stat_adjusted_with(panel, panel.k(), bw, cfg.kernel)?;
        }
        UnitRootMode::Raw => {
            t_stat_raw(panel, panel.k())?;
        }
    }
    let law = cfg.limit_law(l, seed)?;
    unit_root_test_with_law(panel, cfg, &law)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_stat_on_doubling_series() {
        let s = vec![1.0, 2.0, 4.0, 8.0];
        let p = PanelData::from_columns(vec![s.clone(), s]).unwrap();
        let r = t_stat_raw(&p, 2).unwrap();
        assert_eq!(r.per_series, vec![4.0, 4.0]);
        assert_eq!(r.max_stat, 4.0);
        assert!(t_stat_raw(&p, 3).is_err());
        assert!(t_stat_raw(&p, 0).is_err());
    }

    #[test]
    fn zero_panel_is_degenerate() {
        let p = PanelData::from_columns(vec![vec![0.0; 10]; 2]).unwrap();
        assert_eq!(t_stat_raw(&p, 2), Err(Error::DegenerateRegressor));
        assert_eq!(t_stat_adjusted(&p, 2, 1), Err(Error::DegenerateRegressor));
        let cfg = UnitRootConfig {
            reps: 10,
            m_steps: 100,
            ..Default::default()
        };
        assert_eq!(
            unit_root_test(&p, &cfg, RngSeed(0)).unwrap_err(),
            Error::DegenerateRegressor
        );
    }

    #[test]
    fn bandwidth_zero_adjusted_equals_raw() {
        let s = vec![0.3, 1.1, 0.4, 1.9, 2.2, 1.7, 2.8, 3.1];
        let p = PanelData::from_columns(vec![s]).unwrap();
        assert_eq!(
            t_stat_adjusted(&p, 1, 0).unwrap(),
            t_stat_raw(&p, 1).unwrap()
        );
    }

    #[test]
    fn functional_zero_numerator() {
        let mut inc = vec![0.0; 100];
        inc[0] = 10.0;
        assert_eq!(wiener_functional(&inc, 1.0), 0.0);
    }

    #[test]
    fn functional_hand_computed() {
        // m = 4 increments 1, 1, -1, 0: S = 1, 2, 1, 1
        let v = wiener_functional(&[1.0, 1.0, -1.0, 0.0], 1.0);
        // W(1)^2 = 1/4, int = (1 + 4 + 1 + 1)/16
        let expect = 0.5 * (0.25 - 1.0) / (7.0 / 16.0);
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn limit_law_is_deterministic_and_sorted() {
        let a = simulate_limit_law(2, 100, 200, RngSeed(3), 1.0).unwrap();
        let b = simulate_limit_law(2, 100, 200, RngSeed(3), 1.0).unwrap();
        assert_eq!(a, b);
        assert!(a.draws.windows(2).all(|w| w[0] <= w[1]));
        assert!(simulate_limit_law(2, 99, 10, RngSeed(3), 1.0).is_err());
        assert!(simulate_limit_law(2, 100, 0, RngSeed(3), 1.0).is_err());
        assert!(simulate_limit_law(2, 100, 10, RngSeed(3), 0.0).is_err());
    }

    #[test]
    fn limit_law_monotone_in_k() {
        // coordinate i of every replication is shared across k, so the max
        // is pathwise nondecreasing in k
        let q = |k| {
            simulate_limit_law(k, 200, 2_000, RngSeed(11), 1.0)
                .unwrap()
                .quantile(0.95)
        };
        let (q1, q2, q4) = (q(1), q(2), q(4));
        assert!(q1 <= q2 && q2 <= q4, "{q1} {q2} {q4}");
    }

    #[test]
    fn critical_value_and_p_value_agree() {
        let law = LimitLawSample {
            k: 1,
            m_steps: 100,
            reps: 20,
            ratio: 1.0,
            draws: (1..=20).map(f64::from).collect(),
        };
        // ceil(0.05 * 20) = 1: cv is the largest draw
        assert_eq!(law.critical_value(0.05), 20.0);
        assert_eq!(law.critical_value(0.10), 19.0);
        assert_eq!(law.p_value(20.0), 0.05);
        assert_eq!(law.p_value(20.5), 0.0);
        assert_eq!(law.p_value(0.0), 1.0);
        for s in [18.5, 19.0, 19.5, 20.0, 21.0] {
            let reject = s > law.critical_value(0.1);
            assert_eq!(reject, law.p_value(s) < 0.1, "stat {s}");
        }
    }

    #[test]
    fn lag_rule_exceeding_panel() {
        let p = PanelData::from_columns(vec![vec![1.0, 2.0, 1.5, 2.5, 3.0]; 1]).unwrap();
        let cfg = UnitRootConfig {
            rule: LagRule::fixed(2).unwrap(),
            ..Default::default()
        };
        assert_eq!(cfg.width(&p), Err(Error::LagRuleExceedsWidth));
    }
}
