//! Monte Carlo experiments checking the max-coupling results at desk scale.
//!
//! Each replication draws from its own seed stream
//! `seed.stream(cell).stream(grid index).stream(rep)`, and results are
//! gathered in replication order, so reports do not depend on the thread
//! schedule.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{bounded_max_transform, lag_sequence, running_max_abs, LagRule, RngSeed};
use crate::dgp::{simulate_ar1_panel, simulate_arp, ArpSpec, PanelSpec};
use crate::error::{Error, Result};
use crate::estimate::default_bandwidth;
use crate::unitroot::{
    adjusted_bias, normalized_bias, unit_root_test_with_law, LimitLawSample, UnitRootConfig,
};
use crate::whitenoise::{expansion_coupling, white_noise_test, OracleMoments, WnConfig};

/// Linear interpolation between order statistics (type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Location and spread of one metric over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub median: f64,
    pub mean: f64,
    pub q05: f64,
    pub q95: f64,
    /// Standard error of the mean.
    pub se: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        // summed in replication order for reproducibility
        let mean = values.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some(Self {
            count: v.len(),
            median: quantile_sorted(&v, 0.5),
            mean,
            q05: quantile_sorted(&v, 0.05),
            q95: quantile_sorted(&v, 0.95),
            se: (var / n).sqrt(),
        })
    }

    /// Summary of 0/1 outcomes with the binomial standard error.
    pub fn of_rate(hits: &[bool]) -> Option<Self> {
        let values: Vec<f64> = hits.iter().map(|h| f64::from(u8::from(*h))).collect();
        let mut s = Self::of(&values)?;
        let p = s.mean;
        s.se = (p * (1.0 - p) / s.count as f64).sqrt();
        Some(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow {
    /// Index of the DGP cell within the experiment.
    pub cell: usize,
    pub n: usize,
    /// Width used; `None` when no width qualifies.
    pub l_n: Option<usize>,
    pub metric: String,
    /// Replications that produced a value.
    pub reps: usize,
    pub failures: usize,
    pub median: f64,
    pub mean: f64,
    pub q05: f64,
    pub q95: f64,
    pub se: f64,
    /// First failure message, when any replication failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub experiment: String,
    pub seed: u64,
    pub rows: Vec<McRow>,
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

impl McReport {
    /// Rows matching `metric` in table order.
    pub fn metric(&self, metric: &str) -> Vec<&McRow> {
        self.rows.iter().filter(|r| r.metric == metric).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "experiment,seed,cell,n,L_n,metric,reps,failures,median,mean,q05,q95,se,error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.experiment,
                self.seed,
                r.cell,
                r.n,
                r.l_n.map_or_else(|| "none".to_string(), |l| l.to_string()),
                r.metric,
                r.reps,
                r.failures,
                fmt_f64(r.median),
                fmt_f64(r.mean),
                fmt_f64(r.q05),
                fmt_f64(r.q95),
                fmt_f64(r.se),
                r.error.as_deref().unwrap_or("").replace(',', ";"),
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["schema_version"] = 1.into();
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Build one metric row from per-replication values.
fn metric_row(
    cell: usize,
    n: usize,
    l_n: Option<usize>,
    metric: &str,
    values: &[f64],
    failures: usize,
    error: Option<String>,
) -> McRow {
    let nan = f64::NAN;
    let s = Summary::of(values);
    McRow {
        cell,
        n,
        l_n,
        metric: metric.to_string(),
        reps: values.len(),
        failures,
        median: s.map_or(nan, |s| s.median),
        mean: s.map_or(nan, |s| s.mean),
        q05: s.map_or(nan, |s| s.q05),
        q95: s.map_or(nan, |s| s.q95),
        se: s.map_or(nan, |s| s.se),
        error,
    }
}

/// Run `reps` replications in parallel, keeping replication order.
fn replicate<T: Send>(
    reps: usize,
    seed: RngSeed,
    f: impl Fn(RngSeed) -> Result<T> + Sync,
) -> (Vec<T>, usize, Option<String>) {
    let results: Vec<Result<T>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| f(seed.stream(r)))
        .collect();
    let mut ok = Vec::with_capacity(reps);
    let mut failures = 0;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failures += 1;
                first_err.get_or_insert_with(|| e.to_string());
            }
        }
    }
    (ok, failures, first_err)
}

/// A simulated data source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DgpSpec {
    /// AR(1) panel; its `n` is replaced by each grid value.
    Panel(PanelSpec),
    /// Single AR(p) series.
    Arp(ArpSpec),
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DgpSpec::Panel(p) => PanelSpec {
                n: p.n.max(2),
                ..p.clone()
            }
            .validate(),
            DgpSpec::Arp(a) => a.validate(),
        }
    }

    fn panel_at(&self, n: usize) -> Result<PanelSpec> {
        match self {
            DgpSpec::Panel(p) => Ok(PanelSpec { n, ..p.clone() }),
            DgpSpec::Arp(_) => Err(Error::Config("experiment needs a panel DGP".into())),
        }
    }

    fn arp(&self) -> Result<&ArpSpec> {
        match self {
            DgpSpec::Arp(a) => Ok(a),
            DgpSpec::Panel(_) => Err(Error::Config("experiment needs an AR(p) DGP".into())),
        }
    }
}

/// Pairs `(X_n(i), Y_n(i))` whose maxima are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSelector {
    /// Sample means of the panel series against their limit 0.
    #[default]
    MeansVsZero,
    /// Feasible residual correlations against the oracle expansion.
    FeasibleVsOracle,
    /// `n (phi_hat - 1)` against its serial-correlation corrected version.
    RawVsAdjusted,
}

impl std::fmt::Display for CouplingSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MeansVsZero => "means_vs_zero",
            Self::FeasibleVsOracle => "feasible_vs_oracle",
            Self::RawVsAdjusted => "raw_vs_adjusted",
        })
    }
}

/// One replication of a coupled pair over the first `l` coordinates.
struct CoupledDraw {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl CoupledDraw {
    fn metrics(&self) -> Result<[f64; 5]> {
        let mx = *running_max_abs(&self.x)?.last().expect("nonempty");
        let my = *running_max_abs(&self.y)?.last().expect("nonempty");
        let diff: Vec<f64> = self.x.iter().zip(&self.y).map(|(a, b)| a - b).collect();
        let md = *running_max_abs(&diff)?.last().expect("nonempty");
        Ok([mx, my, (mx - my).abs(), md, bounded_max_transform(&diff)?])
    }
}

const COUPLING_METRICS: [&str; 5] = ["max_abs_x", "max_abs_y", "gap", "max_diff", "a_kn"];

fn coupled_draw(
    dgp: &DgpSpec,
    selector: CouplingSelector,
    n: usize,
    l: usize,
    seed: RngSeed,
) -> Result<CoupledDraw> {
    match selector {
        CouplingSelector::MeansVsZero => {
            let panel = simulate_ar1_panel(&dgp.panel_at(n)?, seed)?;
            let x = (0..l)
                .map(|i| panel.series(i).iter().sum::<f64>() / n as f64)
                .collect();
            Ok(CoupledDraw { x, y: vec![0.0; l] })
        }
        CouplingSelector::RawVsAdjusted => {
            let panel = simulate_ar1_panel(&dgp.panel_at(n)?, seed)?;
            let bw = default_bandwidth(n);
            let x = (0..l)
                .map(|i| normalized_bias(panel.series(i)))
                .collect::<Result<_>>()?;
            let y = (0..l)
                .map(|i| adjusted_bias(panel.series(i), bw))
                .collect::<Result<_>>()?;
            Ok(CoupledDraw { x, y })
        }
        CouplingSelector::FeasibleVsOracle => {
            let spec = dgp.arp()?;
            let oracle = OracleMoments::for_arp(spec, l)?;
            let y = simulate_arp(spec, n, seed)?;
            let c = expansion_coupling(&y, spec.order(), l, &oracle)?;
            Ok(CoupledDraw {
                x: c.feasible,
                y: c.oracle,
            })
        }
    }
}

fn width_for(dgp: &DgpSpec, rule: &LagRule, n: usize) -> Result<usize> {
    let l = lag_sequence(rule, n);
    if let DgpSpec::Panel(p) = dgp {
        if l > p.k {
            return Err(Error::LagRuleExceedsWidth);
        }
    }
    Ok(l)
}

fn check_grid(n_grid: &[usize], reps: usize, min_reps: usize) -> Result<()> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "n_grid must be nonempty and increasing".into(),
        ));
    }
    if reps < min_reps {
        return Err(Error::Config(format!(
            "need at least {min_reps} replications, got {reps}"
        )));
    }
    Ok(())
}

/// Distribution over replications of `max|X|`, `max|Y|`, the coupling gap
/// `|max|X| - max|Y||`, its bound `max|X - Y|`, and the bounded transform
/// `1 - exp(-max|X - Y|)`, at each `n` with `L_n` from `rule`.
pub fn verify_max_coupling(
    dgp: &DgpSpec,
    selector: CouplingSelector,
    n_grid: &[usize],
    rule: &LagRule,
    reps: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_grid(n_grid, reps, 50)?;
    dgp.validate()?;
    let mut rows = Vec::new();
    for (g, &n) in n_grid.iter().enumerate() {
        let l = width_for(dgp, rule, n)?;
        let (draws, failures, err) = replicate(reps, seed.stream(0).stream(g as u64), |s| {
            coupled_draw(dgp, selector, n, l, s)?.metrics()
        });
        for (j, name) in COUPLING_METRICS.iter().enumerate() {
            let vals: Vec<f64> = draws.iter().map(|d| d[j]).collect();
            rows.push(metric_row(
                0,
                n,
                Some(l),
                name,
                &vals,
                failures,
                err.clone(),
            ));
        }
    }
    Ok(McReport {
        experiment: format!("max_coupling:{selector}"),
        seed: seed.0,
        rows,
    })
}

/// Expansion gap `|max|X_n(h, theta_hat)| - max|oracle(h)||` across `n`.
pub fn verify_expansion(
    spec: &ArpSpec,
    n_grid: &[usize],
    rule: &LagRule,
    reps: usize,
    seed: RngSeed,
) -> Result<McReport> {
    let mut report = verify_max_coupling(
        &DgpSpec::Arp(spec.clone()),
        CouplingSelector::FeasibleVsOracle,
        n_grid,
        rule,
        reps,
        seed,
    )?;
    report.experiment = "expansion".into();
    report
        .rows
        .retain(|r| r.metric == "gap" || r.metric == "max_diff");
    Ok(report)
}

/// Which test a size/power experiment runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSpec {
    UnitRoot(UnitRootConfig),
    WhiteNoise {
        #[serde(flatten)]
        cfg: WnConfig,
        /// When set, overrides `lags` with `L_n` at each `n`.
        #[serde(default)]
        rule: Option<LagRule>,
    },
}

// seed stream reserved for limit-law critical values
const LAW_STREAM: u64 = u64::MAX;

/// Empirical rejection rate of `test` at each DGP cell and sample size.
pub fn size_power_experiment(
    test: &TestSpec,
    cells: &[DgpSpec],
    n_grid: &[usize],
    reps: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_grid(n_grid, reps, 1)?;
    if cells.is_empty() {
        return Err(Error::Config(
            "size/power experiment needs at least one DGP".into(),
        ));
    }
    for c in cells {
        c.validate()?;
    }
    let mut laws: BTreeMap<usize, LimitLawSample> = BTreeMap::new();
    let mut rows = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        for (g, &n) in n_grid.iter().enumerate() {
            let rep_seed = seed.stream(ci as u64 + 1).stream(g as u64);
            let (outcomes, failures, err, l) = match test {
                TestSpec::UnitRoot(cfg) => {
                    cfg.validate()?;
                    let spec = cell.panel_at(n)?;
                    let l = lag_sequence(&cfg.rule, n);
                    if l > spec.k {
                        return Err(Error::LagRuleExceedsWidth);
                    }
                    let law = match laws.entry(l) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => {
                            e.insert(cfg.limit_law(l, seed.stream(LAW_STREAM).stream(l as u64))?)
                        }
                    };
                    let law = &*law;
                    let (o, f, e) = replicate(reps, rep_seed, |s| {
                        let panel = simulate_ar1_panel(&spec, s.stream(0))?;
                        let r = unit_root_test_with_law(&panel, cfg, law)?;
                        Ok((r.reject, r.p_value))
                    });
                    (o, f, e, l)
                }
                TestSpec::WhiteNoise { cfg, rule } => {
                    let spec = cell.arp()?;
                    let mut cfg = cfg.clone();
                    if let Some(rule) = rule {
                        cfg.lags = lag_sequence(rule, n);
                    }
                    let l = cfg.lags;
                    let (o, f, e) = replicate(reps, rep_seed, |s| {
                        let y = simulate_arp(spec, n, s.stream(0))?;
                        let r = white_noise_test(&y, &cfg, s.stream(1))?;
                        Ok((r.reject.unwrap_or(false), r.p_value.unwrap_or(1.0)))
                    });
                    (o, f, e, l)
                }
            };
            let hits: Vec<bool> = outcomes.iter().map(|o| o.0).collect();
            let pvals: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
            let mut row = metric_row(ci, n, Some(l), "rejection", &[], failures, err.clone());
            if let Some(s) = Summary::of_rate(&hits) {
                row.reps = s.count;
                row.median = s.median;
                row.mean = s.mean;
                row.q05 = s.q05;
                row.q95 = s.q95;
                row.se = s.se;
            }
            rows.push(row);
            rows.push(metric_row(ci, n, Some(l), "p_value", &pvals, failures, err));
        }
    }
    Ok(McReport {
        experiment: "size_power".into(),
        seed: seed.0,
        rows,
    })
}

/// For each `n`, the largest width `L <= k` whose median coupling gap stays
/// within `tolerance` (reported as `none` when even `L = 1` fails).
pub fn calibrate_ln(
    dgp: &DgpSpec,
    selector: CouplingSelector,
    tolerance: f64,
    n_grid: &[usize],
    reps: usize,
    seed: RngSeed,
) -> Result<McReport> {
    if !(tolerance >= 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be nonnegative, got {tolerance}"
        )));
    }
    if selector == CouplingSelector::FeasibleVsOracle {
        return Err(Error::Config(
            "L_n calibration runs on panel selectors".into(),
        ));
    }
    check_grid(n_grid, reps, 1)?;
    dgp.validate()?;
    let k = match dgp {
        DgpSpec::Panel(p) => p.k,
        DgpSpec::Arp(_) => return Err(Error::Config("L_n calibration needs a panel DGP".into())),
    };
    let mut rows = Vec::new();
    for (g, &n) in n_grid.iter().enumerate() {
        // running coupling gap over every prefix width 1..=k
        let (paths, failures, err) = replicate(reps, seed.stream(0).stream(g as u64), |s| {
            let d = coupled_draw(dgp, selector, n, k, s)?;
            let mx = running_max_abs(&d.x)?;
            let my = running_max_abs(&d.y)?;
            Ok(mx
                .iter()
                .zip(&my)
                .map(|(a, b)| (a - b).abs())
                .collect::<Vec<f64>>())
        });
        let medians: Vec<f64> = (0..k)
            .map(|j| {
                let col: Vec<f64> = paths.iter().map(|p| p[j]).collect();
                if col.is_empty() {
                    f64::NAN
                } else {
                    median(&col)
                }
            })
            .collect();
        let l_hat = (1..=k).rev().find(|&l| medians[l - 1] <= tolerance);
        let gap_at: Vec<f64> = match l_hat {
            Some(l) => paths.iter().map(|p| p[l - 1]).collect(),
            None => Vec::new(),
        };
        let mut row = metric_row(0, n, l_hat, "gap_at_l_hat", &gap_at, failures, err);
        if l_hat.is_none() && !paths.is_empty() {
            row.reps = paths.len();
        }
        rows.push(row);
    }
    Ok(McReport {
        experiment: format!("calibrate_ln:{selector}"),
        seed: seed.0,
        rows,
    })
}
