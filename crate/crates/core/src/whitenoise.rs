//! Max-correlation white noise test on AR(p) residuals.
//!
//! The statistic is `max_{h<=L} |X_n(h)|`, `X_n(h) = sqrt(m) rho_hat(h)` of the
//! fitted residuals. Because the residuals are filtered through an estimated
//! `theta`, the null law is driven by the first-order expansion
//! `X_n(h) ~ m^{-1/2} sum_t z_t(h)` with
//!
//! ```text
//! z_t(h) = (e_t e_{t-h} - D(h)' E[x x']^{-1} x_t e_t) / E[e^2]
//! D(h)   = -E[e_t x_{t-h}] - E[e_{t-h} x_t]
//! ```
//!
//! P-values come from a dependent wild bootstrap of the estimated `z_t(h)`,
//! or from a Gaussian vector with their long-run covariance.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{running_max_abs, RngSeed};
use crate::dgp::{ArpSpec, Dependence};
use crate::error::{Error, Result};
use crate::estimate::{
    ar_design, default_bandwidth, dot, invert_moment_matrix, long_run_covariance, ols_arp,
    residual_autocorr, ArFit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WnMethod {
    #[default]
    Bootstrap,
    GaussianKernel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WnTestResult {
    /// `X_n(h)` for `h = 1..L`.
    pub per_lag: Vec<f64>,
    pub max_stat: f64,
    pub lags: usize,
    pub p_value: Option<f64>,
    pub reject: Option<bool>,
    pub method: Option<WnMethod>,
}

fn check_lags(m: usize, lags: usize) -> Result<()> {
    if lags == 0 {
        return Err(Error::InvalidArgument("need at least one lag".into()));
    }
    if lags >= m {
        return Err(Error::LagExceedsSample);
    }
    if m <= 3 * lags {
        return Err(Error::InvalidArgument(format!(
            "residual length {m} must exceed 3L = {}",
            3 * lags
        )));
    }
    Ok(())
}

/// Per-lag residual correlations and their max for an already fitted model.
pub fn max_corr_from_fit(fit: &ArFit, lags: usize) -> Result<WnTestResult> {
    check_lags(fit.m(), lags)?;
    let per_lag = (1..=lags)
        .map(|h| residual_autocorr(&fit.residuals, h))
        .collect::<Result<Vec<_>>>()?;
    let max_stat = *running_max_abs(&per_lag)?.last().expect("nonempty");
    Ok(WnTestResult {
        per_lag,
        max_stat,
        lags,
        p_value: None,
        reject: None,
        method: None,
    })
}

/// Fit AR(`p`) by least squares and compute `max_{h<=L} |X_n(h)|`.
pub fn max_corr_stat(series: &[f64], p: usize, lags: usize) -> Result<WnTestResult> {
    let fit = ols_arp(series, p)?;
    max_corr_from_fit(&fit, lags)
}

/// Estimated expansion terms at one lag.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionComponents {
    pub h: usize,
    /// Residual count of the underlying fit.
    pub m: usize,
    pub d_hat: Vec<f64>,
    /// `z_hat[j]` is the term for residual index `s = h + j`.
    pub z_hat: Vec<f64>,
    pub sigma2_eps: f64,
    pub xtx_inv: DMatrix<f64>,
}

impl ExpansionComponents {
    /// `m^{-1/2} sum_s z_hat_s`, the linearized `X_n(h)`.
    pub fn normalized_sum(&self) -> f64 {
        self.z_hat.iter().sum::<f64>() / (self.m as f64).sqrt()
    }
}

/// `z` terms for residuals `e` with given moments: entry `j` corresponds to
/// residual index `s = h + j`.
fn z_terms(
    resid: &[f64],
    rows: &[Vec<f64>],
    h: usize,
    d: &[f64],
    xtx_inv: &DMatrix<f64>,
    sigma2: f64,
) -> Vec<f64> {
    // D(h) is the gradient of the lag-h residual autocovariance in theta,
    // so the plug-in term enters with a plus sign; a = E[xx']^{-1} D(h)
    let a: Vec<f64> = (xtx_inv * DVector::from_column_slice(d))
        .iter()
        .copied()
        .collect();
    (h..resid.len())
        .map(|s| (resid[s] * resid[s - h] + dot(&a, &rows[s]) * resid[s]) / sigma2)
        .collect()
}

/// Sample `D_hat(h)` and `z_hat_t(h)` from a fit.
pub fn expansion_terms(fit: &ArFit, h: usize) -> Result<ExpansionComponents> {
    let m = fit.m();
    if h == 0 {
        return Err(Error::InvalidArgument("lag must be at least 1".into()));
    }
    if h >= m {
        return Err(Error::LagExceedsSample);
    }
    if fit.sigma2_eps_hat == 0.0 {
        return Err(Error::DegenerateResidualVariance);
    }
    let e = &fit.residuals;
    let x = &fit.regressors;
    let dim = fit.theta_hat.len();
    let mut d_hat = vec![0.0; dim];
    for s in h..m {
        for (j, d) in d_hat.iter_mut().enumerate() {
            *d -= e[s] * x[s - h][j] + e[s - h] * x[s][j];
        }
    }
    d_hat.iter_mut().for_each(|d| *d /= m as f64);
    let z_hat = z_terms(e, x, h, &d_hat, &fit.xtx_inv, fit.sigma2_eps_hat);
    Ok(ExpansionComponents {
        h,
        m,
        d_hat,
        z_hat,
        sigma2_eps: fit.sigma2_eps_hat,
        xtx_inv: fit.xtx_inv.clone(),
    })
}

/// Population quantities of a correctly specified AR(p) with iid errors:
/// the true `theta_0`, `E[e^2]`, `E[x x']` and `D(h)` for `h = 1..L`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMoments {
    pub theta0: Vec<f64>,
    pub sigma2_eps: f64,
    pub xtx: DMatrix<f64>,
    /// `d[h-1] = D(h)`.
    pub d: Vec<Vec<f64>>,
}

// MA(inf) weights are truncated once they fall below this.
const PSI_TOL: f64 = 1e-17;
const PSI_MAX_TERMS: usize = 1_000_000;

fn ma_weights(coeffs: &[f64], min_len: usize) -> Vec<f64> {
    let mut psi = vec![1.0];
    let mut quiet = 0usize;
    while psi.len() < PSI_MAX_TERMS {
        let j = psi.len();
        let next: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < j)
            .map(|(i, phi)| phi * psi[j - 1 - i])
            .sum();
        psi.push(next);
        quiet = if next.abs() < PSI_TOL { quiet + 1 } else { 0 };
        if psi.len() > min_len && quiet > coeffs.len() + 1 {
            break;
        }
    }
    psi
}

impl OracleMoments {
    /// Closed-form moments for a stationary AR(p) with iid errors.
    pub fn for_arp(spec: &ArpSpec, lags: usize) -> Result<Self> {
        spec.validate()?;
        if spec.errors.dependence != Dependence::Iid {
            return Err(Error::InvalidArgument(
                "oracle moments need iid errors (white-noise null)".into(),
            ));
        }
        let p = spec.order();
        let s2 = spec.errors.variance();
        let psi = ma_weights(&spec.coeffs, lags + p + 1);
        let gamma =
            |j: usize| -> f64 { s2 * psi.iter().zip(&psi[j..]).map(|(a, b)| a * b).sum::<f64>() };
        let mu = spec.mean();
        let xtx = DMatrix::from_fn(p + 1, p + 1, |a, b| match (a, b) {
            (0, 0) => 1.0,
            (0, _) | (_, 0) => mu,
            _ => gamma(a.abs_diff(b)) + mu * mu,
        });
        // D(h)_j = -E[e_{t-h} y_{t-j}] = -psi_{h-j} s2 for j <= h; intercept term is 0
        let d = (1..=lags)
            .map(|h| {
                let mut v = vec![0.0; p + 1];
                for j in 1..=p.min(h) {
                    v[j] = -psi[h - j] * s2;
                }
                v
            })
            .collect();
        let mut theta0 = vec![spec.intercept];
        theta0.extend_from_slice(&spec.coeffs);
        Ok(Self {
            theta0,
            sigma2_eps: s2,
            xtx,
            d,
        })
    }
}

/// Feasible and oracle-linearized max statistics on one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCoupling {
    /// `X_n(h, theta_hat)`, `h = 1..L`.
    pub feasible: Vec<f64>,
    /// `m^{-1/2} sum_t z_t(h)` from true errors and population moments.
    pub oracle: Vec<f64>,
    /// `| max|feasible| - max|oracle| |`
    pub gap: f64,
    /// `max_h |feasible(h) - oracle(h)|`, an upper bound on `gap`.
    pub max_diff: f64,
}

pub fn expansion_coupling(
    series: &[f64],
    p: usize,
    lags: usize,
    oracle: &OracleMoments,
) -> Result<ExpansionCoupling> {
    if oracle.theta0.len() != p + 1 || oracle.d.len() < lags || oracle.xtx.nrows() != p + 1 {
        return Err(Error::DimensionMismatch(
            "oracle moments do not match model order or lag count".into(),
        ));
    }
    let fit = ols_arp(series, p)?;
    let feasible = max_corr_from_fit(&fit, lags)?.per_lag;
    let rows = ar_design(series, p);
    let errors: Vec<f64> = rows
        .iter()
        .zip(&series[p..])
        .map(|(x, y)| y - dot(&oracle.theta0, x))
        .collect();
    let xtx_inv = invert_moment_matrix(&oracle.xtx)?;
    let root_m = (errors.len() as f64).sqrt();
    let oracle_stats: Vec<f64> = (1..=lags)
        .map(|h| {
            z_terms(
                &errors,
                &rows,
                h,
                &oracle.d[h - 1],
                &xtx_inv,
                oracle.sigma2_eps,
            )
            .iter()
            .sum::<f64>()
                / root_m
        })
        .collect();
    let max_f = *running_max_abs(&feasible)?.last().expect("nonempty");
    let max_o = *running_max_abs(&oracle_stats)?.last().expect("nonempty");
    let diffs: Vec<f64> = feasible
        .iter()
        .zip(&oracle_stats)
        .map(|(a, b)| a - b)
        .collect();
    Ok(ExpansionCoupling {
        gap: (max_f - max_o).abs(),
        max_diff: *running_max_abs(&diffs)?.last().expect("nonempty"),
        feasible,
        oracle: oracle_stats,
    })
}

/// `| max_h |X_n(h, theta_hat)| - max_h |m^{-1/2} sum_t z_t(h)| |` with the
/// oracle expansion built from known population moments.
pub fn expansion_gap(series: &[f64], p: usize, lags: usize, oracle: &OracleMoments) -> Result<f64> {
    expansion_coupling(series, p, lags, oracle).map(|c| c.gap)
}

/// Long-run covariance matrix of `{z_t(h)}` across lags.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub matrix: DMatrix<f64>,
    pub bandwidth: usize,
}

/// Bartlett long-run covariances of the `z_hat` sequences over their
/// overlapping time range.
pub fn estimate_z_kernel(
    components: &[ExpansionComponents],
    bandwidth: usize,
) -> Result<KernelMatrix> {
    let l = components.len();
    if l == 0 {
        return Err(Error::EmptySequence);
    }
    let m = components[0].m;
    if components
        .iter()
        .any(|c| c.m != m || c.z_hat.len() + c.h != m)
    {
        return Err(Error::DimensionMismatch(
            "expansion components come from different fits".into(),
        ));
    }
    let mut matrix = DMatrix::zeros(l, l);
    for a in 0..l {
        for b in a..l {
            let (ca, cb) = (&components[a], &components[b]);
            let start = ca.h.max(cb.h);
            let za = &ca.z_hat[start - ca.h..];
            let zb = &cb.z_hat[start - cb.h..];
            let v = long_run_covariance(za, zb, bandwidth)?;
            matrix[(a, b)] = v;
            matrix[(b, a)] = v;
        }
    }
    Ok(KernelMatrix { matrix, bandwidth })
}

/// `(1 + #{draws >= stat}) / (1 + reps)`.
pub fn add_one_p_value(draws: &[f64], stat: f64) -> f64 {
    let exceed = draws.iter().filter(|d| **d >= stat).count();
    (1 + exceed) as f64 / (1 + draws.len()) as f64
}

/// Dependent wild bootstrap draws of `max_h |m^{-1/2} sum_t z_hat_t(h) xi_t|`
/// with `xi_t` standard normal, constant on consecutive blocks of length
/// `block_len`, independent across blocks.
pub fn bootstrap_draws(
    components: &[ExpansionComponents],
    block_len: usize,
    reps: usize,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::NoBootstrapDraws);
    }
    let m = components.first().ok_or(Error::EmptySequence)?.m;
    if block_len == 0 || block_len >= m {
        return Err(Error::InvalidArgument(format!(
            "block length must lie in 1..{m}, got {block_len}"
        )));
    }
    let root_m = (m as f64).sqrt();
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.stream(r).rng();
            let mut xi = Vec::with_capacity(m);
            while xi.len() < m {
                let w: f64 = StandardNormal.sample(&mut rng);
                let len = block_len.min(m - xi.len());
                xi.extend(std::iter::repeat_n(w, len));
            }
            components
                .iter()
                .map(|c| (dot(&c.z_hat, &xi[c.h..]) / root_m).abs())
                .fold(0.0, f64::max)
        })
        .collect())
}

/// Draws of `max_h |Z_h|` for `Z ~ N(0, K)`.
pub fn gaussian_kernel_draws(
    kernel: &KernelMatrix,
    reps: usize,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::NoBootstrapDraws);
    }
    let l = kernel.matrix.nrows();
    // symmetric square root; Bartlett keeps K positive semidefinite up to rounding
    let eig = kernel.matrix.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals);
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.stream(r).rng();
            let g = DVector::from_fn(l, |_, _| StandardNormal.sample(&mut rng));
            (&root * g).amax()
        })
        .collect())
}

/// Settings for the full white-noise test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WnConfig {
    /// AR order of the filter.
    pub p: usize,
    /// Number of lags `L` in the max.
    pub lags: usize,
    /// `None` selects `floor(n^{1/3})`.
    pub block_len: Option<usize>,
    pub reps: usize,
    pub level: f64,
    pub method: WnMethod,
    /// Kernel bandwidth for the Gaussian mode; `None` selects the default rule.
    pub bandwidth: Option<usize>,
}

impl Default for WnConfig {
    fn default() -> Self {
        Self {
            p: 1,
            lags: 5,
            block_len: None,
            reps: 500,
            level: 0.05,
            method: WnMethod::Bootstrap,
            bandwidth: None,
        }
    }
}

/// `floor(n^{1/3})`, at least 1.
pub fn auto_block_len(n: usize) -> usize {
    ((n as f64).cbrt().floor() as usize).max(1)
}

/// Full test: fit, statistic, expansion, resampled null and p-value.
pub fn white_noise_test(series: &[f64], cfg: &WnConfig, seed: RngSeed) -> Result<WnTestResult> {
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0,1), got {}",
            cfg.level
        )));
    }
    if cfg.reps == 0 {
        return Err(Error::NoBootstrapDraws);
    }
    let fit = ols_arp(series, cfg.p)?;
    let mut result = max_corr_from_fit(&fit, cfg.lags)?;
    let components = (1..=cfg.lags)
        .map(|h| expansion_terms(&fit, h))
        .collect::<Result<Vec<_>>>()?;
    let draws = match cfg.method {
        WnMethod::Bootstrap => {
            let bl = cfg
                .block_len
                .unwrap_or_else(|| auto_block_len(series.len()));
            bootstrap_draws(&components, bl, cfg.reps, seed)?
        }
        WnMethod::GaussianKernel => {
            let bw = cfg.bandwidth.unwrap_or_else(|| default_bandwidth(fit.m()));
            let kernel = estimate_z_kernel(&components, bw)?;
            gaussian_kernel_draws(&kernel, cfg.reps, seed)?
        }
    };
    let p_value = add_one_p_value(&draws, result.max_stat);
    result.p_value = Some(p_value);
    result.reject = Some(p_value < cfg.level);
    result.method = Some(cfg.method);
    Ok(result)
}

/// Bootstrap p-value for `series` with explicit block length and replication count.
pub fn dwb_pvalue(
    series: &[f64],
    p: usize,
    lags: usize,
    block_len: usize,
    reps: usize,
    seed: RngSeed,
) -> Result<WnTestResult> {
    let cfg = WnConfig {
        p,
        lags,
        block_len: Some(block_len),
        reps,
        ..Default::default()
    };
    white_noise_test(series, &cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate_arp, ErrorSpec};

    fn manual_fit(resid: Vec<f64>) -> ArFit {
        let m = resid.len();
        let s2 = resid.iter().map(|e| e * e).sum::<f64>() / m as f64;
        ArFit {
            theta_hat: vec![0.0],
            regressors: vec![vec![1.0]; m],
            xtx_inv: DMatrix::from_element(1, 1, 1.0),
            sigma2_eps_hat: s2,
            residuals: resid,
        }
    }

    #[test]
    fn exact_ar1_is_degenerate() {
        let mut y = vec![0.3];
        for _ in 0..59 {
            let prev = *y.last().unwrap();
            y.push(0.5 * prev + 1.0);
        }
        assert_eq!(
            max_corr_stat(&y[..25], 1, 2).unwrap_err(),
            Error::DegenerateResidualVariance
        );
    }

    #[test]
    fn lag_checks() {
        let y: Vec<f64> = (0..20).map(|t| ((t * 7919) % 13) as f64).collect();
        assert_eq!(
            max_corr_stat(&y, 1, 19).unwrap_err(),
            Error::LagExceedsSample
        );
        assert!(matches!(
            max_corr_stat(&y, 1, 10),
            Err(Error::InvalidArgument(_))
        ));
        assert!(max_corr_stat(&y, 1, 3).is_ok());
    }

    #[test]
    fn intercept_only_alternating_expansion() {
        let resid: Vec<f64> = (0..10)
            .map(|t| if t % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let fit = manual_fit(resid.clone());
        for h in 1..4 {
            let c = expansion_terms(&fit, h).unwrap();
            // sums over an even number of alternating terms vanish
            let expect_d = if (10 - h) % 2 == 0 { 0.0 } else { c.d_hat[0] };
            assert_eq!(c.d_hat[0], expect_d);
            assert!(c.d_hat[0].abs() <= 0.2 + 1e-15);
            if c.d_hat[0] == 0.0 {
                for (j, z) in c.z_hat.iter().enumerate() {
                    assert_eq!(*z, resid[h + j] * resid[j]);
                }
            }
        }
        assert_eq!(
            expansion_terms(&fit, 10).unwrap_err(),
            Error::LagExceedsSample
        );
    }

    #[test]
    fn linearization_tracks_statistic() {
        let spec = ArpSpec::ar1(0.5, 0.4, ErrorSpec::default());
        let y = simulate_arp(&spec, 4000, RngSeed(21)).unwrap();
        let fit = ols_arp(&y, 1).unwrap();
        let stats = max_corr_from_fit(&fit, 4).unwrap();
        for h in 1..=4 {
            let c = expansion_terms(&fit, h).unwrap();
            assert!((c.normalized_sum() - stats.per_lag[h - 1]).abs() < 0.15);
        }
    }

    #[test]
    fn oracle_expansion_tracks_feasible_statistic() {
        // the plug-in term is O(1) per lag, so a sign slip would show up here
        let spec = ArpSpec::ar1(0.0, 0.5, ErrorSpec::default());
        let oracle = OracleMoments::for_arp(&spec, 3).unwrap();
        let y = simulate_arp(&spec, 20_000, RngSeed(22)).unwrap();
        let c = expansion_coupling(&y, 1, 3, &oracle).unwrap();
        assert!(c.max_diff < 0.1, "{c:?}");
    }

    #[test]
    fn oracle_moments_ar1_closed_form() {
        let spec = ArpSpec::ar1(1.0, 0.5, ErrorSpec::gaussian(2.0));
        let o = OracleMoments::for_arp(&spec, 3).unwrap();
        assert_eq!(o.theta0, vec![1.0, 0.5]);
        assert_eq!(o.sigma2_eps, 4.0);
        let mu = 2.0;
        let g0 = 4.0 / 0.75;
        assert!((o.xtx[(1, 1)] - (g0 + mu * mu)).abs() < 1e-12);
        assert_eq!(o.xtx[(0, 1)], mu);
        for h in 1..=3 {
            let expect = -0.5f64.powi(h as i32 - 1) * 4.0;
            assert!((o.d[h - 1][1] - expect).abs() < 1e-12);
            assert_eq!(o.d[h - 1][0], 0.0);
        }
    }

    #[test]
    fn oracle_moments_ar2_autocovariances() {
        // Yule-Walker: g1 = phi1 g0 / (1 - phi2)
        let spec = ArpSpec {
            intercept: 0.0,
            coeffs: vec![0.5, 0.3],
            errors: ErrorSpec::default(),
        };
        let o = OracleMoments::for_arp(&spec, 2).unwrap();
        let g0 = o.xtx[(1, 1)];
        let g1 = o.xtx[(1, 2)];
        assert!((g1 - 0.5 * g0 / 0.7).abs() < 1e-10);
        // D(2) = -[0, psi_1, psi_0] = -[0, 0.5, 1]
        assert!((o.d[1][1] + 0.5).abs() < 1e-12);
        assert!((o.d[1][2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn p_value_convention() {
        assert_eq!(add_one_p_value(&[1.0, 2.0, 3.0], 2.5), 0.5);
        assert_eq!(add_one_p_value(&[1.0, 2.0, 3.0], 10.0), 0.25);
        assert_eq!(add_one_p_value(&[1.0, 2.0, 3.0], 0.0), 1.0);
    }

    #[test]
    fn bootstrap_arguments() {
        let fit = manual_fit((0..30).map(|t| ((t * 37) % 11) as f64 - 5.0).collect());
        let comps = vec![expansion_terms(&fit, 1).unwrap()];
        assert_eq!(
            bootstrap_draws(&comps, 3, 0, RngSeed(1)).unwrap_err(),
            Error::NoBootstrapDraws
        );
        assert!(bootstrap_draws(&comps, 0, 5, RngSeed(1)).is_err());
        assert!(bootstrap_draws(&comps, 30, 5, RngSeed(1)).is_err());
        let a = bootstrap_draws(&comps, 3, 50, RngSeed(1)).unwrap();
        assert_eq!(a, bootstrap_draws(&comps, 3, 50, RngSeed(1)).unwrap());
        assert!(a.iter().all(|d| d.is_finite() && *d >= 0.0));
    }

    #[test]
    fn dwb_rejects_zero_reps() {
        let y = simulate_arp(
            &ArpSpec::ar1(0.0, 0.2, ErrorSpec::default()),
            200,
            RngSeed(2),
        )
        .unwrap();
        assert_eq!(
            dwb_pvalue(&y, 1, 3, 5, 0, RngSeed(3)).unwrap_err(),
            Error::NoBootstrapDraws
        );
    }

    #[test]
    fn kernel_bandwidth_zero_diagonal_is_variance() {
        let y = simulate_arp(
            &ArpSpec::ar1(0.0, 0.3, ErrorSpec::default()),
            300,
            RngSeed(4),
        )
        .unwrap();
        let fit = ols_arp(&y, 1).unwrap();
        let comps: Vec<_> = (1..=3).map(|h| expansion_terms(&fit, h).unwrap()).collect();
        let k = estimate_z_kernel(&comps, 0).unwrap();
        for (i, c) in comps.iter().enumerate() {
            let z = &c.z_hat;
            let mean = z.iter().sum::<f64>() / z.len() as f64;
            let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / z.len() as f64;
            assert_eq!(k.matrix[(i, i)], var);
        }
        assert_eq!(k.matrix, k.matrix.transpose());
    }
}
