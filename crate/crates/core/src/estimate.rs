//! Least squares for autoregressions, residual serial correlation, and
//! Bartlett-kernel long-run variance estimation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::base::check_finite;
use crate::error::{Error, Result};

/// Moment matrices with eigenvalue ratio above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

// Residual sum of squares below this fraction of sum y^2 is an exact fit.
const EXACT_FIT_RATIO: f64 = 1e-26;

/// Least squares slope of `y_t` on `y_{t-1}` without intercept.
pub fn ols_ar1_no_intercept(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument(
            "AR(1) fit needs at least 2 observations".into(),
        ));
    }
    check_finite(series)?;
    let (mut num, mut den) = (0.0, 0.0);
    for w in series.windows(2) {
        num += w[1] * w[0];
        den += w[0] * w[0];
    }
    if den == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    Ok(num / den)
}

/// Least squares fit of `y_t = c + sum_{j<=p} phi_j y_{t-j} + e_t` over
/// `t = p+1..n`. All sample moments use the `m = n - p` usable observations.
#[derive(Debug, Clone)]
pub struct ArFit {
    /// `[c, phi_1, .., phi_p]`
    pub theta_hat: Vec<f64>,
    /// `e_t` for `t = p+1..n` (length `m`).
    pub residuals: Vec<f64>,
    /// Row `s` is `x_t = [1, y_{t-1}, .., y_{t-p}]` for `t = p+1+s`.
    pub regressors: Vec<Vec<f64>>,
    /// `(m^{-1} sum x_t x_t')^{-1}`
    pub xtx_inv: DMatrix<f64>,
    /// `m^{-1} sum e_t^2`
    pub sigma2_eps_hat: f64,
}

impl ArFit {
    pub fn order(&self) -> usize {
        self.theta_hat.len() - 1
    }

    pub fn m(&self) -> usize {
        self.residuals.len()
    }
}

/// Regressor rows `x_t = [1, y_{t-1}, .., y_{t-p}]` for `t = p+1..n`.
pub fn ar_design(series: &[f64], p: usize) -> Vec<Vec<f64>> {
    (p..series.len())
        .map(|t| {
            let mut x = Vec::with_capacity(p + 1);
            x.push(1.0);
            x.extend((1..=p).map(|j| series[t - j]));
            x
        })
        .collect()
}

/// `m^{-1} sum x_t x_t'`
pub fn moment_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let d = rows.first().map_or(0, Vec::len);
    let m = rows.len() as f64;
    let mut out = DMatrix::zeros(d, d);
    for x in rows {
        for a in 0..d {
            for b in a..d {
                out[(a, b)] += x[a] * x[b];
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            out[(a, b)] /= m;
            out[(b, a)] = out[(a, b)];
        }
    }
    out
}

/// Inverse of a symmetric moment matrix, rejecting ill-conditioned input.
pub fn invert_moment_matrix(mat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if mat.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMomentMatrix);
    }
    let eig = mat.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) || max / min > CONDITION_LIMIT {
        return Err(Error::SingularMomentMatrix);
    }
    mat.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::SingularMomentMatrix)
}

pub fn ols_arp(series: &[f64], p: usize) -> Result<ArFit> {
    let n = series.len();
    if n <= 3 * (p + 1) {
        return Err(Error::InvalidArgument(format!(
            "AR({p}) fit needs more than {} observations, got {n}",
            3 * (p + 1)
        )));
    }
    check_finite(series)?;
    let rows = ar_design(series, p);
    let targets = &series[p..];
    let m = rows.len() as f64;

    let xtx = moment_matrix(&rows);
    let xtx_inv = invert_moment_matrix(&xtx)?;
    let mut xty = DVector::zeros(p + 1);
    for (x, y) in rows.iter().zip(targets) {
        for a in 0..=p {
            xty[a] += x[a] * y;
        }
    }
    xty /= m;
    let chol = xtx.clone().cholesky().ok_or(Error::SingularMomentMatrix)?;
    let mut theta = chol.solve(&xty);
    // one step of iterative refinement
    let resid_eq = &xty - &xtx * &theta;
    theta += chol.solve(&resid_eq);

    let theta_hat: Vec<f64> = theta.iter().copied().collect();
    let mut residuals: Vec<f64> = rows
        .iter()
        .zip(targets)
        .map(|(x, y)| y - dot(&theta_hat, x))
        .collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let ssy: f64 = targets.iter().map(|y| y * y).sum();
    if ssr <= EXACT_FIT_RATIO * ssy {
        residuals.iter_mut().for_each(|e| *e = 0.0);
    }
    let sigma2_eps_hat = residuals.iter().map(|e| e * e).sum::<f64>() / m;
    Ok(ArFit {
        theta_hat,
        residuals,
        regressors: rows,
        xtx_inv,
        sigma2_eps_hat,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Normalized residual serial correlation at lag `h`:
/// `sqrt(m) * sum_{t>h} e_t e_{t-h} / sum_t e_t^2`.
pub fn residual_autocorr(residuals: &[f64], h: usize) -> Result<f64> {
    let m = residuals.len();
    if h == 0 {
        return Err(Error::InvalidArgument("lag must be at least 1".into()));
    }
    if h >= m {
        return Err(Error::LagExceedsSample);
    }
    let den: f64 = residuals.iter().map(|e| e * e).sum();
    if den == 0.0 {
        return Err(Error::DegenerateResidualVariance);
    }
    let num: f64 = residuals[h..]
        .iter()
        .zip(residuals)
        .map(|(a, b)| a * b)
        .sum();
    Ok((m as f64).sqrt() * num / den)
}

/// Newey-West style rule of thumb `floor(4 (n/100)^{2/9})`.
pub fn default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

fn bartlett_weight(j: usize, bandwidth: usize) -> f64 {
    1.0 - j as f64 / (bandwidth as f64 + 1.0)
}

/// Bartlett-kernel long-run covariance of two equal-length series, using
/// demeaned sample cross-covariances with divisor `N`:
/// `G_0 + sum_{j=1..b} w_j (G_j(a,b) + G_j(b,a))`.
pub fn long_run_covariance(a: &[f64], b: &[f64], bandwidth: usize) -> Result<f64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "series lengths {} and {}",
            n,
            b.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if bandwidth >= n {
        return Err(Error::InvalidArgument(format!(
            "bandwidth {bandwidth} must be below sample size {n}"
        )));
    }
    let nf = n as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let da: Vec<f64> = a.iter().map(|v| v - ma).collect();
    let db: Vec<f64> = b.iter().map(|v| v - mb).collect();
    let cross = |x: &[f64], y: &[f64], j: usize| -> f64 {
        x[j..].iter().zip(y).map(|(x, y)| x * y).sum::<f64>() / nf
    };
    let mut lrv = cross(&da, &db, 0);
    for j in 1..=bandwidth {
        lrv += bartlett_weight(j, bandwidth) * (cross(&da, &db, j) + cross(&db, &da, j));
    }
    Ok(lrv)
}

/// Bartlett-kernel long-run variance; with `bandwidth = 0` this is the
/// demeaned sample variance.
pub fn long_run_variance(series: &[f64], bandwidth: usize) -> Result<f64> {
    long_run_covariance(series, series, bandwidth)
}

/// Bound on the prewhitening coefficient, keeping `1 / (1 - r)^2` finite.
pub const PREWHITEN_BOUND: f64 = 0.97;

/// Long-run variance estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LrvKernel {
    /// Bartlett kernel on the series itself.
    Bartlett,
    /// Bartlett kernel on AR(1)-prewhitened data, recolored by `1 / (1 - r)^2`.
    /// Removes most of the kernel's downward bias under positive
    /// autocorrelation at moderate `n`.
    #[default]
    PrewhitenedBartlett,
}

/// Fit `u_t = r u_{t-1} + v_t` (with `|r|` capped at [`PREWHITEN_BOUND`]),
/// estimate the long-run variance of `v` and recolor it.
pub fn prewhitened_long_run_variance(series: &[f64], bandwidth: usize) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::InvalidArgument(
            "prewhitening needs at least 3 observations".into(),
        ));
    }
    let lagged = &series[..series.len() - 1];
    let den = dot(lagged, lagged);
    let r = if den > 0.0 {
        (dot(&series[1..], lagged) / den).clamp(-PREWHITEN_BOUND, PREWHITEN_BOUND)
    } else {
        0.0
    };
    let v: Vec<f64> = series.windows(2).map(|w| w[1] - r * w[0]).collect();
    Ok(long_run_variance(&v, bandwidth)? / ((1.0 - r) * (1.0 - r)))
}

/// Long-run and short-run variance estimates of one residual series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariancePair {
    pub sigma2_hat: f64,
    pub sigma2_eps_hat: f64,
    pub bandwidth: usize,
}

/// Bartlett estimates; `sigma2_hat == sigma2_eps_hat` when `bandwidth == 0`.
pub fn variance_pair(residuals: &[f64], bandwidth: usize) -> Result<VariancePair> {
    variance_pair_with(residuals, bandwidth, LrvKernel::Bartlett)
}

/// As [`variance_pair`] with a chosen long-run estimator. Bandwidth 0 always
/// means no serial-correlation allowance, so the two estimates coincide.
pub fn variance_pair_with(
    residuals: &[f64],
    bandwidth: usize,
    kernel: LrvKernel,
) -> Result<VariancePair> {
    let sigma2_eps_hat = long_run_variance(residuals, 0)?;
    let sigma2_hat = match (bandwidth, kernel) {
        (0, _) => sigma2_eps_hat,
        (_, LrvKernel::Bartlett) => long_run_variance(residuals, bandwidth)?,
        (_, LrvKernel::PrewhitenedBartlett) => {
            if bandwidth + 1 >= residuals.len() {
                return Err(Error::InvalidArgument(format!(
                    "bandwidth {bandwidth} must be below sample size {}",
                    residuals.len() - 1
                )));
            }
            prewhitened_long_run_variance(residuals, bandwidth)?
        }
    };
    Ok(VariancePair {
        sigma2_hat,
        sigma2_eps_hat,
        bandwidth,
    })
}
