//! Data generating processes for Monte Carlo work: error sequences, AR(1)
//! panels with unit roots or stationary roots, and stationary AR(p) series.
//!
//! Every simulator is a pure function of `(spec, seed)`.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::base::{PanelData, RngSeed};
use crate::error::{Error, Result};

/// Discarded warm-up draws for AR(1)-dependent errors and stationary panel series.
pub const PANEL_BURN_IN: usize = 200;
/// Discarded warm-up draws for AR(p) series.
pub const ARP_BURN_IN: usize = 500;

const ROOT_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDist {
    Gaussian,
    /// Student-t rescaled to unit variance; degrees of freedom must exceed 4.
    StudentT(f64),
}

/// Parses `gaussian` or `t:DF`.
impl FromStr for ErrorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "gaussian" => Ok(ErrorDist::Gaussian),
            Some(("t", df)) => df
                .parse()
                .map(ErrorDist::StudentT)
                .map_err(|_| Error::InvalidArgument(format!("bad degrees of freedom {df:?}"))),
            _ => Err(Error::InvalidArgument(format!("unknown error law {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    Iid,
    /// `e_t = rho * e_{t-1} + u_t`, `|rho| < 1`.
    Ar1(f64),
}

/// Law of an error sequence. `scale` is the standard deviation of the
/// innovation `u_t`; for iid errors that is the error standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    #[serde(default = "default_dist")]
    pub dist: ErrorDist,
    #[serde(default = "default_dependence")]
    pub dependence: Dependence,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_dist() -> ErrorDist {
    ErrorDist::Gaussian
}
fn default_dependence() -> Dependence {
    Dependence::Iid
}
fn default_scale() -> f64 {
    1.0
}

impl Default for ErrorSpec {
    fn default() -> Self {
        Self::gaussian(1.0)
    }
}

impl ErrorSpec {
    pub fn gaussian(scale: f64) -> Self {
        Self {
            dist: ErrorDist::Gaussian,
            dependence: Dependence::Iid,
            scale,
        }
    }

    pub fn with_ar1(mut self, rho: f64) -> Self {
        self.dependence = Dependence::Ar1(rho);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "error scale must be nonnegative, got {}",
                self.scale
            )));
        }
        if let ErrorDist::StudentT(df) = self.dist {
            if !(df > 4.0 && df.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "student-t degrees of freedom must exceed 4, got {df}"
                )));
            }
        }
        if let Dependence::Ar1(rho) = self.dependence {
            if !(rho.abs() < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "error AR coefficient must satisfy |rho| < 1, got {rho}"
                )));
            }
        }
        Ok(())
    }

    /// Stationary variance of `e_t`.
    pub fn variance(&self) -> f64 {
        let s2 = self.scale * self.scale;
        match self.dependence {
            Dependence::Iid => s2,
            Dependence::Ar1(rho) => s2 / (1.0 - rho * rho),
        }
    }

    /// Long-run variance `lim Var(n^{-1/2} sum e_t)`.
    pub fn long_run_variance(&self) -> f64 {
        let s2 = self.scale * self.scale;
        match self.dependence {
            Dependence::Iid => s2,
            Dependence::Ar1(rho) => s2 / ((1.0 - rho) * (1.0 - rho)),
        }
    }
}

fn standard_draw<R: Rng>(dist: ErrorDist, t_law: Option<&StudentT<f64>>, rng: &mut R) -> f64 {
    match dist {
        ErrorDist::Gaussian => StandardNormal.sample(rng),
        ErrorDist::StudentT(df) => {
            let x: f64 = t_law.expect("t law present").sample(rng);
            x * ((df - 2.0) / df).sqrt()
        }
    }
}

/// Zero-mean error sequence of length `n`.
pub fn simulate_errors(spec: &ErrorSpec, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = seed.rng();
    let t_law = match spec.dist {
        ErrorDist::StudentT(df) => {
            Some(StudentT::new(df).map_err(|e| Error::InvalidArgument(format!("student-t: {e}")))?)
        }
        ErrorDist::Gaussian => None,
    };
    let mut draw = || spec.scale * standard_draw(spec.dist, t_law.as_ref(), &mut rng);
    Ok(match spec.dependence {
        Dependence::Iid => (0..n).map(|_| draw()).collect(),
        Dependence::Ar1(rho) => {
            let mut e = 0.0;
            for _ in 0..PANEL_BURN_IN {
                e = rho * e + draw();
            }
            (0..n)
                .map(|_| {
                    e = rho * e + draw();
                    e
                })
                .collect()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CrossDependence {
    #[default]
    Independent,
    /// `e_t(i) = sqrt(w) f_t + sqrt(1-w) u_t(i)` with a common factor `f`
    /// drawn from the same error law; `w` in `[0, 1)`. Gaussian marginals
    /// are preserved exactly, other laws keep their variance.
    CommonFactor(f64),
}

/// Panel of `k` AR(1) series `y_t(i) = phi(i) y_{t-1}(i) + e_t(i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSpec {
    /// Sample length; experiments override it with each grid value.
    #[serde(default)]
    pub n: usize,
    pub k: usize,
    /// One root per series, or a single root broadcast to all series.
    pub phis: Vec<f64>,
    #[serde(default)]
    pub errors: ErrorSpec,
    #[serde(default)]
    pub cross_dependence: CrossDependence,
}

impl PanelSpec {
    /// All-unit-root panel with iid gaussian errors.
    pub fn unit_root(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            phis: vec![1.0],
            errors: ErrorSpec::default(),
            cross_dependence: CrossDependence::Independent,
        }
    }

    pub fn phi(&self, i: usize) -> f64 {
        if self.phis.len() == 1 {
            self.phis[0]
        } else {
            self.phis[i]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.k < 1 {
            return Err(Error::InvalidArgument(format!(
                "panel needs n >= 2 and k >= 1, got n={} k={}",
                self.n, self.k
            )));
        }
        if self.phis.len() != 1 && self.phis.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "expected 1 or {} AR roots, got {}",
                self.k,
                self.phis.len()
            )));
        }
        if let Some(p) = self.phis.iter().find(|p| !(p.abs() <= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "AR(1) roots must satisfy |phi| <= 1, got {p}"
            )));
        }
        if let CrossDependence::CommonFactor(w) = self.cross_dependence {
            if !(0.0..1.0).contains(&w) {
                return Err(Error::InvalidArgument(format!(
                    "common factor weight must lie in [0,1), got {w}"
                )));
            }
        }
        self.errors.validate()
    }
}

/// Error draws driving each panel series, length `n + PANEL_BURN_IN`.
///
/// Series with `|phi| = 1` consume only the last `n` draws.
pub fn panel_errors(spec: &PanelSpec, seed: RngSeed) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let len = spec.n + PANEL_BURN_IN;
    let idio: Vec<Vec<f64>> = (0..spec.k)
        .map(|i| simulate_errors(&spec.errors, len, seed.stream(i as u64)))
        .collect::<Result<_>>()?;
    match spec.cross_dependence {
        CrossDependence::Independent => Ok(idio),
        CrossDependence::CommonFactor(w) => {
            let factor = simulate_errors(&spec.errors, len, seed.stream(u64::MAX))?;
            let (a, b) = (w.sqrt(), (1.0 - w).sqrt());
            Ok(idio
                .into_iter()
                .map(|u| u.iter().zip(&factor).map(|(u, f)| a * f + b * u).collect())
                .collect())
        }
    }
}

/// Simulate an AR(1) panel. Unit-root series start at `y_0 = 0` and are the
/// partial sums of their errors; stationary series discard a burn-in.
pub fn simulate_ar1_panel(spec: &PanelSpec, seed: RngSeed) -> Result<PanelData> {
    let errors = panel_errors(spec, seed)?;
    let cols = errors
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let phi = spec.phi(i);
            let mut y = 0.0;
            if phi.abs() == 1.0 {
                e[PANEL_BURN_IN..]
                    .iter()
                    .map(|e| {
                        y = phi * y + e;
                        y
                    })
                    .collect()
            } else {
                let mut out = Vec::with_capacity(spec.n);
                for (t, e) in e.iter().enumerate() {
                    y = phi * y + e;
                    if t >= PANEL_BURN_IN {
                        out.push(y);
                    }
                }
                out
            }
        })
        .collect();
    PanelData::from_columns(cols)
}

/// Stationary AR(p) with intercept: `y_t = c + sum_j phi_j y_{t-j} + e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArpSpec {
    #[serde(default)]
    pub intercept: f64,
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub errors: ErrorSpec,
}

impl ArpSpec {
    pub fn ar1(intercept: f64, phi: f64, errors: ErrorSpec) -> Self {
        Self {
            intercept,
            coeffs: vec![phi],
            errors,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Checks that every root of `1 - sum phi_j z^j` lies outside the unit
    /// circle (by more than 1e-8), via the companion-matrix eigenvalues.
    pub fn validate(&self) -> Result<()> {
        self.errors.validate()?;
        if !self.intercept.is_finite() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite AR coefficient".into()));
        }
        if !is_stationary(&self.coeffs) {
            return Err(Error::NonstationaryCoefficients);
        }
        Ok(())
    }

    /// Mean `c / (1 - sum phi)`.
    pub fn mean(&self) -> f64 {
        self.intercept / (1.0 - self.coeffs.iter().sum::<f64>())
    }
}

pub(crate) fn is_stationary(coeffs: &[f64]) -> bool {
    let p = coeffs.len();
    if p == 0 {
        return true;
    }
    let companion = DMatrix::from_fn(p, p, |r, c| {
        if r == 0 {
            coeffs[c]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    // Root modulus > 1 + margin  <=>  eigenvalue modulus < 1 / (1 + margin).
    let bound = 1.0 / (1.0 + ROOT_MARGIN);
    companion
        .complex_eigenvalues()
        .iter()
        .all(|z| z.norm() < bound)
}

/// Stationary AR(p) draw of length `n` after `ARP_BURN_IN` discarded
/// observations. The errors are `simulate_errors(n + ARP_BURN_IN)`.
pub fn simulate_arp(spec: &ArpSpec, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    spec.validate()?;
    let e = simulate_errors(&spec.errors, n + ARP_BURN_IN, seed)?;
    let p = spec.order();
    // lags[j] = y_{t-1-j}
    let mut lags = vec![0.0; p];
    let mut out = Vec::with_capacity(n);
    for (t, e) in e.iter().enumerate() {
        let mut y = spec.intercept + e;
        for (phi, lag) in spec.coeffs.iter().zip(&lags) {
            y += phi * lag;
        }
        if p > 0 {
            lags.rotate_right(1);
            lags[0] = y;
        }
        if t >= ARP_BURN_IN {
            out.push(y);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(x: &[f64]) -> f64 {
        x.iter().sum::<f64>() / x.len() as f64
    }

    fn lag1_autocorr(x: &[f64]) -> f64 {
        let m = mean(x);
        let num: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        let den: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        num / den
    }

    #[test]
    fn gaussian_iid_moments() {
        let e = simulate_errors(&ErrorSpec::gaussian(1.0), 100_000, RngSeed(1)).unwrap();
        let m = mean(&e);
        let v = e.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / e.len() as f64;
        assert!(m.abs() < 0.02, "mean {m}");
        assert!((v - 1.0).abs() < 0.03, "var {v}");
    }

    #[test]
    fn ar1_error_autocorrelation() {
        let spec = ErrorSpec::gaussian(1.0).with_ar1(0.5);
        let e = simulate_errors(&spec, 100_000, RngSeed(2)).unwrap();
        assert!((lag1_autocorr(&e) - 0.5).abs() < 0.02);
    }

    #[test]
    fn errors_deterministic() {
        let spec = ErrorSpec {
            dist: ErrorDist::StudentT(6.0),
            dependence: Dependence::Ar1(0.3),
            scale: 2.0,
        };
        let a = simulate_errors(&spec, 500, RngSeed(9)).unwrap();
        let b = simulate_errors(&spec, 500, RngSeed(9)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, simulate_errors(&spec, 500, RngSeed(10)).unwrap());
    }

    #[test]
    fn student_t_unit_variance() {
        let spec = ErrorSpec {
            dist: ErrorDist::StudentT(8.0),
            dependence: Dependence::Iid,
            scale: 1.0,
        };
        let e = simulate_errors(&spec, 200_000, RngSeed(3)).unwrap();
        let v = e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64;
        assert!((v - 1.0).abs() < 0.04, "var {v}");
    }

    #[test]
    fn error_spec_validation() {
        let mut s = ErrorSpec::gaussian(1.0);
        s.dist = ErrorDist::StudentT(4.0);
        assert!(s.validate().is_err());
        assert!(ErrorSpec::gaussian(1.0).with_ar1(1.0).validate().is_err());
        assert!(ErrorSpec::gaussian(-1.0).validate().is_err());
    }

    #[test]
    fn zero_scale_unit_root_panel_is_zero() {
        let mut spec = PanelSpec::unit_root(50, 3);
        spec.errors.scale = 0.0;
        let p = simulate_ar1_panel(&spec, RngSeed(4)).unwrap();
        assert!(p.columns().iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_root_is_cumsum_of_errors() {
        let spec = PanelSpec::unit_root(300, 2);
        let seed = RngSeed(5);
        let p = simulate_ar1_panel(&spec, seed).unwrap();
        let e = panel_errors(&spec, seed).unwrap();
        for i in 0..2 {
            let mut acc = 0.0;
            let cs: Vec<f64> = e[i][PANEL_BURN_IN..]
                .iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect();
            assert_eq!(p.series(i), &cs[..]);
            // differencing recovers the errors exactly at t = 1
            assert_eq!(p.series(i)[0], e[i][PANEL_BURN_IN]);
        }
    }

    #[test]
    fn stationary_panel_autocorrelation() {
        let spec = PanelSpec {
            n: 100_000,
            k: 1,
            phis: vec![0.5],
            errors: ErrorSpec::default(),
            cross_dependence: CrossDependence::Independent,
        };
        let p = simulate_ar1_panel(&spec, RngSeed(6)).unwrap();
        assert!((lag1_autocorr(p.series(0)) - 0.5).abs() < 0.02);
    }

    #[test]
    fn panel_spec_validation() {
        let mut s = PanelSpec::unit_root(10, 2);
        s.phis = vec![1.0, 1.1];
        assert!(s.validate().is_err());
        s.phis = vec![1.0, 0.5, 0.2];
        assert!(s.validate().is_err());
        s.phis = vec![1.0];
        s.cross_dependence = CrossDependence::CommonFactor(1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn arp_examples() {
        let spec = ArpSpec::ar1(0.0, 0.0, ErrorSpec::default());
        let y = simulate_arp(&spec, 100, RngSeed(7)).unwrap();
        let e = simulate_errors(&spec.errors, 100 + ARP_BURN_IN, RngSeed(7)).unwrap();
        assert_eq!(&y[..], &e[ARP_BURN_IN..]);

        let spec = ArpSpec::ar1(1.0, 0.5, ErrorSpec::gaussian(0.0));
        let y = simulate_arp(&spec, 50, RngSeed(7)).unwrap();
        assert!(y.iter().all(|v| *v == 2.0));

        let ok = ArpSpec {
            intercept: 0.0,
            coeffs: vec![1.9, -0.95],
            errors: ErrorSpec::default(),
        };
        assert!(ok.validate().is_ok());
        let boundary = ArpSpec {
            coeffs: vec![1.0, 0.0],
            ..ok.clone()
        };
        assert_eq!(
            simulate_arp(&boundary, 10, RngSeed(0)),
            Err(Error::NonstationaryCoefficients)
        );
        assert!(!is_stationary(&[0.5, 0.5]));
        assert!(is_stationary(&[]));
    }
}
