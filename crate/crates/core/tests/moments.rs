//! Large-sample moment checks for the simulators and estimators, each
//! against a closed-form population value.

use maxseq::estimate::default_bandwidth;
use maxseq::whitenoise::{estimate_z_kernel, expansion_terms};
use maxseq::*;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn autocorr1(x: &[f64]) -> f64 {
    let m = mean(x);
    let num: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    num / x.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
}

#[test]
fn ar2_variance_matches_closed_form() {
    // gamma_0 = (1 - phi2) s2 / ((1 + phi2) ((1 - phi2)^2 - phi1^2))
    let (p1, p2) = (0.5, 0.2);
    let spec = ArpSpec {
        intercept: 1.0,
        coeffs: vec![p1, p2],
        errors: ErrorSpec::gaussian(1.5),
    };
    let g0 = (1.0 - p2) * 2.25 / ((1.0 + p2) * ((1.0 - p2).powi(2) - p1 * p1));
    let y = simulate_arp(&spec, 100_000, RngSeed(1)).unwrap();
    assert!((variance(&y) / g0 - 1.0).abs() < 0.03);
    assert!((mean(&y) - spec.mean()).abs() < 0.05);
}

#[test]
fn student_t_ar1_errors_keep_autocorrelation() {
    let spec = ErrorSpec {
        dist: ErrorDist::StudentT(6.0),
        dependence: Dependence::Ar1(0.5),
        scale: 1.0,
    };
    let e = simulate_errors(&spec, 100_000, RngSeed(2)).unwrap();
    assert!((autocorr1(&e) - 0.5).abs() < 0.02);
    assert!((variance(&e) / spec.variance() - 1.0).abs() < 0.05);
}

#[test]
fn common_factor_keeps_marginals_and_adds_correlation() {
    let mut spec = PanelSpec::unit_root(2, 2);
    spec.phis = vec![0.0];
    spec.n = 50_000;
    spec.cross_dependence = CrossDependence::CommonFactor(0.6);
    let dep = simulate_ar1_panel(&spec, RngSeed(3)).unwrap();
    spec.cross_dependence = CrossDependence::Independent;
    let ind = simulate_ar1_panel(&spec, RngSeed(4)).unwrap();
    let mut a = dep.series(0).to_vec();
    let mut b = ind.series(0).to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let i = (q * (a.len() - 1) as f64) as usize;
        assert!(
            (a[i] - b[i]).abs() < 0.05,
            "quantile {q}: {} vs {}",
            a[i],
            b[i]
        );
    }
    let (x, y) = (dep.series(0), dep.series(1));
    let cov = x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>() / x.len() as f64;
    assert!((cov - 0.6).abs() < 0.03, "cross covariance {cov}");
}

#[test]
fn iid_long_run_variance_ratio() {
    let n = 100_000;
    let e = simulate_errors(&ErrorSpec::default(), n, RngSeed(5)).unwrap();
    let bw = default_bandwidth(n);
    let ratio = long_run_variance(&e, bw).unwrap() / long_run_variance(&e, 0).unwrap();
    assert!((0.95..=1.05).contains(&ratio), "{ratio}");
}

#[test]
fn ar1_long_run_variance_with_wide_bandwidth() {
    // LRV of AR(1) errors with unit innovations is 1 / (1 - rho)^2 = 4
    let spec = ErrorSpec::gaussian(1.0).with_ar1(0.5);
    let e = simulate_errors(&spec, 200_000, RngSeed(6)).unwrap();
    let lrv = long_run_variance(&e, 60).unwrap();
    assert!((lrv / 4.0 - 1.0).abs() < 0.06, "{lrv}");
}

#[test]
fn residual_autocorrelation_null_scale() {
    let e = simulate_errors(&ErrorSpec::default(), 100_000, RngSeed(7)).unwrap();
    assert!(residual_autocorr(&e, 3).unwrap().abs() < 4.0);
}

#[test]
fn d_hat_matches_ar1_closed_form() {
    let spec = ArpSpec::ar1(0.0, 0.5, ErrorSpec::default());
    let y = simulate_arp(&spec, 100_000, RngSeed(8)).unwrap();
    let fit = ols_arp(&y, 1).unwrap();
    let c = expansion_terms(&fit, 2).unwrap();
    assert!((c.d_hat[1] + 0.5).abs() < 0.03, "{:?}", c.d_hat);
    assert!(c.d_hat[0].abs() < 0.03);
}

#[test]
fn kernel_diagonal_is_one_for_iid_noise() {
    let e = simulate_errors(&ErrorSpec::gaussian(2.0), 100_000, RngSeed(9)).unwrap();
    let fit = ols_arp(&e, 0).unwrap();
    let comps: Vec<_> = (1..=3).map(|h| expansion_terms(&fit, h).unwrap()).collect();
    let k = estimate_z_kernel(&comps, 0).unwrap();
    for i in 0..3 {
        assert!((k.matrix[(i, i)] - 1.0).abs() < 0.05, "{}", k.matrix);
        for j in 0..3 {
            assert_eq!(k.matrix[(i, j)], k.matrix[(j, i)]);
        }
    }
}

#[test]
fn ols_recovers_ar2_coefficients() {
    let spec = ArpSpec {
        intercept: 0.3,
        coeffs: vec![1.2, -0.5],
        errors: ErrorSpec::default(),
    };
    let y = simulate_arp(&spec, 100_000, RngSeed(10)).unwrap();
    let fit = ols_arp(&y, 2).unwrap();
    for (a, b) in fit.theta_hat.iter().zip([0.3, 1.2, -0.5]) {
        assert!((a - b).abs() < 0.02, "{:?}", fit.theta_hat);
    }
    assert!((fit.sigma2_eps_hat - 1.0).abs() < 0.02);
}
