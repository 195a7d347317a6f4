//! Monte Carlo checks of the tests and the harness at moderate scale.

use maxseq::harness::{median, quantile_sorted};
use maxseq::unitroot::{normalized_bias, simulate_signed_limit};
use maxseq::whitenoise::{estimate_z_kernel, expansion_terms, gaussian_kernel_draws};
use maxseq::*;
use rayon::prelude::*;

fn iid_means(k: usize) -> DgpSpec {
    DgpSpec::Panel(PanelSpec {
        n: 0,
        k,
        phis: vec![0.0],
        errors: ErrorSpec::default(),
        cross_dependence: CrossDependence::Independent,
    })
}

#[test]
fn signed_limit_lower_quantile() {
    let mut d = simulate_signed_limit(10_000, 100_000, RngSeed(31), 1.0).unwrap();
    d.sort_by(f64::total_cmp);
    let q = quantile_sorted(&d, 0.05);
    assert!((-8.6..=-7.5).contains(&q), "{q}");
}

#[test]
fn raw_panel_statistic_matches_limit_median() {
    let law = simulate_limit_law(5, 2000, 4000, RngSeed(32), 1.0).unwrap();
    let spec = PanelSpec::unit_root(2000, 5);
    let stats: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|r| {
            let p = simulate_ar1_panel(&spec, RngSeed(33).stream(r)).unwrap();
            t_stat_raw(&p, 5).unwrap().max_stat
        })
        .collect();
    assert!(stats.iter().all(|s| s.is_finite()));
    let (emp, lim) = (median(&stats), law.quantile(0.5));
    assert!((emp / lim - 1.0).abs() < 0.2, "{emp} vs {lim}");
}

#[test]
fn statistic_diverges_under_alternative() {
    let mut spec = PanelSpec::unit_root(500, 4);
    spec.phis = vec![1.0, 0.95, 1.0, 1.0];
    let mut med = |n: usize| {
        spec.n = n;
        let s: Vec<f64> = (0..200u64)
            .into_par_iter()
            .map(|r| {
                let p = simulate_ar1_panel(&spec, RngSeed(34).stream(r)).unwrap();
                t_stat_adjusted(&p, 4, maxseq::default_bandwidth(n))
                    .unwrap()
                    .max_stat
            })
            .collect();
        median(&s)
    };
    let (small, large) = (med(500), med(2000));
    assert!(large >= 2.0 * small, "{small} -> {large}");
}

#[test]
fn raw_mode_with_true_ratio_has_size() {
    // AR(1) errors with unit innovations: sigma_eps^2 / sigma^2 = (4/3) / 4
    let cell = DgpSpec::Panel(PanelSpec {
        n: 0,
        k: 3,
        phis: vec![1.0],
        errors: ErrorSpec::gaussian(1.0).with_ar1(0.5),
        cross_dependence: CrossDependence::Independent,
    });
    let test = TestSpec::UnitRoot(UnitRootConfig {
        rule: LagRule::fixed(3).unwrap(),
        reps: 4000,
        m_steps: 2000,
        mode: UnitRootMode::Raw,
        ratio: 1.0 / 3.0,
        ..UnitRootConfig::default()
    });
    let rep = size_power_experiment(&test, &[cell], &[1000], 400, RngSeed(35)).unwrap();
    let r = rep.metric("rejection")[0].mean;
    assert!((0.01..=0.11).contains(&r), "{r}");
}

#[test]
fn white_noise_null_statistic_is_small() {
    let spec = ArpSpec::ar1(0.0, 0.0, ErrorSpec::default());
    let big = (0..20u64)
        .filter(|&r| {
            let y = simulate_arp(&spec, 100_000, RngSeed(36).stream(r)).unwrap();
            max_corr_stat(&y, 1, 5).unwrap().max_stat >= 4.5
        })
        .count();
    assert_eq!(big, 0);
}

#[test]
fn strong_residual_correlation_is_detected() {
    let spec = ArpSpec::ar1(0.0, 0.8, ErrorSpec::default());
    let y = simulate_arp(&spec, 2000, RngSeed(37)).unwrap();
    let r = max_corr_stat(&y, 0, 5).unwrap();
    assert!(r.max_stat > 10.0, "{}", r.max_stat);
    assert!((r.per_lag[0] / 2000f64.sqrt() - 0.8).abs() < 0.05);
}

#[test]
fn gaussian_kernel_and_bootstrap_agree_roughly() {
    let spec = ArpSpec::ar1(0.0, 0.3, ErrorSpec::default());
    let mut gaps = Vec::new();
    for r in 0..10u64 {
        let y = simulate_arp(&spec, 800, RngSeed(38).stream(r)).unwrap();
        let run = |method| {
            let cfg = WnConfig {
                lags: 4,
                reps: 999,
                method,
                ..WnConfig::default()
            };
            white_noise_test(&y, &cfg, RngSeed(39))
                .unwrap()
                .p_value
                .unwrap()
        };
        gaps.push((run(WnMethod::Bootstrap) - run(WnMethod::GaussianKernel)).abs());
    }
    assert!(median(&gaps) < 0.1, "{gaps:?}");
}

#[test]
fn kernel_draws_scale_with_covariance() {
    let e = simulate_errors(&ErrorSpec::default(), 5000, RngSeed(40)).unwrap();
    let fit = ols_arp(&e, 0).unwrap();
    let comps: Vec<_> = (1..=2).map(|h| expansion_terms(&fit, h).unwrap()).collect();
    let k = estimate_z_kernel(&comps, 3).unwrap();
    let mut d = gaussian_kernel_draws(&k, 20_000, RngSeed(41)).unwrap();
    d.sort_by(f64::total_cmp);
    // max of two near-independent |N(0,1)|: P(max <= q) = (2 Phi(q) - 1)^2 = 0.5 at q ~ 1.0
    let med = quantile_sorted(&d, 0.5);
    assert!((med - 1.0).abs() < 0.1, "{med}");
}

#[test]
fn means_coupling_and_calibration() {
    let rule = LagRule::power(1.0, 0.25).unwrap();
    let rep = verify_max_coupling(
        &iid_means(20),
        CouplingSelector::MeansVsZero,
        &[100, 1000, 10_000],
        &rule,
        200,
        RngSeed(42),
    )
    .unwrap();
    let gaps = rep.metric("gap");
    assert!(gaps.windows(2).all(|w| w[1].median < w[0].median));
    for r in &rep.rows {
        assert!(r.q05 <= r.median && r.median <= r.q95);
        assert_eq!(r.reps, 200);
    }
    let cal = calibrate_ln(
        &iid_means(20),
        CouplingSelector::MeansVsZero,
        0.05,
        &[100, 10_000],
        100,
        RngSeed(43),
    )
    .unwrap();
    let l_small = cal.rows[0].l_n.unwrap_or(0);
    let l_large = cal.rows[1].l_n.unwrap_or(0);
    assert!(l_large >= l_small && l_large == 20, "{l_small} {l_large}");
}

#[test]
fn expansion_gap_decreases_and_is_stable() {
    let spec = ArpSpec::ar1(0.0, 0.5, ErrorSpec::default());
    let rule = LagRule::fixed(5).unwrap();
    let rep = verify_expansion(&spec, &[250, 1000, 2000], &rule, 500, RngSeed(44)).unwrap();
    let g = rep.metric("gap");
    assert!(g.windows(2).all(|w| w[1].median < w[0].median), "{g:?}");
    let doubled = verify_expansion(&spec, &[250, 1000, 2000], &rule, 1000, RngSeed(45)).unwrap();
    for (a, b) in g.iter().zip(doubled.metric("gap")) {
        let se = (a.se.powi(2) + b.se.powi(2)).sqrt();
        assert!(
            (a.median - b.median).abs() <= 2.0 * se.max(a.se),
            "{} vs {}",
            a.median,
            b.median
        );
    }
}

#[test]
fn raw_vs_adjusted_coupling_under_iid_errors() {
    let dgp = DgpSpec::Panel(PanelSpec::unit_root(0, 4));
    let rep = verify_max_coupling(
        &dgp,
        CouplingSelector::RawVsAdjusted,
        &[200, 2000],
        &LagRule::fixed(4).unwrap(),
        100,
        RngSeed(46),
    )
    .unwrap();
    // with iid errors the correction vanishes asymptotically
    let g = rep.metric("max_diff");
    assert!(g[1].median < g[0].median);
}

#[test]
fn power_grows_with_sample_size() {
    let cells = [
        DgpSpec::Arp(ArpSpec::ar1(0.0, 0.15, ErrorSpec::default())),
        DgpSpec::Arp(ArpSpec::ar1(0.0, 0.0, ErrorSpec::default())),
    ];
    let test = TestSpec::WhiteNoise {
        cfg: WnConfig {
            p: 0,
            lags: 3,
            reps: 199,
            ..WnConfig::default()
        },
        rule: None,
    };
    let rep = size_power_experiment(&test, &cells, &[100, 400, 1600], 200, RngSeed(47)).unwrap();
    let rej = rep.metric("rejection");
    let alt: Vec<f64> = rej.iter().filter(|r| r.cell == 0).map(|r| r.mean).collect();
    assert!(alt.windows(2).all(|w| w[1] >= w[0]), "{alt:?}");
    assert!(alt[2] > 0.9);
    for r in rej.iter().filter(|r| r.cell == 1) {
        assert!(r.mean < 0.12, "null rejection {}", r.mean);
    }
}

#[test]
fn finite_sample_null_close_to_limit() {
    let spec = PanelSpec::unit_root(1000, 1);
    let mut s: Vec<f64> = (0..4000u64)
        .into_par_iter()
        .map(|r| {
            normalized_bias(
                simulate_ar1_panel(&spec, RngSeed(48).stream(r))
                    .unwrap()
                    .series(0),
            )
            .unwrap()
        })
        .collect();
    s.sort_by(f64::total_cmp);
    let mut lim = simulate_signed_limit(2000, 20_000, RngSeed(49), 1.0).unwrap();
    lim.sort_by(f64::total_cmp);
    for q in [0.05, 0.5, 0.95] {
        let (a, b) = (quantile_sorted(&s, q), quantile_sorted(&lim, q));
        assert!((a - b).abs() < 0.6, "q{q}: {a} vs {b}");
    }
}
