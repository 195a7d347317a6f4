//! Max statistics over growing index sets: unit-root tests on panels,
//! white-noise tests on filtered residuals, and the Monte Carlo harness
//! that checks the coupling behaviour behind them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base;
pub mod cli;
pub mod config;
pub mod dgp;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod io;
pub mod unitroot;
pub mod whitenoise;

pub use base::{
    bounded_max_transform, lag_sequence, max_abs, running_max_abs, LagForm, LagRule, PanelData,
    RngSeed,
};
pub use config::{Experiment, ExperimentConfig};
pub use dgp::{
    simulate_ar1_panel, simulate_arp, simulate_errors, ArpSpec, CrossDependence, Dependence,
    ErrorDist, ErrorSpec, PanelSpec,
};
pub use error::{Error, Result};
pub use estimate::{
    default_bandwidth, long_run_variance, ols_ar1_no_intercept, ols_arp,
    prewhitened_long_run_variance, residual_autocorr, variance_pair, ArFit, LrvKernel,
};
pub use harness::{
    calibrate_ln, size_power_experiment, verify_expansion, verify_max_coupling, CouplingSelector,
    DgpSpec, McReport, McRow, TestSpec,
};
pub use io::{load_panel_csv, save_panel_csv};
pub use unitroot::{
    simulate_limit_law, t_stat_adjusted, t_stat_raw, unit_root_test, LimitLawSample,
    UnitRootConfig, UnitRootMode, UnitRootResult,
};
pub use whitenoise::{
    dwb_pvalue, expansion_gap, expansion_terms, max_corr_stat, white_noise_test, OracleMoments,
    WnConfig, WnMethod, WnTestResult,
};
