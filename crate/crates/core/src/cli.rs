//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::base::PanelData;
use crate::base::{LagRule, RngSeed};
use crate::config::ExperimentConfig;
use crate::dgp::{
    simulate_ar1_panel, simulate_arp, ArpSpec, CrossDependence, Dependence, ErrorSpec, PanelSpec,
};
use crate::error::{Error, Result};
use crate::estimate::LrvKernel;
use crate::io::{load_panel_csv, save_panel_csv, unit_root_json, white_noise_json};
use crate::unitroot::{simulate_limit_law, unit_root_test, UnitRootConfig, UnitRootMode};
use crate::whitenoise::{auto_block_len, white_noise_test, WnConfig, WnMethod};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "MAXSEQ_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "maxseq",
    version,
    about = "Max-statistic unit-root and white-noise tests"
)]
struct Cli {
    /// Worker threads (default: all cores, or MAXSEQ_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate an AR(1) panel or an AR(p) series to CSV.
    Simulate(SimulateArgs),
    /// Max unit-root test on a panel CSV.
    Unitroot(UnitRootArgs),
    /// Max residual-autocorrelation white-noise test on one series.
    Whitenoise(WhiteNoiseArgs),
    /// Run a Monte Carlo experiment described by a TOML config.
    Montecarlo(MonteCarloArgs),
    /// Simulate critical values of the unit-root limit law.
    Limits(LimitsArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    /// Number of panel series.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// AR(1) roots, one per series or a single broadcast value.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    phi: Vec<f64>,
    /// AR(p) coefficients; simulates a single stationary series instead of a panel.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    intercept: f64,
    /// Error law: `gaussian` or `t:DF`.
    #[arg(long, default_value = "gaussian")]
    dist: String,
    /// AR(1) coefficient of the errors.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Common-factor weight for cross-series dependence.
    #[arg(long)]
    factor: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct UnitRootArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "power:1:0.25")]
    rule: LagRule,
    /// Upper bound on `L_n`.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Limit-law replications.
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 10_000)]
    m_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bartlett bandwidth (default `floor(4 (n/100)^{2/9})`).
    #[arg(long)]
    bandwidth: Option<usize>,
    /// Long-run variance estimator for the correction.
    #[arg(long, value_enum, default_value_t = KernelArg::PrewhitenedBartlett)]
    kernel: KernelArg,
    /// Use the unadjusted statistic `n (phi_hat - 1)`.
    #[arg(long)]
    raw: bool,
    /// Variance ratio for the raw limit law.
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Bartlett,
    PrewhitenedBartlett,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Bootstrap,
    GaussianKernel,
}

#[derive(Debug, Args)]
struct WhiteNoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Series label or zero-based column index (default: first column).
    #[arg(long)]
    column: Option<String>,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long = "L", default_value_t = 5)]
    lags: usize,
    /// Bootstrap block length, or `auto` for `floor(n^{1/3})`.
    #[arg(long, default_value = "auto")]
    block: String,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Bootstrap)]
    method: MethodArg,
    #[arg(long)]
    bandwidth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    #[arg(long)]
    config: PathBuf,
    /// `.csv` or `.json` report; defaults to the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    /// Number of series in the max.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 10_000)]
    m_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `argv` (program name first), run, and return the exit code:
/// 0 on success, 1 for usage or validation errors, 2 for runtime failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    let outcome = match threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::Io(e.to_string())),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Unitroot(a) => unitroot(a),
        Command::Whitenoise(a) => whitenoise(a),
        Command::Montecarlo(a) => montecarlo(a),
        Command::Limits(a) => limits(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<String> {
    let errors = ErrorSpec {
        dist: a.dist.parse()?,
        dependence: a.rho.map_or(Dependence::Iid, Dependence::Ar1),
        scale: a.scale,
    };
    let seed = RngSeed::new(a.seed);
    let panel = match a.coeffs {
        Some(coeffs) => {
            let spec = ArpSpec {
                intercept: a.intercept,
                coeffs,
                errors,
            };
            PanelData::from_columns(vec![simulate_arp(&spec, a.n, seed)?])?
        }
        None => {
            let spec = PanelSpec {
                n: a.n,
                k: a.k,
                phis: a.phi,
                errors,
                cross_dependence: a
                    .factor
                    .map_or(CrossDependence::Independent, CrossDependence::CommonFactor),
            };
            simulate_ar1_panel(&spec, seed)?
        }
    };
    save_panel_csv(&panel, &a.out)?;
    Ok(format!(
        "simulated n={} k={} -> {}",
        panel.n(),
        panel.k(),
        a.out.display()
    ))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

fn unitroot(a: UnitRootArgs) -> Result<String> {
    let panel = load_panel_csv(&a.input)?;
    let rule = match a.cap {
        Some(cap) => a.rule.with_cap(cap)?,
        None => a.rule,
    };
    let cfg = UnitRootConfig {
        rule,
        level: a.level,
        reps: a.reps,
        m_steps: a.m_steps,
        bandwidth: a.bandwidth,
        kernel: match a.kernel {
            KernelArg::Bartlett => LrvKernel::Bartlett,
            KernelArg::PrewhitenedBartlett => LrvKernel::PrewhitenedBartlett,
        },
        mode: if a.raw {
            UnitRootMode::Raw
        } else {
            UnitRootMode::Adjusted
        },
        ratio: a.ratio,
    };
    let r = unit_root_test(&panel, &cfg, RngSeed::new(a.seed))?;
    write_out(a.out.as_deref(), &unit_root_json(&r, panel.labels()))?;
    Ok(format!(
        "unitroot: stat={:.4} L={} critical_value={:.4} p_value={:.4} {}",
        r.max_stat,
        r.l_used,
        r.critical_value,
        r.p_value,
        if r.reject { "reject" } else { "do not reject" }
    ))
}

fn select_column(panel: &PanelData, column: Option<&str>) -> Result<usize> {
    let Some(c) = column else { return Ok(0) };
    if let Some(i) = panel.labels().iter().position(|l| l == c) {
        return Ok(i);
    }
    match c.parse::<usize>() {
        Ok(i) if i < panel.k() => Ok(i),
        _ => Err(Error::InvalidArgument(format!("no column {c:?}"))),
    }
}

fn whitenoise(a: WhiteNoiseArgs) -> Result<String> {
    let panel = load_panel_csv(&a.input)?;
    let col = select_column(&panel, a.column.as_deref())?;
    let series = panel.series(col);
    let block_len = match a.block.as_str() {
        "auto" => auto_block_len(series.len()),
        b => b
            .parse()
            .ok()
            .filter(|&b: &usize| b > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("bad block length {b:?}")))?,
    };
    let method = match a.method {
        MethodArg::Bootstrap => WnMethod::Bootstrap,
        MethodArg::GaussianKernel => WnMethod::GaussianKernel,
    };
    let cfg = WnConfig {
        p: a.p,
        lags: a.lags,
        block_len: Some(block_len),
        reps: a.reps,
        level: a.level,
        method,
        bandwidth: a.bandwidth,
    };
    let r = white_noise_test(series, &cfg, RngSeed::new(a.seed))?;
    let block = (method == WnMethod::Bootstrap).then_some(block_len);
    write_out(
        a.out.as_deref(),
        &white_noise_json(&r, &panel.labels()[col], a.p, block),
    )?;
    let p_value = r.p_value.unwrap_or(f64::NAN);
    Ok(format!(
        "whitenoise: stat={:.4} L={} p_value={:.4} {}",
        r.max_stat,
        r.lags,
        p_value,
        if r.reject == Some(true) {
            "reject"
        } else {
            "do not reject"
        }
    ))
}

fn montecarlo(a: MonteCarloArgs) -> Result<String> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let out = a.out.or_else(|| cfg.output.clone());
    let report = cfg.run()?;
    if let Some(path) = &out {
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let text = if json {
            report.to_json()
        } else {
            report.to_csv()
        };
        std::fs::write(path, text)?;
    } else {
        print!("{}", report.to_csv());
    }
    let failures: usize = report.rows.iter().map(|r| r.failures).sum();
    Ok(format!(
        "montecarlo: {} rows, {} failed replications{}",
        report.rows.len(),
        failures,
        out.map(|p| format!(" -> {}", p.display()))
            .unwrap_or_default()
    ))
}

fn limits(a: LimitsArgs) -> Result<String> {
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0,1), got {}",
            a.level
        )));
    }
    let law = simulate_limit_law(a.k, a.m_steps, a.reps, RngSeed::new(a.seed), a.ratio)?;
    let cv = law.critical_value(a.level);
    let quantiles: Vec<(f64, f64)> = [0.5, 0.9, 0.95, 0.99]
        .iter()
        .map(|&q| (q, law.quantile(q)))
        .collect();
    let json = serde_json::json!({
        "schema_version": crate::io::SCHEMA_VERSION,
        "test": "limits",
        "k": a.k,
        "level": a.level,
        "reps": a.reps,
        "m_steps": a.m_steps,
        "ratio": a.ratio,
        "critical_value": cv,
        "quantiles": quantiles.iter().map(|(q, v)| serde_json::json!({"q": q, "value": v})).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&json).expect("json value serializes");
    text.push('\n');
    write_out(a.out.as_deref(), &text)?;
    Ok(format!(
        "limits: k={} level={} critical_value={cv:.4}",
        a.k, a.level
    ))
}
