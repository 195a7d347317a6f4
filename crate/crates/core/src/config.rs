//! Experiment configuration files (TOML).
//!
//! ```toml
//! seed = 42
//! reps = 500
//! n_grid = [100, 10000]
//! output = "report.csv"          # optional, overridden by --out
//!
//! [experiment]
//! kind = "max_coupling"          # max_coupling | expansion | size_power | calibrate_ln
//! selector = "means_vs_zero"     # means_vs_zero | feasible_vs_oracle | raw_vs_adjusted
//! rule = "power:1:0.25"
//!
//! [[dgp]]
//! kind = "panel"
//! k = 50
//! phis = [0.0]
//! errors = { dist = "gaussian", dependence = "iid", scale = 1.0 }
//!
//! [test]                         # size_power only
//! kind = "unit_root"             # unit_root | white_noise
//! rule = "power:1:0.25"
//! level = 0.05
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::{LagRule, RngSeed};
use crate::error::{Error, Result};
use crate::harness::{
    calibrate_ln, size_power_experiment, verify_expansion, verify_max_coupling, CouplingSelector,
    DgpSpec, McReport, TestSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    MaxCoupling {
        #[serde(default)]
        selector: CouplingSelector,
        #[serde(default)]
        rule: LagRule,
    },
    Expansion {
        #[serde(default)]
        rule: LagRule,
    },
    SizePower,
    CalibrateLn {
        #[serde(default)]
        selector: CouplingSelector,
        tolerance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub reps: usize,
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub experiment: Experiment,
    pub dgp: Vec<DgpSpec>,
    #[serde(default)]
    pub test: Option<TestSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Check every section before any simulation starts.
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be positive".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "n_grid must be nonempty and increasing".into(),
            ));
        }
        if self.dgp.is_empty() {
            return Err(Error::Config(
                "at least one [[dgp]] section is required".into(),
            ));
        }
        for d in &self.dgp {
            d.validate()?;
        }
        let single = |name: &str| {
            if self.dgp.len() == 1 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} takes exactly one [[dgp]] section"
                )))
            }
        };
        match &self.experiment {
            Experiment::MaxCoupling { .. } => single("max_coupling")?,
            Experiment::Expansion { .. } => {
                single("expansion")?;
                if !matches!(self.dgp[0], DgpSpec::Arp(_)) {
                    return Err(Error::Config("expansion needs an arp DGP".into()));
                }
            }
            Experiment::CalibrateLn { tolerance, .. } => {
                single("calibrate_ln")?;
                if !(*tolerance >= 0.0) {
                    return Err(Error::Config("tolerance must be nonnegative".into()));
                }
            }
            Experiment::SizePower => match &self.test {
                None => return Err(Error::Config("size_power needs a [test] section".into())),
                Some(TestSpec::UnitRoot(c)) => c.validate()?,
                Some(TestSpec::WhiteNoise { cfg, .. }) => {
                    if !(cfg.level > 0.0 && cfg.level < 1.0) || cfg.reps == 0 {
                        return Err(Error::Config(
                            "white-noise level or reps out of range".into(),
                        ));
                    }
                }
            },
        }
        Ok(())
    }

    pub fn run(&self) -> Result<McReport> {
        let seed = RngSeed::new(self.seed);
        let dgp = &self.dgp[0];
        match &self.experiment {
            Experiment::MaxCoupling { selector, rule } => {
                verify_max_coupling(dgp, *selector, &self.n_grid, rule, self.reps, seed)
            }
            Experiment::Expansion { rule } => match dgp {
                DgpSpec::Arp(spec) => verify_expansion(spec, &self.n_grid, rule, self.reps, seed),
                DgpSpec::Panel(_) => Err(Error::Config("expansion needs an arp DGP".into())),
            },
            Experiment::SizePower => {
                let test = self
                    .test
                    .as_ref()
                    .ok_or_else(|| Error::Config("missing [test]".into()))?;
                size_power_experiment(test, &self.dgp, &self.n_grid, self.reps, seed)
            }
            Experiment::CalibrateLn {
                selector,
                tolerance,
            } => calibrate_ln(dgp, *selector, *tolerance, &self.n_grid, self.reps, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{Dependence, ErrorDist};

    const COUPLING: &str = r#"
seed = 42
reps = 60
n_grid = [100, 400]

[experiment]
kind = "max_coupling"
selector = "means_vs_zero"
rule = "power:1:0.25"

[[dgp]]
kind = "panel"
k = 10
phis = [0.0]
errors = { dist = { student_t = 6.0 }, dependence = { ar1 = 0.3 }, scale = 2.0 }
"#;

    #[test]
    fn parses_documented_layout() {
        let cfg = ExperimentConfig::from_toml(COUPLING).unwrap();
        assert_eq!(cfg.n_grid, vec![100, 400]);
        let DgpSpec::Panel(p) = &cfg.dgp[0] else {
            panic!("panel expected")
        };
        assert_eq!(p.errors.dist, ErrorDist::StudentT(6.0));
        assert_eq!(p.errors.dependence, Dependence::Ar1(0.3));
        let rep = cfg.run().unwrap();
        assert_eq!(rep.rows.len(), 10);
        assert!(rep.rows.iter().all(|r| r.reps == 60));
    }

    #[test]
    fn size_power_sections() {
        let text = r#"
seed = 1
reps = 10
n_grid = [100]
[experiment]
kind = "size_power"
[[dgp]]
kind = "arp"
coeffs = [0.0]
[test]
kind = "white_noise"
p = 1
reps = 49
rule = "power:1:0.25"
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let Some(TestSpec::WhiteNoise { cfg: wn, rule }) = &cfg.test else {
            panic!()
        };
        assert_eq!(wn.reps, 49);
        assert_eq!(
            rule.as_ref().map(ToString::to_string).as_deref(),
            Some("power:1:0.25")
        );
        let rep = cfg.run().unwrap();
        assert_eq!(rep.metric("rejection")[0].l_n, Some(3));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            COUPLING.replace("n_grid = [100, 400]", "n_grid = [400, 100]"),
            COUPLING.replace("reps = 60", "reps = 0"),
            COUPLING.replace("phis = [0.0]", "phis = [0.0, 0.5]"),
            COUPLING.replace("kind = \"max_coupling\"", "kind = \"size_power\""),
            COUPLING.replace("seed = 42", "seed = 42\nbogus = 1"),
            COUPLING.replace("rule = \"power:1:0.25\"", "rule = \"power:x\""),
        ];
        for text in &bad {
            let err = ExperimentConfig::from_toml(text).unwrap_err();
            assert!(err.is_validation(), "{err}");
        }
    }
}
