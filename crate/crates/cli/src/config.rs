//! Run configuration: defaults, then an optional JSON file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tropwave::rat::{parse_rat, serde_rat};
use tropwave::Rat;

use crate::fail::Failure;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub denom_bound: i64,
    #[serde(with = "serde_rat")]
    pub tol: Rat,
    pub max_steps: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            denom_bound: 64,
            tol: Rat::new(1.into(), 1_000_000_000.into()),
            max_steps: 100_000,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// JSON file with any of: seed, denom_bound, tol, max_steps, out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Rational tolerance, e.g. 1/1000000000.
    #[arg(long, global = true)]
    pub tol: Option<String>,
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    /// Random points are drawn from the grid (1/denom-bound)Z².
    #[arg(long, global = true)]
    pub denom_bound: Option<i64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = &self.tol {
            cfg.tol = parse_rat(t)?;
        }
        if let Some(m) = self.max_steps {
            cfg.max_steps = m;
        }
        if let Some(d) = self.denom_bound {
            cfg.denom_bound = d;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if cfg.tol <= Rat::from_integer(0.into()) {
            return Err(Failure::parse("tolerance must be positive"));
        }
        if cfg.max_steps == 0 {
            return Err(Failure::parse("max-steps must be at least 1"));
        }
        if cfg.denom_bound < 1 {
            return Err(Failure::parse("denom-bound must be at least 1"));
        }
        Ok(cfg)
    }
}

pub fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))
}
