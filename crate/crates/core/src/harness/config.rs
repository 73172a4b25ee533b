use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Budget, DEFAULT_BUDGET};

/// Environment variable holding the default enumeration budget.
pub const BUDGET_ENV: &str = "REPREP_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Anchor,
    Repeat,
    Decay,
    DepbreakVerify,
    QuantumCheck,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantumSuite {
    Toolbox,
    Phi,
    Rounding,
}

/// One experiment, usually read from a TOML file.
///
/// `coords` is 1-based. Relative paths are resolved against the directory
/// of the file the configuration was loaded from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub game: Option<PathBuf>,
    pub n: Option<usize>,
    /// Inclusive range of repetition counts.
    pub n_range: Option<[usize; 2]>,
    pub alpha: Option<String>,
    pub coords: Option<Vec<usize>>,
    pub strategy: Option<PathBuf>,
    pub suite: Option<QuantumSuite>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub materialize: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            cfg.rebase(dir);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, dir: &Path) {
        for p in [&mut self.game, &mut self.strategy, &mut self.out].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }

    /// Checks that the fields the mode needs are present.
    pub fn validate(&self) -> Result<Mode> {
        let mode = self
            .mode
            .ok_or_else(|| Error::Config("no mode given; expected one of solve, anchor, repeat, decay, depbreak-verify, quantum-check, verify".into()))?;
        let need = |ok: bool, field: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("mode {mode:?} needs `{field}`")))
            }
        };
        if mode != Mode::QuantumCheck {
            need(self.game.is_some(), "game")?;
        }
        match mode {
            Mode::Anchor => need(self.alpha.is_some(), "alpha")?,
            Mode::Repeat | Mode::DepbreakVerify => need(self.n.is_some(), "n")?,
            Mode::Decay => need(self.n.is_some() || self.n_range.is_some(), "n_range")?,
            Mode::QuantumCheck => {
                need(self.suite.is_some(), "suite")?;
                if self.suite != Some(QuantumSuite::Toolbox) {
                    need(self.game.is_some(), "game")?;
                    need(self.n.is_some(), "n")?;
                }
            }
            Mode::Solve | Mode::Verify => {}
        }
        if self.budget == Some(0) {
            return Err(Error::Config("budget must be positive".into()));
        }
        if let Some(n) = self.n {
            need(n >= 1, "n >= 1")?;
        }
        if let Some([lo, hi]) = self.n_range {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("invalid n_range [{lo}, {hi}]")));
            }
        }
        Ok(mode)
    }

    /// Inclusive repetition range, from `n_range` or a single `n`.
    pub fn range(&self) -> Option<(usize, usize)> {
        self.n_range.map(|[a, b]| (a, b)).or(self.n.map(|n| (n, n)))
    }

    pub fn seed(&self) -> u64 {
        self.seeds.first().copied().unwrap_or(0)
    }

    pub fn budget(&self) -> Result<Budget> {
        resolve_budget(self.budget)
    }
}

/// Explicit budget, else `REPREP_BUDGET`, else the default.
pub fn resolve_budget(explicit: Option<u64>) -> Result<Budget> {
    let value = match explicit {
        Some(b) => b,
        None => match std::env::var(BUDGET_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{BUDGET_ENV}={s:?} is not a positive integer")))?,
            Err(_) => DEFAULT_BUDGET,
        },
    };
    if value == 0 {
        return Err(Error::Config("budget must be positive".into()));
    }
    Ok(Budget::new(value))
}
