//! Scenario configuration and plain-text state files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlations::OptimizerSettings;
use crate::densop::{Op4, TwoQubitState};
use crate::error::{Error, Result};
use crate::tomography::MleSettings;

fn uniform_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Parameters shared by all scenarios. Every field has a default, and unknown
/// keys are rejected when parsing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Optional scenario id; when set it must match the subcommand.
    pub scenario: Option<String>,
    pub seed: u64,
    pub damping_grid: Vec<f64>,
    pub werner_grid: Vec<f64>,
    pub shots_grid: Vec<u64>,
    /// Shots per setting for the histogram study.
    pub shots: u64,
    pub copies: usize,
    pub histogram_bins: usize,
    pub rank_tolerance: f64,
    /// Instances per case for `rank-table`.
    pub rank_table_samples: usize,
    pub optimizer: OptimizerSettings,
    pub mle: MleSettings,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: None,
            seed: 42,
            damping_grid: uniform_grid(11),
            werner_grid: uniform_grid(21),
            shots_grid: vec![100, 250, 500, 1000],
            shots: 1000,
            copies: 70,
            histogram_bins: 20,
            rank_tolerance: crate::correlations::DEFAULT_RANK_TOLERANCE,
            rank_table_samples: 1000,
            optimizer: OptimizerSettings::default(),
            mle: MleSettings::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn check_unit_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("{name} is empty")));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("{name} value {p} outside [0,1]")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_grid("damping_grid", &self.damping_grid)?;
        check_unit_grid("werner_grid", &self.werner_grid)?;
        if self.shots_grid.is_empty() || self.shots_grid.contains(&0) {
            return Err(Error::invalid("shots_grid must be nonempty with positive entries"));
        }
        if self.shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        if self.copies < 2 {
            return Err(Error::invalid("copies must be at least 2"));
        }
        if self.histogram_bins < 2 {
            return Err(Error::invalid("histogram_bins must be at least 2"));
        }
        if !(self.rank_tolerance > 0.0 && self.rank_tolerance < 0.5) {
            return Err(Error::invalid(format!("rank_tolerance {} outside (0, 0.5)", self.rank_tolerance)));
        }
        if self.rank_table_samples == 0 {
            return Err(Error::invalid("rank_table_samples must be positive"));
        }
        if self.mle.max_iterations == 0 || self.mle.tolerance.is_nan() || self.mle.tolerance <= 0.0 {
            return Err(Error::invalid("mle needs positive max_iterations and tolerance"));
        }
        self.optimizer.validate()
    }

    /// Errors if the config names a different scenario.
    pub fn expect_scenario(&self, id: &str) -> Result<()> {
        match &self.scenario {
            Some(s) if s != id => Err(Error::invalid(format!("config is for scenario '{s}', not '{id}'"))),
            _ => Ok(()),
        }
    }
}

/// Parses a 4x4 complex matrix given as 16 row-major lines of `re im`.
/// Blank lines and `#` comments are ignored.
pub fn parse_state(text: &str) -> Result<TwoQubitState> {
    let mut entries = Vec::with_capacity(16);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: expected 're im', got '{line}'", lineno + 1));
        let mut fields = line.split_whitespace();
        let (re, im) = match (fields.next(), fields.next(), fields.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(bad()),
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        entries.push(num_complex::Complex64::new(re, im));
    }
    if entries.len() != 16 {
        return Err(Error::Parse(format!("expected 16 matrix entries, found {}", entries.len())));
    }
    TwoQubitState::new(Op4::from_row_slice(&entries))
}

pub fn format_state(rho: &TwoQubitState) -> String {
    rho.to_pairs().iter().map(|[re, im]| format!("{re:e} {im:e}\n")).collect()
}

pub fn load_state(path: &Path) -> Result<TwoQubitState> {
    parse_state(&fs::read_to_string(path)?)
}
