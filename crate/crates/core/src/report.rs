//! Machine-readable scenario reports: a JSON document plus one CSV per table.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::densop::DensityOperator;
use crate::error::{Error, Result};
use crate::tomography::RNG_NAME;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub entropy_base: &'static str,
    pub fidelity: &'static str,
    pub basis_ordering: &'static str,
    pub correlation_matrix: &'static str,
    pub rank_threshold: &'static str,
    pub discord_optimizer: &'static str,
    pub measurement_model: &'static str,
    pub mle: &'static str,
    pub rng: &'static str,
    pub operator_layout: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            entropy_base: "log2 (bits)",
            fidelity: "squared Uhlmann, F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2",
            basis_ordering: "|00>, |01>, |10>, |11>; qubit A is the left tensor factor",
            correlation_matrix: "m_ij = Tr[rho sigma_i (x) sigma_j], i,j over (I, X, Y, Z), no 1/4 factor",
            rank_threshold: "singular values above rank_tolerance times the largest",
            discord_optimizer: "Fibonacci-sphere grid then pattern search over projective measurement axes",
            measurement_model: "9 product-Pauli settings x 4 outcomes, multinomial per setting",
            mle: "diluted iterative R rho R, epsilon = 0.1, probabilities floored at 1e-12",
            rng: RNG_NAME,
            operator_layout: "row-major [re, im] pairs",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub artifact: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub seed: u64,
    pub conventions: Conventions,
    pub config: ScenarioConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => serde_json::to_string(v).expect("finite float"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; text cells are skipped.
    pub fn column(&self, name: &str) -> Vec<f64> {
        match self.column_index(name) {
            Some(i) => self.rows.iter().filter_map(|r| r[i].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    /// Cell in the first row whose `key` column renders as `value`.
    pub fn lookup(&self, key: &str, value: &str, column: &str) -> Option<&Cell> {
        let k = self.column_index(key)?;
        let c = self.column_index(column)?;
        self.rows.iter().find(|r| r[k].render() == value).map(|r| &r[c])
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedOperator {
    pub name: String,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub tables: Vec<Table>,
    pub operators: Vec<NamedOperator>,
}

impl Report {
    pub fn new(scenario: &str, config: &ScenarioConfig) -> Self {
        Report {
            metadata: Metadata {
                artifact: "qdiscord",
                version: VERSION,
                scenario: scenario.to_string(),
                seed: config.seed,
                conventions: Conventions::default(),
                config: config.clone(),
            },
            tables: Vec::new(),
            operators: Vec::new(),
        }
    }

    pub fn add_operator<const N: usize>(&mut self, name: impl Into<String>, rho: &DensityOperator<N>) {
        self.operators.push(NamedOperator { name: name.into(), dim: N, entries: rho.to_pairs() });
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Every numeric cell and operator entry must be finite.
    pub fn validate(&self) -> Result<()> {
        for t in &self.tables {
            for row in &t.rows {
                if row.iter().any(|c| matches!(c, Cell::Num(v) if !v.is_finite())) {
                    return Err(Error::InternalInconsistency(format!("non-finite cell in table {}", t.name)));
                }
            }
        }
        for op in &self.operators {
            if op.entries.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InternalInconsistency(format!("non-finite entry in operator {}", op.name)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    /// Writes `<scenario>.json` and `<scenario>_<table>.csv`; returns the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        self.validate()?;
        fs::create_dir_all(dir)?;
        let stem = self.metadata.scenario.replace('-', "_");
        let mut written = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        fs::write(&json, self.to_json())?;
        written.push(json);
        for t in &self.tables {
            let path = dir.join(format!("{stem}_{}.csv", t.name));
            fs::write(&path, t.to_csv()?)?;
            written.push(path);
        }
        Ok(written)
    }
}
