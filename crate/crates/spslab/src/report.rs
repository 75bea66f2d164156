use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use spslab_core::grid::{Field3D, RadialField};

use crate::config::ScenarioConfig;
use crate::error::Result;

/// One output row. Keys keep insertion order, which fixes the CSV columns.
pub type Row = Map<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
    /// Indices into the report rows this verdict was computed from.
    pub rows: Vec<usize>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>, rows: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            detail: detail.into(),
            rows,
        }
    }

    pub fn inconclusive(name: impl Into<String>, detail: impl Into<String>, rows: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            outcome: Outcome::Inconclusive,
            detail: detail.into(),
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub os: String,
    pub arch: String,
    pub available_cores: usize,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            available_cores: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// A field to be written next to the report.
#[derive(Debug, Clone)]
pub enum FieldData {
    Radial(RadialField),
    Box(Field3D),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub workers: usize,
    pub environment: Environment,
    pub config: ScenarioConfig,
    pub verdicts: Vec<Verdict>,
    pub rows: Vec<Row>,
    /// Wall time in seconds spent producing each row. Kept out of the CSV
    /// so that it stays reproducible.
    pub runtimes: Vec<f64>,
    /// Field files, relative to the output directory.
    pub fields: Vec<String>,
    #[serde(skip)]
    pub field_data: Vec<(String, FieldData)>,
}

impl ScenarioReport {
    /// 0 when every verdict passes, 2 on any failure, 3 when nothing failed
    /// but something was inconclusive.
    pub fn exit_code(&self) -> u8 {
        if self.verdicts.iter().any(|v| v.outcome == Outcome::Fail) {
            2
        } else if self.verdicts.iter().any(|v| v.outcome == Outcome::Inconclusive) {
            3
        } else {
            0
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Column names in order of first appearance.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let cols = self.columns();
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&cols)?;
        for row in &self.rows {
            out.write_record(cols.iter().map(|c| cell(row.get(c))))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `report.json`, `rows.csv` and the field files into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        if !self.field_data.is_empty() {
            let fdir = dir.join("fields");
            fs::create_dir_all(&fdir)?;
            self.fields.clear();
            for (name, data) in &self.field_data {
                match data {
                    FieldData::Radial(f) => {
                        let path = fdir.join(format!("{name}.csv"));
                        f.write_csv(fs::File::create(&path)?)
                            .map_err(|e| crate::error::Error::Module {
                                context: format!("writing {}", path.display()),
                                source: e,
                            })?;
                        self.fields.push(relative(dir, &path));
                    }
                    FieldData::Box(f) => {
                        let (bin, header) = f.write_raw(&fdir, name).map_err(|e| {
                            crate::error::Error::Module {
                                context: format!("writing field {name}"),
                                source: e,
                            }
                        })?;
                        self.fields.push(relative(dir, &bin));
                        self.fields.push(relative(dir, &header));
                    }
                }
            }
        }
        self.write_csv(fs::File::create(dir.join("rows.csv"))?)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

fn relative(dir: &Path, path: &PathBuf) -> String {
    path.strip_prefix(dir).unwrap_or(path).display().to_string()
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}
