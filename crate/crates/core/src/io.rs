//! Persistent formats: canonical JSON (sorted keys, floats to 17 significant
//! digits, so identical results give identical bytes) and CSV tables of the
//! pseudo-energies.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::tba::{SolverConfig, TbaState};
use crate::{Error, Result, Z5_ALL};

pub const SCHEMA: &str = "dtba/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// A converged solution as written to disk. Complex numbers are `[re, im]`
/// pairs; `chi` and `epsilon` are indexed `[l or k + 2][grid point]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema: String,
    pub a: Complex64,
    pub grid: GridSummary,
    pub chi: Vec<Vec<Complex64>>,
    pub epsilon: Vec<Vec<Complex64>>,
    pub iterations: usize,
    pub residual: f64,
    pub config: SolverConfig,
}

impl SolutionFile {
    pub fn from_state(state: &TbaState) -> Self {
        let g = state.config.grid;
        Self {
            schema: SCHEMA.into(),
            a: state.a,
            grid: GridSummary {
                min: g.sigma_min,
                max: g.sigma_max,
                n: g.n,
            },
            chi: state.chi.to_vec(),
            epsilon: state.eps.to_vec(),
            iterations: state.iteration,
            residual: state.residual,
            config: state.config,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Io(format!("unknown schema {:?}, expected {SCHEMA:?}", self.schema)));
        }
        let n = self.grid.n;
        let shaped = |v: &Vec<Vec<Complex64>>| v.len() == 5 && v.iter().all(|r| r.len() == n);
        if !shaped(&self.chi) || !shaped(&self.epsilon) {
            return Err(Error::Io(format!("solution arrays are not 5 x {n}")));
        }
        Ok(())
    }
}

/// Shortest exact form is not stable across libraries, so every float is
/// written in scientific notation with 17 significant digits.
fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (j, item) in items.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's map is ordered by key
            out.push('{');
            for (j, (k, item)) in map.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    out.push('\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_solution(path: &Path, state: &TbaState) -> Result<()> {
    write_json(path, &SolutionFile::from_state(state))
}

pub fn load_solution(path: &Path) -> Result<SolutionFile> {
    let f: SolutionFile = read_json(path)?;
    f.validate()?;
    Ok(f)
}

/// Pseudo-energies on the grid, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonTable {
    pub sigma: Vec<f64>,
    /// Indexed `[k + 2][row]`.
    pub eps: Vec<Vec<Complex64>>,
}

impl EpsilonTable {
    pub fn from_state(state: &TbaState) -> Self {
        Self {
            sigma: state.config.grid.points(),
            eps: state.eps.to_vec(),
        }
    }
}

pub fn csv_header() -> String {
    let mut h = String::from("sigma");
    for k in Z5_ALL {
        let _ = write!(h, ",eps{k}_re,eps{k}_im");
    }
    h
}

pub fn to_csv(table: &EpsilonTable) -> String {
    let mut out = csv_header();
    out.push('\n');
    for (i, s) in table.sigma.iter().enumerate() {
        out.push_str(&format_float(*s));
        for col in &table.eps {
            let _ = write!(out, ",{},{}", format_float(col[i].re), format_float(col[i].im));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, state: &TbaState) -> Result<()> {
    fs::write(path, to_csv(&EpsilonTable::from_state(state)))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<EpsilonTable> {
    let mut lines = text.lines();
    if lines.next() != Some(csv_header().as_str()) {
        return Err(Error::Io("unexpected CSV header".into()));
    }
    let mut table = EpsilonTable {
        sigma: Vec::new(),
        eps: vec![Vec::new(); 5],
    };
    for (row, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(format!("row {}: {e}", row + 1)))?;
        if fields.len() != 11 {
            return Err(Error::Io(format!("row {} has {} fields, expected 11", row + 1, fields.len())));
        }
        table.sigma.push(fields[0]);
        for (k, col) in table.eps.iter_mut().enumerate() {
            col.push(Complex64::new(fields[1 + 2 * k], fields[2 + 2 * k]));
        }
    }
    Ok(table)
}

pub fn load_csv(path: &Path) -> Result<EpsilonTable> {
    parse_csv(&fs::read_to_string(path)?)
}
