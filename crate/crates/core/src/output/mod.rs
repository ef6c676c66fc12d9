//! Tabular results, CSV files, SVG plots and run manifests.

mod svg;

pub use svg::{heatmap_svg, lines_svg, render_heatmap, render_lines, LinePlot};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sweep::{pool_label, ModelParams, SweepResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig(*v, 12),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn numeric_columns(&self) -> Vec<String> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(i, _)| self.rows.iter().all(|r| r[*i].as_f64().is_some()))
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Values of a numeric column, or an error naming the numeric columns.
    pub fn numeric(&self, name: &str) -> Result<Vec<f64>> {
        let unknown = || Error::UnknownQuantity {
            name: name.to_string(),
            available: self.numeric_columns(),
        };
        let i = self.index_of(name).ok_or_else(unknown)?;
        self.rows
            .iter()
            .map(|r| r[i].as_f64().ok_or_else(unknown))
            .collect()
    }
}

/// `%.{digits}g`-style formatting: `digits` significant digits, trailing
/// zeros trimmed, scientific notation outside `[1e-5, 1e12)`.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Flattens a sweep into one row per record.
pub fn sweep_table(result: &SweepResult) -> Table {
    let mut columns: Vec<String> = [
        "T", "S", "class", "epsilon", "mu_e", "theta", "p", "rounds", "beta", "pop_size",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for pool in &result.pools {
        let label = pool_label(pool);
        columns.extend(pool.iter().map(|s| format!("{label}.sigma.{s}")));
        columns.push(format!("{label}.coop"));
        columns.extend(pool.iter().map(|s| format!("{label}.coop.{s}")));
    }
    columns.extend((0..result.deltas.len()).map(|k| result.delta_label(k)));

    let rows = result
        .records
        .iter()
        .map(|rec| {
            let p = &rec.params;
            let mut row = vec![
                Cell::Num(rec.t),
                Cell::Num(rec.s),
                Cell::Text(rec.class.label().to_string()),
                Cell::Num(p.interaction.epsilon),
                Cell::Num(p.interaction.mu_e),
                Cell::Int(p.trust.theta as i64),
                Cell::Num(p.trust.p),
                Cell::Int(p.interaction.rounds as i64),
                Cell::Num(p.evolution.beta),
                Cell::Int(p.evolution.pop_size as i64),
            ];
            for pr in &rec.pools {
                row.extend(pr.sigma.weights.iter().map(|&w| Cell::Num(w)));
                row.push(Cell::Num(pr.coop_frequency));
                row.extend(
                    pr.pool
                        .iter()
                        .map(|&s| Cell::Num(pr.attributed_cooperation(s))),
                );
            }
            row.extend(rec.deltas.iter().map(|&d| Cell::Num(d)));
            row
        })
        .collect();
    Table { columns, rows }
}

pub fn csv_string(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, csv_string(table)).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

/// Full description of a run, written as TOML next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub command: String,
    pub params: ModelParams,
    pub pools: Vec<String>,
    pub settings: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: ModelParams, pools: &[Vec<crate::Strategy>]) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
            command: command.to_string(),
            params,
            pools: pools.iter().map(|p| pool_label(p)).collect(),
            settings: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is serialisable")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        ensure_parent(path)?;
        fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(-2.0 / 3.0, 12), "-0.666666666667");
        assert_eq!(fmt_sig(123456.789, 12), "123456.789");
        assert_eq!(fmt_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(fmt_sig(0.92625, 12), "0.92625");
        assert_eq!(fmt_sig(1e15, 12), "1e15");
    }

    #[test]
    fn csv_layout() {
        let table = Table {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Cell::Num(0.1), Cell::Text("x".into())]; 4],
        };
        let text = csv_string(&table);
        assert_eq!(text.lines().count(), 5);
        assert!(!text.contains('\r'));
        assert!(text.starts_with("a,b\n0.1,x\n"));
    }

    #[test]
    fn unknown_column_lists_numeric_ones() {
        let table = Table {
            columns: vec!["T".into(), "class".into()],
            rows: vec![vec![Cell::Num(1.0), Cell::Text("PD".into())]],
        };
        match table.numeric("nope") {
            Err(Error::UnknownQuantity { available, .. }) => assert_eq!(available, vec!["T"]),
            other => panic!("{other:?}"),
        }
        assert!(table.numeric("class").is_err());
    }
}
