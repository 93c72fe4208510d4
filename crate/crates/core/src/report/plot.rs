//! Whitespace-delimited tables for gnuplot and similar tools.
//!
//! Sort families get one table per (family, component) with a column per
//! algorithm. Dictionary results get one table per (data structure,
//! operation) with a column per component, so languages line up side by side.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{Cell, Family, MeasurementRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    /// File stem, without extension.
    pub name: String,
    pub columns: Vec<String>,
    /// `(size, one value per column)`; `None` where a column has no point.
    pub rows: Vec<(usize, Vec<Option<f64>>)>,
}

impl PlotTable {
    pub fn render(&self) -> String {
        let mut out = format!("# size {}\n", self.columns.join(" "));
        for (size, values) in &self.rows {
            out.push_str(&size.to_string());
            for v in values {
                match v {
                    Some(v) => write!(out, " {v:.3}").expect("write to string"),
                    None => out.push_str(" nan"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// size -> column -> value
type Rows = BTreeMap<usize, BTreeMap<String, f64>>;

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.+".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn column_label(cell: Cell) -> String {
    match cell.threshold_k() {
        Some(k) => format!("hybrid_k{k}"),
        None => cell.algorithm().to_string(),
    }
}

/// Reshapes records into plot tables, in order of first appearance.
pub fn plot_tables(records: &[MeasurementRecord]) -> Vec<PlotTable> {
    let mut order: Vec<String> = Vec::new();
    let mut tables: BTreeMap<String, (Vec<String>, Rows)> = BTreeMap::new();

    for r in records {
        let (name, column) = match r.cell {
            Cell::Dict(ads, op) => (
                format!("{}_{}_{}", r.family, ads.label(), op.label()),
                r.component.clone(),
            ),
            cell => (
                format!("{}_{}", r.family, sanitize(&r.component)),
                column_label(cell),
            ),
        };
        let (columns, rows) = tables.entry(name.clone()).or_insert_with(|| {
            order.push(name);
            Default::default()
        });
        if !columns.contains(&column) {
            columns.push(column.clone());
        }
        rows.entry(r.size)
            .or_default()
            .insert(column, r.mean_ns.as_f64());
    }

    order
        .into_iter()
        .map(|name| {
            let (columns, rows) = tables.remove(&name).expect("table recorded");
            let rows = rows
                .into_iter()
                .map(|(size, values)| {
                    (
                        size,
                        columns.iter().map(|c| values.get(c).copied()).collect(),
                    )
                })
                .collect();
            PlotTable {
                name,
                columns,
                rows,
            }
        })
        .collect()
}

/// Writes each table as `<dir>/<name>.dat` and returns the paths written.
pub fn emit_plot_data(
    records: &[MeasurementRecord],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    plot_tables(records)
        .into_iter()
        .map(|t| {
            let path = dir.join(format!("{}.dat", t.name));
            fs::write(&path, t.render()).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Tables `emit_plot_data` would write for a single-component run.
pub fn expected_table_count(family: Family) -> usize {
    match family {
        Family::SortCrossover | Family::HybridSweep => 1,
        Family::DictOps => 4,
    }
}
