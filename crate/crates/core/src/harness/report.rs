use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::stats::BoundEstimate;

/// One priced table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub example: String,
    pub european: Option<BoundEstimate>,
    pub low: Option<BoundEstimate>,
    pub high: Option<BoundEstimate>,
    /// `100 (high - low) / low`.
    pub gap_pct: Option<f64>,
    pub seconds: f64,
    /// The resolved configuration (seed and scale included).
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    /// Equality of every reported number except wall time.
    pub fn same_numbers(&self, other: &ReportRow) -> bool {
        self.european == other.european
            && self.low == other.low
            && self.high == other.high
            && self.gap_pct.map(f64::to_bits) == other.gap_pct.map(f64::to_bits)
            && self.config == other.config
            && self.error == other.error
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

const FIXED: [&str; 9] = [
    "eur_mean",
    "eur_se",
    "low_mean",
    "low_se",
    "high_mean",
    "high_se",
    "gap_pct",
    "seconds",
    "error",
];

impl Report {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn same_numbers(&self, other: &Report) -> bool {
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.same_numbers(b))
    }

    fn param_names(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self
            .rows
            .iter()
            .flat_map(|r| r.config.params.keys())
            .collect();
        set.into_iter().cloned().collect()
    }

    fn cells(&self, row: &ReportRow, params: &[String]) -> Vec<String> {
        let num = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut out = vec![row.example.clone(), row.name.clone()];
        out.extend(params.iter().map(|p| {
            row.config
                .params
                .get(p)
                .map(|v| v.to_string())
                .unwrap_or_default()
        }));
        for est in [row.european, row.low, row.high] {
            out.push(num(est.map(|e| e.mean)));
            out.push(num(est.map(|e| e.stderr)));
        }
        out.push(row.gap_pct.map(|g| format!("{g:.3}")).unwrap_or_default());
        out.push(format!("{:.3}", row.seconds));
        out.push(row.error.clone().unwrap_or_default());
        out
    }

    fn header(&self, params: &[String]) -> Vec<String> {
        let mut h = vec!["example".to_string(), "name".to_string()];
        h.extend(params.iter().cloned());
        h.extend(FIXED.iter().map(|s| s.to_string()));
        h
    }

    /// CSV with columns: example, name, varied parameters, then
    /// eur/low/high (mean, se), gap_pct, seconds, error.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let params = self.param_names();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header(&params)).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(self.cells(row, &params)).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned plain-text table, with standard errors in brackets.
    pub fn to_text(&self) -> String {
        let params = self.param_names();
        let mut header = vec!["name".to_string()];
        header.extend(params.iter().cloned());
        header.extend(["European", "low", "high", "gap(%)", "time"].map(String::from));
        let fmt = |e: Option<BoundEstimate>| {
            e.map(|e| format!("{:.4} ({:.4})", e.mean, e.stderr))
                .unwrap_or_else(|| "-".into())
        };
        let mut rows = vec![header];
        for r in &self.rows {
            let mut cells = vec![r.name.clone()];
            cells.extend(params.iter().map(|p| {
                r.config
                    .params
                    .get(p)
                    .map(|v| v.to_string())
                    .unwrap_or_default()
            }));
            cells.push(fmt(r.european));
            cells.push(fmt(r.low));
            cells.push(fmt(r.high));
            cells.push(
                r.gap_pct
                    .map(|g| format!("{g:.2}"))
                    .unwrap_or_else(|| "-".into()),
            );
            cells.push(match &r.error {
                Some(e) => format!("error: {e}"),
                None => format!("{:.2}", r.seconds),
            });
            rows.push(cells);
        }
        let cols = rows[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for r in &rows {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}", w = w))
                .collect();
            let _ = writeln!(s, "{}", line.join("  ").trim_end());
        }
        s
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}
