use std::path::Path;

use crate::dataset::write_atomic;
use crate::error::{Error, Result};
use crate::pipeline::SummaryRow;

/// First line of every results table; bump when the columns change.
pub const TABLE_VERSION_LINE: &str = "# contour-results v1";

pub const COLUMNS: [&str; 12] = [
    "config_id",
    "dataset",
    "method",
    "order",
    "solver",
    "lambda",
    "mean_accuracy",
    "std_accuracy",
    "mean_ground_gap",
    "coreset_seconds",
    "solve_seconds",
    "failures",
];

/// Six significant digits, plain notation for moderate magnitudes.
pub fn fmt_sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<SummaryRow>,
}

impl ResultsTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("{TABLE_VERSION_LINE}\n{}\n", COLUMNS.join(","));
        for r in &self.rows {
            let cells = [
                csv_cell(&r.config_id),
                csv_cell(&r.dataset),
                csv_cell(&r.method),
                r.order.to_string(),
                csv_cell(&r.solver),
                fmt_sig6(r.lambda),
                fmt_sig6(r.mean_accuracy),
                fmt_sig6(r.std_accuracy),
                fmt_sig6(r.mean_ground_gap),
                fmt_sig6(r.coreset_seconds),
                fmt_sig6(r.solve_seconds),
                r.failures.to_string(),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        if header != COLUMNS {
            return Err(Error::invalid(format!(
                "not a results table: expected columns {}, got {}",
                COLUMNS.join(","),
                header.join(",")
            )));
        }
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<SummaryRow>, _>>()?;
        Ok(ResultsTable { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv_string().as_bytes())
    }

    /// Adds rows to the table at `path`, creating it if needed. Callers
    /// serialise appends; the rewrite itself is atomic.
    pub fn append_to(path: &Path, rows: &[SummaryRow]) -> Result<()> {
        let mut table = if path.exists() {
            Self::read(path)?
        } else {
            ResultsTable::default()
        };
        table.rows.extend_from_slice(rows);
        table.write(path)
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
