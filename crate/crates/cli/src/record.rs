//! JSON record shared by all subcommands.

use serde::Serialize;

use hyperfock::analysis::{ChshSettings, CoincidenceTable};
use hyperfock::circuits::{PhaseSettings, RNG_ALGORITHM};

pub const SCHEMA: u32 = 1;

pub const GENERIC_SIGNS: &str = "+1 for L and U detections, -1 for D and R; internal labels take the sign of the arm they are locked to";

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Phases {
    Interferometer(PhaseSettings),
    Analyzers(ChshSettings),
}

#[derive(Debug, Serialize)]
pub struct TableRecord {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// Row-major.
    pub values: Vec<f64>,
}

impl From<&CoincidenceTable> for TableRecord {
    fn from(t: &CoincidenceTable) -> Self {
        TableRecord {
            rows: t.row_labels.clone(),
            cols: t.col_labels.clone(),
            values: t.flat(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Correlations {
    One(f64),
    /// `E(a0,b0), E(a1,b0), E(a0,b1), E(a1,b1)`.
    Four([f64; 4]),
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool_version: &'static str,
    pub seed: u64,
    pub tolerance: f64,
    pub sign_convention: String,
    pub rng: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub schema: u32,
    pub experiment: String,
    pub statistics: Option<String>,
    pub kind: Option<String>,
    pub phases: Option<Phases>,
    pub table: Option<TableRecord>,
    /// Sum of the table entries.
    pub coincidence_sum: Option<f64>,
    /// Sum over every detection outcome.
    pub total_probability: Option<f64>,
    #[serde(rename = "E")]
    pub e: Option<Correlations>,
    pub chsh: Option<f64>,
    /// Subcommand-specific results.
    pub result: Option<serde_json::Value>,
    pub metadata: Metadata,
}

impl RunRecord {
    pub fn new(experiment: impl Into<String>, seed: u64, tolerance: f64) -> Self {
        RunRecord {
            schema: SCHEMA,
            experiment: experiment.into(),
            statistics: None,
            kind: None,
            phases: None,
            table: None,
            coincidence_sum: None,
            total_probability: None,
            e: None,
            chsh: None,
            result: None,
            metadata: Metadata {
                tool_version: env!("CARGO_PKG_VERSION"),
                seed,
                tolerance,
                sign_convention: GENERIC_SIGNS.to_string(),
                rng: RNG_ALGORITHM,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

/// Shortest text that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Right-aligned grid with row and column labels.
pub fn render_table(t: &CoincidenceTable) -> String {
    let cells: Vec<Vec<String>> = t.probs.iter().map(|r| r.iter().map(|&p| num(p)).collect()).collect();
    let label_w = t.row_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let col_w = cells
        .iter()
        .flatten()
        .chain(t.col_labels.iter())
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = format!("{:label_w$}", "");
    for c in &t.col_labels {
        out.push_str(&format!("  {c:>col_w$}"));
    }
    out.push('\n');
    for (label, row) in t.row_labels.iter().zip(&cells) {
        out.push_str(&format!("{label:label_w$}"));
        for c in row {
            out.push_str(&format!("  {c:>col_w$}"));
        }
        out.push('\n');
    }
    out
}
