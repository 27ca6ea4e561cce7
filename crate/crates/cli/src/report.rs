//! Report and table primitives shared by every subcommand.
//!
//! A [`Check`] is a number plus the bound it was compared against; reports
//! are lists of checks with free-form notes and optional extras. A
//! [`Table`] renders to CSV with a header row, comma separators, LF line
//! endings, and floats at full precision, so identical runs produce
//! byte-identical files.

use serde_json::{json, Value};
use std::fmt::Write as _;

/// 17 significant digits: enough to reproduce any f64 bit pattern exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// The value must stay at or below the bound (residuals, deviations).
    Upper,
    /// The value must stay strictly above the bound (positivity checks).
    Lower,
}

/// One verified quantity. Reports never print a bare number: the bound it
/// was held to travels with it.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub pass: bool,
}

impl Check {
    /// A residual-style check: pass when `value <= tolerance`.
    pub fn sup(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            bound: tolerance,
            kind: Bound::Upper,
            pass: value.is_finite() && value <= tolerance,
        }
    }

    /// A floor-style check: pass when `value > floor`.
    pub fn above(name: impl Into<String>, value: f64, floor: f64) -> Check {
        Check {
            name: name.into(),
            value,
            bound: floor,
            kind: Bound::Lower,
            pass: value.is_finite() && value > floor,
        }
    }

    fn render(&self) -> String {
        let status = if self.pass { "ok  " } else { "FAIL" };
        match self.kind {
            Bound::Upper => format!(
                "{status} {} = {:.3e} (tol {:.1e})",
                self.name, self.value, self.bound
            ),
            Bound::Lower => format!(
                "{status} {} = {:.6} (required > {})",
                self.name, self.value, self.bound
            ),
        }
    }

    fn to_json(&self) -> Value {
        let key = match self.kind {
            Bound::Upper => "tolerance",
            Bound::Lower => "floor",
        };
        json!({
            "name": self.name,
            "value": self.value,
            key: self.bound,
            "pass": self.pass,
        })
    }
}

/// Plot-ready numeric table.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&fmt_float(*v));
            }
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

/// Outcome of one subcommand run.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Command-specific scalars and small structures, in insertion order.
    pub extras: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &'static str) -> Report {
        Report {
            command,
            checks: Vec::new(),
            notes: Vec::new(),
            extras: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn extra(&mut self, key: impl Into<String>, value: Value) {
        self.extras.push((key.into(), value));
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.render());
        }
        for (key, value) in &self.extras {
            let _ = writeln!(out, "{key} = {value}");
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let verdict = if self.pass() { "pass" } else { "fail" };
        let _ = writeln!(out, "{}: {verdict}", self.command);
        out
    }

    /// Machine-readable form. The table is embedded when it was not written
    /// to a file; otherwise `out` records where it went.
    pub fn to_json(&self, table: Option<&Table>, out_path: Option<&str>) -> Value {
        let mut doc = json!({
            "command": self.command,
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        });
        let map = doc.as_object_mut().expect("document is an object");
        for (key, value) in &self.extras {
            map.insert(key.clone(), value.clone());
        }
        if let Some(path) = out_path {
            map.insert("out".into(), json!(path));
        } else if let Some(t) = table {
            map.insert("table".into(), t.to_json());
        }
        doc
    }
}
