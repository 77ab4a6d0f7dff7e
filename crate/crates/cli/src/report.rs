//! Reports: one machine document, and a text table rendered from it.

use serde::{Deserialize, Serialize};

use crate::job::{Command, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
    NumericUnreliable,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 3,
            Status::NumericUnreliable => 4,
        }
    }

    /// Verification failures outrank numeric doubts.
    pub fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::VerificationFailed, _) | (_, Status::VerificationFailed) => Status::VerificationFailed,
            (Status::NumericUnreliable, _) | (_, Status::NumericUnreliable) => Status::NumericUnreliable,
            _ => Status::Ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Row drawn with a marker, e.g. the worst index of a failed check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlight: Option<usize>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            highlight: None,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub seed: u64,
    pub status: Status,
    #[serde(default)]
    pub flags: Vec<String>,
    pub tables: Vec<Table>,
    /// Full structured results; rationals are `"p/q"` strings.
    pub details: serde_json::Value,
}

impl Report {
    pub fn empty(command: Command, mode: Mode) -> Self {
        Report {
            command,
            mode,
            horizon: None,
            precision: None,
            seed: 0,
            status: Status::Ok,
            flags: Vec::new(),
            tables: Vec::new(),
            details: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn flag(&mut self, status: Status, msg: impl Into<String>) {
        self.status = self.status.worst(status);
        self.flags.push(msg.into());
    }
}

/// Human table and machine document. The table is drawn from the document's
/// own rows, so both carry the same numbers.
pub fn emit_report(r: &Report) -> (String, String) {
    let mut json = serde_json::to_string_pretty(r).expect("report serializes");
    json.push('\n');
    let mut text = String::new();
    for t in &r.tables {
        text.push_str(&render_table(t));
        text.push('\n');
    }
    text.push_str(&format!("status: {}\n", serde_json::to_value(r.status).expect("status").as_str().unwrap_or("?")));
    for f in &r.flags {
        text.push_str(&format!("flag: {f}\n"));
    }
    (text, json)
}

pub fn render_table(t: &Table) -> String {
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String], mark: &str| {
        let body: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{mark} {}\n", body.join("  ").trim_end())
    };
    let mut out = format!("{}\n", t.title);
    out.push_str(&line(&t.columns, " "));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule, " "));
    for (i, row) in t.rows.iter().enumerate() {
        out.push_str(&line(row, if t.highlight == Some(i) { "*" } else { " " }));
    }
    out
}
