use clap::ValueEnum;
use involute::walk::format_pretty;
use involute::{Matrix, Rational};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

/// Rows of cells under a header.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",") + "\n";
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |r: &Vec<String>| {
            let cells: Vec<String> = r
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{}{}", " ".repeat(w - c.chars().count()), c))
                .collect();
            cells.join("  ").trim_end().to_string() + "\n"
        };
        std::iter::once(&self.header).chain(&self.rows).map(line).collect()
    }
}

/// A command result in all three renderings.
#[derive(Clone, Debug)]
pub struct Report {
    pub table: Table,
    pub json: Value,
    /// Replaces the aligned table in pretty output.
    pub pretty: Option<String>,
    /// Replaces every rendering.
    pub raw: Option<String>,
}

impl Report {
    pub fn new(table: Table, json: Value) -> Self {
        Report { table, json, pretty: None, raw: None }
    }

    pub fn raw(text: String) -> Self {
        Report { raw: Some(text), ..Report::new(Table::default(), Value::Null) }
    }

    pub fn with_pretty(mut self, text: String) -> Self {
        self.pretty = Some(text);
        self
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(text) = &self.raw {
            return text.clone();
        }
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Pretty => self.pretty.clone().unwrap_or_else(|| self.table.to_pretty()),
        }
    }
}

pub fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn matrix_json(m: &Matrix) -> Value {
    json!(m.to_rows().iter().map(|r| strings(r)).collect::<Vec<_>>())
}

pub fn matrix_table(m: &Matrix) -> Table {
    let mut t = Table::new((0..m.cols()).map(|j| format!("c{j}")));
    for x in 0..m.rows() {
        t.push(strings(m.row(x)));
    }
    t
}

/// A matrix report; `dots` marks the structural zeros of a walk matrix.
pub fn matrix_report(m: &Matrix, kind: &str, dots: bool) -> Report {
    Report::new(matrix_table(m), json!({ "kind": kind, "n": m.rows(), "rows": matrix_json(m) }))
        .with_pretty(format_pretty(m, dots))
}
