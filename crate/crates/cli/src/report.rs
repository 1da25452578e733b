use std::fs;
use std::path::Path;

use covergrowth::scalar::{format_rational, rational_to_f64};
use covergrowth::Rational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

/// Everything a subcommand produces, before it is written anywhere.
#[derive(Debug, Default)]
pub struct Report {
    pub summary: Value,
    pub tables: Vec<Table>,
    /// Instance files (`name`, contents), written verbatim.
    pub files: Vec<(String, String)>,
    /// Set when a bound that must hold was found violated; artifacts are still emitted.
    pub violation: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn exact(r: &Rational) -> String {
    format_rational(r)
}

pub fn approx(r: &Rational) -> String {
    float(rational_to_f64(r))
}

/// Shortest round-trip rendering, so reruns are byte-identical.
pub fn float(x: f64) -> String {
    format!("{x}")
}

pub fn exact_json(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "approx": rational_to_f64(r) })
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Run parameters echoed into every summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmax: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
}

/// Rendered artifacts, ready for stdout or an output directory.
pub struct Rendered {
    pub stdout: String,
}

pub fn render(
    config: &RunConfig,
    report: &Report,
    formats: &[Format],
    out: Option<&Path>,
) -> Result<Rendered, CliError> {
    let envelope = json!({
        "config": config,
        "result": report.summary,
        "violation": report.violation,
    });
    let summary = serde_json::to_string_pretty(&envelope).expect("json values serialize") + "\n";
    let want_json = formats.contains(&Format::Json);
    let want_csv = formats.contains(&Format::Csv);
    let mut csvs = Vec::new();
    if want_csv {
        for t in &report.tables {
            csvs.push((format!("{}.csv", t.name), t.to_csv()?));
        }
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if want_json {
            fs::write(dir.join("summary.json"), &summary)?;
            written.push("summary.json".to_string());
        }
        for (name, body) in csvs.iter().chain(&report.files) {
            fs::write(dir.join(name), body)?;
            written.push(name.clone());
        }
        let stdout = written.iter().map(|n| format!("{}\n", dir.join(n).display())).collect();
        return Ok(Rendered { stdout });
    }
    let pieces = usize::from(want_json) + csvs.len() + report.files.len();
    let mut stdout = String::new();
    if want_json {
        stdout.push_str(&summary);
    }
    for (name, body) in csvs.iter().chain(&report.files) {
        if pieces > 1 {
            stdout.push_str(&format!("# {name}\n"));
        }
        stdout.push_str(body);
    }
    Ok(Rendered { stdout })
}
