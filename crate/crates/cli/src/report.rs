use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "sprox-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            "csv" | "csv-series" => Ok(Format::Csv),
            other => Err(format!("unknown output format {other:?} (json, text, csv)")),
        }
    }
}

/// A named claim checked during execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

/// Plot-ready table attached to a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub tool_version: &'static str,
    /// Everything needed to rerun the construction.
    pub recipe: Value,
    pub horizons: Value,
    pub verdicts: Value,
    pub checks: Vec<Check>,
    pub wall_time_ms: f64,
    #[serde(skip)]
    pub summary: Vec<String>,
    #[serde(skip)]
    pub series: Option<Series>,
}

impl Report {
    pub fn new(command: &str, recipe: Value, horizons: Value, verdicts: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            tool_version: TOOL_VERSION,
            recipe,
            horizons,
            verdicts,
            checks: Vec::new(),
            wall_time_ms: 0.0,
            summary: Vec::new(),
            series: None,
        }
    }

    pub fn check(mut self, name: &str, holds: bool) -> Self {
        self.checks.push(Check { name: name.to_string(), holds });
        self
    }

    pub fn line(mut self, s: impl Into<String>) -> Self {
        self.summary.push(s.into());
        self
    }

    pub fn with_series(mut self, csv: String) -> Self {
        self.series = Some(Series { csv });
        self
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

/// `None` when CSV is requested from a report without a series.
pub fn render(report: &Report, format: Format) -> Option<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            Some(s)
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{} ({} {})", report.command, report.schema, report.tool_version).unwrap();
            for l in &report.summary {
                writeln!(s, "  {l}").unwrap();
            }
            for c in &report.checks {
                writeln!(s, "  [{}] {}", if c.holds { "ok" } else { "FAIL" }, c.name).unwrap();
            }
            Some(s)
        }
        Format::Csv => report.series.as_ref().map(|s| s.csv.clone()),
    }
}

/// The JSON document without the wall-time field, for replay comparisons.
pub fn stable_json(report: &Report) -> String {
    let mut v = serde_json::to_value(report).expect("report serializes");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_time_ms");
    }
    serde_json::to_string_pretty(&v).expect("value serializes")
}
