//! Reports: ordered entries rendered as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use polaris_core::properties::Residuals;
use polaris_core::Chart;
use serde::Serialize;
use serde_json::Value;

use crate::problem::SpaceKind;

/// Witness lines kept per failing entry.
pub const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
}

impl Entry {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self {
            name: name.into(),
            status,
            residual: None,
            witnesses: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    pub fn info(name: impl Into<String>) -> Self {
        Self::new(name, Status::Info)
    }

    /// Pass iff `residuals` is empty; otherwise the first residual and up
    /// to [`MAX_WITNESSES`] labelled entries.
    pub fn from_residuals(name: impl Into<String>, chart: &Chart, residuals: &Residuals) -> Self {
        match residuals.first() {
            None => {
                let mut e = Self::new(name, Status::Pass);
                e.residual = Some(Value::from("0"));
                e
            }
            Some((_, first)) => {
                let mut e = Self::new(name, Status::Fail);
                e.residual = Some(Value::from(chart.format(first)));
                e.witnesses = residuals
                    .iter()
                    .take(MAX_WITNESSES)
                    .map(|(label, r)| format!("{label} = {}", chart.format(r)))
                    .collect();
                e
            }
        }
    }

    pub fn fail(name: impl Into<String>, message: impl Into<String>) -> Self {
        let mut e = Self::new(name, Status::Fail);
        e.witnesses.push(message.into());
        e
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.data.insert(key.to_string(), value.into());
        self
    }

    pub fn with_residual(mut self, value: impl Into<Value>) -> Self {
        self.residual = Some(value.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartSummary {
    pub n: usize,
    pub k: usize,
    pub space: String,
    pub variables: Vec<String>,
}

impl ChartSummary {
    pub fn new(chart: &Chart, space: SpaceKind) -> Self {
        Self {
            n: chart.n(),
            k: chart.k(),
            space: space.to_string(),
            variables: chart.display_names(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub chart: ChartSummary,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(command: &str, seed: u64, chart: ChartSummary) -> Self {
        Self {
            command: command.to_string(),
            seed,
            chart,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: Entry) {
        self.entries.push(entry);
    }

    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.passed())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(
            out,
            "chart: n={} k={} space={} variables={}",
            self.chart.n,
            self.chart.k,
            self.chart.space,
            self.chart.variables.join(",")
        );
        for e in &self.entries {
            let _ = write!(out, "{} {}", e.status.label(), e.name);
            match &e.residual {
                Some(Value::String(r)) if r == "0" => {}
                Some(r) => {
                    let _ = write!(out, "  residual: {}", plain(r));
                }
                None => {}
            }
            out.push('\n');
            for (key, value) in &e.data {
                let _ = writeln!(out, "    {key}: {}", plain(value));
            }
            for w in &e.witnesses {
                let _ = writeln!(out, "    {w}");
            }
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} info",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Info)
        );
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("({})", items.iter().map(plain).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}
