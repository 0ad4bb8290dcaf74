//! Machine-readable check reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Golden regression values, with the script that produced them alongside.
pub const GOLDEN_JSON: &str = include_str!("../fixtures/golden.json");

pub fn fixture_hash() -> String {
    let digest = Sha256::digest(GOLDEN_JSON.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn golden() -> serde_json::Value {
    serde_json::from_str(GOLDEN_JSON).expect("fixture file is valid JSON")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Acceptance criterion number; 0 for regression checks outside 1–11.
    pub criterion: u32,
    pub name: String,
    pub anchor: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_time_ms: u64,
}

impl CheckRecord {
    pub fn new(criterion: u32, name: impl Into<String>, anchor: impl Into<String>) -> Self {
        CheckRecord {
            criterion,
            name: name.into(),
            anchor: anchor.into(),
            params: BTreeMap::new(),
            value: None,
            bound: None,
            tolerance: None,
            pass: false,
            note: None,
            wall_time_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    /// `value ≤ bound + tolerance`.
    pub fn at_most(mut self, value: f64, bound: f64, tolerance: f64) -> Self {
        self.value = Some(value);
        self.bound = Some(bound);
        self.tolerance = Some(tolerance);
        self.pass = value <= bound + tolerance;
        self
    }

    pub fn holds(mut self, value: Option<f64>, pass: bool) -> Self {
        self.value = value;
        self.pass = pass;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_millis() as u64;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub rng: String,
    pub threads: usize,
    pub fixture_hash: String,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(command: &str, seed: u64, threads: usize) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            params: BTreeMap::new(),
            seed,
            rng: crate::rng::ALGORITHM.to_string(),
            threads,
            fixture_hash: fixture_hash(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Criterion number to overall pass, for criteria present in the report.
    pub fn by_criterion(&self) -> BTreeMap<u32, bool> {
        let mut out = BTreeMap::new();
        for c in &self.checks {
            *out.entry(c.criterion).or_insert(true) &= c.pass;
        }
        out
    }

    /// The report with wall times zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.checks.iter_mut().for_each(|c| c.wall_time_ms = 0);
        r
    }

    pub const CSV_HEADER: [&'static str; 9] =
        ["criterion", "name", "anchor", "params", "value", "bound", "tolerance", "pass", "wall_time_ms"];

    pub fn csv_rows(&self) -> Vec<[String; 9]> {
        let f = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        self.checks
            .iter()
            .map(|c| {
                [
                    c.criterion.to_string(),
                    c.name.clone(),
                    c.anchor.clone(),
                    serde_json::to_string(&c.params).unwrap_or_default(),
                    f(c.value),
                    f(c.bound),
                    f(c.tolerance),
                    c.pass.to_string(),
                    c.wall_time_ms.to_string(),
                ]
            })
            .collect()
    }
}
