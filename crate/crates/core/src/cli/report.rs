//! Run reports: one JSON object per invocation, keys sorted.

use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::error::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit status; the numeric values are part of the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    InputError = 1,
    Obstructed = 2,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub verdict: String,
    pub result: Value,
    pub witnesses: Vec<Value>,
    pub seed: u64,
    pub timings_ms: Option<Map<String, Value>>,
    pub status: ExitStatus,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            command: command.to_owned(),
            inputs: Map::new(),
            verdict: "ok".to_owned(),
            result: Value::Null,
            witnesses: Vec::new(),
            seed,
            timings_ms: None,
            status: ExitStatus::Ok,
        }
    }

    pub fn input(&mut self, name: &str, value: impl Into<Value>) {
        self.inputs.insert(name.to_owned(), value.into());
    }

    pub fn ok(&mut self, verdict: &str, result: Value) {
        self.verdict = verdict.to_owned();
        self.result = result;
        self.status = ExitStatus::Ok;
    }

    pub fn obstructed(&mut self, verdict: &str, result: Value, witness: Value) {
        self.verdict = verdict.to_owned();
        self.result = result;
        self.witnesses.push(witness);
        self.status = ExitStatus::Obstructed;
    }

    pub fn to_value(&self) -> Value {
        let mut out = json!({
            "command": self.command,
            "version": VERSION,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "result": self.result,
            "witnesses": self.witnesses,
            "seed": self.seed,
        });
        if let Some(t) = &self.timings_ms {
            out["timings_ms"] = Value::Object(t.clone());
        }
        out
    }
}

pub fn error_value(command: &str, err: &Error) -> Value {
    let kind = match err {
        Error::Input(_) => "input",
        Error::Unsupported(_) => "unsupported",
        Error::GroupMismatch { .. } => "group-mismatch",
        Error::Singular(_) => "singular",
        Error::Consistency(_) => "consistency",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    };
    json!({
        "command": command,
        "version": VERSION,
        "verdict": "error",
        "error": { "kind": kind, "message": err.to_string() },
    })
}

/// Wall-clock phases, in milliseconds rounded to microseconds.
pub struct Stopwatch {
    last: Instant,
    laps: Map<String, Value>,
}

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch { last: Instant::now(), laps: Map::new() }
    }

    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        let ms = (now - self.last).as_secs_f64() * 1e3;
        self.laps.insert(name.to_owned(), json!((ms * 1e3).round() / 1e3));
        self.last = now;
    }

    pub fn into_map(self) -> Map<String, Value> {
        self.laps
    }
}
