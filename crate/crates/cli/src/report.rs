//! Versioned verdict reports and the exit-code convention.

use matrange_core::{Decision, Error, ToleranceProfile};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Yes,
    No,
    Indeterminate,
    Success,
    InputError,
    NumericalFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Yes | Status::Success => 0,
            Status::No => 1,
            Status::Indeterminate => 2,
            Status::InputError => 3,
            Status::NumericalFailure => 4,
        }
    }

    pub fn of(d: Decision) -> Self {
        match d {
            Decision::Yes => Status::Yes,
            Decision::No => Status::No,
            Decision::Indeterminate => Status::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub sha256: String,
}

/// Run settings echoed into every report.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub tol: ToleranceProfile,
    pub tol_scale: f64,
    pub seed: u64,
    pub threads: usize,
    pub verify: bool,
    pub timing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    pub rule_citations: Vec<String>,
    pub result: Value,
    pub witness: Option<Value>,
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Value>,
    pub diagnostics: Value,
}

/// What a command hands back before the run context is attached.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub status: Option<Status>,
    pub rules: Vec<&'static str>,
    pub result: Value,
    pub witness: Option<Value>,
    pub certificate: Option<Value>,
    pub verification: Option<Value>,
    pub margins: Option<Value>,
}

impl Outcome {
    pub fn decided(d: Decision) -> Self {
        Outcome { status: Some(Status::of(d)), ..Default::default() }
    }

    pub fn success() -> Self {
        Outcome { status: Some(Status::Success), ..Default::default() }
    }

    pub fn rules(mut self, rules: &[&'static str]) -> Self {
        self.rules.extend_from_slice(rules);
        self
    }

    pub fn result(mut self, v: Value) -> Self {
        self.result = v;
        self
    }
}

pub fn error_status(e: &Error) -> Status {
    match e {
        Error::NumericalFailure(_) | Error::MissingEvidence | Error::InconsistentTheorems(_) => Status::NumericalFailure,
        Error::DimensionCap { .. } => Status::Indeterminate,
        _ => Status::InputError,
    }
}

pub fn diagnostics(ctx: &RunContext, margins: Option<Value>, runtime: Option<f64>) -> Value {
    let mut d = json!({
        "tolerance": {
            "scale": ctx.tol_scale,
            "feas": ctx.tol.feas,
            "psd": ctx.tol.psd,
            "gap": ctx.tol.gap,
            "band": ctx.tol.band,
            "max_iter": ctx.tol.max_iter,
        },
        "seed": ctx.seed,
        "threads": ctx.threads,
    });
    if let Some(m) = margins {
        d["margins"] = m;
    }
    if let Some(t) = runtime {
        d["runtime_seconds"] = json!(t);
    }
    d
}
