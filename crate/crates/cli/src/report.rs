//! JSON rendering of check results. Exact values are `"num/den"` strings;
//! object keys come out sorted because `serde_json::Map` is ordered.

use qhahn_core::{format_scalar, CheckReport, Discrepancy, ExactScalar, Metric, Violation};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

pub fn exact(v: &ExactScalar) -> Value {
    Value::String(format_scalar(v))
}

pub fn exact_list(vs: &[ExactScalar]) -> Value {
    Value::Array(vs.iter().map(exact).collect())
}

fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(v.to_string()))
}

pub fn violation(v: &Violation) -> Value {
    let mut m = Map::new();
    m.insert("what".into(), json!(v.what));
    m.insert("residual".into(), exact(&v.residual));
    for (k, idx) in [("n", v.n), ("m", v.m), ("x", v.x)] {
        if let Some(i) = idx {
            m.insert(k.into(), json!(i));
        }
    }
    if let Some((r, c)) = v.entry {
        m.insert("entry".into(), json!([r, c]));
    }
    Value::Object(m)
}

pub fn discrepancy(d: &Discrepancy) -> Value {
    json!({ "name": d.name, "formula": exact(&d.formula), "solved": exact(&d.solved) })
}

pub fn metric(m: &Metric) -> Value {
    match m {
        Metric::Exact(v) => exact(v),
        Metric::ExactList(vs) => exact_list(vs),
        Metric::Float(v) => float(*v),
        Metric::FloatList(vs) => Value::Array(vs.iter().map(|v| float(*v)).collect()),
        Metric::Flag(b) => json!(b),
        Metric::Text(s) => json!(s),
    }
}

/// One executed check, or the error that prevented it from running.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub suite: &'static str,
    pub check: String,
    pub outcome: Result<CheckReport, String>,
}

impl CheckEntry {
    pub fn status(&self) -> Status {
        match &self.outcome {
            Ok(r) if r.is_skipped() => Status::Skip,
            Ok(r) if r.passed() => Status::Pass,
            _ => Status::Fail,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("suite".into(), json!(self.suite));
        m.insert("check".into(), json!(self.check));
        m.insert("status".into(), json!(self.status().name()));
        match &self.outcome {
            Ok(r) => {
                if let Some(why) = &r.skipped {
                    m.insert("skip_reason".into(), json!(why));
                }
                if !r.violations.is_empty() {
                    m.insert("violations".into(), Value::Array(r.violations.iter().map(violation).collect()));
                }
                if !r.discrepancies.is_empty() {
                    m.insert("discrepancies".into(), Value::Array(r.discrepancies.iter().map(discrepancy).collect()));
                }
                if !r.metrics.is_empty() {
                    let ms: Map<String, Value> = r.metrics.iter().map(|(k, v)| (k.clone(), metric(v))).collect();
                    m.insert("metrics".into(), Value::Object(ms));
                }
            }
            Err(e) => {
                m.insert("error".into(), json!(e));
            }
        }
        Value::Object(m)
    }
}

/// Results for one configured instance.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    /// `qhahn`, `wilson` or `hahn`.
    pub kind: &'static str,
    pub name: Option<String>,
    pub params: Map<String, Value>,
    /// Set when the instance was rejected before any check ran.
    pub skip_reasons: Option<Vec<String>>,
    pub checks: Vec<CheckEntry>,
    pub seconds: f64,
}

impl InstanceReport {
    pub fn status(&self) -> Status {
        if self.skip_reasons.is_some() {
            Status::Skip
        } else if self.checks.iter().any(|c| c.status() == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), json!(self.kind));
        if let Some(n) = &self.name {
            m.insert("name".into(), json!(n));
        }
        m.insert("params".into(), Value::Object(self.params.clone()));
        m.insert("status".into(), json!(self.status().name()));
        if let Some(r) = &self.skip_reasons {
            m.insert("skip_reasons".into(), json!(r));
        }
        m.insert("checks".into(), Value::Array(self.checks.iter().map(CheckEntry::to_json).collect()));
        Value::Object(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suites: Vec<&'static str>,
    pub config_hash: String,
    pub instances: Vec<InstanceReport>,
    pub seconds: f64,
}

impl SuiteReport {
    fn count<T>(items: &[T], status: impl Fn(&T) -> Status) -> Value {
        let n = |s| items.iter().filter(|i| status(i) == s).count();
        json!({ "pass": n(Status::Pass), "fail": n(Status::Fail), "skip": n(Status::Skip) })
    }

    pub fn failures(&self) -> usize {
        self.instances.iter().flat_map(|i| &i.checks).filter(|c| c.status() == Status::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            crate::error::EXIT_PASS
        } else {
            crate::error::EXIT_FAIL
        }
    }

    /// The full report; everything except `timing` is a function of the
    /// configuration alone.
    pub fn to_json(&self) -> Value {
        let checks: Vec<&CheckEntry> = self.instances.iter().flat_map(|i| &i.checks).collect();
        let timing: Vec<Value> = self.instances.iter().map(|i| float(i.seconds)).collect();
        json!({
            "artifact_version": env!("CARGO_PKG_VERSION"),
            "config_hash": format!("sha256:{}", self.config_hash),
            "suites": self.suites,
            "status": if self.passed() { "pass" } else { "fail" },
            "summary": {
                "checks": Self::count(&checks, |c| c.status()),
                "instances": Self::count(&self.instances, |i| i.status()),
            },
            "instances": self.instances.iter().map(InstanceReport::to_json).collect::<Vec<_>>(),
            "timing": { "total_seconds": float(self.seconds), "instance_seconds": timing },
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}
