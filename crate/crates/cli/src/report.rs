use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

/// Overall outcome; maps onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violation,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::InputError => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inputs {
    /// SHA-256 of the canonical serialization of the parsed document; absent
    /// when the document did not parse.
    pub digest: Option<String>,
    pub config: Config,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportViolation {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl ReportViolation {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        ReportViolation {
            kind: kind.into(),
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub inputs: Inputs,
    pub results: Value,
    pub violations: Vec<ReportViolation>,
    /// Only filled in on request, so that reports stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn set_timing(&mut self, elapsed: Duration) {
        self.timing = Some(Timing {
            elapsed_ms: elapsed.as_secs_f64() * 1e3,
        });
    }

    /// Pretty JSON with sorted keys and floats rounded to 12 significant
    /// digits, newline terminated.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
        s.push('\n');
        s
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Rounds every non-integer number in place.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"), 12);
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.6180339887498949, 12), 1.61803398875);
        assert_eq!(round_sig(-0.000123456789012345, 12), -0.000123456789012);
        assert_eq!(round_sig(0.0, 12), 0.0);
        let mut v = json!({"b": [0.1234567890123456, 3], "a": 2.0});
        round_floats(&mut v);
        assert_eq!(v.to_string(), r#"{"a":2.0,"b":[0.123456789012,3]}"#);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Pass.exit_code(), 0);
        assert_eq!(Status::Violation.exit_code(), 1);
        assert_eq!(Status::InputError.exit_code(), 2);
    }
}
