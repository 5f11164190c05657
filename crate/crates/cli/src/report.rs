use serde_json::{json, Value};

use phaseperm::Error;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    NotConverged = 3,
}

impl Status {
    pub fn from_error(e: &Error) -> Status {
        match e {
            Error::InvalidDimension { .. }
            | Error::NotPerfectSquare { .. }
            | Error::InvalidParameter(_)
            | Error::Format(_)
            | Error::DimensionMismatch { .. }
            | Error::NotUnitNorm { .. } => Status::Usage,
            Error::BudgetExceeded { .. } | Error::TailBound { .. } | Error::OrderOverflow { .. } => {
                Status::NotConverged
            }
            _ => Status::Fail,
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

/// `{command, params, results, pass}` written to stdout.
pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub results: Value,
    pub status: Status,
}

impl Report {
    pub fn new(command: &'static str, params: Value, results: Value, pass: bool) -> Self {
        Report { command, params, results, status: if pass { Status::Pass } else { Status::Fail } }
    }

    pub fn error(command: &'static str, params: Value, e: &Error) -> Self {
        let status = Status::from_error(e);
        Report { command, params, results: json!({ "error": e.to_string() }), status }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "pass": self.status == Status::Pass,
        })
    }
}
