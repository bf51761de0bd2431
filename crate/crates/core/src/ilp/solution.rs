//! Solver solution files.
//!
//! Two layouts are read:
//! - `name value` lines, optionally preceded by `status <word>` and
//!   `objective <value>` lines (HiGHS-style `Model status` blocks and `#`
//!   comments are tolerated);
//! - the index-prefixed layout `<idx> <name> <value> [<reduced cost>]`, with
//!   a first line such as `Optimal - objective value 3.5` and optional `**`
//!   markers on infeasible rows.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
    Unbounded,
    Error,
}

impl SolveStatus {
    /// Statuses carrying a usable assignment.
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "timelimit",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        }
    }

    fn from_text(text: &str) -> Self {
        let t = text.trim().to_ascii_lowercase();
        if t.contains("infeasible") {
            SolveStatus::Infeasible
        } else if t.contains("unbounded") {
            SolveStatus::Unbounded
        } else if t.starts_with("optimal") {
            SolveStatus::Optimal
        } else if t.contains("time") {
            SolveStatus::TimeLimit
        } else if t.starts_with("feasible") || t.contains("integer solution") {
            SolveStatus::Feasible
        } else {
            SolveStatus::Error
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("line {line}: cannot read `{text}`")]
    Malformed { line: usize, text: String },
    #[error("solution has no value for `{0}`")]
    MissingValue(String),
    #[error("solver reported status `{0}`")]
    NoSolution(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: BTreeMap<String, f64>,
}

impl Solution {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

fn number(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
        "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn parse_solution(text: &str) -> Result<Solution, SolutionError> {
    let mut status = None;
    let mut objective = None;
    let mut values = BTreeMap::new();
    let mut expect_status = false;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if expect_status {
            status = Some(SolveStatus::from_text(line));
            expect_status = false;
            continue;
        }
        if line.eq_ignore_ascii_case("model status") {
            expect_status = true;
            continue;
        }
        if let Some(pos) = line.find(" - objective value") {
            status = Some(SolveStatus::from_text(&line[..pos]));
            objective = line.split_whitespace().last().and_then(number);
            continue;
        }
        let line = line.trim_start_matches("**").trim();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [key, word] if key.eq_ignore_ascii_case("status") => status = Some(SolveStatus::from_text(word)),
            [key, v] if key.eq_ignore_ascii_case("objective") => objective = number(v),
            [name, v] if number(v).is_some() => {
                values.insert(name.to_string(), number(v).unwrap());
            }
            [idx, name, v, ..] if idx.parse::<usize>().is_ok() && number(v).is_some() => {
                values.insert(name.to_string(), number(v).unwrap());
            }
            _ if k == 0 => status = Some(SolveStatus::from_text(line)),
            // free-form solver chatter such as `Primal solution values`
            _ if tokens.iter().all(|t| number(t).is_none()) => {}
            _ => return Err(SolutionError::Malformed { line: k + 1, text: raw.to_string() }),
        }
    }
    let status = status.unwrap_or(if values.is_empty() { SolveStatus::Error } else { SolveStatus::Feasible });
    Ok(Solution { status, objective, values })
}
