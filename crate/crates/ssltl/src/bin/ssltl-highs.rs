//! Minimal command-line MILP solver: reads an LP file with HiGHS and writes a
//! `name value` solution file.
//!
//! Usage: `ssltl-highs <model.lp> <solution.sol> [time_limit_secs]`
//!
//! The solution file starts with `status <word>` and `objective <value>`
//! lines, followed by one `name value` line per column. Set `SSLTL_HIGHS_LOG`
//! to see the solver log.

use std::ffi::{c_char, c_void, CStr, CString};
use std::fmt::Write as _;
use std::process::ExitCode;

use highs_sys::*;

struct Highs(*mut c_void);

impl Highs {
    fn new() -> Self {
        // SAFETY: Highs_create returns a fresh owned instance.
        Highs(unsafe { Highs_create() })
    }

    fn set_bool(&mut self, option: &str, value: bool) {
        let opt = CString::new(option).unwrap();
        // SAFETY: valid instance and NUL-terminated option name.
        unsafe { Highs_setBoolOptionValue(self.0, opt.as_ptr(), value as HighsInt) };
    }

    fn set_double(&mut self, option: &str, value: f64) {
        let opt = CString::new(option).unwrap();
        // SAFETY: as above.
        unsafe { Highs_setDoubleOptionValue(self.0, opt.as_ptr(), value) };
    }
}

impl Drop for Highs {
    fn drop(&mut self) {
        // SAFETY: instance was created by Highs_create and is dropped once.
        unsafe { Highs_destroy(self.0) }
    }
}

fn status_word(status: HighsInt) -> &'static str {
    match status {
        s if s == kHighsModelStatusOptimal as HighsInt => "optimal",
        s if s == kHighsModelStatusInfeasible as HighsInt => "infeasible",
        s if s == kHighsModelStatusUnboundedOrInfeasible as HighsInt => "infeasible",
        s if s == kHighsModelStatusUnbounded as HighsInt => "unbounded",
        s if s == kHighsModelStatusTimeLimit as HighsInt => "timelimit",
        s if s == kHighsModelStatusIterationLimit as HighsInt => "timelimit",
        s if s == kHighsModelStatusSolutionLimit as HighsInt => "feasible",
        s if s == kHighsModelStatusInterrupt as HighsInt => "timelimit",
        s if s == kHighsModelStatusModelEmpty as HighsInt => "optimal",
        _ => "error",
    }
}

fn run() -> Result<(), String> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 3 {
        return Err("usage: ssltl-highs <model.lp> <solution.sol> [time_limit_secs]".into());
    }
    let lp = CString::new(args[1].as_str()).map_err(|e| e.to_string())?;
    let mut highs = Highs::new();
    highs.set_bool("output_flag", std::env::var_os("SSLTL_HIGHS_LOG").is_some());
    if let Some(limit) = args.get(3) {
        let secs: f64 = limit.parse().map_err(|_| format!("bad time limit {limit}"))?;
        highs.set_double("time_limit", secs);
    }
    // SAFETY: valid instance and NUL-terminated path.
    let read = unsafe { Highs_readModel(highs.0, lp.as_ptr()) };
    if read == kHighsStatusError as HighsInt {
        return Err(format!("HiGHS could not read {}", args[1]));
    }
    // SAFETY: valid instance.
    unsafe { Highs_run(highs.0) };
    let status = unsafe { Highs_getModelStatus(highs.0) };
    let num_col = unsafe { Highs_getNumCol(highs.0) } as usize;
    let mut primal_status: HighsInt = 0;
    let key = CString::new("primal_solution_status").unwrap();
    // SAFETY: valid instance, option key and out pointer.
    unsafe { Highs_getIntInfoValue(highs.0, key.as_ptr(), &mut primal_status) };
    let has_solution = primal_status == kHighsSolutionStatusFeasible as HighsInt;

    let mut word = status_word(status);
    if word == "timelimit" && has_solution {
        word = "feasible";
    }
    let mut out = String::new();
    writeln!(out, "status {word}").unwrap();
    if has_solution && matches!(word, "optimal" | "feasible") {
        let objective = unsafe { Highs_getObjectiveValue(highs.0) };
        writeln!(out, "objective {objective}").unwrap();
        let mut col_value = vec![0.0; num_col];
        let num_row = unsafe { Highs_getNumRow(highs.0) } as usize;
        let mut col_dual = vec![0.0; num_col];
        let mut row_value = vec![0.0; num_row];
        let mut row_dual = vec![0.0; num_row];
        // SAFETY: buffers sized to the model dimensions.
        unsafe {
            Highs_getSolution(
                highs.0,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            )
        };
        let mut name_buf = vec![0 as c_char; kHighsMaximumStringLength as usize + 1];
        for (col, value) in col_value.iter().enumerate() {
            // SAFETY: buffer holds kHighsMaximumStringLength + 1 bytes.
            unsafe { Highs_getColName(highs.0, col as HighsInt, name_buf.as_mut_ptr()) };
            let name = unsafe { CStr::from_ptr(name_buf.as_ptr()) }.to_string_lossy();
            writeln!(out, "{name} {value}").unwrap();
        }
    }
    std::fs::write(&args[2], out).map_err(|e| format!("writing {}: {e}", args[2]))?;
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ssltl-highs: {e}");
            ExitCode::FAILURE
        }
    }
}
