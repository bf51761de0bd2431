//! Running an external MILP solver on an exported LP file.
//!
//! The command is a shell template; `{lp}`, `{sol}` and `{timeout}` are
//! replaced by the LP path, the expected solution path and the time limit in
//! seconds. The process is killed if it outlives the limit by more than a
//! grace period.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use ssltl_core::ilp::{export_lp, parse_solution, IlpModel, Solution, SolutionError};

pub const SOLVER_ENV: &str = "SSLTL_SOLVER_CMD";
const SHIM: &str = "ssltl-highs";
const GRACE: Duration = Duration::from_secs(5);

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no solver command: pass --solver-cmd or set {SOLVER_ENV}")]
    NoCommand,
    #[error("could not launch solver: {0}")]
    Launch(std::io::Error),
    #[error("temporary files: {0}")]
    Temp(std::io::Error),
    #[error("solver exceeded {0:?} and was killed")]
    Timeout(Duration),
    #[error("solver wrote no solution file (exit {code:?}): {stderr}")]
    NoSolution { code: Option<i32>, stderr: String },
    #[error(transparent)]
    Parse(#[from] SolutionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub command: String,
    pub timeout: Option<Duration>,
}

impl SolverConfig {
    /// `--solver-cmd`, else `SSLTL_SOLVER_CMD`, else the bundled HiGHS shim
    /// found next to the running executable or on `PATH`.
    pub fn resolve(explicit: Option<String>, timeout: Option<Duration>) -> Result<Self, SolverError> {
        let command = explicit
            .or_else(|| std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()))
            .or_else(|| find_shim().map(|p| shim_template(&p)))
            .ok_or(SolverError::NoCommand)?;
        Ok(SolverConfig { command, timeout })
    }

    pub fn with_shim(shim: &Path, timeout: Option<Duration>) -> Self {
        SolverConfig { command: shim_template(shim), timeout }
    }
}

pub fn shim_template(shim: &Path) -> String {
    format!("'{}' {{lp}} {{sol}} {{timeout}}", shim.display())
}

fn find_shim() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let mut dir = exe.parent();
    // test binaries live one level below the bin directory
    for _ in 0..2 {
        let d = dir?;
        let candidate = d.join(SHIM);
        if candidate.is_file() {
            return Some(candidate);
        }
        dir = d.parent();
    }
    std::env::var_os("PATH")
        .and_then(|paths| std::env::split_paths(&paths).map(|p| p.join(SHIM)).find(|p| p.is_file()))
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub seconds: f64,
}

/// Export `model`, run the solver, parse its solution file.
pub fn solve(model: &IlpModel, cfg: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    let dir = tempfile::Builder::new().prefix("ssltl-").tempdir().map_err(SolverError::Temp)?;
    let lp = dir.path().join("model.lp");
    let sol = dir.path().join("model.sol");
    std::fs::write(&lp, export_lp(model)).map_err(SolverError::Temp)?;
    let limit = cfg.timeout.map_or(1e9, |t| t.as_secs_f64());
    let cmd = cfg
        .command
        .replace("{lp}", &lp.to_string_lossy())
        .replace("{sol}", &sol.to_string_lossy())
        .replace("{timeout}", &limit.to_string());
    log::debug!("solver: {cmd}");

    let err_path = dir.path().join("stderr.txt");
    let err_file = std::fs::File::create(&err_path).map_err(SolverError::Temp)?;
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(err_file)
        .spawn()
        .map_err(SolverError::Launch)?;
    let status = loop {
        if let Some(status) = child.try_wait().map_err(SolverError::Launch)? {
            break status;
        }
        if let Some(t) = cfg.timeout {
            if start.elapsed() > t + GRACE {
                let _ = child.kill();
                let _ = child.wait();
                return Err(SolverError::Timeout(t));
            }
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let seconds = start.elapsed().as_secs_f64();
    let text = match std::fs::read_to_string(&sol) {
        Ok(t) => t,
        Err(_) => {
            let stderr = std::fs::read_to_string(&err_path).unwrap_or_default();
            return Err(SolverError::NoSolution { code: status.code(), stderr: stderr.trim().to_string() });
        }
    };
    let solution = parse_solution(&text)?;
    Ok(SolveOutcome { solution, seconds })
}
