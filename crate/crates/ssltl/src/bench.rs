//! Batch runs over random gridworlds: one record per (spec, size, seed) and
//! a per-(spec, size) timing summary.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use ssltl_core::ilp::IlpConfig;
use ssltl_core::model::{generate_grid, GridSpec};

use crate::io::load_spec_for;
use crate::pipeline::{synthesize, Outcome};
use crate::solver::SolverConfig;

#[derive(Debug, Clone)]
pub struct SuiteSpec {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub specs: Vec<SuiteSpec>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub workers: usize,
}

/// One CSV row. `verified` is empty unless the solver produced a policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub size: usize,
    pub spec: String,
    pub status: String,
    pub seconds: f64,
    pub objective: Option<f64>,
    pub verified: Option<bool>,
    #[serde(skip)]
    pub solver_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub spec: String,
    pub size: usize,
    pub runs: usize,
    pub feasible: usize,
    pub verified: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub mean_solver_seconds: f64,
    pub std_solver_seconds: f64,
}

fn run_one(spec: &SuiteSpec, size: usize, seed: u64, cfg: &IlpConfig, solver: &SolverConfig) -> RunRecord {
    let instance = format!("{}-{size}x{size}-{seed}", spec.name);
    let mut rec = RunRecord {
        instance,
        size,
        spec: spec.name.clone(),
        status: String::new(),
        seconds: 0.0,
        objective: None,
        verified: None,
        solver_seconds: 0.0,
    };
    let start = std::time::Instant::now();
    let m = generate_grid(&GridSpec::benchmark(size, seed));
    let result = load_spec_for(&spec.path, &m)
        .map_err(|e| e.to_string())
        .and_then(|(s, d)| synthesize(Arc::new(m), Arc::new(d), &s, cfg, solver).map_err(|e| e.to_string()));
    match result {
        Ok(run) => {
            rec.solver_seconds = run.solver_seconds;
            match run.outcome {
                Outcome::Infeasible { .. } => rec.status = "infeasible".into(),
                Outcome::Solved { report, objective, status, .. } => {
                    rec.status = status.as_str().into();
                    rec.objective = objective;
                    rec.verified = Some(report.verdict);
                }
            }
        }
        Err(e) => {
            log::warn!("{}: {e}", rec.instance);
            rec.status = "error".into();
        }
    }
    rec.seconds = start.elapsed().as_secs_f64();
    rec
}

/// Run every instance of the suite on a bounded pool of worker threads.
/// Records come back in suite order regardless of scheduling.
pub fn run_suite(suite: &Suite, cfg: &IlpConfig, solver: &SolverConfig) -> Vec<RunRecord> {
    let jobs: Vec<(&SuiteSpec, usize, u64)> = suite
        .specs
        .iter()
        .flat_map(|sp| suite.sizes.iter().flat_map(move |&n| suite.seeds.iter().map(move |&seed| (sp, n, seed))))
        .collect();
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..suite.workers.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(sp, n, seed)) = jobs.get(i) else { break };
                let rec = run_one(sp, n, seed, cfg, solver);
                log::info!("{} {} {:.3}s", rec.instance, rec.status, rec.seconds);
                out.lock().expect("no worker panicked")[i] = Some(rec);
            });
        }
    });
    out.into_inner().expect("no worker panicked").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    // sample standard deviation, 0 for a single run
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(s, n)| *s == r.spec && *n == r.size) {
            keys.push((r.spec.clone(), r.size));
        }
    }
    keys.into_iter()
        .map(|(spec, size)| {
            let group: Vec<&RunRecord> = records.iter().filter(|r| r.spec == spec && r.size == size).collect();
            let total: Vec<f64> = group.iter().map(|r| r.seconds).collect();
            let solver: Vec<f64> = group.iter().map(|r| r.solver_seconds).collect();
            let (mean_seconds, std_seconds) = mean_std(&total);
            let (mean_solver_seconds, std_solver_seconds) = mean_std(&solver);
            SummaryRow {
                runs: group.len(),
                feasible: group.iter().filter(|r| r.verified.is_some()).count(),
                verified: group.iter().filter(|r| r.verified == Some(true)).count(),
                spec,
                size,
                mean_seconds,
                std_seconds,
                mean_solver_seconds,
                std_solver_seconds,
            }
        })
        .collect()
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
