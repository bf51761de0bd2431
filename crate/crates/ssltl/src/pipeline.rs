//! End-to-end synthesis: product, accepting MECs, program, solver, policy
//! extraction and mandatory re-verification.

use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use ssltl_core::graph::{accepting_mecs, mec_decomposition};
use ssltl_core::ilp::{
    build_program, extract_policy, occupation_residual, ExtractError, IlpConfig, IlpError, IlpModel, SolveStatus,
};
use ssltl_core::verify::{verify_on_product, VerificationReport, VerifyError};
use ssltl_core::{Dra, Lmdp, Policy, ProductLmdp, SsLtlSpec};

use crate::solver::{solve, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ilp(IlpError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("solver returned `{}`", .0.as_str())]
    Status(SolveStatus),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone)]
pub enum Outcome {
    /// The program has no solution (or no accepting end component exists).
    Infeasible { reason: String },
    /// A policy was extracted; `report.verdict` tells whether it passed.
    Solved {
        policy: Policy,
        report: VerificationReport,
        objective: Option<f64>,
        status: SolveStatus,
        warnings: Vec<String>,
        /// Occupation identity residual over recurrent product states.
        recurrent_identity_residual: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SynthRun {
    pub product: ProductLmdp,
    pub outcome: Outcome,
    pub solver_seconds: f64,
    pub total_seconds: f64,
    pub program: Option<IlpModel>,
}

impl SynthRun {
    pub fn verified(&self) -> bool {
        matches!(&self.outcome, Outcome::Solved { report, .. } if report.verdict)
    }
}

/// Build and solve the program for (m, d, spec), then verify the result.
///
/// `prepare` may adjust the program before it is handed to the solver, e.g.
/// to fix the policy binaries.
pub fn synthesize_with(
    m: Arc<Lmdp>,
    d: Arc<Dra>,
    spec: &SsLtlSpec,
    cfg: &IlpConfig,
    solver: &SolverConfig,
    prepare: impl FnOnce(&ProductLmdp, &mut IlpModel),
) -> Result<SynthRun, PipelineError> {
    let start = Instant::now();
    let product = ProductLmdp::new(m, d);
    let amecs = accepting_mecs(&mec_decomposition(&product), &product);
    let mut program = match build_program(&product, &amecs, spec, cfg) {
        Ok(p) => p,
        Err(IlpError::NoAcceptingMec) => {
            return Ok(SynthRun {
                product,
                outcome: Outcome::Infeasible { reason: IlpError::NoAcceptingMec.to_string() },
                solver_seconds: 0.0,
                total_seconds: start.elapsed().as_secs_f64(),
                program: None,
            })
        }
        Err(e) => return Err(PipelineError::Ilp(e)),
    };
    prepare(&product, &mut program);
    log::info!(
        "program: {} variables, {} constraints, {} accepting MECs",
        program.vars.len(),
        program.constraints.len(),
        amecs.len()
    );
    let solved = solve(&program, solver)?;
    let sol = solved.solution;
    let outcome = match sol.status {
        SolveStatus::Infeasible => Outcome::Infeasible { reason: "solver reported infeasible".into() },
        s if s.has_solution() => {
            let extracted = extract_policy(&sol, &product, &program)?;
            for w in &extracted.warnings {
                log::warn!("{w}");
            }
            let report = verify_on_product(&product, spec, &extracted.policy)?;
            let recurrent = report.recurrent.iter().filter_map(|&ps| product.index_of(ps));
            let recurrent_identity_residual =
                occupation_residual(&sol, &product, &program, &extracted.policy, recurrent).map_err(ExtractError::from)?;
            Outcome::Solved {
                policy: extracted.policy,
                report,
                objective: sol.objective,
                status: s,
                warnings: extracted.warnings,
                recurrent_identity_residual,
            }
        }
        s => return Err(PipelineError::Status(s)),
    };
    Ok(SynthRun {
        product,
        outcome,
        solver_seconds: solved.seconds,
        total_seconds: start.elapsed().as_secs_f64(),
        program: Some(program),
    })
}

pub fn synthesize(
    m: Arc<Lmdp>,
    d: Arc<Dra>,
    spec: &SsLtlSpec,
    cfg: &IlpConfig,
    solver: &SolverConfig,
) -> Result<SynthRun, PipelineError> {
    synthesize_with(m, d, spec, cfg, solver, |_, _| {})
}
