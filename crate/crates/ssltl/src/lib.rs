//! File formats, the external solver driver, the end-to-end synthesis
//! pipeline and the benchmark harness built on `ssltl-core`.

pub mod bench;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod solver;

pub use pipeline::{synthesize, synthesize_with, Outcome, PipelineError, SynthRun};
pub use solver::{SolverConfig, SolverError};
