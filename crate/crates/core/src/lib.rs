//! Synthesis and verification of deterministic finite-memory policies for
//! labeled Markov decision processes under combined LTL + steady-state
//! specifications.
//!
//! The crate is `no_std` (with `alloc`). It holds the pure algorithmic parts:
//!
//! - [`model`]: labeled MDPs and chains, Boolean label formulas, the random
//!   gridworld generator;
//! - [`hoa`]: deterministic Rabin automata read from HOA text;
//! - [`product`]: product LMDPs, induced product chains, aggregation;
//! - [`graph`]: SCC / BSCC / maximal end component analysis;
//! - [`chain`]: stationary and limiting distributions, lumpability;
//! - [`ilp`]: the mixed-integer program, LP text, solution parsing and policy
//!   extraction;
//! - [`verify`]: the independent policy checker and a brute-force synthesizer.
//!
//! File IO, the solver subprocess and the command line live in the `ssltl`
//! crate.
#![no_std]

extern crate alloc;

pub mod chain;
pub mod graph;
pub mod hoa;
pub mod ilp;
pub mod model;
pub mod product;
pub mod verify;

pub use chain::{Chain, Distribution, Partition};
pub use hoa::{Dra, RabinPair};
pub use model::{LabelFormula, Lmc, Lmdp, SsInterval, SsLtlSpec};
pub use product::{Policy, ProductLmc, ProductLmdp, ProductState};

/// Tolerance used when validating that a probability row sums to one.
pub const PROB_TOL: f64 = 1e-12;
