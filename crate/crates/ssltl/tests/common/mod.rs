//! Helpers shared by the integration tests of this crate.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::Rng;
use ssltl::SolverConfig;
use ssltl_core::{Dra, LabelFormula, Lmdp, SsInterval, SsLtlSpec};

#[path = "../../../core/tests/common/mod.rs"]
mod generators;
pub use generators::*;

pub fn fixture_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

/// The bundled HiGHS shim built alongside this crate.
pub fn solver(timeout: Option<Duration>) -> SolverConfig {
    SolverConfig::with_shim(Path::new(env!("CARGO_BIN_EXE_ssltl-highs")), timeout)
}

fn random_interval<R: Rng>(rng: &mut R) -> SsInterval {
    let a = LabelFormula::prop("a");
    let b = LabelFormula::prop("b");
    let formula = match rng.gen_range(0..4) {
        0 => a,
        1 => b,
        2 => a.negate(),
        _ => a.and(b),
    };
    let lower = [0.0, 0.2, 0.4, 0.6][rng.gen_range(0..4)];
    let upper = *[0.3, 0.5, 0.8, 1.0].iter().find(|&&u| u >= lower).unwrap();
    let upper = if rng.gen_bool(0.5) { 1.0 } else { upper };
    SsInterval { formula, lower, upper }
}

/// A small instance for exhaustive cross-checks: two or three states, up to
/// three actions, an automaton of one to four nodes and up to two intervals.
pub fn tiny_instance<R: Rng>(rng: &mut R) -> (Lmdp, Dra, SsLtlSpec) {
    let n = rng.gen_range(2..=3);
    let m = random_lmdp(rng, n, 3);
    let nodes = rng.gen_range(1..=4);
    let d = random_dra(rng, nodes, &["a", "b"]);
    let ss = (0..rng.gen_range(0..=2)).map(|_| random_interval(rng)).collect();
    (m, d, SsLtlSpec::new("random", ss).unwrap())
}
