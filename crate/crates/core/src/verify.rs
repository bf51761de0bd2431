//! Independent policy checker and a brute-force synthesizer for tiny
//! instances.
//!
//! A policy passes when every bottom SCC of the induced product chain is
//! Rabin-accepting, some model state occurs in every bottom SCC (so the
//! induced original chain is a unichain), and the long-run class masses meet
//! every steady-state interval within [`SS_TOL`].

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::chain::{limiting_distribution, lump_distribution, ChainError, Distribution};
use crate::graph::{bsccs, bscc_accepting};
use crate::hoa::Dra;
use crate::model::{FormulaError, Lmdp};
use crate::product::{build_product, induce_chain, Policy, ProductError, ProductLmc, ProductLmdp, ProductState};
use crate::SsLtlSpec;

/// Absolute tolerance on steady-state bounds.
pub const SS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("interval {index}: {source}")]
    Formula { index: usize, source: FormulaError },
    #[error("{states} product states and {actions} actions exceed the enumeration bound")]
    TooLarge { states: usize, actions: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsResult {
    pub achieved: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// The policy names exactly one enabled action per reachable state.
    pub deterministic: bool,
    /// Sizes of the bottom SCCs of the induced product chain.
    pub bscc_sizes: Vec<usize>,
    /// A model state present in every bottom SCC.
    pub shared_state: Option<usize>,
    pub unichain: bool,
    pub rabin_ok: Vec<bool>,
    pub ss_results: Vec<SsResult>,
    /// Product states lying in some bottom SCC.
    pub recurrent: Vec<ProductState>,
    /// States of the induced product chain, in chain order.
    pub product_states: Vec<ProductState>,
    pub product_distribution: Vec<f64>,
    /// Long-run mass per model state (zero for states the chain never visits).
    pub aggregate_distribution: Vec<f64>,
    /// Model states visited by the chain whose every copy is transient.
    pub transient_states: Vec<usize>,
    pub verdict: bool,
}

/// Verify `pi` against `spec` on M × A.
pub fn verify_policy(m: &Lmdp, d: &Dra, spec: &SsLtlSpec, pi: &Policy) -> Result<VerificationReport, VerifyError> {
    verify_on_product(&build_product(m, d), spec, pi)
}

/// As [`verify_policy`], reusing an already built product.
pub fn verify_on_product(p: &ProductLmdp, spec: &SsLtlSpec, pi: &Policy) -> Result<VerificationReport, VerifyError> {
    let sats = labeled_sets(p.model(), spec)?;
    let c = induce_chain(p, pi)?;
    let (report, _) = check(p, &c, spec, &sats, true)?;
    Ok(report)
}

fn labeled_sets(m: &Lmdp, spec: &SsLtlSpec) -> Result<Vec<BTreeSet<usize>>, VerifyError> {
    spec.ss
        .iter()
        .enumerate()
        .map(|(index, iv)| m.labeled_subset(&iv.formula).map_err(|source| VerifyError::Formula { index, source }))
        .collect()
}

/// Structural checks first; numerics only when `full` or when the
/// structure passes. Returns the report and whether it was cut short.
fn check(
    p: &ProductLmdp,
    c: &ProductLmc,
    spec: &SsLtlSpec,
    sats: &[BTreeSet<usize>],
    full: bool,
) -> Result<(VerificationReport, bool), VerifyError> {
    let m = p.model();
    let decomp = bsccs(&c.chain, c.initial);
    let bscc_states: Vec<Vec<ProductState>> =
        decomp.bsccs.iter().map(|b| b.iter().map(|&i| c.states[i]).collect()).collect();
    let rabin_ok: Vec<bool> = bscc_states.iter().map(|b| bscc_accepting(b, p.dra())).collect();

    let shared_state = {
        let mut common: Option<BTreeSet<usize>> = None;
        for b in &bscc_states {
            let here: BTreeSet<usize> = b.iter().map(|ps| ps.s).collect();
            common = Some(match common {
                None => here,
                Some(prev) => prev.intersection(&here).copied().collect(),
            });
        }
        common.and_then(|set| set.into_iter().next())
    };
    let unichain = shared_state.is_some();
    let structural = unichain && rabin_ok.iter().all(|&ok| ok);

    let mut report = VerificationReport {
        deterministic: true,
        bscc_sizes: decomp.bsccs.iter().map(Vec::len).collect(),
        shared_state,
        unichain,
        rabin_ok,
        recurrent: decomp.bsccs.iter().flatten().map(|&i| c.states[i]).collect(),
        ss_results: Vec::new(),
        product_states: c.states.clone(),
        product_distribution: Vec::new(),
        aggregate_distribution: Vec::new(),
        transient_states: Vec::new(),
        verdict: false,
    };
    if !structural && !full {
        return Ok((report, true));
    }

    let beta = Distribution::point(c.states.len(), c.initial);
    let dist = limiting_distribution(&c.chain, &beta)?;
    let part = c.partition();
    let lumped = lump_distribution(&dist, &part);
    let classes = c.class_states();
    let mut agg = vec![0.0; m.num_states()];
    for (k, &s) in classes.iter().enumerate() {
        agg[s] = lumped[k];
    }
    let recurrent: BTreeSet<usize> = decomp.bsccs.iter().flatten().map(|&i| c.states[i].s).collect();
    report.transient_states = classes.iter().copied().filter(|s| !recurrent.contains(s)).collect();

    report.ss_results = spec
        .ss
        .iter()
        .zip(sats)
        .map(|(iv, sat)| {
            let achieved: f64 = sat.iter().map(|&s| agg[s]).sum();
            SsResult {
                achieved,
                lower: iv.lower,
                upper: iv.upper,
                ok: achieved >= iv.lower - SS_TOL && achieved <= iv.upper + SS_TOL,
            }
        })
        .collect();
    report.verdict = structural && report.ss_results.iter().all(|r| r.ok);
    report.product_distribution = dist.into_inner();
    report.aggregate_distribution = agg;
    Ok((report, false))
}

/// Enumeration limits for [`brute_force_synth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthBound {
    pub max_states: usize,
    pub max_actions: usize,
}

impl Default for SynthBound {
    fn default() -> Self {
        SynthBound { max_states: 12, max_actions: 3 }
    }
}

/// The lexicographically first passing deterministic product policy, if any.
///
/// Policies are ordered by the action chosen at each product state, earlier
/// states most significant. Policies that differ only on states unreachable
/// under them induce the same chain; only the representative choosing the
/// first enabled action at every such state is checked.
pub fn brute_force_synth(
    m: &Lmdp,
    d: &Dra,
    spec: &SsLtlSpec,
    bound: SynthBound,
) -> Result<Option<Policy>, VerifyError> {
    let p = build_product(m, d);
    brute_force_on_product(&p, spec, bound)
}

pub fn brute_force_on_product(
    p: &ProductLmdp,
    spec: &SsLtlSpec,
    bound: SynthBound,
) -> Result<Option<Policy>, VerifyError> {
    let n = p.num_states();
    let max_actions = (0..n).map(|u| p.enabled(u).len()).max().unwrap_or(0);
    if n > bound.max_states || max_actions > bound.max_actions {
        return Err(VerifyError::TooLarge { states: n, actions: max_actions });
    }
    let sats = labeled_sets(p.model(), spec)?;
    let mut digits = vec![0usize; n];
    loop {
        let actions: Vec<usize> = (0..n).map(|u| p.enabled(u)[digits[u]]).collect();
        let pi = Policy::from_indexed(p, &actions);
        let c = induce_chain(p, &pi)?;
        let reached: BTreeSet<ProductState> = c.states.iter().copied().collect();
        let canonical = (0..n).all(|u| digits[u] == 0 || reached.contains(&p.state(u)));
        if canonical {
            let (report, _) = check(p, &c, spec, &sats, false)?;
            if report.verdict {
                return Ok(Some(pi));
            }
        }
        // odometer, last state least significant
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < p.enabled(k).len() {
                break;
            }
            digits[k] = 0;
        }
    }
}
