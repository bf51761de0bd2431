//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines reach the terminal. The process fails
//! when a criterion fails unless it is listed in `KNOWN_GAPS` with the reason
//! it cannot pass as specified.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{
    cesaro_oracle, fixture_path, random_dra, random_irreducible, random_multichain, solver, tiny_instance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssltl::bench::{run_suite, Suite, SuiteSpec};
use ssltl::io::{load_model, load_policy, load_spec_for};
use ssltl::{synthesize, Outcome, SolverConfig};
use ssltl_core::chain::{
    check_lumpable, limiting_distribution, lump_distribution, residual, Chain, Distribution, Row,
};
use ssltl_core::graph::bsccs;
use ssltl_core::ilp::{IlpConfig, Objective};
use ssltl_core::product::{aggregate, induce_chain};
use ssltl_core::verify::{brute_force_synth, verify_policy, SynthBound};
use ssltl_core::{Lmdp, Policy, ProductLmc, ProductLmdp};

/// Criteria that fail for reasons outside this implementation.
const KNOWN_GAPS: &[(u32, &str)] = &[
    (
        4,
        "accepting MECs are maximal end components filtered by the Rabin condition; a MEC that meets \
         every pair's Fin set is dropped even when it contains an accepting end component, so the \
         program can be infeasible while a passing policy exists",
    ),
    (
        8,
        "constraint (xi) asks for recurrent mass on Inf states but never excludes Fin states; with the \
         two-pair automaton of theta2 the program admits policies whose bottom component meets Fin, \
         and the verifier rejects them",
    ),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn irreducible_product(seed: u64) -> (Lmdp, ProductLmc) {
    let mut r = rng(seed);
    let n = r.gen_range(3..=15);
    let m = random_irreducible(&mut r, n);
    let nodes = r.gen_range(2..=5);
    let d = random_dra(&mut r, nodes, &["a", "b"]);
    let p = ProductLmdp::new(Arc::new(m.clone()), Arc::new(d));
    let c = induce_chain(&p, &Policy::memoryless(&p, &vec![0; n])).unwrap();
    (m, c)
}

/// The product chain cut down to one bottom component, reindexed.
fn restrict(c: &ProductLmc, members: &[usize]) -> ProductLmc {
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let rows: Vec<Row> =
        members.iter().map(|&u| c.chain.row(u).iter().map(|&(v, p)| (local[&v], p)).collect()).collect();
    ProductLmc {
        states: members.iter().map(|&u| c.states[u]).collect(),
        chain: Chain::new(rows).unwrap(),
        initial: 0,
        model: c.model.clone(),
    }
}

fn lumpability() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut components = 0;
    for seed in 0..200 {
        let (_, c) = irreducible_product(seed);
        for b in bsccs(&c.chain, c.initial).bsccs {
            let sub = restrict(&c, &b);
            worst = worst.max(check_lumpable(&sub.chain, &sub.partition()));
            components += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-12 && secs < 30.0,
        format!("200 products, {components} bottom components, max residual {worst:.1e}, {secs:.2}s"),
    )
}

fn aggregation() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 1000..1100 {
        let (m, c) = irreducible_product(seed);
        // a bottom component of the product is itself an irreducible product chain
        let b = &bsccs(&c.chain, c.initial).bsccs[0];
        let sub = restrict(&c, b);
        let agg = aggregate(&sub).unwrap();
        let cls = sub.class_states();
        if cls.len() != m.num_states() {
            return verdict(false, format!("seed {seed}: component covers {} of {} states", cls.len(), m.num_states()));
        }
        for (i, &s) in cls.iter().enumerate() {
            for (j, &t) in cls.iter().enumerate() {
                worst = worst.max((agg.chain.prob(i, j) - m.prob(s, 0, t)).abs());
            }
        }
    }
    verdict(worst <= 1e-12, format!("100 irreducible products, max kernel difference {worst:.1e}"))
}

fn two_components() -> Verdict {
    let m = load_model(&fixture_path("two_bscc/model.json")).unwrap();
    let (_, d) = load_spec_for(&fixture_path("two_bscc/spec.json"), &m).unwrap();
    let p = ProductLmdp::new(Arc::new(m), Arc::new(d));
    let c = induce_chain(&p, &Policy::memoryless(&p, &[0, 0, 0])).unwrap();
    let dist = limiting_distribution(&c.chain, &Distribution::point(c.chain.len(), c.initial).0).unwrap();
    let mut err = 0.0f64;
    for (u, ps) in c.states.iter().enumerate() {
        let want = [0.0, 1.0 / 6.0, 1.0 / 12.0][ps.s];
        err = err.max((dist.0[u] - want).abs());
    }
    let lumped = lump_distribution(&dist.0, &c.partition());
    err = err.max(lumped.max_abs_diff(&[0.0, 2.0 / 3.0, 1.0 / 3.0]));
    verdict(
        err <= 1e-9,
        format!("(s1,·) = {:.6}, class masses {:?}, max error {err:.1e}", dist.0[1], lumped.0),
    )
}

fn feasibility() -> IlpConfig {
    IlpConfig { objective: Objective::Feasibility, ..IlpConfig::default() }
}

struct CrossCheck {
    verdict: Verdict,
    residuals: Vec<f64>,
}

fn cross_check(solver: &SolverConfig) -> CrossCheck {
    let start = Instant::now();
    let mut residuals = Vec::new();
    let (mut both, mut neither, mut mismatches) = (0, 0, Vec::new());
    let mut failed_verification = Vec::new();
    let mut seed = 4000;
    let mut done = 0;
    while done < 50 {
        seed += 1;
        let mut r = rng(seed);
        let (m, d, spec) = tiny_instance(&mut r);
        let oracle = match brute_force_synth(&m, &d, &spec, SynthBound::default()) {
            Ok(o) => o,
            // more than 12 product states: draw again
            Err(_) => continue,
        };
        done += 1;
        let run = synthesize(Arc::new(m.clone()), Arc::new(d.clone()), &spec, &feasibility(), solver).unwrap();
        let ilp_policy = match run.outcome {
            Outcome::Infeasible { .. } => None,
            Outcome::Solved { policy, recurrent_identity_residual, .. } => {
                residuals.push(recurrent_identity_residual);
                Some(policy)
            }
        };
        if let Some(pi) = &ilp_policy {
            if !verify_policy(&m, &d, &spec, pi).unwrap().verdict {
                failed_verification.push(seed);
            }
        }
        match (ilp_policy.is_some(), oracle.is_some()) {
            (true, true) => both += 1,
            (false, false) => neither += 1,
            (ilp, brute) => mismatches.push(format!("seed {seed}: ilp {ilp}, enumeration {brute}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && failed_verification.is_empty() && secs < 600.0;
    let mut detail = format!(
        "{both} feasible, {neither} infeasible, {} mismatched, {} unverified ILP policies, {secs:.1}s",
        mismatches.len(),
        failed_verification.len()
    );
    if !mismatches.is_empty() {
        detail += &format!(" [{}]", mismatches.join("; "));
    }
    if !failed_verification.is_empty() {
        detail += &format!(" [unverified seeds {failed_verification:?}]");
    }
    CrossCheck { verdict: verdict(pass, detail), residuals }
}

struct Patrol {
    verdict: Verdict,
    residual: Option<f64>,
}

fn patrol(solver: &SolverConfig) -> Patrol {
    let start = Instant::now();
    let m = load_model(&fixture_path("patrol8/model.json")).unwrap();
    let (spec, d) = load_spec_for(&fixture_path("patrol8/spec.json"), &m).unwrap();
    let reference_report = {
        let p = ProductLmdp::new(Arc::new(m.clone()), Arc::new(d.clone()));
        let pi = load_policy(&fixture_path("patrol8/policy.json"), &p).unwrap();
        verify_policy(&m, &d, &spec, &pi).unwrap()
    };
    let run = synthesize(Arc::new(m), Arc::new(d), &spec, &feasibility(), solver).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let Outcome::Solved { report, recurrent_identity_residual, .. } = run.outcome else {
        return Patrol { verdict: verdict(false, "program reported infeasible"), residual: None };
    };
    let masses: Vec<f64> = report.ss_results.iter().map(|s| s.achieved).collect();
    let pass = report.verdict && report.unichain && masses.iter().all(|&x| x >= 0.01 - 1e-6) && secs < 600.0;
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    let reference: Vec<f64> = reference_report.ss_results.iter().map(|s| s.achieved).collect();
    Patrol {
        verdict: verdict(
            pass,
            format!(
                "region masses [{}] (reference policy: [{}], reference value 0.0294), unichain {}, {secs:.1}s",
                fmt(&masses),
                fmt(&reference),
                report.unichain
            ),
        ),
        residual: Some(recurrent_identity_residual),
    }
}

fn identity(residuals: &[f64]) -> Verdict {
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    verdict(worst <= 1e-6, format!("{} feasible solves, max residual {worst:.1e}", residuals.len()))
}

fn limiting() -> Verdict {
    let (mut oracle_err, mut fixed_err) = (0.0f64, 0.0f64);
    for seed in 7000..7100 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=20);
        let c = random_multichain(&mut r, n);
        let beta = Distribution::point(n, r.gen_range(0..n)).0;
        let d = limiting_distribution(&c, &beta).unwrap();
        oracle_err = oracle_err.max(d.max_abs_diff(&cesaro_oracle(&c, &beta)));
        fixed_err = fixed_err.max(residual(&c, &d.0));
    }
    verdict(
        oracle_err <= 1e-6 && fixed_err <= 1e-10,
        format!("100 multichains, max oracle difference {oracle_err:.1e}, max |dT - d| {fixed_err:.1e}"),
    )
}

fn grids() -> Verdict {
    // reward objective, as in the timing study, with a solver time limit
    let solver = solver(Some(Duration::from_secs(10)));
    let suite = Suite {
        specs: ["theta2", "theta4"]
            .iter()
            .map(|n| SuiteSpec { name: n.to_string(), path: fixture_path(&format!("specs/{n}.json")) })
            .collect(),
        sizes: vec![4],
        seeds: (1..=10).collect(),
        workers: 1,
    };
    let records = run_suite(&suite, &IlpConfig::default(), &solver);
    let slowest = records.iter().map(|r| r.seconds).fold(0.0, f64::max);
    let errors: Vec<&str> = records.iter().filter(|r| r.status == "error").map(|r| r.instance.as_str()).collect();
    let unverified: Vec<&str> =
        records.iter().filter(|r| r.verified == Some(false)).map(|r| r.instance.as_str()).collect();
    let feasible = records.iter().filter(|r| r.verified.is_some()).count();
    let pass = slowest < 60.0 && errors.is_empty() && unverified.is_empty();
    let mut detail =
        format!("{} runs, {feasible} feasible, slowest {slowest:.1}s, {} unverified", records.len(), unverified.len());
    if !unverified.is_empty() {
        detail += &format!(" {unverified:?}");
    }
    if !errors.is_empty() {
        detail += &format!(", errors {errors:?}");
    }
    verdict(pass, detail)
}

fn main() {
    let solver = solver(None);
    let four = cross_check(&solver);
    let five = patrol(&solver);
    let mut residuals = four.residuals;
    residuals.extend(five.residual);
    let results = [
        (1, "lumpability of bottom components", lumpability()),
        (2, "aggregation identity", aggregation()),
        (3, "two-component example masses", two_components()),
        (4, "program feasibility matches enumeration", four.verdict),
        (5, "8x8 region patrol instance", five.verdict),
        (6, "occupation identity on recurrent states", identity(&residuals)),
        (7, "limiting distribution oracle", limiting()),
        (8, "4x4 grid suites end to end", grids()),
    ];
    let mut unexpected = 0;
    for (id, name, v) in &results {
        let gap = KNOWN_GAPS.iter().find(|(k, _)| k == id);
        println!("{} {id}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        match (v.pass, gap) {
            (false, Some((_, why))) => println!("     known gap: {why}"),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
