//! Shared builders and random instance generators for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use ssltl_core::chain::{Chain, Row};
use ssltl_core::hoa::{parse_hoa, Dra, RabinPair};
use ssltl_core::model::{LmdpParts, StateDecl, TransitionDecl};
use ssltl_core::Lmdp;

pub fn fixture(rel: &str) -> String {
    let path = format!("{}/../../fixtures/{rel}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture_dra(rel: &str) -> Dra {
    parse_hoa(&fixture(rel)).unwrap()
}

/// A model from (id, labels) and (from, action, to, p) tuples; the first
/// state is initial.
pub fn lmdp(states: &[(&str, &[&str])], trans: &[(&str, &str, &str, f64)]) -> Lmdp {
    lmdp_with_ap(states, trans, None)
}

pub fn lmdp_with_ap(states: &[(&str, &[&str])], trans: &[(&str, &str, &str, f64)], ap: Option<&[&str]>) -> Lmdp {
    let mut actions: Vec<String> = Vec::new();
    for t in trans {
        if !actions.iter().any(|a| a == t.1) {
            actions.push(t.1.to_string());
        }
    }
    Lmdp::from_parts(LmdpParts {
        states: states
            .iter()
            .map(|(id, l)| StateDecl { id: id.to_string(), labels: l.iter().map(|x| x.to_string()).collect() })
            .collect(),
        actions,
        ap: ap.map(|a| a.iter().map(|x| x.to_string()).collect()),
        initial: states[0].0.to_string(),
        transitions: trans
            .iter()
            .map(|t| TransitionDecl { from: t.0.into(), action: t.1.into(), to: t.2.into(), p: t.3 })
            .collect(),
        rewards: vec![],
    })
    .unwrap()
}

/// Random positive weights over `targets`, normalized, each at least 0.05.
fn weights<R: Rng>(rng: &mut R, targets: &[usize]) -> Row {
    let w: Vec<f64> = targets.iter().map(|_| rng.gen_range(1.0..20.0)).collect();
    let total: f64 = w.iter().sum();
    let mut row: Row = targets.iter().zip(&w).map(|(&t, &x)| (t, x / total)).collect();
    row.sort_by_key(|&(t, _)| t);
    row
}

fn random_labels<R: Rng>(rng: &mut R, ap: &[&str]) -> Vec<String> {
    ap.iter().filter(|_| rng.gen_bool(0.5)).map(|p| p.to_string()).collect()
}

/// Strongly connected single-action model: a random Hamiltonian cycle plus
/// random chords, so every state reaches every other.
pub fn random_irreducible<R: Rng>(rng: &mut R, n: usize) -> Lmdp {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut transitions = Vec::new();
    for i in 0..n {
        let s = order[i];
        let mut targets: BTreeSet<usize> = BTreeSet::from([order[(i + 1) % n]]);
        for _ in 0..rng.gen_range(0..3) {
            targets.insert(rng.gen_range(0..n));
        }
        let targets: Vec<usize> = targets.into_iter().collect();
        for (t, p) in weights(rng, &targets) {
            transitions.push(TransitionDecl { from: format!("s{s}"), action: "go".into(), to: format!("s{t}"), p });
        }
    }
    let ap = ["a", "b"];
    Lmdp::from_parts(LmdpParts {
        states: (0..n).map(|s| StateDecl { id: format!("s{s}"), labels: random_labels(rng, &ap) }).collect(),
        actions: vec!["go".into()],
        ap: Some(ap.iter().map(|p| p.to_string()).collect()),
        initial: "s0".into(),
        transitions,
        rewards: vec![],
    })
    .unwrap()
}

/// Small model with up to `actions` actions per state and one or two
/// successors per (state, action).
pub fn random_lmdp<R: Rng>(rng: &mut R, n: usize, actions: usize) -> Lmdp {
    let names: Vec<String> = (0..actions).map(|k| format!("a{k}")).collect();
    let mut transitions = Vec::new();
    for s in 0..n {
        let mut enabled: Vec<usize> = (0..actions).filter(|_| rng.gen_bool(0.7)).collect();
        if enabled.is_empty() {
            enabled.push(rng.gen_range(0..actions));
        }
        for a in enabled {
            let mut targets: BTreeSet<usize> = BTreeSet::from([rng.gen_range(0..n)]);
            if rng.gen_bool(0.4) {
                targets.insert(rng.gen_range(0..n));
            }
            let targets: Vec<usize> = targets.into_iter().collect();
            for (t, p) in weights(rng, &targets) {
                transitions.push(TransitionDecl {
                    from: format!("s{s}"),
                    action: names[a].clone(),
                    to: format!("s{t}"),
                    p,
                });
            }
        }
    }
    let ap = ["a", "b"];
    Lmdp::from_parts(LmdpParts {
        states: (0..n).map(|s| StateDecl { id: format!("s{s}"), labels: random_labels(rng, &ap) }).collect(),
        actions: names,
        ap: Some(ap.iter().map(|p| p.to_string()).collect()),
        initial: "s0".into(),
        transitions,
        rewards: vec![],
    })
    .unwrap()
}

/// Complete DRA with a random transition table and one or two pairs.
pub fn random_dra<R: Rng>(rng: &mut R, nodes: usize, ap: &[&str]) -> Dra {
    let letters = 1usize << ap.len();
    let delta = (0..nodes).map(|_| (0..letters).map(|_| rng.gen_range(0..nodes)).collect()).collect();
    let pairs = (0..rng.gen_range(1..=2))
        .map(|_| {
            let fin: BTreeSet<usize> = (0..nodes).filter(|_| rng.gen_bool(0.25)).collect();
            let mut inf: BTreeSet<usize> = (0..nodes).filter(|q| !fin.contains(q) && rng.gen_bool(0.4)).collect();
            if inf.is_empty() {
                inf.insert(rng.gen_range(0..nodes));
            }
            RabinPair { fin, inf }
        })
        .collect();
    Dra::new(
        (0..nodes).map(|q| format!("q{q}")).collect(),
        0,
        ap.iter().map(|p| p.to_string()).collect(),
        delta,
        pairs,
    )
    .unwrap()
}

/// Chain with one to three closed classes (some of them periodic cycles) and
/// transient states that leak into them.
pub fn random_multichain<R: Rng>(rng: &mut R, n: usize) -> Chain {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let closed = rng.gen_range(1..=3.min(n));
    // the first `closed` cuts of a shuffled prefix form the closed classes
    let recurrent = rng.gen_range(closed..=n);
    let mut cuts: Vec<usize> = (1..recurrent).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(closed - 1).collect();
    cuts.push(0);
    cuts.push(recurrent);
    cuts.sort_unstable();
    let mut rows: Vec<Row> = vec![Vec::new(); n];
    for w in cuts.windows(2) {
        let class = &order[w[0]..w[1]];
        let periodic = rng.gen_bool(0.3);
        for (i, &s) in class.iter().enumerate() {
            let mut targets: BTreeSet<usize> = BTreeSet::from([class[(i + 1) % class.len()]]);
            if !periodic {
                for _ in 0..rng.gen_range(0..3) {
                    targets.insert(class[rng.gen_range(0..class.len())]);
                }
            }
            rows[s] = weights(rng, &targets.into_iter().collect::<Vec<_>>());
        }
    }
    // transient i may move to recurrent states or to transient states before it
    for i in recurrent..n {
        let s = order[i];
        let mut targets: BTreeSet<usize> = BTreeSet::from([order[rng.gen_range(0..i)]]);
        for _ in 0..rng.gen_range(0..3) {
            targets.insert(order[rng.gen_range(0..n)]);
        }
        rows[s] = weights(rng, &targets.into_iter().collect::<Vec<_>>());
    }
    Chain::new(rows).unwrap()
}

/// Cesàro limit of β·Tⁿ computed on the lazy chain (I + T)/2, which has the
/// same limit and no periodicity: iterate until the step change is below
/// 1e-15, then average a further window.
pub fn cesaro_oracle(c: &Chain, beta: &[f64]) -> Vec<f64> {
    let n = c.len();
    let lazy = |x: &[f64]| -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
        for (s, &xs) in x.iter().enumerate() {
            for &(t, p) in c.row(s) {
                y[t] += xs * p / 2.0;
            }
        }
        y
    };
    let mut x = beta.to_vec();
    for _ in 0..200_000 {
        let y = lazy(&x);
        let change = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if change < 1e-15 {
            break;
        }
    }
    let window = 1000;
    let mut avg = vec![0.0; n];
    for _ in 0..window {
        x = lazy(&x);
        for (a, v) in avg.iter_mut().zip(&x) {
            *a += v / window as f64;
        }
    }
    avg
}
