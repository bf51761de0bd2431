//! Property tests over random models, automata and chains.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use common::{cesaro_oracle, fixture_dra, random_dra, random_irreducible, random_lmdp, random_multichain};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssltl_core::chain::{check_lumpable, limiting_distribution, residual, Chain, Distribution, Partition, Row};
use ssltl_core::graph::{accepting_mecs, bsccs, is_end_component, mec_decomposition};
use ssltl_core::hoa::parse_hoa;
use ssltl_core::product::{aggregate, induce_chain};
use ssltl_core::{LabelFormula, Lmdp, Policy, ProductLmc, ProductLmdp, ProductState};

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

/// The sub-chain on `members`, reindexed in the given order.
fn restrict(c: &Chain, members: &[usize]) -> Chain {
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let rows: Vec<Row> = members.iter().map(|&u| c.row(u).iter().map(|&(v, p)| (local[&v], p)).collect()).collect();
    Chain::new(rows).unwrap()
}

/// States (sorted) and retained actions of an end component.
type Component = (Vec<usize>, BTreeMap<usize, Vec<usize>>);

/// Brute-force maximal end components: every state subset whose closed
/// actions are non-empty everywhere and strongly connect it, kept if no
/// strictly larger such subset contains it.
fn brute_mecs(p: &ProductLmdp) -> Vec<Component> {
    let n = p.num_states();
    let mut ecs: Vec<(u32, BTreeMap<usize, Vec<usize>>)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let inside = |v: usize| mask & (1 << v) != 0;
        let mut acts = BTreeMap::new();
        let mut ok = true;
        for u in (0..n).filter(|&u| inside(u)) {
            let closed: Vec<usize> = p
                .enabled(u)
                .iter()
                .copied()
                .filter(|&a| p.successors(u, a).unwrap().iter().all(|&(v, _)| inside(v)))
                .collect();
            if closed.is_empty() {
                ok = false;
                break;
            }
            acts.insert(u, closed);
        }
        if !ok {
            continue;
        }
        let reach = |from: usize, forward: bool| -> u32 {
            let mut seen = 1u32 << from;
            let mut stack = vec![from];
            while let Some(x) = stack.pop() {
                for (&u, al) in &acts {
                    for &a in al {
                        for &(v, _) in p.successors(u, a).unwrap() {
                            let (src, dst) = if forward { (u, v) } else { (v, u) };
                            if src == x && seen & (1 << dst) == 0 {
                                seen |= 1 << dst;
                                stack.push(dst);
                            }
                        }
                    }
                }
            }
            seen
        };
        let first = mask.trailing_zeros() as usize;
        if reach(first, true) == mask && reach(first, false) == mask {
            ecs.push((mask, acts));
        }
    }
    let maximal: Vec<_> = ecs
        .iter()
        .filter(|(m, _)| !ecs.iter().any(|(o, _)| o != m && o & m == *m))
        .map(|(m, acts)| ((0..n).filter(|&v| m & (1 << v) != 0).collect(), acts.clone()))
        .collect();
    maximal
}

fn random_formula(r: &mut ChaCha8Rng, depth: u32) -> LabelFormula {
    match if depth == 0 { r.gen_range(0..2) } else { r.gen_range(0..5) } {
        0 => LabelFormula::True,
        1 => LabelFormula::prop(["a", "b"][r.gen_range(0..2)]),
        2 => random_formula(r, depth - 1).negate(),
        3 => random_formula(r, depth - 1).and(random_formula(r, depth - 1)),
        _ => random_formula(r, depth - 1).or(random_formula(r, depth - 1)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bsccs_are_lumpable_by_model_state(seed in any::<u64>()) {
        let (_, c) = irreducible_product(seed);
        for b in bsccs(&c.chain, c.initial).bsccs {
            let keys: Vec<usize> = b.iter().map(|&u| c.states[u].s).collect();
            let residual = check_lumpable(&restrict(&c.chain, &b), &Partition::by_key(&keys));
            prop_assert!(residual <= 1e-12, "{residual}");
        }
    }

    #[test]
    fn aggregate_recovers_the_model_kernel(seed in any::<u64>()) {
        let (m, c) = irreducible_product(seed);
        let agg = aggregate(&c).unwrap();
        // every model state is visited, so classes are the model states in order
        prop_assert_eq!(c.class_states(), (0..m.num_states()).collect::<Vec<_>>());
        for s in 0..m.num_states() {
            for t in 0..m.num_states() {
                prop_assert!((agg.chain.prob(s, t) - m.prob(s, 0, t)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn limiting_matches_cesaro_and_is_stationary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=20);
        let c = random_multichain(&mut r, n);
        let beta = Distribution::point(n, r.gen_range(0..n)).0;
        let d = limiting_distribution(&c, &beta).unwrap();
        let oracle = cesaro_oracle(&c, &beta);
        prop_assert!(d.max_abs_diff(&oracle) <= 1e-6, "{:?} vs {:?}", d.0, oracle);
        prop_assert!(residual(&c, &d.0) <= 1e-10);
        prop_assert!((d.0.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn model_paths_lift_to_product_paths(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let m = random_lmdp(&mut r, n, 3);
        let nodes = r.gen_range(2..=4);
        let d = random_dra(&mut r, nodes, &["a", "b"]);
        let p = ProductLmdp::new(Arc::new(m.clone()), Arc::new(d.clone()));
        let letter = |s: usize| d.letter_of(m.labels(s).iter().map(|&i| m.ap()[i].as_str()));
        let mut s = m.initial();
        let mut q = d.step(d.initial(), letter(s));
        prop_assert_eq!(p.state(p.initial()), ProductState { s, q });
        for _ in 0..50 {
            let u = p.index_of(ProductState { s, q }).expect("reachable");
            prop_assert_eq!(p.enabled(u), m.enabled(s));
            let a = m.enabled(s)[r.gen_range(0..m.enabled(s).len())];
            let row = m.successors(s, a).unwrap();
            let t = row[r.gen_range(0..row.len())].0;
            let q2 = d.step(q, letter(t));
            let v = p.index_of(ProductState { s: t, q: q2 }).expect("successor is materialized");
            prop_assert_eq!(p.prob(u, a, v), m.prob(s, a, t));
            // no other copy of t is hit
            for other in 0..d.num_nodes() {
                if other != q2 {
                    if let Some(w) = p.index_of(ProductState { s: t, q: other }) {
                        prop_assert_eq!(p.prob(u, a, w), 0.0);
                    }
                }
            }
            s = t;
            q = q2;
        }
    }

    #[test]
    fn product_is_bounded_and_reachable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let m = random_lmdp(&mut r, n, 3);
        let nodes = r.gen_range(1..=5);
        let p = ProductLmdp::new(Arc::new(m), Arc::new(random_dra(&mut r, nodes, &["a", "b"])));
        prop_assert!(p.num_states() <= n * nodes);
        let mut seen = vec![false; p.num_states()];
        let mut stack = vec![p.initial()];
        seen[p.initial()] = true;
        while let Some(u) = stack.pop() {
            for &a in p.enabled(u) {
                for &(v, _) in p.successors(u, a).unwrap() {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        prop_assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn mecs_match_subset_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=4);
        let m = random_lmdp(&mut r, n, 2);
        let nodes = r.gen_range(1..=3);
        let p = ProductLmdp::new(Arc::new(m), Arc::new(random_dra(&mut r, nodes, &["a", "b"])));
        prop_assume!(p.num_states() <= 12);
        let mut got: Vec<Component> = mec_decomposition(&p)
            .into_iter()
            .map(|mec| {
                prop_assert!(is_end_component(&p, &mec.states, &mec.actions));
                let mut s = mec.states;
                s.sort_unstable();
                Ok((s, mec.actions))
            })
            .collect::<Result<_, TestCaseError>>()?;
        got.sort();
        let mut want = brute_mecs(&p);
        want.sort();
        prop_assert_eq!(&got, &want);

        // accepting ones: some pair avoids Fin and meets Inf
        let dra = p.dra();
        let accepted: Vec<Vec<usize>> = want
            .iter()
            .filter(|(states, _)| {
                let nodes: BTreeSet<usize> = states.iter().map(|&u| p.state(u).q).collect();
                dra.pairs().iter().any(|pr| pr.fin.is_disjoint(&nodes) && !pr.inf.is_disjoint(&nodes))
            })
            .map(|(s, _)| s.clone())
            .collect();
        let mut amecs: Vec<Vec<usize>> = accepting_mecs(&mec_decomposition(&p), &p)
            .amecs
            .into_iter()
            .map(|a| {
                let mut s = a.mec.states;
                s.sort_unstable();
                s
            })
            .collect();
        amecs.sort();
        prop_assert_eq!(amecs, accepted);
    }

    #[test]
    fn labeled_subsets_follow_set_algebra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let m = random_lmdp(&mut r, n, 1);
        let f = random_formula(&mut r, 3);
        let g = random_formula(&mut r, 3);
        let all: BTreeSet<usize> = (0..n).collect();
        let sat = |x: &LabelFormula| m.labeled_subset(x).unwrap();
        let (sf, sg) = (sat(&f), sat(&g));
        prop_assert_eq!(sat(&LabelFormula::True), all.clone());
        prop_assert_eq!(sat(&f.clone().negate()), &all - &sf);
        prop_assert_eq!(sat(&f.clone().and(g.clone())), &sf & &sg);
        prop_assert_eq!(sat(&f.clone().or(g.clone())), &sf | &sg);
        for s in 0..n {
            prop_assert_eq!(sat(&LabelFormula::prop("a")).contains(&s), m.has_label(s, "a"));
        }
    }

    #[test]
    fn walks_never_leave_a_bottom_component(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8);
        let m = random_lmdp(&mut r, n, 3);
        let nodes = r.gen_range(1..=4);
        let p = ProductLmdp::new(Arc::new(m), Arc::new(random_dra(&mut r, nodes, &["a", "b"])));
        let choice: Vec<usize> = (0..p.num_states()).map(|u| p.enabled(u)[r.gen_range(0..p.enabled(u).len())]).collect();
        let c = induce_chain(&p, &Policy::from_indexed(&p, &choice)).unwrap();
        let d = bsccs(&c.chain, c.initial);
        let member = d.membership(c.chain.len());
        // every transient state can reach some bottom component
        let adj = c.chain.adjacency();
        for &t in &d.transient {
            let mut seen = BTreeSet::from([t]);
            let mut stack = vec![t];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            prop_assert!(seen.iter().any(|&x| member[x].is_some()));
        }
        let mut u = c.initial;
        let mut entered: Option<usize> = None;
        for _ in 0..500 {
            if let Some(k) = entered {
                prop_assert_eq!(member[u], Some(k));
            } else {
                entered = member[u];
            }
            let row = c.chain.row(u);
            let mut x: f64 = r.gen();
            u = row.last().unwrap().0;
            for &(v, pr) in row {
                if x < pr {
                    u = v;
                    break;
                }
                x -= pr;
            }
        }
    }
}

#[test]
fn fixture_automata_round_trip() {
    for name in ["theta1", "theta2", "theta3", "theta4", "theta5", "theta6", "theta7", "theta8", "gf_abcc"] {
        let d = fixture_dra(&format!("automata/{name}.hoa"));
        assert_eq!(parse_hoa(&d.to_hoa()).unwrap(), d, "{name}");
    }
    let d = fixture_dra("two_bscc/automaton.hoa");
    assert_eq!(parse_hoa(&d.to_hoa()).unwrap(), d);
}
