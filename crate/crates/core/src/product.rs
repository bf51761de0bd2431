//! Product of an LMDP with a DRA, chains induced by product policies, and
//! aggregation of product chains back onto original states.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::chain::{Chain, Partition, Row};
use crate::hoa::Dra;
use crate::model::{Lmc, Lmdp};

/// Tolerance for representative-independence in [`aggregate`].
pub const LUMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("policy has no action for product state ({s}, {q})")]
    MissingAction { s: String, q: String },
    #[error("policy picks action `{action}` not enabled in ({s}, {q})")]
    DisabledAction { s: String, q: String, action: String },
    #[error("policy mentions ({s}, {q}), which is not a product state")]
    UnknownState { s: String, q: String },
    #[error("state `{s}`: representatives disagree by {residual:e}; partition is not lumpable")]
    NotLumpable { s: String, residual: f64 },
}

/// A product state (s, q), ordered by s then q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductState {
    pub s: usize,
    pub q: usize,
}

/// The reachable fragment of M × A.
///
/// Product states are indexed in (s, q) order. Rows are stored per enabled
/// action of the underlying model state, in the same order as
/// [`Lmdp::enabled`].
#[derive(Debug, Clone)]
pub struct ProductLmdp {
    model: Arc<Lmdp>,
    dra: Arc<Dra>,
    states: Vec<ProductState>,
    index: BTreeMap<ProductState, usize>,
    rows: Vec<Vec<Row>>,
    edges: Vec<(usize, usize)>,
    initial: usize,
}

/// The letter read on entering each model state.
fn letters(m: &Lmdp, d: &Dra) -> Vec<u32> {
    (0..m.num_states()).map(|s| d.letter_of(m.labels(s).iter().map(|&p| m.ap()[p].as_str()))).collect()
}

impl ProductLmdp {
    pub fn new(model: Arc<Lmdp>, dra: Arc<Dra>) -> Self {
        let m = &*model;
        let d = &*dra;
        let letter = letters(m, d);
        let next = |ps: ProductState, t: usize| ProductState { s: t, q: d.step(ps.q, letter[t]) };

        let s0 = m.initial();
        let init = ProductState { s: s0, q: d.step(d.initial(), letter[s0]) };
        let mut seen = BTreeSet::from([init]);
        let mut todo = VecDeque::from([init]);
        while let Some(ps) = todo.pop_front() {
            for &a in m.enabled(ps.s) {
                for &(t, _) in m.successors(ps.s, a).unwrap() {
                    let nx = next(ps, t);
                    if seen.insert(nx) {
                        todo.push_back(nx);
                    }
                }
            }
        }
        let states: Vec<ProductState> = seen.into_iter().collect();
        let index: BTreeMap<ProductState, usize> = states.iter().enumerate().map(|(i, &ps)| (ps, i)).collect();

        let mut edges = Vec::new();
        let rows: Vec<Vec<Row>> = states
            .iter()
            .enumerate()
            .map(|(u, &ps)| {
                m.enabled(ps.s)
                    .iter()
                    .map(|&a| {
                        let mut row: Row = m
                            .successors(ps.s, a)
                            .unwrap()
                            .iter()
                            .filter(|&&(_, p)| p > 0.0)
                            .map(|&(t, p)| (index[&next(ps, t)], p))
                            .collect();
                        row.sort_by_key(|&(v, _)| v);
                        edges.extend(row.iter().map(|&(v, _)| (u, v)));
                        row
                    })
                    .collect()
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let initial = index[&init];
        ProductLmdp { model, dra, states, index, rows, edges, initial }
    }

    pub fn model(&self) -> &Lmdp {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<Lmdp> {
        &self.model
    }

    pub fn dra(&self) -> &Dra {
        &self.dra
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn state(&self, u: usize) -> ProductState {
        self.states[u]
    }

    pub fn index_of(&self, ps: ProductState) -> Option<usize> {
        self.index.get(&ps).copied()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// A(s) for the model state of `u`.
    pub fn enabled(&self, u: usize) -> &[usize] {
        self.model.enabled(self.states[u].s)
    }

    pub fn successors(&self, u: usize, action: usize) -> Option<&Row> {
        let k = self.enabled(u).binary_search(&action).ok()?;
        Some(&self.rows[u][k])
    }

    /// T^×(u, a)(v).
    pub fn prob(&self, u: usize, action: usize, v: usize) -> f64 {
        self.successors(u, action)
            .and_then(|row| row.iter().find(|&&(t, _)| t == v))
            .map_or(0.0, |&(_, p)| p)
    }

    /// T^G: pairs (u, v) with positive probability under some action,
    /// sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Human-readable `(s, q)`.
    pub fn state_name(&self, u: usize) -> (String, String) {
        let ps = self.states[u];
        (self.model.state_names()[ps.s].clone(), self.dra.node_names()[ps.q].clone())
    }
}

/// Build the reachable product of `m` and `d`.
pub fn build_product(m: &Lmdp, d: &Dra) -> ProductLmdp {
    ProductLmdp::new(Arc::new(m.clone()), Arc::new(d.clone()))
}

/// A deterministic policy over product states.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Policy {
    choice: BTreeMap<ProductState, usize>,
}

impl Policy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ps: ProductState, action: usize) {
        self.choice.insert(ps, action);
    }

    pub fn get(&self, ps: ProductState) -> Option<usize> {
        self.choice.get(&ps).copied()
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProductState, usize)> + '_ {
        self.choice.iter().map(|(&ps, &a)| (ps, a))
    }

    /// One action per product state, indexed like `p.states()`.
    pub fn from_indexed(p: &ProductLmdp, actions: &[usize]) -> Self {
        Policy { choice: p.states().iter().copied().zip(actions.iter().copied()).collect() }
    }

    /// Lift a memoryless policy over model states.
    pub fn memoryless(p: &ProductLmdp, per_state: &[usize]) -> Self {
        Policy { choice: p.states().iter().map(|&ps| (ps, per_state[ps.s])).collect() }
    }
}

impl FromIterator<(ProductState, usize)> for Policy {
    fn from_iter<I: IntoIterator<Item = (ProductState, usize)>>(iter: I) -> Self {
        Policy { choice: iter.into_iter().collect() }
    }
}

/// The product chain induced by a policy, restricted to states reachable from
/// the product initial state.
#[derive(Debug, Clone)]
pub struct ProductLmc {
    pub states: Vec<ProductState>,
    pub chain: Chain,
    pub initial: usize,
    pub model: Arc<Lmdp>,
}

impl ProductLmc {
    /// The partition into classes [s], ordered by s.
    pub fn partition(&self) -> Partition {
        let keys: Vec<usize> = self.states.iter().map(|ps| ps.s).collect();
        Partition::by_key(&keys)
    }

    /// Model state of each class of [`ProductLmc::partition`].
    pub fn class_states(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.states.iter().map(|ps| ps.s).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Row u of the induced chain is T^×(u, π(u)).
pub fn induce_chain(p: &ProductLmdp, pi: &Policy) -> Result<ProductLmc, ProductError> {
    let pick = |u: usize| -> Result<&Row, ProductError> {
        let ps = p.state(u);
        let (s, q) = p.state_name(u);
        let a = pi.get(ps).ok_or_else(|| ProductError::MissingAction { s: s.clone(), q: q.clone() })?;
        p.successors(u, a).ok_or_else(|| ProductError::DisabledAction {
            s,
            q,
            action: p.model().action_names().get(a).cloned().unwrap_or_else(|| alloc::format!("#{a}")),
        })
    };
    let n = p.num_states();
    let mut reach = vec![false; n];
    reach[p.initial()] = true;
    let mut todo = vec![p.initial()];
    while let Some(u) = todo.pop() {
        for &(v, _) in pick(u)? {
            if !reach[v] {
                reach[v] = true;
                todo.push(v);
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&u| reach[u]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &u) in kept.iter().enumerate() {
        local[u] = i;
    }
    let mut rows = Vec::with_capacity(kept.len());
    for &u in &kept {
        rows.push(pick(u)?.iter().map(|&(v, pr)| (local[v], pr)).collect());
    }
    Ok(ProductLmc {
        states: kept.iter().map(|&u| p.state(u)).collect(),
        chain: Chain::from_rows_unchecked(rows),
        initial: local[p.initial()],
        model: p.model_arc().clone(),
    })
}

/// Collapse each class [s] to s, taking the first representative's lumped
/// row and checking that every other representative agrees.
pub fn aggregate(c: &ProductLmc) -> Result<Lmc, ProductError> {
    let part = c.partition();
    let cls = c.class_states();
    let k = part.classes().len();
    let lumped = |u: usize| {
        let mut v = vec![0.0; k];
        for &(t, p) in c.chain.row(u) {
            v[part.class_of(t)] += p;
        }
        v
    };
    let m = &*c.model;
    let mut rows = Vec::with_capacity(k);
    for (ci, members) in part.classes().iter().enumerate() {
        let rep = lumped(members[0]);
        for &other in &members[1..] {
            let row = lumped(other);
            let residual = rep.iter().zip(&row).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if residual > LUMP_TOL {
                return Err(ProductError::NotLumpable { s: m.state_names()[cls[ci]].clone(), residual });
            }
        }
        rows.push(rep.into_iter().enumerate().filter(|&(_, p)| p > 0.0).collect::<Row>());
    }
    Ok(Lmc {
        states: cls.iter().map(|&s| m.state_names()[s].clone()).collect(),
        chain: Chain::from_rows_unchecked(rows),
        initial: part.class_of(c.initial),
        ap: m.ap().to_vec(),
        labels: cls.iter().map(|&s| m.labels(s).to_vec()).collect(),
    })
}
