//! Labeled Markov decision processes and labeled Markov chains.

mod formula;
pub mod grid;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub use formula::{FormulaError, LabelFormula};
pub use grid::{generate_grid, Dynamics, GridSpec, LabelMode, RewardMode};

use crate::chain::{Chain, Row};
use crate::PROB_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("duplicate action id `{0}`")]
    DuplicateAction(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("state `{state}` uses proposition `{prop}` that is not declared in ap")]
    UnknownProposition { state: String, prop: String },
    #[error("probability {p} of ({from}, {action}, {to}) is outside [0, 1]")]
    BadProbability { from: String, action: String, to: String, p: f64 },
    #[error("duplicate transition ({from}, {action}, {to})")]
    DuplicateTransition { from: String, action: String, to: String },
    #[error("row ({state}, {action}) sums to {sum}, expected 1")]
    RowSum { state: String, action: String, sum: f64 },
    #[error("state `{0}` has no enabled actions")]
    NoActions(String),
    #[error("reward on ({from}, {action}, {to}) refers to an action not enabled in `{from}`")]
    RewardOnDisabled { from: String, action: String, to: String },
    #[error("reward on ({from}, {action}, {to}) is not finite")]
    BadReward { from: String, action: String, to: String },
    #[error("model has no states")]
    Empty,
}

/// A state declaration: identifier plus the propositions holding in it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDecl {
    pub id: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDecl {
    pub from: String,
    pub action: String,
    pub to: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardDecl {
    pub from: String,
    pub action: String,
    pub to: String,
    pub r: f64,
}

/// Name-based description of an LMDP, validated by [`Lmdp::from_parts`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LmdpParts {
    pub states: Vec<StateDecl>,
    pub actions: Vec<String>,
    /// Declared propositions. When `None`, the sorted set of used labels.
    pub ap: Option<Vec<String>>,
    pub initial: String,
    pub transitions: Vec<TransitionDecl>,
    pub rewards: Vec<RewardDecl>,
}

/// A labeled MDP with a single initial state.
///
/// States, actions and propositions are addressed by their index in the
/// declared order. `enabled(s)` is the sorted list of actions with at least one
/// transition out of `s`; `row(s, k)` is the successor distribution of the
/// `k`-th enabled action.
#[derive(Debug, Clone, PartialEq)]
pub struct Lmdp {
    states: Vec<String>,
    actions: Vec<String>,
    ap: Vec<String>,
    labels: Vec<Vec<usize>>,
    enabled: Vec<Vec<usize>>,
    rows: Vec<Vec<Row>>,
    rewards: BTreeMap<(usize, usize, usize), f64>,
    initial: usize,
}

fn index_of(names: &[String]) -> BTreeMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

impl Lmdp {
    pub fn from_parts(parts: LmdpParts) -> Result<Self, ModelError> {
        if parts.states.is_empty() {
            return Err(ModelError::Empty);
        }
        let states: Vec<String> = parts.states.iter().map(|s| s.id.clone()).collect();
        let state_ix = index_of(&states);
        if state_ix.len() != states.len() {
            let mut seen = BTreeSet::new();
            let dup = states.iter().find(|s| !seen.insert(s.as_str())).unwrap();
            return Err(ModelError::DuplicateState(dup.clone()));
        }
        let action_ix = index_of(&parts.actions);
        if action_ix.len() != parts.actions.len() {
            let mut seen = BTreeSet::new();
            let dup = parts.actions.iter().find(|a| !seen.insert(a.as_str())).unwrap();
            return Err(ModelError::DuplicateAction(dup.clone()));
        }

        let ap: Vec<String> = match parts.ap {
            Some(ap) => ap,
            None => {
                let used: BTreeSet<&String> = parts.states.iter().flat_map(|s| &s.labels).collect();
                used.into_iter().cloned().collect()
            }
        };
        let ap_ix = index_of(&ap);
        let mut labels = Vec::with_capacity(states.len());
        for decl in &parts.states {
            let mut set = BTreeSet::new();
            for prop in &decl.labels {
                let i = *ap_ix.get(prop.as_str()).ok_or_else(|| ModelError::UnknownProposition {
                    state: decl.id.clone(),
                    prop: prop.clone(),
                })?;
                set.insert(i);
            }
            labels.push(set.into_iter().collect());
        }

        let initial = *state_ix
            .get(parts.initial.as_str())
            .ok_or_else(|| ModelError::UnknownState(parts.initial.clone()))?;

        let mut kernel: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
        for t in &parts.transitions {
            let s = *state_ix.get(t.from.as_str()).ok_or_else(|| ModelError::UnknownState(t.from.clone()))?;
            let a = *action_ix
                .get(t.action.as_str())
                .ok_or_else(|| ModelError::UnknownAction(t.action.clone()))?;
            let s2 = *state_ix.get(t.to.as_str()).ok_or_else(|| ModelError::UnknownState(t.to.clone()))?;
            if !(0.0..=1.0).contains(&t.p) {
                return Err(ModelError::BadProbability {
                    from: t.from.clone(),
                    action: t.action.clone(),
                    to: t.to.clone(),
                    p: t.p,
                });
            }
            if kernel.entry((s, a)).or_default().insert(s2, t.p).is_some() {
                return Err(ModelError::DuplicateTransition {
                    from: t.from.clone(),
                    action: t.action.clone(),
                    to: t.to.clone(),
                });
            }
        }

        let mut enabled = alloc::vec![Vec::new(); states.len()];
        let mut rows = alloc::vec![Vec::new(); states.len()];
        for ((s, a), succ) in kernel {
            let sum: f64 = succ.values().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(ModelError::RowSum {
                    state: states[s].clone(),
                    action: parts.actions[a].clone(),
                    sum,
                });
            }
            enabled[s].push(a);
            rows[s].push(succ.into_iter().filter(|&(_, p)| p > 0.0).collect::<Row>());
        }
        if let Some(s) = enabled.iter().position(|e| e.is_empty()) {
            return Err(ModelError::NoActions(states[s].clone()));
        }

        let mut rewards = BTreeMap::new();
        for r in &parts.rewards {
            let s = *state_ix.get(r.from.as_str()).ok_or_else(|| ModelError::UnknownState(r.from.clone()))?;
            let a = *action_ix
                .get(r.action.as_str())
                .ok_or_else(|| ModelError::UnknownAction(r.action.clone()))?;
            let s2 = *state_ix.get(r.to.as_str()).ok_or_else(|| ModelError::UnknownState(r.to.clone()))?;
            if !enabled[s].contains(&a) {
                return Err(ModelError::RewardOnDisabled {
                    from: r.from.clone(),
                    action: r.action.clone(),
                    to: r.to.clone(),
                });
            }
            if !r.r.is_finite() {
                return Err(ModelError::BadReward {
                    from: r.from.clone(),
                    action: r.action.clone(),
                    to: r.to.clone(),
                });
            }
            if r.r != 0.0 {
                rewards.insert((s, a, s2), r.r);
            }
        }

        Ok(Lmdp { states, actions: parts.actions, ap, labels, enabled, rows, rewards, initial })
    }

    /// Inverse of [`Lmdp::from_parts`]; transitions are listed in
    /// (state, action, target) index order.
    pub fn to_parts(&self) -> LmdpParts {
        let states = self
            .states
            .iter()
            .zip(&self.labels)
            .map(|(id, l)| StateDecl { id: id.clone(), labels: l.iter().map(|&p| self.ap[p].clone()).collect() })
            .collect();
        let mut transitions = Vec::new();
        for s in 0..self.states.len() {
            for (k, &a) in self.enabled[s].iter().enumerate() {
                for &(t, p) in &self.rows[s][k] {
                    transitions.push(TransitionDecl {
                        from: self.states[s].clone(),
                        action: self.actions[a].clone(),
                        to: self.states[t].clone(),
                        p,
                    });
                }
            }
        }
        let rewards = self
            .rewards
            .iter()
            .map(|(&(s, a, t), &r)| RewardDecl {
                from: self.states[s].clone(),
                action: self.actions[a].clone(),
                to: self.states[t].clone(),
                r,
            })
            .collect();
        LmdpParts {
            states,
            actions: self.actions.clone(),
            ap: Some(self.ap.clone()),
            initial: self.states[self.initial].clone(),
            transitions,
            rewards,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s == id)
    }

    pub fn action_index(&self, id: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == id)
    }

    /// Proposition indices holding in `s`, sorted.
    pub fn labels(&self, s: usize) -> &[usize] {
        &self.labels[s]
    }

    pub fn has_label(&self, s: usize, prop: &str) -> bool {
        self.labels[s].iter().any(|&p| self.ap[p] == prop)
    }

    /// Enabled actions A(s), sorted by action index.
    pub fn enabled(&self, s: usize) -> &[usize] {
        &self.enabled[s]
    }

    /// Successor distribution of `action` in `s`, or `None` if not enabled.
    pub fn successors(&self, s: usize, action: usize) -> Option<&Row> {
        let k = self.enabled[s].binary_search(&action).ok()?;
        Some(&self.rows[s][k])
    }

    pub fn prob(&self, s: usize, action: usize, target: usize) -> f64 {
        self.successors(s, action)
            .and_then(|row| row.iter().find(|&&(t, _)| t == target))
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn reward(&self, s: usize, action: usize, target: usize) -> f64 {
        self.rewards.get(&(s, action, target)).copied().unwrap_or(0.0)
    }

    /// Σ_{s'} T(s,a)(s')·R(s,a,s').
    pub fn expected_reward(&self, s: usize, action: usize) -> f64 {
        self.successors(s, action)
            .map(|row| row.iter().map(|&(t, p)| p * self.reward(s, action, t)).sum())
            .unwrap_or(0.0)
    }

    /// States satisfying `psi` under the labeling.
    pub fn labeled_subset(&self, psi: &LabelFormula) -> Result<BTreeSet<usize>, FormulaError> {
        let compiled = psi.resolve(&self.ap)?;
        Ok((0..self.states.len()).filter(|&s| compiled.eval(&self.labels[s])).collect())
    }

    /// The chain T_π induced by a memoryless policy over original states.
    pub fn induced_chain(&self, choice: &[usize]) -> Option<Lmc> {
        let rows = (0..self.states.len())
            .map(|s| self.successors(s, *choice.get(s)?).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(Lmc {
            states: self.states.clone(),
            chain: Chain::from_rows_unchecked(rows),
            initial: self.initial,
            ap: self.ap.clone(),
            labels: self.labels.clone(),
        })
    }
}

/// A labeled Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Lmc {
    pub states: Vec<String>,
    pub chain: Chain,
    pub initial: usize,
    pub ap: Vec<String>,
    pub labels: Vec<Vec<usize>>,
}

impl Lmc {
    /// View the chain as an LMDP with the single action `go`.
    pub fn to_lmdp(&self) -> Lmdp {
        let n = self.states.len();
        Lmdp {
            states: self.states.clone(),
            actions: alloc::vec![String::from("go")],
            ap: self.ap.clone(),
            labels: self.labels.clone(),
            enabled: alloc::vec![alloc::vec![0]; n],
            rows: (0..n).map(|s| alloc::vec![self.chain.row(s).clone()]).collect(),
            rewards: BTreeMap::new(),
            initial: self.initial,
        }
    }
}

/// One steady-state interval constraint `SS_[lower, upper] formula`.
#[derive(Debug, Clone, PartialEq)]
pub struct SsInterval {
    pub formula: LabelFormula,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("interval {index}: lower bound {lower} exceeds upper bound {upper}")]
    EmptyInterval { index: usize, lower: f64, upper: f64 },
    #[error("interval {index}: bounds must lie in [0, 1]")]
    OutOfRange { index: usize },
    #[error("interval {index}: {source}")]
    Formula { index: usize, source: FormulaError },
}

/// An LTL objective (given as a Rabin automaton source) plus steady-state
/// interval constraints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SsLtlSpec {
    /// Where the automaton comes from, typically a path to an HOA file.
    pub dra_source: String,
    pub ss: Vec<SsInterval>,
}

impl SsLtlSpec {
    pub fn new(dra_source: impl Into<String>, ss: Vec<SsInterval>) -> Result<Self, SpecError> {
        for (index, iv) in ss.iter().enumerate() {
            if !(0.0..=1.0).contains(&iv.lower) || !(0.0..=1.0).contains(&iv.upper) {
                return Err(SpecError::OutOfRange { index });
            }
            if iv.lower > iv.upper {
                return Err(SpecError::EmptyInterval { index, lower: iv.lower, upper: iv.upper });
            }
        }
        Ok(SsLtlSpec { dra_source: dra_source.into(), ss })
    }

    /// Check every interval formula against a model's propositions.
    pub fn check_against(&self, ap: &[String]) -> Result<(), SpecError> {
        for (index, iv) in self.ss.iter().enumerate() {
            iv.formula.resolve(ap).map_err(|source| SpecError::Formula { index, source })?;
        }
        Ok(())
    }
}
