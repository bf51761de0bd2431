//! The mixed-integer program over a product LMDP: variables, constraints
//! (i) to (xvi), LP-file export, solution parsing and policy extraction.

mod lp;
mod policy;
mod solution;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::AmecList;
use crate::model::SpecError;
use crate::product::{Policy, ProductLmdp};
use crate::SsLtlSpec;

pub use lp::export_lp;
pub use policy::{extract_policy, occupation_residual, ExtractError, Extracted};
pub use solution::{parse_solution, SolveStatus, Solution, SolutionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlpError {
    #[error("the product has no accepting end component; the instance is infeasible")]
    NoAcceptingMec,
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximize Σ x_{sqa} Σ_{s'} T(s,a)(s') R(s,a,s').
    ExpectedReward,
    /// Zero objective.
    Feasibility,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlpConfig {
    /// ε of constraint (vi); `None` picks min(1e-4, 1/(4|S×|)).
    pub epsilon: Option<f64>,
    /// Lower bound replacing the strict `> 0` of constraint (xi).
    pub acc_eps: f64,
    /// Denominator of constraint (viii).
    pub flow_ratio: f64,
    pub objective: Objective,
}

impl Default for IlpConfig {
    fn default() -> Self {
        IlpConfig { epsilon: None, acc_eps: 1e-4, flow_ratio: 2.0, objective: Objective::ExpectedReward }
    }
}

impl IlpConfig {
    pub fn epsilon_for(&self, product_states: usize) -> f64 {
        self.epsilon.unwrap_or_else(|| f64::min(1e-4, 1.0 / (4.0 * product_states.max(1) as f64)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient), sorted by variable, no duplicates.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Where each family of variables lives in [`IlpModel::vars`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IlpIndex {
    /// (product state, action) → x
    pub x: BTreeMap<(usize, usize), usize>,
    /// T^G edge (u, v) → f
    pub f: BTreeMap<(usize, usize), usize>,
    /// (product state, action) → π
    pub pi: BTreeMap<(usize, usize), usize>,
    /// product state → I_sq
    pub isq: Vec<usize>,
    /// model state → I_s
    pub is: Vec<usize>,
    /// AMEC k → I^k
    pub ik: Vec<usize>,
    /// AMEC k, model state → I^k_s
    pub iks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub vars: Vec<Var>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    pub index: IlpIndex,
    pub epsilon: f64,
}

impl IlpModel {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of constraints whose name starts with `c_<family>_`.
    pub fn count_family(&self, family: &str) -> usize {
        let prefix = format!("c_{family}_");
        self.constraints.iter().filter(|c| c.name.starts_with(&prefix)).count()
    }

    /// Fix every π binary to the given policy (1 on the chosen action, 0
    /// elsewhere). States the policy does not mention are left free.
    pub fn fix_policy(&mut self, p: &ProductLmdp, pi: &Policy) {
        for (&(u, a), &var) in &self.index.pi {
            if let Some(chosen) = pi.get(p.state(u)) {
                let v = if chosen == a { 1.0 } else { 0.0 };
                self.vars[var].lower = v;
                self.vars[var].upper = v;
            }
        }
    }

    /// Largest violation of bounds, integrality and rows under `values`
    /// (indexed like `vars`).
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
            if v.kind == VarKind::Binary {
                worst = worst.max(x.min(1.0 - x).max(0.0));
            }
        }
        for c in &self.constraints {
            worst = worst.max(row_violation(c, values));
        }
        worst
    }

    /// Names of rows violated by more than `tol`.
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<&str> {
        self.constraints.iter().filter(|c| row_violation(c, values) > tol).map(|c| c.name.as_str()).collect()
    }

    /// Values of all variables in declaration order; missing names are an
    /// error.
    pub fn values_from(&self, sol: &Solution) -> Result<Vec<f64>, SolutionError> {
        self.vars
            .iter()
            .map(|v| sol.value(&v.name).ok_or_else(|| SolutionError::MissingValue(v.name.clone())))
            .collect()
    }
}

fn row_violation(c: &Constraint, values: &[f64]) -> f64 {
    let lhs: f64 = c.terms.iter().map(|&(i, a)| a * values[i]).sum();
    match c.sense {
        Sense::Le => lhs - c.rhs,
        Sense::Ge => c.rhs - lhs,
        Sense::Eq => (lhs - c.rhs).abs(),
    }
    .max(0.0)
}

struct Builder {
    vars: Vec<Var>,
    constraints: Vec<Constraint>,
    counters: BTreeMap<&'static str, usize>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind) -> usize {
        self.vars.push(Var { name, kind, lower: 0.0, upper: 1.0 });
        self.vars.len() - 1
    }

    fn row(&mut self, family: &'static str, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, a) in terms {
            *merged.entry(i).or_insert(0.0) += a;
        }
        let terms = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
        let k = self.counters.entry(family).or_insert(0);
        let name = format!("c_{family}_{k}");
        *k += 1;
        self.constraints.push(Constraint { name, terms, sense, rhs });
    }
}

/// Assemble the program for `p` with the accepting MECs `amecs`.
pub fn build_program(
    p: &ProductLmdp,
    amecs: &AmecList,
    spec: &SsLtlSpec,
    cfg: &IlpConfig,
) -> Result<IlpModel, IlpError> {
    if !(cfg.acc_eps > 0.0) {
        return Err(IlpError::Config("acc_eps must be positive"));
    }
    if !(cfg.flow_ratio >= 1.0) {
        return Err(IlpError::Config("flow_ratio must be at least 1"));
    }
    if cfg.epsilon.is_some_and(|e| !(e > 0.0)) {
        return Err(IlpError::Config("epsilon must be positive"));
    }
    let m = p.model();
    spec.check_against(m.ap())?;
    if amecs.is_empty() {
        return Err(IlpError::NoAcceptingMec);
    }
    let n = p.num_states();
    let ns = m.num_states();
    let nk = amecs.len();
    let eps = cfg.epsilon_for(n);
    let tag = |u: usize| {
        let ps = p.state(u);
        format!("{}_{}", ps.s, ps.q)
    };

    let mut b = Builder { vars: Vec::new(), constraints: Vec::new(), counters: BTreeMap::new() };
    let mut idx = IlpIndex::default();
    for u in 0..n {
        for &a in p.enabled(u) {
            idx.x.insert((u, a), b.var(format!("x_{}_{a}", tag(u)), VarKind::Continuous));
        }
    }
    for &(u, v) in p.edges() {
        idx.f.insert((u, v), b.var(format!("f_{}_{}", tag(u), tag(v)), VarKind::Continuous));
    }
    for u in 0..n {
        for &a in p.enabled(u) {
            idx.pi.insert((u, a), b.var(format!("pi_{}_{a}", tag(u)), VarKind::Binary));
        }
    }
    idx.isq = (0..n).map(|u| b.var(format!("isq_{}", tag(u)), VarKind::Binary)).collect();
    idx.is = (0..ns).map(|s| b.var(format!("is_{s}"), VarKind::Binary)).collect();
    idx.ik = (0..nk).map(|k| b.var(format!("ik_{k}"), VarKind::Binary)).collect();
    idx.iks = (0..nk).map(|k| (0..ns).map(|s| b.var(format!("iks_{k}_{s}"), VarKind::Binary)).collect()).collect();

    let x_of = |u: usize| -> Vec<usize> { p.enabled(u).iter().map(|&a| idx.x[&(u, a)]).collect() };
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&(u, v), &var) in &idx.f {
        outgoing[u].push(var);
        incoming[v].push(var);
    }

    // (i) Σ_a x_{v,a} − Σ_{u,a} x_{u,a} T(u,a)(v) = 0
    let mut inflow: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for u in 0..n {
        for &a in p.enabled(u) {
            for &(v, pr) in p.successors(u, a).unwrap() {
                inflow[v].push((idx.x[&(u, a)], -pr));
            }
        }
    }
    for v in 0..n {
        let mut terms: Vec<(usize, f64)> = x_of(v).into_iter().map(|i| (i, 1.0)).collect();
        terms.extend(inflow[v].iter().copied());
        b.row("i", terms, Sense::Eq, 0.0);
    }
    // (ii)
    b.row("ii", idx.x.values().map(|&i| (i, 1.0)).collect(), Sense::Eq, 1.0);
    // (iii) x ≤ π
    for (&key, &xi) in &idx.x {
        b.row("iii", vec![(xi, 1.0), (idx.pi[&key], -1.0)], Sense::Le, 0.0);
    }
    // (iv) Σ_a π = 1
    for u in 0..n {
        let terms = p.enabled(u).iter().map(|&a| (idx.pi[&(u, a)], 1.0)).collect();
        b.row("iv", terms, Sense::Eq, 1.0);
    }
    // (v) f_{uv} ≤ Σ_a T(u,a)(v) π_{u,a}
    for (&(u, v), &fi) in &idx.f {
        let mut terms = vec![(fi, 1.0)];
        for &a in p.enabled(u) {
            let pr = p.prob(u, a, v);
            if pr > 0.0 {
                terms.push((idx.pi[&(u, a)], -pr));
            }
        }
        b.row("v", terms, Sense::Le, 0.0);
    }
    // (vi) in − out − ε I_sq ≥ 0, except at the initial state
    for u in 0..n {
        if u == p.initial() {
            continue;
        }
        let mut terms: Vec<(usize, f64)> = incoming[u].iter().map(|&i| (i, 1.0)).collect();
        terms.extend(outgoing[u].iter().map(|&i| (i, -1.0)));
        terms.push((idx.isq[u], -eps));
        b.row("vi", terms, Sense::Ge, 0.0);
    }
    // (vii) in − I_sq ≤ 0
    for u in 0..n {
        let mut terms: Vec<(usize, f64)> = incoming[u].iter().map(|&i| (i, 1.0)).collect();
        terms.push((idx.isq[u], -1.0));
        b.row("vii", terms, Sense::Le, 0.0);
    }
    // (viii) out − in / ratio ≥ 0
    for u in 0..n {
        let mut terms: Vec<(usize, f64)> = outgoing[u].iter().map(|&i| (i, 1.0)).collect();
        terms.extend(incoming[u].iter().map(|&i| (i, -1.0 / cfg.flow_ratio)));
        b.row("viii", terms, Sense::Ge, 0.0);
    }
    // (ix) Σ_a x − I_sq ≤ 0
    for u in 0..n {
        let mut terms: Vec<(usize, f64)> = x_of(u).into_iter().map(|i| (i, 1.0)).collect();
        terms.push((idx.isq[u], -1.0));
        b.row("ix", terms, Sense::Le, 0.0);
    }
    // (x) l ≤ mass(ψ) ≤ u
    for (index, iv) in spec.ss.iter().enumerate() {
        let sat = m.labeled_subset(&iv.formula).map_err(|source| SpecError::Formula { index, source })?;
        let terms: Vec<(usize, f64)> =
            (0..n).filter(|&u| sat.contains(&p.state(u).s)).flat_map(&x_of).map(|i| (i, 1.0)).collect();
        b.row("x", terms.clone(), Sense::Ge, iv.lower);
        b.row("x", terms, Sense::Le, iv.upper);
    }
    // (xi) mass on ⋃ Inf_i ≥ acc_eps
    let inf = p.dra().inf_union();
    let terms = (0..n).filter(|&u| inf.contains(&p.state(u).q)).flat_map(&x_of).map(|i| (i, 1.0)).collect();
    b.row("xi", terms, Sense::Ge, cfg.acc_eps);
    // (xii) mass(AMEC_k) − I^k ≤ 0
    for (k, amec) in amecs.amecs.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> =
            amec.mec.states.iter().flat_map(|&u| x_of(u)).map(|i| (i, 1.0)).collect();
        terms.push((idx.ik[k], -1.0));
        b.row("xii", terms, Sense::Le, 0.0);
    }
    let members: Vec<BTreeMap<usize, Vec<usize>>> = amecs
        .amecs
        .iter()
        .map(|amec| {
            let mut by_s: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &u in &amec.mec.states {
                by_s.entry(p.state(u).s).or_default().push(u);
            }
            by_s
        })
        .collect();
    // (xiii) I^k_s − Σ_{(s,q)∈AMEC_k} I_sq ≤ 0
    for k in 0..nk {
        for s in 0..ns {
            let mut terms = vec![(idx.iks[k][s], 1.0)];
            for &u in members[k].get(&s).map_or(&[][..], |v| v.as_slice()) {
                terms.push((idx.isq[u], -1.0));
            }
            b.row("xiii", terms, Sense::Le, 0.0);
        }
    }
    // (xiv) Σ_{(s,q)∈AMEC_k} I_sq / |Q| − I^k_s ≤ 0
    let q = p.dra().num_nodes() as f64;
    for k in 0..nk {
        for s in 0..ns {
            let mut terms: Vec<(usize, f64)> =
                members[k].get(&s).map_or(&[][..], |v| v.as_slice()).iter().map(|&u| (idx.isq[u], 1.0 / q)).collect();
            terms.push((idx.iks[k][s], -1.0));
            b.row("xiv", terms, Sense::Le, 0.0);
        }
    }
    // (xv) I_s − Σ_k (I^k_s − I^k)/|AMEC| ≤ 1
    let w = 1.0 / nk as f64;
    for s in 0..ns {
        let mut terms = vec![(idx.is[s], 1.0)];
        for k in 0..nk {
            terms.push((idx.iks[k][s], -w));
            terms.push((idx.ik[k], w));
        }
        b.row("xv", terms, Sense::Le, 1.0);
    }
    // (xvi) Σ_s I_s ≥ 1
    b.row("xvi", idx.is.iter().map(|&i| (i, 1.0)).collect(), Sense::Ge, 1.0);

    let objective = match cfg.objective {
        Objective::Feasibility => Vec::new(),
        Objective::ExpectedReward => idx
            .x
            .iter()
            .map(|(&(u, a), &i)| (i, m.expected_reward(p.state(u).s, a)))
            .filter(|&(_, r)| r != 0.0)
            .collect(),
    };
    Ok(IlpModel { vars: b.vars, constraints: b.constraints, objective, index: idx, epsilon: eps })
}
