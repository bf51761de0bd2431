//! JSON model, spec and policy files, plus HOA automaton loading.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ssltl_core::hoa::{parse_hoa, HoaError};
use ssltl_core::model::{LmdpParts, ModelError, RewardDecl, SpecError, StateDecl, TransitionDecl};
use ssltl_core::{Dra, LabelFormula, Lmdp, Policy, ProductLmdp, ProductState, SsInterval, SsLtlSpec};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: SpecError },
    #[error("{path}: interval {index}: {msg}")]
    Formula { path: PathBuf, index: usize, msg: String },
    #[error("{path}: {source}")]
    Hoa { path: PathBuf, source: HoaError },
    #[error("{path}: {msg}")]
    Policy { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub id: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: String,
    pub action: String,
    pub to: String,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardJson {
    pub from: String,
    pub action: String,
    pub to: String,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub states: Vec<StateJson>,
    pub actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap: Option<Vec<String>>,
    pub initial: String,
    pub transitions: Vec<TransitionJson>,
    #[serde(default)]
    pub rewards: Vec<RewardJson>,
}

impl From<LmdpParts> for ModelJson {
    fn from(p: LmdpParts) -> Self {
        ModelJson {
            states: p.states.into_iter().map(|s| StateJson { id: s.id, labels: s.labels }).collect(),
            actions: p.actions,
            ap: p.ap,
            initial: p.initial,
            transitions: p
                .transitions
                .into_iter()
                .map(|t| TransitionJson { from: t.from, action: t.action, to: t.to, p: t.p })
                .collect(),
            rewards: p.rewards.into_iter().map(|r| RewardJson { from: r.from, action: r.action, to: r.to, r: r.r }).collect(),
        }
    }
}

impl From<ModelJson> for LmdpParts {
    fn from(m: ModelJson) -> Self {
        LmdpParts {
            states: m.states.into_iter().map(|s| StateDecl { id: s.id, labels: s.labels }).collect(),
            actions: m.actions,
            ap: m.ap,
            initial: m.initial,
            transitions: m
                .transitions
                .into_iter()
                .map(|t| TransitionDecl { from: t.from, action: t.action, to: t.to, p: t.p })
                .collect(),
            rewards: m.rewards.into_iter().map(|r| RewardDecl { from: r.from, action: r.action, to: r.to, r: r.r }).collect(),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write { path: path.into(), source })
}

pub fn parse_model(text: &str, path: &Path) -> Result<Lmdp, IoError> {
    let json: ModelJson = serde_json::from_str(text).map_err(|source| IoError::Json { path: path.into(), source })?;
    Lmdp::from_parts(json.into()).map_err(|source| IoError::Model { path: path.into(), source })
}

pub fn load_model(path: &Path) -> Result<Lmdp, IoError> {
    parse_model(&read(path)?, path)
}

/// Pretty JSON with a trailing newline; equal models give equal text.
pub fn model_to_json(m: &Lmdp) -> String {
    let mut s = serde_json::to_string_pretty(&ModelJson::from(m.to_parts())).expect("model serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalJson {
    pub formula: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecJson {
    pub dra: String,
    #[serde(default)]
    pub ss: Vec<IntervalJson>,
}

/// Parse a spec; the automaton path is resolved against `base`.
pub fn parse_spec(text: &str, path: &Path, base: &Path) -> Result<SsLtlSpec, IoError> {
    let json: SpecJson = serde_json::from_str(text).map_err(|source| IoError::Json { path: path.into(), source })?;
    let ss = json
        .ss
        .iter()
        .enumerate()
        .map(|(index, iv)| {
            let formula = LabelFormula::parse(&iv.formula).map_err(|e| IoError::Formula {
                path: path.into(),
                index,
                msg: e.to_string(),
            })?;
            Ok(SsInterval { formula, lower: iv.lower, upper: iv.upper })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let dra = base.join(&json.dra);
    SsLtlSpec::new(dra.to_string_lossy().into_owned(), ss).map_err(|source| IoError::Spec { path: path.into(), source })
}

pub fn load_spec(path: &Path) -> Result<SsLtlSpec, IoError> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_spec(&read(path)?, path, base)
}

pub fn load_dra(path: &Path) -> Result<Dra, IoError> {
    parse_hoa(&read(path)?).map_err(|source| IoError::Hoa { path: path.into(), source })
}

/// Load a spec together with its automaton and check its formulas against
/// the model's propositions.
pub fn load_spec_for(path: &Path, m: &Lmdp) -> Result<(SsLtlSpec, Dra), IoError> {
    let spec = load_spec(path)?;
    spec.check_against(m.ap()).map_err(|source| IoError::Spec { path: path.into(), source })?;
    let dra = load_dra(Path::new(&spec.dra_source))?;
    Ok((spec, dra))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolicyEntry {
    pub s: String,
    pub q: String,
    pub action: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolicyJson {
    pub policy: Vec<PolicyEntry>,
}

pub fn policy_to_json(p: &ProductLmdp, pi: &Policy) -> String {
    let m = p.model();
    let d = p.dra();
    let policy = pi
        .iter()
        .map(|(ps, a)| PolicyEntry {
            s: m.state_names()[ps.s].clone(),
            q: d.node_names()[ps.q].clone(),
            action: m.action_names()[a].clone(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&PolicyJson { policy }).expect("policy serializes");
    s.push('\n');
    s
}

pub fn parse_policy(text: &str, path: &Path, p: &ProductLmdp) -> Result<Policy, IoError> {
    let json: PolicyJson = serde_json::from_str(text).map_err(|source| IoError::Json { path: path.into(), source })?;
    let m = p.model();
    let d = p.dra();
    let bad = |msg: String| IoError::Policy { path: path.into(), msg };
    let mut pi = Policy::new();
    for e in json.policy {
        let s = m.state_index(&e.s).ok_or_else(|| bad(format!("unknown state `{}`", e.s)))?;
        let q = d.node_index(&e.q).ok_or_else(|| bad(format!("unknown automaton node `{}`", e.q)))?;
        let a = m.action_index(&e.action).ok_or_else(|| bad(format!("unknown action `{}`", e.action)))?;
        pi.insert(ProductState { s, q }, a);
    }
    Ok(pi)
}

pub fn load_policy(path: &Path, p: &ProductLmdp) -> Result<Policy, IoError> {
    parse_policy(&read(path)?, path, p)
}
