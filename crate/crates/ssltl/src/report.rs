//! JSON views of verification reports and steady-state results.

use serde::Serialize;

use ssltl_core::verify::VerificationReport;
use ssltl_core::{ProductLmdp, ProductState, SsLtlSpec};

#[derive(Debug, Clone, Serialize)]
pub struct SsJson {
    pub formula: String,
    pub achieved: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductMass {
    pub s: String,
    pub q: String,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateMass {
    pub s: String,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub verdict: bool,
    pub deterministic: bool,
    pub unichain: bool,
    pub shared_state: Option<String>,
    pub bscc_sizes: Vec<usize>,
    pub rabin_ok: Vec<bool>,
    pub ss: Vec<SsJson>,
    pub transient_states: Vec<String>,
    pub product: Vec<ProductMass>,
    pub aggregate: Vec<StateMass>,
}

pub fn product_masses(p: &ProductLmdp, states: &[ProductState], dist: &[f64]) -> Vec<ProductMass> {
    let m = p.model();
    let d = p.dra();
    states
        .iter()
        .zip(dist)
        .map(|(ps, &mass)| ProductMass {
            s: m.state_names()[ps.s].clone(),
            q: d.node_names()[ps.q].clone(),
            p: mass,
        })
        .collect()
}

pub fn state_masses(p: &ProductLmdp, dist: &[f64]) -> Vec<StateMass> {
    p.model().state_names().iter().zip(dist).map(|(s, &mass)| StateMass { s: s.clone(), p: mass }).collect()
}

impl ReportJson {
    pub fn new(p: &ProductLmdp, r: &VerificationReport, spec: &SsLtlSpec) -> Self {
        let names = p.model().state_names();
        ReportJson {
            verdict: r.verdict,
            deterministic: r.deterministic,
            unichain: r.unichain,
            shared_state: r.shared_state.map(|s| names[s].clone()),
            bscc_sizes: r.bscc_sizes.clone(),
            rabin_ok: r.rabin_ok.clone(),
            ss: r
                .ss_results
                .iter()
                .zip(&spec.ss)
                .map(|(x, iv)| SsJson { formula: iv.formula.to_string(), achieved: x.achieved, lower: x.lower, upper: x.upper, ok: x.ok })
                .collect(),
            transient_states: r.transient_states.iter().map(|&s| names[s].clone()).collect(),
            product: product_masses(p, &r.product_states, &r.product_distribution),
            aggregate: state_masses(p, &r.aggregate_distribution),
        }
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
