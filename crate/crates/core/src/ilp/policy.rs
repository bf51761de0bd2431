//! Reading a deterministic policy off the π binaries.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::{IlpModel, Solution, SolutionError};
use crate::product::{Policy, ProductLmdp};

/// Integrality slack that triggers a warning.
pub const INTEGRALITY_WARN: f64 = 1e-6;
/// Tolerance on x_{sqa} = π(a|s,q)·Σ_a x_{sqa}.
pub const IDENTITY_TOL: f64 = 1e-6;
/// States with less occupation than this are not checked against the
/// identity.
pub const OCCUPIED: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("no action has π > 0.5 at ({s}, {q})")]
    NoAction { s: String, q: String },
    #[error("occupation identity violated at ({s}, {q}) by {residual:e}")]
    Identity { s: String, q: String, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub policy: Policy,
    /// Integrality warnings, one per offending π value.
    pub warnings: Vec<String>,
    /// max |x_{sqa} − π·Σ_a x_{sqa}| over states with Σ_a x ≥ 1e-8.
    pub identity_residual: f64,
}

fn value(sol: &Solution, ilp: &IlpModel, var: usize) -> Result<f64, SolutionError> {
    let name = &ilp.vars[var].name;
    sol.value(name).ok_or_else(|| SolutionError::MissingValue(name.clone()))
}

/// For each product state pick the action whose π exceeds 0.5 (the largest,
/// should several), then check the occupation identity where the state
/// carries mass.
pub fn extract_policy(sol: &Solution, p: &ProductLmdp, ilp: &IlpModel) -> Result<Extracted, ExtractError> {
    if !sol.status.has_solution() {
        return Err(SolutionError::NoSolution(sol.status.as_str()).into());
    }
    let mut policy = Policy::new();
    let mut warnings = Vec::new();
    for u in 0..p.num_states() {
        let mut best: Option<(usize, f64)> = None;
        for &a in p.enabled(u) {
            let v = value(sol, ilp, ilp.index.pi[&(u, a)])?;
            if v > INTEGRALITY_WARN && v < 1.0 - INTEGRALITY_WARN {
                warnings.push(alloc::format!("{} = {v} is not integral", ilp.vars[ilp.index.pi[&(u, a)]].name));
            }
            if v > 0.5 && best.is_none_or(|(_, b)| v > b) {
                best = Some((a, v));
            }
        }
        let Some((a, _)) = best else {
            let (s, q) = p.state_name(u);
            return Err(ExtractError::NoAction { s, q });
        };
        policy.insert(p.state(u), a);
    }
    let identity_residual = occupation_residual(sol, p, ilp, &policy, 0..p.num_states())?;
    if identity_residual > IDENTITY_TOL {
        // name the worst state
        for u in 0..p.num_states() {
            if occupation_residual(sol, p, ilp, &policy, u..u + 1)? > IDENTITY_TOL {
                let (s, q) = p.state_name(u);
                return Err(ExtractError::Identity { s, q, residual: identity_residual });
            }
        }
    }
    Ok(Extracted { policy, warnings, identity_residual })
}

/// max over the given product states with Σ_a x ≥ 1e-8 and their actions of
/// |x_{sqa} − [a = π(s,q)]·Σ_a x_{sqa}|.
pub fn occupation_residual(
    sol: &Solution,
    p: &ProductLmdp,
    ilp: &IlpModel,
    policy: &Policy,
    states: impl IntoIterator<Item = usize>,
) -> Result<f64, SolutionError> {
    let mut worst = 0.0f64;
    for u in states {
        let xs: Vec<(usize, f64)> = p
            .enabled(u)
            .iter()
            .map(|&a| Ok((a, value(sol, ilp, ilp.index.x[&(u, a)])?)))
            .collect::<Result<_, SolutionError>>()?;
        let total: f64 = xs.iter().map(|&(_, x)| x).sum();
        if total < OCCUPIED {
            continue;
        }
        let chosen = policy.get(p.state(u));
        for (a, x) in xs {
            let pi = if chosen == Some(a) { 1.0 } else { 0.0 };
            worst = worst.max((x - pi * total).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::graph::{accepting_mecs, mec_decomposition};
    use crate::hoa::parse_hoa;
    use crate::model::{Lmdp, LmdpParts, StateDecl, TransitionDecl};
    use crate::product::build_product;
    use crate::SsLtlSpec;
    use alloc::string::ToString;
    use alloc::vec;

    fn two_action_loop() -> Lmdp {
        Lmdp::from_parts(LmdpParts {
            states: vec![StateDecl { id: "s".into(), labels: vec![] }],
            actions: vec!["a1".into(), "a2".into()],
            ap: None,
            initial: "s".into(),
            transitions: vec![
                TransitionDecl { from: "s".into(), action: "a1".into(), to: "s".into(), p: 1.0 },
                TransitionDecl { from: "s".into(), action: "a2".into(), to: "s".into(), p: 1.0 },
            ],
            rewards: vec![],
        })
        .unwrap()
    }

    fn setup() -> (crate::ProductLmdp, IlpModel) {
        let m = two_action_loop();
        let d = parse_hoa(crate::hoa::tests::ACCEPT_ALL).unwrap();
        let p = build_product(&m, &d);
        let amecs = accepting_mecs(&mec_decomposition(&p), &p);
        let ilp = build_program(&p, &amecs, &SsLtlSpec::default(), &IlpConfig::default()).unwrap();
        (p, ilp)
    }

    fn sol(pairs: &[(&str, f64)]) -> Solution {
        Solution {
            status: SolveStatus::Optimal,
            objective: Some(0.0),
            values: pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        }
    }

    #[test]
    fn concentrated_mass_selects_its_action() {
        let (p, ilp) = setup();
        let s = sol(&[("x_0_0_0", 0.0), ("x_0_0_1", 1.0), ("pi_0_0_0", 0.0), ("pi_0_0_1", 1.0)]);
        let e = extract_policy(&s, &p, &ilp).unwrap();
        assert_eq!(e.policy.get(p.state(0)), Some(1));
        assert_eq!(e.identity_residual, 0.0);
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn loose_binaries_warn() {
        let (p, ilp) = setup();
        let s = sol(&[("x_0_0_0", 0.0), ("x_0_0_1", 1.0), ("pi_0_0_0", 0.4), ("pi_0_0_1", 0.6)]);
        let e = extract_policy(&s, &p, &ilp).unwrap();
        assert_eq!(e.policy.get(p.state(0)), Some(1));
        assert_eq!(e.warnings.len(), 2);
    }

    #[test]
    fn split_mass_violates_identity() {
        let (p, ilp) = setup();
        let s = sol(&[("x_0_0_0", 0.5), ("x_0_0_1", 0.5), ("pi_0_0_0", 1.0), ("pi_0_0_1", 0.0)]);
        assert!(matches!(extract_policy(&s, &p, &ilp), Err(ExtractError::Identity { .. })));
    }

    #[test]
    fn missing_pi_choice() {
        let (p, ilp) = setup();
        let s = sol(&[("x_0_0_0", 1.0), ("x_0_0_1", 0.0), ("pi_0_0_0", 0.2), ("pi_0_0_1", 0.1)]);
        assert!(matches!(extract_policy(&s, &p, &ilp), Err(ExtractError::NoAction { .. })));
    }
}
