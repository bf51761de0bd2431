//! CPLEX LP text.

use alloc::format;
use alloc::string::String;
use core::fmt::Write as _;

use super::{IlpModel, Sense, VarKind};

const WRAP: usize = 200;

/// Append ` + 0.5 x` style terms, wrapping long lines.
fn push_terms(out: &mut String, line_start: &mut usize, terms: &[(usize, f64)], m: &IlpModel) {
    if terms.is_empty() {
        // the LP format needs at least one term per row
        let _ = write!(out, " 0 {}", m.vars[0].name);
        return;
    }
    for (k, &(i, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { "-" } else { "+" };
        let mag = a.abs();
        let term = if mag == 1.0 { m.vars[i].name.clone() } else { format!("{mag} {}", m.vars[i].name) };
        let piece = if k == 0 {
            if a < 0.0 {
                format!(" - {term}")
            } else {
                format!(" {term}")
            }
        } else {
            format!(" {sign} {term}")
        };
        if out.len() - *line_start + piece.len() > WRAP {
            out.push_str("\n ");
            *line_start = out.len() - 1;
        }
        out.push_str(&piece);
    }
}

/// Render the model; identical models give identical text.
pub fn export_lp(m: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("Maximize\n obj:");
    let mut start = 0;
    if m.objective.is_empty() {
        out.push_str(" 0");
    } else {
        push_terms(&mut out, &mut start, &m.objective, m);
    }
    out.push_str("\nSubject To\n");
    for c in &m.constraints {
        start = out.len();
        let _ = write!(out, " {}:", c.name);
        push_terms(&mut out, &mut start, &c.terms, m);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &m.vars {
        match v.kind {
            VarKind::Continuous => {
                let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
            }
            VarKind::Binary if v.lower == v.upper => {
                let _ = writeln!(out, " {} = {}", v.name, v.lower);
            }
            VarKind::Binary => {}
        }
    }
    out.push_str("Binary\n");
    for v in m.vars.iter().filter(|v| v.kind == VarKind::Binary) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use alloc::vec;

    fn tiny() -> IlpModel {
        IlpModel {
            vars: vec![
                Var { name: "x".into(), kind: VarKind::Continuous, lower: 0.0, upper: 1.0 },
                Var { name: "b".into(), kind: VarKind::Binary, lower: 0.0, upper: 1.0 },
                Var { name: "c".into(), kind: VarKind::Binary, lower: 1.0, upper: 1.0 },
            ],
            constraints: vec![Constraint {
                name: "c_i_0".into(),
                terms: vec![(0, -1.0), (1, 0.25)],
                sense: Sense::Le,
                rhs: 0.0,
            }],
            objective: vec![],
            index: IlpIndex::default(),
            epsilon: 1e-4,
        }
    }

    #[test]
    fn feasibility_header_and_sections() {
        let text = export_lp(&tiny());
        assert!(text.starts_with("Maximize\n obj: 0\nSubject To\n"));
        assert!(text.contains(" c_i_0: - x + 0.25 b <= 0\n"));
        assert!(text.contains(" 0 <= x <= 1\n"));
        assert!(text.contains(" c = 1\n"));
        assert!(text.ends_with("Binary\n b\n c\nEnd\n"));
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = tiny();
        m.constraints[0].terms = (0..200).map(|k| (k % 2, 0.5 + k as f64)).collect();
        let text = export_lp(&m);
        assert!(text.lines().all(|l| l.len() <= 255));
    }
}
