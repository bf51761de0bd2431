//! Deterministic Rabin automata read from (and written to) HOA v1 text.
//!
//! Only state-based acceptance is accepted. The acceptance condition must be a
//! disjunction of Rabin pairs, each written as `Fin(i) & Inf(j)`, `Inf(j)`,
//! `Fin(i)` or `t`. Edge labels are Boolean formulas over AP indices and are
//! expanded to explicit letters; every (state, letter) must have exactly one
//! successor.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

/// Upper bound on |AP|; letters are enumerated explicitly.
pub const MAX_AP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("state {state}: letter {letter} has more than one successor")]
    NonDeterministic { state: usize, letter: String },
    #[error("state {state}: letter {letter} has no successor")]
    Incomplete { state: usize, letter: String },
    #[error("state {state} out of range")]
    BadState { state: usize },
    #[error("acceptance condition has no Rabin pair")]
    NoPairs,
    #[error("{0} atomic propositions exceed the supported maximum")]
    TooManyPropositions(usize),
}

/// One Rabin pair: accept if `fin` is visited finitely often and `inf`
/// infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinPair {
    pub fin: BTreeSet<usize>,
    pub inf: BTreeSet<usize>,
}

/// A complete deterministic Rabin automaton over Σ = 2^AP.
///
/// Letters are bitmasks: bit `i` set iff `ap[i]` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dra {
    nodes: Vec<String>,
    initial: usize,
    ap: Vec<String>,
    delta: Vec<usize>,
    pairs: Vec<RabinPair>,
}

impl Dra {
    /// Build from an explicit table `delta[q][letter]`.
    pub fn new(
        nodes: Vec<String>,
        initial: usize,
        ap: Vec<String>,
        delta: Vec<Vec<usize>>,
        pairs: Vec<RabinPair>,
    ) -> Result<Self, HoaError> {
        if ap.len() > MAX_AP {
            return Err(HoaError::TooManyPropositions(ap.len()));
        }
        let n = nodes.len();
        let letters = 1usize << ap.len();
        if initial >= n {
            return Err(HoaError::BadState { state: initial });
        }
        if pairs.is_empty() {
            return Err(HoaError::NoPairs);
        }
        for p in &pairs {
            if let Some(&q) = p.fin.iter().chain(&p.inf).find(|&&q| q >= n) {
                return Err(HoaError::BadState { state: q });
            }
        }
        if delta.len() != n {
            return Err(HoaError::Incomplete { state: delta.len().min(n), letter: String::new() });
        }
        let mut flat = Vec::with_capacity(n * letters);
        for (q, row) in delta.iter().enumerate() {
            if row.len() != letters {
                return Err(HoaError::Incomplete { state: q, letter: String::new() });
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(HoaError::BadState { state: t });
            }
            flat.extend_from_slice(row);
        }
        Ok(Dra { nodes, initial, ap, delta: flat, pairs })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn num_letters(&self) -> usize {
        1 << self.ap.len()
    }

    pub fn pairs(&self) -> &[RabinPair] {
        &self.pairs
    }

    /// δ(q, letter).
    pub fn step(&self, q: usize, letter: u32) -> usize {
        self.delta[q * self.num_letters() + letter as usize]
    }

    /// The letter seen in a state labeled with `props`; propositions unknown
    /// to the automaton are ignored, automaton propositions missing from
    /// `props` are false.
    pub fn letter_of<'a>(&self, props: impl IntoIterator<Item = &'a str>) -> u32 {
        let mut letter = 0u32;
        for p in props {
            if let Some(i) = self.ap.iter().position(|a| a == p) {
                letter |= 1 << i;
            }
        }
        letter
    }

    /// All nodes belonging to some Inf set.
    pub fn inf_union(&self) -> BTreeSet<usize> {
        self.pairs.iter().flat_map(|p| p.inf.iter().copied()).collect()
    }

    /// Pairs `i` with `nodes ∩ Fin_i = ∅` and `nodes ∩ Inf_i ≠ ∅`.
    pub fn accepting_pairs(&self, nodes: &BTreeSet<usize>) -> Vec<usize> {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.fin.is_disjoint(nodes) && !p.inf.is_disjoint(nodes))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn letter_name(&self, letter: u32) -> String {
        let props: Vec<&str> =
            (0..self.ap.len()).filter(|i| letter & (1 << i) != 0).map(|i| self.ap[i].as_str()).collect();
        format!("{{{}}}", props.join(","))
    }

    /// Serialize as HOA v1 with explicit labels, one edge per target.
    pub fn to_hoa(&self) -> String {
        let mut out = String::new();
        let k = self.ap.len();
        out.push_str("HOA: v1\n");
        let _ = writeln!(out, "States: {}", self.nodes.len());
        let _ = writeln!(out, "Start: {}", self.initial);
        let _ = write!(out, "AP: {}", k);
        for p in &self.ap {
            let _ = write!(out, " \"{}\"", escape(p));
        }
        out.push('\n');
        let _ = writeln!(out, "acc-name: Rabin {}", self.pairs.len());
        let terms: Vec<String> =
            (0..self.pairs.len()).map(|i| format!("(Fin({})&Inf({}))", 2 * i, 2 * i + 1)).collect();
        let _ = writeln!(out, "Acceptance: {} {}", 2 * self.pairs.len(), terms.join(" | "));
        out.push_str("properties: trans-labels explicit-labels state-acc deterministic complete\n");
        out.push_str("--BODY--\n");
        for q in 0..self.nodes.len() {
            let sets: Vec<String> = self
                .pairs
                .iter()
                .enumerate()
                .flat_map(|(i, p)| {
                    let mut v = Vec::new();
                    if p.fin.contains(&q) {
                        v.push((2 * i).to_string());
                    }
                    if p.inf.contains(&q) {
                        v.push((2 * i + 1).to_string());
                    }
                    v
                })
                .collect();
            let _ = write!(out, "State: {} \"{}\"", q, escape(&self.nodes[q]));
            if !sets.is_empty() {
                let _ = write!(out, " {{{}}}", sets.join(" "));
            }
            out.push('\n');
            let mut by_target: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
            for letter in 0..self.num_letters() as u32 {
                by_target.entry(self.step(q, letter)).or_default().push(letter);
            }
            for (target, letters) in by_target {
                let label = if letters.len() == self.num_letters() {
                    String::from("t")
                } else {
                    let cubes: Vec<String> = letters
                        .iter()
                        .map(|&l| {
                            let lits: Vec<String> = (0..k)
                                .map(|i| if l & (1 << i) != 0 { i.to_string() } else { format!("!{i}") })
                                .collect();
                            lits.join("&")
                        })
                        .collect();
                    cubes.join(" | ")
                };
                let _ = writeln!(out, "[{label}] {target}");
            }
        }
        out.push_str("--END--\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Read a deterministic, complete, state-based Rabin automaton from HOA text.
pub fn parse_hoa(text: &str) -> Result<Dra, HoaError> {
    let tokens = lex(text)?;
    Parser { tokens, pos: 0 }.automaton()
}

/// δ(q, letter); see [`Dra::step`].
pub fn dra_step(d: &Dra, q: usize, letter: u32) -> usize {
    d.step(q, letter)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Str(String),
    Int(usize),
    Alias(String),
    Body,
    End,
    Abort,
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, HoaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let err = |line: usize, msg: String| HoaError::Syntax { line, msg };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'*') => {
                let mut depth = 1;
                i += 2;
                while depth > 0 {
                    match (chars.get(i), chars.get(i + 1)) {
                        (Some('/'), Some('*')) => {
                            depth += 1;
                            i += 2;
                        }
                        (Some('*'), Some('/')) => {
                            depth -= 1;
                            i += 2;
                        }
                        (Some('\n'), _) => {
                            line += 1;
                            i += 1;
                        }
                        (Some(_), _) => i += 1,
                        (None, _) => return Err(err(line, "unterminated comment".into())),
                    }
                }
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            if let Some(&e) = chars.get(i + 1) {
                                s.push(e);
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                        None => return Err(err(line, "unterminated string".into())),
                    }
                }
                out.push((Tok::Str(s), line));
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                let rest: String = chars[i..].iter().take(10).collect();
                let (tok, len) = if rest.starts_with("--BODY--") {
                    (Tok::Body, 8)
                } else if rest.starts_with("--END--") {
                    (Tok::End, 7)
                } else if rest.starts_with("--ABORT--") {
                    (Tok::Abort, 9)
                } else {
                    return Err(err(line, format!("unexpected `{rest}`")));
                };
                out.push((tok, line));
                i += len;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| err(line, format!("bad integer `{s}`")))?;
                out.push((Tok::Int(v), line));
            }
            '@' => {
                let start = i + 1;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                    i += 1;
                }
                out.push((Tok::Alias(chars[start..i].iter().collect()), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    i += 1;
                    out.push((Tok::Header(word), line));
                } else {
                    out.push((Tok::Ident(word), line));
                }
            }
            '!' | '&' | '|' | '(' | ')' | '[' | ']' | '{' | '}' => {
                out.push((Tok::Sym(c), line));
                i += 1;
            }
            other => return Err(err(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

/// Boolean label over AP indices.
#[derive(Debug, Clone)]
enum Label {
    Const(bool),
    Ap(usize),
    Not(alloc::boxed::Box<Label>),
    And(alloc::boxed::Box<Label>, alloc::boxed::Box<Label>),
    Or(alloc::boxed::Box<Label>, alloc::boxed::Box<Label>),
}

impl Label {
    fn eval(&self, letter: u32) -> bool {
        match self {
            Label::Const(b) => *b,
            Label::Ap(i) => letter & (1 << i) != 0,
            Label::Not(l) => !l.eval(letter),
            Label::And(a, b) => a.eval(letter) && b.eval(letter),
            Label::Or(a, b) => a.eval(letter) || b.eval(letter),
        }
    }
}

/// Acceptance formula over set indices.
#[derive(Debug, Clone)]
enum Acc {
    Const(bool),
    Fin(usize),
    Inf(usize),
    And(Vec<Acc>),
    Or(Vec<Acc>),
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).or(self.tokens.last()).map_or(0, |(_, l)| *l)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, HoaError> {
        Err(HoaError::Syntax { line: self.line(), msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), HoaError> {
        match self.next() {
            Some(Tok::Sym(x)) if x == c => Ok(()),
            other => {
                self.pos -= 1;
                self.fail(format!("expected `{c}`, found {other:?}"))
            }
        }
    }

    fn int(&mut self) -> Result<usize, HoaError> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            other => {
                self.pos -= 1;
                self.fail(format!("expected integer, found {other:?}"))
            }
        }
    }

    fn automaton(mut self) -> Result<Dra, HoaError> {
        let mut version = None;
        let mut num_states = None;
        let mut start: Option<usize> = None;
        let mut ap: Option<Vec<String>> = None;
        let mut acceptance: Option<(usize, Acc)> = None;

        loop {
            match self.next() {
                Some(Tok::Body) => break,
                Some(Tok::Header(h)) => match h.as_str() {
                    "HOA" => match self.next() {
                        Some(Tok::Ident(v)) if v == "v1" => version = Some(()),
                        other => return self.fail(format!("unsupported HOA version {other:?}")),
                    },
                    "States" => num_states = Some(self.int()?),
                    "Start" => {
                        if start.is_some() {
                            return Err(HoaError::Unsupported("multiple initial states".into()));
                        }
                        start = Some(self.int()?);
                        if self.peek() == Some(&Tok::Sym('&')) {
                            return Err(HoaError::Unsupported("alternating initial states".into()));
                        }
                    }
                    "AP" => {
                        let n = self.int()?;
                        let mut names = Vec::with_capacity(n);
                        for _ in 0..n {
                            match self.next() {
                                Some(Tok::Str(s)) => names.push(s),
                                other => return self.fail(format!("expected AP name, found {other:?}")),
                            }
                        }
                        if n > MAX_AP {
                            return Err(HoaError::TooManyPropositions(n));
                        }
                        ap = Some(names);
                    }
                    "Acceptance" => {
                        let sets = self.int()?;
                        let cond = self.acc_or()?;
                        acceptance = Some((sets, cond));
                    }
                    "Alias" => return Err(HoaError::Unsupported("label aliases".into())),
                    _ => {
                        // name, tool, acc-name, properties and unknown headers
                        while matches!(self.peek(), Some(Tok::Ident(_) | Tok::Str(_) | Tok::Int(_))) {
                            self.pos += 1;
                        }
                    }
                },
                Some(other) => return self.fail(format!("unexpected {other:?} in header")),
                None => return Err(HoaError::MissingHeader("--BODY--")),
            }
        }
        version.ok_or(HoaError::MissingHeader("HOA"))?;
        let initial = start.ok_or(HoaError::MissingHeader("Start"))?;
        let ap = ap.ok_or(HoaError::MissingHeader("AP"))?;
        let (num_sets, acc) = acceptance.ok_or(HoaError::MissingHeader("Acceptance"))?;
        let letters = 1usize << ap.len();

        // body
        let mut names: BTreeMap<usize, String> = BTreeMap::new();
        let mut membership: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        let mut edges: BTreeMap<usize, Vec<(Option<Label>, usize)>> = BTreeMap::new();
        let mut current: Option<usize> = None;
        loop {
            match self.next() {
                Some(Tok::End) => break,
                Some(Tok::Abort) => return self.fail("automaton aborted"),
                Some(Tok::Header(h)) if h == "State" => {
                    if self.peek() == Some(&Tok::Sym('[')) {
                        return Err(HoaError::Unsupported("state labels".into()));
                    }
                    let q = self.int()?;
                    if let Some(Tok::Str(_)) = self.peek() {
                        if let Some(Tok::Str(s)) = self.next() {
                            names.insert(q, s);
                        }
                    }
                    let sets = if self.peek() == Some(&Tok::Sym('{')) { self.acc_sets()? } else { BTreeSet::new() };
                    if let Some(&s) = sets.iter().find(|&&s| s >= num_sets) {
                        return self.fail(format!("acceptance set {s} not declared"));
                    }
                    membership.insert(q, sets);
                    edges.entry(q).or_default();
                    current = Some(q);
                }
                Some(Tok::Sym('[')) => {
                    let q = match current {
                        Some(q) => q,
                        None => return self.fail("edge before any State"),
                    };
                    let label = self.label_or(ap.len())?;
                    self.expect_sym(']')?;
                    let target = self.int()?;
                    self.edge_tail()?;
                    edges.get_mut(&q).unwrap().push((Some(label), target));
                }
                Some(Tok::Int(target)) => {
                    let q = match current {
                        Some(q) => q,
                        None => return self.fail("edge before any State"),
                    };
                    self.edge_tail()?;
                    edges.get_mut(&q).unwrap().push((None, target));
                }
                other => return self.fail(format!("unexpected {other:?} in body")),
            }
        }

        let n = num_states.unwrap_or_else(|| {
            let max_state = edges.keys().copied().max().unwrap_or(0);
            let max_target = edges.values().flatten().map(|(_, t)| *t).max().unwrap_or(0);
            max_state.max(max_target).max(initial) + 1
        });
        if initial >= n {
            return Err(HoaError::BadState { state: initial });
        }
        let mut delta = vec![vec![usize::MAX; letters]; n];
        for (&q, list) in &edges {
            if q >= n {
                return Err(HoaError::BadState { state: q });
            }
            let implicit = list.iter().all(|(l, _)| l.is_none());
            if implicit && !list.is_empty() && list.len() != letters {
                return self.fail(format!("state {q}: implicit labels need {letters} edges"));
            }
            for (k, (label, target)) in list.iter().enumerate() {
                if *target >= n {
                    return Err(HoaError::BadState { state: *target });
                }
                let covered: Vec<u32> = match label {
                    Some(l) => (0..letters as u32).filter(|&x| l.eval(x)).collect(),
                    None if implicit => vec![k as u32],
                    None => return self.fail(format!("state {q}: mixed implicit and explicit labels")),
                };
                for letter in covered {
                    let slot = &mut delta[q][letter as usize];
                    if *slot != usize::MAX {
                        return Err(HoaError::NonDeterministic { state: q, letter: letter_text(&ap, letter) });
                    }
                    *slot = *target;
                }
            }
        }
        for (q, row) in delta.iter().enumerate() {
            if let Some(letter) = row.iter().position(|&t| t == usize::MAX) {
                return Err(HoaError::Incomplete { state: q, letter: letter_text(&ap, letter as u32) });
            }
        }

        let in_set = |set: usize| -> BTreeSet<usize> {
            (0..n).filter(|q| membership.get(q).is_some_and(|m| m.contains(&set))).collect()
        };
        let all: BTreeSet<usize> = (0..n).collect();
        let mut pairs = Vec::new();
        let disjuncts = match acc {
            Acc::Or(v) => v,
            other => vec![other],
        };
        for d in disjuncts {
            let atoms = match d {
                Acc::And(v) => v,
                other => vec![other],
            };
            let mut fin: Option<usize> = None;
            let mut inf: Option<usize> = None;
            let mut is_false = false;
            for a in atoms {
                match a {
                    Acc::Fin(s) if fin.is_none() => fin = Some(s),
                    Acc::Inf(s) if inf.is_none() => inf = Some(s),
                    Acc::Const(true) => {}
                    Acc::Const(false) => is_false = true,
                    other => {
                        return Err(HoaError::Unsupported(format!("acceptance term {other:?} is not a Rabin pair")))
                    }
                }
            }
            if is_false {
                continue;
            }
            pairs.push(RabinPair {
                fin: fin.map(in_set).unwrap_or_default(),
                inf: inf.map(in_set).unwrap_or_else(|| all.clone()),
            });
        }
        let nodes = (0..n).map(|q| names.get(&q).cloned().unwrap_or_else(|| format!("q{q}"))).collect();
        Dra::new(nodes, initial, ap, delta, pairs)
    }

    fn edge_tail(&mut self) -> Result<(), HoaError> {
        if self.peek() == Some(&Tok::Sym('&')) {
            return Err(HoaError::Unsupported("universal branching".into()));
        }
        if self.peek() == Some(&Tok::Sym('{')) {
            let sets = self.acc_sets()?;
            if !sets.is_empty() {
                return Err(HoaError::Unsupported("transition-based acceptance".into()));
            }
        }
        Ok(())
    }

    fn acc_sets(&mut self) -> Result<BTreeSet<usize>, HoaError> {
        self.expect_sym('{')?;
        let mut sets = BTreeSet::new();
        while let Some(Tok::Int(v)) = self.peek() {
            sets.insert(*v);
            self.pos += 1;
        }
        self.expect_sym('}')?;
        Ok(sets)
    }

    fn label_or(&mut self, k: usize) -> Result<Label, HoaError> {
        let mut lhs = self.label_and(k)?;
        while self.peek() == Some(&Tok::Sym('|')) {
            self.pos += 1;
            lhs = Label::Or(lhs.into(), self.label_and(k)?.into());
        }
        Ok(lhs)
    }

    fn label_and(&mut self, k: usize) -> Result<Label, HoaError> {
        let mut lhs = self.label_atom(k)?;
        while self.peek() == Some(&Tok::Sym('&')) {
            self.pos += 1;
            lhs = Label::And(lhs.into(), self.label_atom(k)?.into());
        }
        Ok(lhs)
    }

    fn label_atom(&mut self, k: usize) -> Result<Label, HoaError> {
        match self.next() {
            Some(Tok::Sym('!')) => Ok(Label::Not(self.label_atom(k)?.into())),
            Some(Tok::Sym('(')) => {
                let l = self.label_or(k)?;
                self.expect_sym(')')?;
                Ok(l)
            }
            Some(Tok::Ident(t)) if t == "t" => Ok(Label::Const(true)),
            Some(Tok::Ident(f)) if f == "f" => Ok(Label::Const(false)),
            Some(Tok::Int(i)) if i < k => Ok(Label::Ap(i)),
            Some(Tok::Int(i)) => self.fail(format!("AP index {i} out of range")),
            Some(Tok::Alias(a)) => Err(HoaError::Unsupported(format!("alias @{a}"))),
            other => {
                self.pos -= 1;
                self.fail(format!("bad label token {other:?}"))
            }
        }
    }

    fn acc_or(&mut self) -> Result<Acc, HoaError> {
        let mut terms = vec![self.acc_and()?];
        while self.peek() == Some(&Tok::Sym('|')) {
            self.pos += 1;
            terms.push(self.acc_and()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Acc::Or(terms.into_iter().flat_map(|t| if let Acc::Or(v) = t { v } else { vec![t] }).collect())
        })
    }

    fn acc_and(&mut self) -> Result<Acc, HoaError> {
        let mut atoms = vec![self.acc_atom()?];
        while self.peek() == Some(&Tok::Sym('&')) {
            self.pos += 1;
            atoms.push(self.acc_atom()?);
        }
        Ok(if atoms.len() == 1 {
            atoms.pop().unwrap()
        } else {
            Acc::And(atoms.into_iter().flat_map(|t| if let Acc::And(v) = t { v } else { vec![t] }).collect())
        })
    }

    fn acc_atom(&mut self) -> Result<Acc, HoaError> {
        match self.next() {
            Some(Tok::Ident(t)) if t == "t" => Ok(Acc::Const(true)),
            Some(Tok::Ident(f)) if f == "f" => Ok(Acc::Const(false)),
            Some(Tok::Ident(kind)) if kind == "Fin" || kind == "Inf" => {
                self.expect_sym('(')?;
                if self.peek() == Some(&Tok::Sym('!')) {
                    return Err(HoaError::Unsupported("complemented acceptance sets".into()));
                }
                let s = self.int()?;
                self.expect_sym(')')?;
                Ok(if kind == "Fin" { Acc::Fin(s) } else { Acc::Inf(s) })
            }
            Some(Tok::Sym('(')) => {
                let inner = self.acc_or()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            other => {
                self.pos -= 1;
                self.fail(format!("bad acceptance token {other:?}"))
            }
        }
    }
}

fn letter_text(ap: &[String], letter: u32) -> String {
    let props: Vec<&str> = (0..ap.len()).filter(|i| letter & (1 << i) != 0).map(|i| ap[i].as_str()).collect();
    format!("{{{}}}", props.join(","))
}
