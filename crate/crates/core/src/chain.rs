//! Numerical Markov-chain analysis: stationary and limiting distributions,
//! ordinary lumpability and class sums.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::bsccs;
use crate::PROB_TOL;

/// Sparse row: (target, probability), sorted by target.
pub type Row = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("row {row} points at state {target} outside the chain")]
    BadTarget { row: usize, target: usize },
    #[error("linear system is singular (chain is not irreducible?)")]
    Singular,
    #[error("steady-state residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("distribution has {got} entries, chain has {want} states")]
    Length { got: usize, want: usize },
}

/// A finite row-stochastic kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    rows: Vec<Row>,
}

impl Chain {
    pub fn new(rows: Vec<Row>) -> Result<Self, ChainError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if let Some(&(t, _)) = row.iter().find(|&&(t, _)| t >= n) {
                return Err(ChainError::BadTarget { row: i, target: t });
            }
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(ChainError::RowSum { row: i, sum });
            }
        }
        Ok(Chain { rows })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Row>) -> Self {
        Chain { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().filter(|&&(t, _)| t == j).map(|&(_, p)| p).sum()
    }

    /// Positive-probability successor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| {
                let mut s: Vec<usize> = row.iter().filter(|&&(_, p)| p > 0.0).map(|&(t, _)| t).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                m[(i, j)] += p;
            }
        }
        m
    }

    /// x·T for a row vector x.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                out[j] += x[i] * p;
            }
        }
        out
    }

    /// Restriction to a closed subset, reindexed in the order of `states`.
    fn restrict(&self, states: &[usize]) -> Chain {
        let local: BTreeMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Chain {
            rows: states
                .iter()
                .map(|&s| self.rows[s].iter().filter_map(|&(t, p)| local.get(&t).map(|&j| (j, p))).collect())
                .collect(),
        }
    }
}

/// A probability vector indexed by state.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(pub Vec<f64>);

impl Distribution {
    pub fn point(n: usize, at: usize) -> Self {
        let mut v = vec![0.0; n];
        v[at] = 1.0;
        Distribution(v)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// max_i |self_i − other_i|.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Deref for Distribution {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Residual ‖xT − x‖∞.
pub fn residual(c: &Chain, x: &[f64]) -> f64 {
    let xt = c.left_mul(x);
    xt.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

const RESIDUAL_TOL: f64 = 1e-10;

/// Solve xT = x, Σx = 1 by dense LU, with the normalization row replacing the
/// last balance equation.
pub fn stationary(c: &Chain) -> Result<Distribution, ChainError> {
    let n = c.len();
    if n == 0 {
        return Err(ChainError::Singular);
    }
    let mut a = c.to_dense().transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let x = a.lu().solve(&b).ok_or(ChainError::Singular)?;
    let x: Vec<f64> = x.iter().copied().collect();
    if x.iter().any(|v| !v.is_finite() || *v < -1e-9) {
        return Err(ChainError::Singular);
    }
    let r = residual(c, &x);
    if r > RESIDUAL_TOL {
        return Err(ChainError::Residual(r));
    }
    Ok(Distribution(x))
}

/// Long-run (Cesàro) distribution from `beta`: absorption-weighted mixture of
/// the per-BSCC stationary distributions, zero on transient states.
pub fn limiting_distribution(c: &Chain, beta: &[f64]) -> Result<Distribution, ChainError> {
    let n = c.len();
    if beta.len() != n {
        return Err(ChainError::Length { got: beta.len(), want: n });
    }
    if n == 0 {
        return Err(ChainError::Singular);
    }
    let decomp = bsccs(c, 0);
    let member = decomp.membership(n);
    let transient = &decomp.transient;
    let k = decomp.bsccs.len();

    // absorption[t][b]: probability of ending in BSCC b from transient t
    let absorption = if transient.is_empty() {
        DMatrix::zeros(0, k)
    } else {
        let local: BTreeMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let m = transient.len();
        let mut lhs = DMatrix::<f64>::identity(m, m);
        let mut rhs = DMatrix::<f64>::zeros(m, k);
        for (i, &s) in transient.iter().enumerate() {
            for &(t, p) in c.row(s) {
                if let Some(&j) = local.get(&t) {
                    lhs[(i, j)] -= p;
                } else if let Some(b) = member[t] {
                    rhs[(i, b)] += p;
                }
            }
        }
        lhs.lu().solve(&rhs).ok_or(ChainError::Singular)?
    };

    let mut weight = vec![0.0; k];
    for s in 0..n {
        match member[s] {
            Some(b) => weight[b] += beta[s],
            None => {
                let i = transient.binary_search(&s).unwrap();
                for (b, w) in weight.iter_mut().enumerate() {
                    *w += beta[s] * absorption[(i, b)];
                }
            }
        }
    }

    let mut out = vec![0.0; n];
    for (b, states) in decomp.bsccs.iter().enumerate() {
        if weight[b] == 0.0 {
            continue;
        }
        let pi = stationary(&c.restrict(states))?;
        for (i, &s) in states.iter().enumerate() {
            out[s] = weight[b] * pi[i];
        }
    }
    Ok(Distribution(out))
}

/// A partition of chain states into classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Group states by key; classes are ordered by key.
    pub fn by_key<K: Ord + Clone>(keys: &[K]) -> Self {
        let mut groups: BTreeMap<K, Vec<usize>> = BTreeMap::new();
        for (s, k) in keys.iter().enumerate() {
            groups.entry(k.clone()).or_default().push(s);
        }
        let classes: Vec<Vec<usize>> = groups.into_values().collect();
        let mut class_of = vec![0; keys.len()];
        for (c, members) in classes.iter().enumerate() {
            for &s in members {
                class_of[s] = c;
            }
        }
        Partition { class_of, classes }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { class_of: (0..n).collect(), classes: (0..n).map(|s| vec![s]).collect() }
    }

    pub fn class_of(&self, s: usize) -> usize {
        self.class_of[s]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_states(&self) -> usize {
        self.class_of.len()
    }
}

/// max over classes C, members α, β ∈ C of ‖(e_α − e_β)·T·V‖∞; zero iff the
/// partition is ordinarily lumpable.
pub fn check_lumpable(c: &Chain, p: &Partition) -> f64 {
    let k = p.classes().len();
    let lumped: Vec<Vec<f64>> = (0..c.len())
        .map(|s| {
            let mut v = vec![0.0; k];
            for &(t, prob) in c.row(s) {
                v[p.class_of(t)] += prob;
            }
            v
        })
        .collect();
    let mut worst = 0.0f64;
    for members in p.classes() {
        for target in 0..k {
            let (lo, hi) = members
                .iter()
                .map(|&s| lumped[s][target])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            worst = worst.max(hi - lo);
        }
    }
    worst
}

/// Class masses Σ_{s ∈ C} d(s).
pub fn lump_distribution(d: &[f64], p: &Partition) -> Distribution {
    Distribution(p.classes().iter().map(|members| members.iter().map(|&s| d[s]).sum()).collect())
}
