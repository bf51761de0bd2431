//! Strongly connected components, bottom SCCs of chains, and maximal end
//! components of product LMDPs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::Chain;
use crate::hoa::Dra;
use crate::product::{ProductLmdp, ProductState};

/// Tarjan's algorithm, iterative. Components come out in reverse topological
/// order; each component is sorted.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // (node, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, pos)) = call.last() {
            if index[v] == UNVISITED {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(pos) {
                call.last_mut().unwrap().1 += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut todo = vec![start];
    seen[start] = true;
    while let Some(v) = todo.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                todo.push(w);
            }
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsccDecomposition {
    /// Bottom SCCs, each sorted, ordered by smallest member.
    pub bsccs: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
    /// Indices into `bsccs` reachable from the initial state.
    pub reachable_bsccs: Vec<usize>,
}

impl BsccDecomposition {
    /// For every state, the index of its BSCC, if recurrent.
    pub fn membership(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (k, b) in self.bsccs.iter().enumerate() {
            for &s in b {
                out[s] = Some(k);
            }
        }
        out
    }
}

pub fn bsccs(c: &Chain, initial: usize) -> BsccDecomposition {
    let adj = c.adjacency();
    let comps = tarjan_scc(&adj);
    let mut comp_of = vec![0; adj.len()];
    for (k, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = k;
        }
    }
    let mut bottom: Vec<Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(k, comp)| comp.iter().all(|&v| adj[v].iter().all(|&w| comp_of[w] == *k)))
        .map(|(_, comp)| comp.clone())
        .collect();
    bottom.sort_by_key(|b| b[0]);
    let mut recurrent = vec![false; adj.len()];
    for b in &bottom {
        for &v in b {
            recurrent[v] = true;
        }
    }
    let transient = (0..adj.len()).filter(|&v| !recurrent[v]).collect();
    let reach = reachable_from(&adj, initial);
    let reachable_bsccs = (0..bottom.len()).filter(|&k| reach[bottom[k][0]]).collect();
    BsccDecomposition { bsccs: bottom, transient, reachable_bsccs }
}

/// An end component: a set of product states with, per state, the retained
/// actions. Retained actions keep all successor mass inside `states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mec {
    pub states: Vec<usize>,
    pub actions: BTreeMap<usize, Vec<usize>>,
}

/// Maximal end components by iterated SCC refinement.
pub fn mec_decomposition(p: &ProductLmdp) -> Vec<Mec> {
    let n = p.num_states();
    let mut alive = vec![true; n];
    let mut acts: Vec<Vec<usize>> = (0..n).map(|u| p.enabled(u).to_vec()).collect();

    loop {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|u| {
                if !alive[u] {
                    return Vec::new();
                }
                let mut succ: Vec<usize> = acts[u]
                    .iter()
                    .flat_map(|&a| p.successors(u, a).unwrap().iter().map(|&(v, _)| v))
                    .filter(|&v| alive[v])
                    .collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect();
        let comps = tarjan_scc(&adj);
        let mut comp_of = vec![usize::MAX; n];
        for (k, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = k;
            }
        }
        let mut changed = false;
        for u in 0..n {
            if !alive[u] {
                continue;
            }
            let before = acts[u].len();
            acts[u].retain(|&a| {
                p.successors(u, a).unwrap().iter().all(|&(v, _)| alive[v] && comp_of[v] == comp_of[u])
            });
            changed |= acts[u].len() != before;
            if acts[u].is_empty() {
                alive[u] = false;
                changed = true;
            }
        }
        if !changed {
            let mut mecs: Vec<Mec> = comps
                .into_iter()
                .filter(|comp| alive[comp[0]])
                .map(|comp| {
                    let actions = comp.iter().map(|&u| (u, acts[u].clone())).collect();
                    Mec { states: comp, actions }
                })
                .collect();
            mecs.sort_by_key(|m| m.states[0]);
            return mecs;
        }
    }
}

/// True iff `states` with the given retained actions is closed under those
/// actions and strongly connected.
pub fn is_end_component(p: &ProductLmdp, states: &[usize], actions: &BTreeMap<usize, Vec<usize>>) -> bool {
    if states.is_empty() {
        return false;
    }
    let set: BTreeSet<usize> = states.iter().copied().collect();
    let local: BTreeMap<usize, usize> = states.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut adj = vec![Vec::new(); states.len()];
    for &u in states {
        let Some(acts) = actions.get(&u) else { return false };
        if acts.is_empty() {
            return false;
        }
        for &a in acts {
            let Some(row) = p.successors(u, a) else { return false };
            for &(v, _) in row {
                if !set.contains(&v) {
                    return false;
                }
                adj[local[&u]].push(local[&v]);
            }
        }
    }
    tarjan_scc(&adj).len() == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amec {
    pub mec: Mec,
    /// Rabin pairs i with S^E ∩ Fin_i = ∅ and S^E ∩ Inf_i ≠ ∅.
    pub pairs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AmecList {
    pub amecs: Vec<Amec>,
}

impl AmecList {
    pub fn len(&self) -> usize {
        self.amecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amecs.is_empty()
    }
}

/// Keep the MECs satisfying some Rabin pair, in the input order.
pub fn accepting_mecs(mecs: &[Mec], p: &ProductLmdp) -> AmecList {
    let dra = p.dra();
    let amecs = mecs
        .iter()
        .filter_map(|mec| {
            let nodes: BTreeSet<usize> = mec.states.iter().map(|&u| p.state(u).q).collect();
            let pairs = dra.accepting_pairs(&nodes);
            (!pairs.is_empty()).then(|| Amec { mec: mec.clone(), pairs })
        })
        .collect();
    AmecList { amecs }
}

/// Rabin acceptance of a bottom SCC of a product chain.
pub fn bscc_accepting(bscc: &[ProductState], d: &Dra) -> bool {
    let nodes: BTreeSet<usize> = bscc.iter().map(|ps| ps.q).collect();
    !d.accepting_pairs(&nodes).is_empty()
}
