//! Random gridworld benchmark generator.
//!
//! Cells are named `s<row>_<col>` with row 0 at the top; the initial state is
//! the top-left cell. The four actions are `left`, `down`, `right`, `up`, all
//! enabled everywhere. Generation is a pure function of the [`GridSpec`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Lmdp, LmdpParts, ModelError, RewardDecl, StateDecl, TransitionDecl};

pub const ACTIONS: [&str; 4] = ["left", "down", "right", "up"];
/// (row, col) displacement per action.
const MOVES: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];
pub const GRID_AP: [&str; 4] = ["a", "b", "c", "d"];

#[derive(Debug, Clone, PartialEq)]
pub enum LabelMode {
    /// Each of `a`, `b`, `c`, `d` on a distinct random quarter of the cells.
    QuartersRandom,
    /// Fixed propositions per (row, col); unlisted cells are unlabeled.
    Explicit { ap: Vec<String>, cells: BTreeMap<(usize, usize), Vec<String>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardMode {
    /// Uniform {0, 1} reward per (state, action), shared by all successors.
    Bernoulli01,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    Deterministic,
    /// Intended direction with probability `p_main`, each perpendicular
    /// direction with half the remainder. Blocked moves stay in place.
    Slip { p_main: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub label_mode: LabelMode,
    pub reward_mode: RewardMode,
    pub dynamics: Dynamics,
}

impl GridSpec {
    /// The benchmark setting: square grid, random quarters, {0,1} rewards,
    /// deterministic moves.
    pub fn benchmark(size: usize, seed: u64) -> Self {
        GridSpec {
            width: size,
            height: size,
            seed,
            label_mode: LabelMode::QuartersRandom,
            reward_mode: RewardMode::Bernoulli01,
            dynamics: Dynamics::Deterministic,
        }
    }
}

pub fn cell_name(row: usize, col: usize) -> String {
    format!("s{row}_{col}")
}

fn step(g: &GridSpec, row: usize, col: usize, dir: usize) -> (usize, usize) {
    let (dr, dc) = MOVES[dir];
    let r = row as isize + dr;
    let c = col as isize + dc;
    if r < 0 || c < 0 || r >= g.height as isize || c >= g.width as isize {
        (row, col)
    } else {
        (r as usize, c as usize)
    }
}

/// Build the gridworld LMDP. Panics if `width * height == 0`.
pub fn generate_grid(g: &GridSpec) -> Lmdp {
    assert!(g.width * g.height >= 1, "grid must have at least one cell");
    let n = g.width * g.height;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);

    let (ap, mut labels): (Vec<String>, Vec<Vec<String>>) = match &g.label_mode {
        LabelMode::QuartersRandom => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let quarter = n / 4;
            let mut labels = alloc::vec![Vec::new(); n];
            for (k, prop) in GRID_AP.iter().enumerate() {
                for &cell in &order[k * quarter..(k + 1) * quarter] {
                    labels[cell].push(String::from(*prop));
                }
            }
            (GRID_AP.iter().map(|p| String::from(*p)).collect(), labels)
        }
        LabelMode::Explicit { ap, cells } => {
            let mut labels = alloc::vec![Vec::new(); n];
            for (&(r, c), props) in cells {
                if r < g.height && c < g.width {
                    labels[r * g.width + c] = props.clone();
                }
            }
            (ap.clone(), labels)
        }
    };

    let mut states = Vec::with_capacity(n);
    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    for row in 0..g.height {
        for col in 0..g.width {
            let id = cell_name(row, col);
            states.push(StateDecl { id: id.clone(), labels: core::mem::take(&mut labels[row * g.width + col]) });
            for (dir, action) in ACTIONS.iter().enumerate() {
                let mut succ: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                match g.dynamics {
                    Dynamics::Deterministic => {
                        succ.insert(step(g, row, col, dir), 1.0);
                    }
                    Dynamics::Slip { p_main } => {
                        let side = (1.0 - p_main) / 2.0;
                        for (d, p) in [(dir, p_main), ((dir + 1) % 4, side), ((dir + 3) % 4, side)] {
                            if p > 0.0 {
                                *succ.entry(step(g, row, col, d)).or_insert(0.0) += p;
                            }
                        }
                    }
                }
                let r = match g.reward_mode {
                    RewardMode::Bernoulli01 => rng.gen_range(0..2u8) as f64,
                    RewardMode::Zero => 0.0,
                };
                for (&(tr, tc), &p) in &succ {
                    let to = cell_name(tr, tc);
                    if r != 0.0 {
                        rewards.push(RewardDecl { from: id.clone(), action: String::from(*action), to: to.clone(), r });
                    }
                    transitions.push(TransitionDecl { from: id.clone(), action: String::from(*action), to, p });
                }
            }
        }
    }

    let parts = LmdpParts {
        states,
        actions: ACTIONS.iter().map(|a| String::from(*a)).collect(),
        ap: Some(ap),
        initial: cell_name(0, 0),
        transitions,
        rewards,
    };
    Lmdp::from_parts(parts).unwrap_or_else(|e: ModelError| panic!("generated grid is invalid: {e}"))
}
