use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::{effective_conductance_to_level, Environment};
use crate::rng;

/// Transition probabilities from `v`: the parent first (if any), then the
/// children in order. Proportional to incident edge conductances.
pub fn transition_probs(env: &Environment, v: u32) -> Vec<f64> {
    let tree = env.tree();
    // conductances divided by C_v: parent edge 1, child edges A_τ
    let mut weights: Vec<f64> = Vec::with_capacity(tree.child_count(v) + 1);
    if tree.parent(v).is_some() {
        weights.push(1.0);
    }
    weights.extend(tree.children(v).map(|c| env.a(c)));
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// Nearest-neighbor walk driven by a seeded stream.
pub struct Walker<'e, 't> {
    env: &'e Environment<'t>,
    position: u32,
    rng: ChaCha8Rng,
}

impl<'e, 't> Walker<'e, 't> {
    pub fn new(env: &'e Environment<'t>, start: u32, seed: u64, index: u64) -> Self {
        Self { env, position: start, rng: rng::sequential(seed, rng::stream::WALK, index) }
    }

    pub fn position(&self) -> u32 {
        self.position
    }

    /// Moves one step and returns the new position; `None` when the vertex
    /// has no neighbors.
    pub fn step(&mut self) -> Option<u32> {
        let tree = self.env.tree();
        let v = self.position;
        let parent = tree.parent(v);
        let children = tree.children(v);
        let mut total = if parent.is_some() { 1.0 } else { 0.0 };
        for c in children.clone() {
            total += self.env.a(c);
        }
        if total == 0.0 {
            return None;
        }
        let mut u = self.rng.gen::<f64>() * total;
        let mut next = None;
        if let Some(p) = parent {
            if u < 1.0 {
                next = Some(p);
            }
            u -= 1.0;
        }
        if next.is_none() {
            let mut chosen = children.end - 1;
            for c in children {
                let a = self.env.a(c);
                if u < a {
                    chosen = c;
                    break;
                }
                u -= a;
            }
            next = Some(chosen);
        }
        self.position = next.expect("a neighbor was chosen");
        Some(self.position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSummary {
    pub steps_taken: u64,
    pub returns_to_root: u64,
    pub max_depth: u32,
    /// The walk reached an extendable frontier vertex and left the truncation.
    pub exited: bool,
    pub final_vertex: u32,
    /// Number of times each depth was occupied, counting the start.
    pub occupation_by_depth: Vec<u64>,
}

/// Runs up to `steps` steps from the root, stopping early when the walk
/// reaches the extendable frontier.
pub fn simulate_walk(env: &Environment, steps: u64, seed: u64) -> Result<WalkSummary> {
    if steps == 0 {
        return Err(Error::arg("simulate_walk needs at least one step"));
    }
    let tree = env.tree();
    let mut walker = Walker::new(env, 0, seed, 0);
    let mut summary = WalkSummary {
        steps_taken: 0,
        returns_to_root: 0,
        max_depth: 0,
        exited: false,
        final_vertex: 0,
        occupation_by_depth: vec![0; tree.truncation_depth() as usize + 1],
    };
    summary.occupation_by_depth[0] = 1;
    for _ in 0..steps {
        let Some(v) = walker.step() else { break };
        summary.steps_taken += 1;
        let d = tree.depth(v);
        summary.occupation_by_depth[d as usize] += 1;
        summary.max_depth = summary.max_depth.max(d);
        if v == 0 {
            summary.returns_to_root += 1;
        }
        if tree.is_extendable(v) {
            summary.exited = true;
            break;
        }
    }
    summary.final_vertex = walker.position();
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub hits: u64,
    /// `C_eff(root ↔ level d) / Σ_{|σ|=1} C_σ` on the same environment.
    pub exact: f64,
}

/// Monte Carlo probability that the walk from the root reaches depth `d`
/// before returning to the root. Trial `t` uses its own derived stream.
pub fn escape_probability(env: &Environment, d: u32, trials: u64, seed: u64) -> Result<EscapeEstimate> {
    if trials == 0 {
        return Err(Error::arg("escape_probability needs at least one trial"));
    }
    let tree = env.tree();
    if tree.child_count(0) == 0 {
        return Err(Error::arg("the root has no children"));
    }
    let exact = effective_conductance_to_level(env, d)? / env.level_conductance_sum(1);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut walker = Walker::new(env, 0, seed, t);
            loop {
                let v = walker.step().expect("root has children");
                if tree.depth(v) == d {
                    return 1u64;
                }
                if v == 0 {
                    return 0;
                }
            }
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(EscapeEstimate { estimate, stderr, trials, hits, exact })
}
