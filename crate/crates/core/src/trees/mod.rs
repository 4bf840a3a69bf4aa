//! Finite truncations of locally finite rooted trees.
//!
//! A [`Tree`] stores vertices in breadth-first order, so every level and
//! every sibling group is a contiguous id range. Vertices at the truncation
//! depth carry an `extendable` flag telling whether the infinite tree
//! continues below them; shallower childless vertices are dead ends.

mod contract;
mod shape;
mod spec;

use std::ops::Range;

pub use contract::{contract_k, Contraction};
pub use shape::{Generator, ShapeNode};
pub use spec::{LeafRule, Symmetric, TreeSpec};

use crate::error::{Error, Result};
use crate::rng;

/// Default upper bound on materialized vertices.
pub const DEFAULT_VERTEX_CAP: usize = 1 << 26;

/// Environment variable overriding [`DEFAULT_VERTEX_CAP`].
pub const VERTEX_CAP_ENV: &str = "TREELAB_VERTEX_CAP";

const CONDITIONING_ATTEMPTS: u64 = 1000;
const NO_PARENT: u32 = u32::MAX;

/// Vertex budget from the environment, falling back to the default.
pub fn vertex_cap() -> usize {
    std::env::var(VERTEX_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_VERTEX_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<u32>,
    depth: Vec<u32>,
    first_child: Vec<u32>,
    extendable: Vec<bool>,
    level_start: Vec<u32>,
    truncation_depth: u32,
}

/// Materializes all vertices of depth at most `depth`.
pub fn build_truncation(spec: &TreeSpec, depth: u32) -> Result<Tree> {
    build_truncation_with_cap(spec, depth, vertex_cap())
}

pub fn build_truncation_with_cap(spec: &TreeSpec, depth: u32, cap: usize) -> Result<Tree> {
    let cap = cap.min(NO_PARENT as usize);
    match spec {
        TreeSpec::GaltonWatson { offspring, seed, conditioned: true } => {
            spec.validate()?;
            for attempt in 0..CONDITIONING_ATTEMPTS {
                let s = if attempt == 0 { *seed } else { rng::derive(*seed, rng::stream::CONDITIONING, attempt) };
                let tree = grow(&Generator::galton_watson(offspring, s), depth, cap)?;
                if tree.has_extendable_frontier() {
                    return Ok(tree);
                }
            }
            Err(Error::Unsupported(format!(
                "no surviving Galton-Watson truncation to depth {depth} in {CONDITIONING_ATTEMPTS} attempts"
            )))
        }
        _ => grow(&Generator::new(spec)?, depth, cap),
    }
}

fn grow(generator: &Generator, depth: u32, cap: usize) -> Result<Tree> {
    let mut level = vec![generator.root()];
    let mut child_counts: Vec<u32> = vec![];
    let mut total = 1usize;
    for d in 0..depth {
        let mut next = Vec::new();
        for node in &level {
            let c = generator.child_count(node)?;
            if c == 0 && generator.extends(node)? {
                return Err(Error::InvalidTree(format!(
                    "open leaf at depth {d} above the truncation depth {depth}"
                )));
            }
            total = total.checked_add(c).filter(|&t| t <= cap).ok_or(Error::VertexBudget { cap })?;
            child_counts.push(c as u32);
            next.extend((0..c).map(|i| generator.child(node, i)));
        }
        level = next;
    }
    let frontier: Vec<bool> = level.iter().map(|n| generator.extends(n)).collect::<Result<_>>()?;
    child_counts.extend(std::iter::repeat(0).take(frontier.len()));
    let mut acc = 1u32;
    let mut first_child = Vec::with_capacity(total + 1);
    for c in &child_counts {
        first_child.push(acc);
        acc += c;
    }
    first_child.push(acc);
    let mut extendable = vec![false; total - frontier.len()];
    extendable.extend(frontier);
    Ok(Tree::from_csr(first_child, extendable, depth))
}

impl Tree {
    /// Assembles a tree from breadth-first child offsets. `first_child` has
    /// one entry per vertex plus a terminator.
    fn from_csr(first_child: Vec<u32>, extendable: Vec<bool>, truncation_depth: u32) -> Self {
        let n = extendable.len();
        let mut parent = vec![NO_PARENT; n];
        let mut depth = vec![0u32; n];
        for v in 0..n {
            for c in first_child[v]..first_child[v + 1] {
                parent[c as usize] = v as u32;
                depth[c as usize] = depth[v] + 1;
            }
        }
        let mut level_start = vec![0u32; truncation_depth as usize + 2];
        for &d in &depth {
            level_start[d as usize + 1] += 1;
        }
        for k in 1..level_start.len() {
            level_start[k] += level_start[k - 1];
        }
        Self { parent, depth, first_child, extendable, level_start, truncation_depth }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn truncation_depth(&self) -> u32 {
        self.truncation_depth
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != NO_PARENT).then_some(p)
    }

    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    pub fn children(&self, v: u32) -> Range<u32> {
        self.first_child[v as usize]..self.first_child[v as usize + 1]
    }

    pub fn child_count(&self, v: u32) -> usize {
        self.children(v).len()
    }

    /// Position of `v` among its siblings.
    pub fn sibling_index(&self, v: u32) -> usize {
        self.parent(v).map_or(0, |p| (v - self.first_child[p as usize]) as usize)
    }

    pub fn is_extendable(&self, v: u32) -> bool {
        self.extendable[v as usize]
    }

    /// Vertex ids at depth `k`.
    pub fn level(&self, k: u32) -> Range<u32> {
        if k > self.truncation_depth {
            return 0..0;
        }
        self.level_start[k as usize]..self.level_start[k as usize + 1]
    }

    /// `M_0..M_n`.
    pub fn level_sizes(&self) -> Vec<u64> {
        self.level_start.windows(2).map(|w| (w[1] - w[0]) as u64).collect()
    }

    pub fn extendable_frontier(&self) -> impl Iterator<Item = u32> + '_ {
        self.level(self.truncation_depth).filter(|&v| self.is_extendable(v))
    }

    pub fn has_extendable_frontier(&self) -> bool {
        self.extendable_frontier().next().is_some()
    }

    /// Flags vertices with an extendable vertex in their subtree.
    pub fn lineage(&self) -> Vec<bool> {
        let mut live = self.extendable.clone();
        for v in (1..self.len()).rev() {
            if live[v] {
                live[self.parent[v] as usize] = true;
            }
        }
        live
    }

    /// Keys of every vertex in a random stream: a function of the seed and
    /// the path from the root only.
    pub fn path_keys(&self, seed: u64, stream: u64) -> Vec<u64> {
        let mut keys = Vec::with_capacity(self.len());
        keys.push(rng::root_key(seed, stream));
        for v in 1..self.len() {
            let p = self.parent[v];
            keys.push(rng::child_key(keys[p as usize], self.sibling_index(v as u32)));
        }
        keys
    }

    /// The truncation to depth `m`.
    pub fn prefix(&self, m: u32) -> Result<Tree> {
        if m > self.truncation_depth {
            return Err(Error::arg(format!("prefix depth {m} exceeds truncation depth {}", self.truncation_depth)));
        }
        if m == self.truncation_depth {
            return Ok(self.clone());
        }
        let end = self.level_start[m as usize + 1] as usize;
        let frontier = self.level(m);
        let mut first_child = self.first_child[..end].to_vec();
        let last = self.first_child[frontier.start as usize];
        first_child.iter_mut().skip(frontier.start as usize).for_each(|c| *c = last);
        first_child.push(last);
        let mut extendable = vec![false; end];
        for v in frontier {
            extendable[v as usize] = self.child_count(v) > 0;
        }
        Ok(Tree::from_csr(first_child, extendable, m))
    }

    /// Checks parent, depth, ordering and extendable-flag invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTree(msg));
        let n = self.len();
        if n == 0 || self.parent[0] != NO_PARENT || self.depth[0] != 0 {
            return bad("root must be vertex 0 at depth 0".into());
        }
        if self.first_child.len() != n + 1 || self.first_child[n] as usize != n || self.extendable.len() != n {
            return bad("inconsistent array lengths".into());
        }
        for v in 1..n {
            let p = self.parent[v];
            if p == NO_PARENT || p as usize >= v {
                return bad(format!("vertex {v} has parent {p}"));
            }
            if !self.children(p).contains(&(v as u32)) {
                return bad(format!("vertex {v} missing from its parent's children"));
            }
            if self.depth[v] != self.depth[p as usize] + 1 {
                return bad(format!("depth of vertex {v} is not parent depth + 1"));
            }
            if self.depth[v] < self.depth[v - 1] {
                return bad(format!("vertex {v} breaks breadth-first order"));
            }
        }
        for v in 0..n {
            let d = self.depth[v];
            if d > self.truncation_depth {
                return bad(format!("vertex {v} below the truncation depth"));
            }
            if d == self.truncation_depth && self.child_count(v as u32) > 0 {
                return bad(format!("frontier vertex {v} has children"));
            }
            if d < self.truncation_depth && self.extendable[v] {
                return bad(format!("vertex {v} above the frontier is marked extendable"));
            }
        }
        Ok(())
    }

    /// Maximal level growth `M_n^(1/n)` at the truncation depth.
    pub fn growth_rate(&self) -> f64 {
        let n = self.truncation_depth;
        if n == 0 {
            return 1.0;
        }
        (self.level(n).len() as f64).powf(1.0 / n as f64)
    }
}
