//! Lazy view of the infinite tree described by a spec.

use std::sync::Arc;

use super::spec::{ExplicitTable, LeafRule, TreeSpec};
use crate::error::{Error, Result};
use crate::ratecalc::Distribution;
use crate::rng;

/// A vertex of the infinite tree: its shape key (path hash), depth and a
/// generator-specific slot (explicit table id, or spine membership).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeNode {
    pub key: u64,
    pub depth: u32,
    slot: u32,
}

/// Children of any vertex on demand. Galton-Watson shapes are unconditioned
/// here; conditioning needs a materialized truncation.
#[derive(Debug, Clone)]
pub struct Generator {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Homogeneous(u32),
    Galton(Distribution, u64),
    Spine(LeafRule),
    Explicit(Arc<ExplicitTable>),
}

impl Generator {
    pub fn new(spec: &TreeSpec) -> Result<Self> {
        spec.validate()?;
        let kind = match spec {
            TreeSpec::Homogeneous { b } => Kind::Homogeneous(*b),
            TreeSpec::GaltonWatson { offspring, seed, .. } => Kind::Galton(offspring.clone(), *seed),
            TreeSpec::SpineWithLeaves { leaves } => Kind::Spine(*leaves),
            TreeSpec::Explicit { parents, dead_ends } => Kind::Explicit(Arc::new(ExplicitTable::new(parents, dead_ends)?)),
        };
        Ok(Self { kind })
    }

    pub(crate) fn galton_watson(offspring: &Distribution, seed: u64) -> Self {
        Self { kind: Kind::Galton(offspring.clone(), seed) }
    }

    pub fn root(&self) -> ShapeNode {
        let (seed, slot) = match &self.kind {
            Kind::Galton(_, seed) => (*seed, 0),
            Kind::Spine(_) => (0, 1),
            Kind::Explicit(t) => (0, t.root),
            Kind::Homogeneous(_) => (0, 0),
        };
        ShapeNode { key: rng::root_key(seed, rng::stream::GW_SHAPE), depth: 0, slot }
    }

    pub fn child_count(&self, node: &ShapeNode) -> Result<usize> {
        let count = match &self.kind {
            Kind::Homogeneous(b) => *b as u64,
            Kind::Galton(law, _) => law.sample_with(rng::unit(node.key)) as u64,
            Kind::Spine(rule) if node.slot == 1 => rule
                .count(node.depth)?
                .checked_add(1)
                .ok_or_else(|| Error::arg("leaf count overflows"))?,
            Kind::Spine(_) => 0,
            Kind::Explicit(t) => t.children[node.slot as usize].len() as u64,
        };
        usize::try_from(count).map_err(|_| Error::arg("child count overflows"))
    }

    /// The `i`-th child; `i` must be below `child_count(node)`.
    pub fn child(&self, node: &ShapeNode, i: usize) -> ShapeNode {
        let slot = match &self.kind {
            Kind::Spine(_) => u32::from(node.slot == 1 && i == 0),
            Kind::Explicit(t) => t.children[node.slot as usize][i],
            _ => 0,
        };
        ShapeNode { key: rng::child_key(node.key, i), depth: node.depth + 1, slot }
    }

    /// Whether the vertex has successors in the infinite tree.
    pub fn extends(&self, node: &ShapeNode) -> Result<bool> {
        Ok(match &self.kind {
            Kind::Explicit(t) => !t.dead[node.slot as usize],
            _ => self.child_count(node)? > 0,
        })
    }
}
