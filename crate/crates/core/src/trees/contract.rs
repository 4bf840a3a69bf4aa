use super::Tree;
use crate::error::{Error, Result};

/// The k-level contraction of a truncation together with the map back to
/// the original vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub tree: Tree,
    /// `origin[v]` is the vertex of the input tree that `v` stands for.
    pub origin: Vec<u32>,
    pub k: u32,
}

impl Contraction {
    /// Input vertices on the k-step segment ending at contracted vertex `v`,
    /// listed from the top (just below the contracted parent) down to
    /// `origin[v]`. Empty for the root.
    pub fn segment(&self, input: &Tree, v: u32) -> Vec<u32> {
        if v == 0 {
            return Vec::new();
        }
        let mut seg = Vec::with_capacity(self.k as usize);
        let mut u = self.origin[v as usize];
        for _ in 0..self.k {
            seg.push(u);
            u = input.parent(u).expect("segment stays below the root");
        }
        seg.reverse();
        seg
    }
}

/// Keeps the vertices at depths divisible by `k`; `σ -> τ` whenever `τ`
/// descends from `σ` exactly `k` levels down.
pub fn contract_k(tree: &Tree, k: u32) -> Result<Contraction> {
    if k == 0 || tree.truncation_depth() % k != 0 {
        return Err(Error::arg(format!(
            "truncation depth {} is not divisible by k = {k}",
            tree.truncation_depth()
        )));
    }
    let depth = tree.truncation_depth() / k;
    let mut origin = Vec::new();
    let mut first_child = Vec::new();
    let mut next_id = 1u32;
    for j in 0..=depth {
        for v in tree.level(j * k) {
            origin.push(v);
            first_child.push(next_id);
            if j < depth {
                let (mut lo, mut hi) = (v, v + 1);
                for _ in 0..k {
                    lo = tree.children(lo).start;
                    hi = tree.children(hi - 1).end;
                    if lo >= hi {
                        break;
                    }
                }
                next_id += hi.saturating_sub(lo);
            }
        }
    }
    first_child.push(next_id);
    let extendable = origin.iter().map(|&v| tree.is_extendable(v)).collect();
    Ok(Contraction { tree: Tree::from_csr(first_child, extendable, depth), origin, k })
}
