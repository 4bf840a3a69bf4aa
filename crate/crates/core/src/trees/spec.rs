use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratecalc::Distribution;

/// Description of an infinite (or finite) locally finite rooted tree.
///
/// JSON form is tagged by `"kind"`:
///
/// ```json
/// {"kind": "homogeneous", "b": 2}
/// {"kind": "galton_watson", "offspring": {"support": [0, 2], "weights": [0.25, 0.75]}, "seed": 7}
/// {"kind": "spine_with_leaves", "leaves": {"rule": "exponential", "base": 2, "offset": -1}}
/// {"kind": "explicit", "parents": [-1, 0, 0, 1], "dead_ends": [2]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeSpec {
    /// Every vertex has `b` children.
    Homogeneous { b: u32 },
    /// Galton-Watson genealogy; by default conditioned on reaching the
    /// truncation depth.
    GaltonWatson {
        offspring: Distribution,
        seed: u64,
        #[serde(default = "default_true")]
        conditioned: bool,
    },
    /// A single infinite ray; the spine vertex at depth `d` also carries
    /// `leaves(d)` children with no successors.
    SpineWithLeaves {
        #[serde(default)]
        leaves: LeafRule,
    },
    /// Finite parent table (`-1` marks the root). Leaves listed in
    /// `dead_ends` have no successors; every other leaf stands for an
    /// unspecified infinite continuation and may only sit at the truncation
    /// depth.
    Explicit {
        parents: Vec<i64>,
        #[serde(default)]
        dead_ends: Vec<u32>,
    },
}

fn default_true() -> bool {
    true
}

/// Number of dead-end leaves attached to the spine vertex at depth `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LeafRule {
    /// `base^(d+1) + offset`.
    Exponential { base: u64, offset: i64 },
    Constant { count: u64 },
}

impl Default for LeafRule {
    /// `2^(d+1) - 1`, which makes every level of the tree hold `2^d` vertices.
    fn default() -> Self {
        LeafRule::Exponential { base: 2, offset: -1 }
    }
}

impl LeafRule {
    pub fn count(&self, depth: u32) -> Result<u64> {
        match *self {
            LeafRule::Constant { count } => Ok(count),
            LeafRule::Exponential { base, offset } => {
                let power = base
                    .checked_pow(depth + 1)
                    .ok_or_else(|| Error::arg(format!("leaf count {base}^{} overflows", depth + 1)))?;
                let count = power as i128 + offset as i128;
                u64::try_from(count)
                    .map_err(|_| Error::InvalidTree(format!("negative leaf count {count} at depth {depth}")))
            }
        }
    }
}

impl TreeSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TreeSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Parses a whitespace-separated parent list (`-1` for the root). A line
    /// starting with `dead:` lists dead-end leaf ids; `#` starts a comment.
    pub fn from_parent_list(text: &str) -> Result<Self> {
        let mut parents = Vec::new();
        let mut dead_ends = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if let Some(rest) = line.strip_prefix("dead:") {
                for tok in rest.split_whitespace() {
                    dead_ends.push(
                        tok.parse()
                            .map_err(|_| Error::InvalidTree(format!("bad dead-end id {tok:?}")))?,
                    );
                }
                continue;
            }
            for tok in line.split_whitespace() {
                parents.push(tok.parse().map_err(|_| Error::InvalidTree(format!("bad parent id {tok:?}")))?);
            }
        }
        let spec = TreeSpec::Explicit { parents, dead_ends };
        spec.validate()?;
        Ok(spec)
    }

    /// Structural checks that do not depend on a truncation depth.
    pub fn validate(&self) -> Result<()> {
        match self {
            TreeSpec::Homogeneous { b } if *b == 0 => Err(Error::InvalidTree("homogeneous tree needs b >= 1".into())),
            TreeSpec::Homogeneous { .. } => Ok(()),
            TreeSpec::GaltonWatson { offspring, .. } => offspring.require_counts(),
            TreeSpec::SpineWithLeaves { leaves } => leaves.count(0).map(|_| ()),
            TreeSpec::Explicit { parents, dead_ends } => ExplicitTable::new(parents, dead_ends).map(|_| ()),
        }
    }

    /// Mean number of children for specs whose growth is known exactly.
    pub fn exact_branching_number(&self) -> Option<f64> {
        match self {
            TreeSpec::Homogeneous { b } => Some(*b as f64),
            TreeSpec::SpineWithLeaves { .. } => Some(1.0),
            TreeSpec::GaltonWatson { offspring, .. } => Some(offspring.mean()),
            TreeSpec::Explicit { .. } => None,
        }
    }

    /// Specs in which all vertices of a level that have successors look
    /// alike, so level recursions replace tree traversals.
    pub fn symmetric(&self) -> Option<Symmetric> {
        match self {
            TreeSpec::Homogeneous { b } => Some(Symmetric { live: *b, leaves: None }),
            TreeSpec::SpineWithLeaves { leaves } => Some(Symmetric { live: 1, leaves: Some(*leaves) }),
            _ => None,
        }
    }
}

/// Level-symmetric shape: every live vertex has `live` live children and
/// `leaves(depth)` dead-end children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetric {
    pub live: u32,
    pub leaves: Option<LeafRule>,
}

impl Symmetric {
    pub fn dead_children(&self, depth: u32) -> Result<u64> {
        self.leaves.map_or(Ok(0), |rule| rule.count(depth))
    }

    /// `M_0..M_n` as floating point numbers (they may exceed `u64`).
    pub fn level_sizes(&self, depth: u32) -> Result<Vec<f64>> {
        let mut sizes = vec![1.0];
        let mut live = 1.0;
        for d in 0..depth {
            let next_live = live * self.live as f64;
            sizes.push(next_live + live * self.dead_children(d)? as f64);
            live = next_live;
        }
        Ok(sizes)
    }
}

/// Validated child lists of an explicit parent table.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExplicitTable {
    pub root: u32,
    pub children: Vec<Vec<u32>>,
    pub dead: Vec<bool>,
}

impl ExplicitTable {
    pub fn new(parents: &[i64], dead_ends: &[u32]) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::InvalidTree("empty parent table".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidTree("parent table too large".into()));
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, &p) in parents.iter().enumerate() {
            if p == -1 {
                if root.replace(v as u32).is_some() {
                    return Err(Error::InvalidTree("more than one root".into()));
                }
            } else if p < 0 || p as usize >= n || p as usize == v {
                return Err(Error::InvalidTree(format!("vertex {v} has invalid parent {p}")));
            } else {
                children[p as usize].push(v as u32);
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root (parent -1)".into()))?;
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root as usize] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v as usize] {
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    reached += 1;
                    stack.push(c);
                }
            }
        }
        if reached != n {
            return Err(Error::InvalidTree("parent table contains a cycle".into()));
        }
        let mut dead = vec![false; n];
        for &d in dead_ends {
            let slot = dead
                .get_mut(d as usize)
                .ok_or_else(|| Error::InvalidTree(format!("dead end {d} out of range")))?;
            if !children[d as usize].is_empty() {
                return Err(Error::InvalidTree(format!("dead end {d} has children")));
            }
            *slot = true;
        }
        Ok(Self { root, children, dead })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let specs = [
            r#"{"kind":"homogeneous","b":3}"#,
            r#"{"kind":"galton_watson","offspring":{"support":[1,2],"weights":[0.5,0.5]},"seed":9}"#,
            r#"{"kind":"spine_with_leaves"}"#,
            r#"{"kind":"spine_with_leaves","leaves":{"rule":"constant","count":2}}"#,
            r#"{"kind":"explicit","parents":[-1,0,0],"dead_ends":[1]}"#,
        ];
        for s in specs {
            let spec = TreeSpec::from_json(s).unwrap();
            let back = TreeSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
            assert_eq!(spec, back);
        }
        let gw = TreeSpec::from_json(specs[1]).unwrap();
        assert!(matches!(gw, TreeSpec::GaltonWatson { conditioned: true, .. }));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TreeSpec::from_json(r#"{"kind":"homogeneous","b":0}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind":"explicit","parents":[-1,-1]}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind":"explicit","parents":[1,0]}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind":"explicit","parents":[-1,2,1]}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind":"explicit","parents":[-1,0],"dead_ends":[0]}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind":"galton_watson","offspring":{"support":[0.5],"weights":[1]},"seed":1}"#).is_err());
    }

    #[test]
    fn parent_list_text() {
        let spec = TreeSpec::from_parent_list("-1 0 0\n1 # comment\ndead: 2\n").unwrap();
        assert_eq!(spec, TreeSpec::Explicit { parents: vec![-1, 0, 0, 1], dead_ends: vec![2] });
        assert!(TreeSpec::from_parent_list("-1 x").is_err());
    }

    #[test]
    fn leaf_rules() {
        let rule = LeafRule::default();
        assert_eq!(rule.count(0).unwrap(), 1);
        assert_eq!(rule.count(3).unwrap(), 15);
        assert!(LeafRule::Exponential { base: 1, offset: -2 }.count(0).is_err());
        let sizes = Symmetric { live: 1, leaves: Some(rule) }.level_sizes(4).unwrap();
        assert_eq!(sizes, vec![1.0, 2.0, 4.0, 8.0, 16.0]);
    }
}
