//! Cutset infima and branching-number estimates.
//!
//! `cutset_min(tree, λ)` is the minimum over cutsets separating the root from
//! the extendable frontier of `Σ λ^(-|σ|)`. The branching number is the
//! threshold `λ` above which this infimum vanishes in the limit; on a finite
//! truncation it is estimated from the geometric decay of the minimum
//! between depth `n/2` and depth `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratecalc::log_sum_exp;
use crate::trees::{build_truncation, Tree, TreeSpec};

/// Decay factor required between depth `n/2` and depth `n`.
pub const DECAY_THRESHOLD: f64 = 0.5;

/// Interval width beyond which an estimate is flagged inconclusive.
pub const INCONCLUSIVE_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutsetMin {
    pub value: f64,
    pub log_value: f64,
    /// The truncation has no extendable frontier, so the empty cutset works.
    pub finite_tree: bool,
}

impl CutsetMin {
    fn from_log(log_value: f64) -> Self {
        Self { value: log_value.exp(), log_value, finite_tree: log_value == f64::NEG_INFINITY }
    }
}

fn add_log(acc: &mut f64, x: f64) {
    if x == f64::NEG_INFINITY {
        return;
    }
    *acc = if *acc == f64::NEG_INFINITY { x } else { log_sum_exp([*acc, x].into_iter()) };
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("lambda must be positive and finite, got {lambda}")))
    }
}

/// Minimum cutset sum of `λ^(-|σ|)` by a leaf-to-root recursion in log space.
pub fn cutset_min(tree: &Tree, lambda: f64) -> Result<CutsetMin> {
    check_lambda(lambda)?;
    if tree.truncation_depth() == 0 {
        return Err(Error::arg("a depth-0 truncation has no cutsets"));
    }
    let n = tree.truncation_depth();
    let ln_lambda = lambda.ln();
    let mut sums = vec![f64::NEG_INFINITY; tree.len()];
    for v in (1..tree.len() as u32).rev() {
        let d = tree.depth(v);
        let own = -(d as f64) * ln_lambda;
        let value = if d == n {
            if tree.is_extendable(v) { own } else { f64::NEG_INFINITY }
        } else {
            let below = sums[v as usize];
            if below == f64::NEG_INFINITY { below } else { own.min(below) }
        };
        let p = tree.parent(v).expect("non-root vertex") as usize;
        add_log(&mut sums[p], value);
    }
    Ok(CutsetMin::from_log(sums[0]))
}

/// `cutset_min` on the truncation of `spec`, by a level recursion when the
/// spec is level-symmetric and on a materialized tree otherwise.
pub fn cutset_min_spec(spec: &TreeSpec, lambda: f64, depth: u32) -> Result<CutsetMin> {
    check_lambda(lambda)?;
    if depth == 0 {
        return Err(Error::arg("a depth-0 truncation has no cutsets"));
    }
    match spec.symmetric() {
        Some(sym) => {
            let ln_lambda = lambda.ln();
            let ln_live = (sym.live as f64).ln();
            let mut value = -(depth as f64) * ln_lambda;
            for d in (1..depth).rev() {
                value = (-(d as f64) * ln_lambda).min(ln_live + value);
            }
            Ok(CutsetMin::from_log(ln_live + value))
        }
        None => cutset_min(&build_truncation(spec, depth)?, lambda),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchingEstimate {
    pub lo: f64,
    pub hi: f64,
    /// Threshold corrected for the finite depth gap.
    pub point: f64,
    pub depth: u32,
    pub inconclusive: bool,
    /// Known value for families whose branching number is determined by the
    /// spec itself (homogeneous, spine, Galton-Watson mean).
    pub exact: Option<f64>,
}

impl BranchingEstimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Decay test `cutset_min(n) < θ · cutset_min(n/2)` at a given `λ`.
struct DecayProbe {
    full: Option<Tree>,
    half: Option<Tree>,
    spec: TreeSpec,
    depth: u32,
}

impl DecayProbe {
    fn new(spec: &TreeSpec, depth: u32) -> Result<Self> {
        let (full, half) = if spec.symmetric().is_some() {
            (None, None)
        } else {
            let full = build_truncation(spec, depth)?;
            let half = full.prefix(depth / 2)?;
            (Some(full), Some(half))
        };
        Ok(Self { full, half, spec: spec.clone(), depth })
    }

    fn values(&self, lambda: f64) -> Result<(CutsetMin, CutsetMin)> {
        match (&self.full, &self.half) {
            (Some(full), Some(half)) => Ok((cutset_min(full, lambda)?, cutset_min(half, lambda)?)),
            _ => Ok((
                cutset_min_spec(&self.spec, lambda, self.depth)?,
                cutset_min_spec(&self.spec, lambda, self.depth / 2)?,
            )),
        }
    }

    fn decays(&self, lambda: f64) -> Result<bool> {
        let (full, half) = self.values(lambda)?;
        Ok(!full.finite_tree && full.log_value < DECAY_THRESHOLD.ln() + half.log_value)
    }
}

/// Interval estimate of the branching number from the truncation at
/// `max_depth`. `hi` is the least `λ` (to within `tol`) whose cutset minimum
/// decays by the threshold factor between depth `max_depth/2` and
/// `max_depth`; since that factor is reached only `(1/θ)^(1/g)` above the
/// true threshold on a gap of `g` levels, `point = hi · θ^(1/g)` and `lo`
/// mirrors `hi` around it.
pub fn branching_number(spec: &TreeSpec, max_depth: u32, tol: f64) -> Result<BranchingEstimate> {
    if max_depth < 4 {
        return Err(Error::arg("branching_number needs max_depth >= 4"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let probe = DecayProbe::new(spec, max_depth)?;
    let exact = spec.exact_branching_number();
    let gap = (max_depth - max_depth / 2) as f64;
    let shrink = DECAY_THRESHOLD.powf(1.0 / gap);

    let mut below = 1.0;
    let hi = if probe.decays(below)? {
        below
    } else {
        let mut above = 2.0;
        while !probe.decays(above)? {
            below = above;
            above *= 2.0;
            if above > 1e15 {
                return Ok(BranchingEstimate {
                    lo: below,
                    hi: f64::INFINITY,
                    point: f64::INFINITY,
                    depth: max_depth,
                    inconclusive: true,
                    exact,
                });
            }
        }
        let step_tol = 0.1 * tol;
        while above - below > step_tol {
            let mid = 0.5 * (below + above);
            if probe.decays(mid)? {
                above = mid;
            } else {
                below = mid;
            }
        }
        above
    };
    let point = hi * shrink;
    let lo = point * shrink;
    Ok(BranchingEstimate {
        lo,
        hi,
        point,
        depth: max_depth,
        inconclusive: hi - lo > INCONCLUSIVE_WIDTH,
        exact,
    })
}

/// `M_n^(1/n)` at the truncation depth.
pub fn growth_rate(tree: &Tree) -> f64 {
    tree.growth_rate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::LeafRule;

    fn binary(n: u32) -> Tree {
        build_truncation(&TreeSpec::Homogeneous { b: 2 }, n).unwrap()
    }

    #[test]
    fn binary_at_lambda_two_is_one() {
        for n in 1..10 {
            assert!((cutset_min(&binary(n), 2.0).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_depth_three_lambda_three() {
        assert!((cutset_min(&binary(3), 3.0).unwrap().value - 8.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn spine_needs_only_the_spine() {
        let spec = TreeSpec::SpineWithLeaves { leaves: LeafRule::default() };
        for n in 1..8 {
            let t = build_truncation(&spec, n).unwrap();
            let v = cutset_min(&t, 1.5).unwrap().value;
            assert!((v - 1.5f64.powi(-(n as i32))).abs() < 1e-14);
            let closed = cutset_min_spec(&spec, 1.5, n).unwrap().value;
            assert!((closed - v).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_materialized() {
        let spec = TreeSpec::Homogeneous { b: 3 };
        for lambda in [0.5, 1.0, 2.0, 3.0, 4.5] {
            let a = cutset_min(&build_truncation(&spec, 6).unwrap(), lambda).unwrap().value;
            let b = cutset_min_spec(&spec, lambda, 6).unwrap().value;
            assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn finite_tree_flag() {
        let spec = TreeSpec::Explicit { parents: vec![-1, 0, 0], dead_ends: vec![1, 2] };
        let c = cutset_min(&build_truncation(&spec, 1).unwrap(), 2.0).unwrap();
        assert!(c.finite_tree);
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn binary_branching_number() {
        let est = branching_number(&TreeSpec::Homogeneous { b: 2 }, 2000, 1e-4).unwrap();
        assert!(est.contains(2.0), "{est:?}");
        assert!(est.width() < 0.01);
        assert!((est.point - 2.0).abs() < 1e-3);
        assert!(!est.inconclusive);
    }

    #[test]
    fn spine_branching_number() {
        let spec = TreeSpec::SpineWithLeaves { leaves: LeafRule::default() };
        let est = branching_number(&spec, 2000, 1e-4).unwrap();
        assert!(est.contains(1.0), "{est:?}");
        assert!(est.width() <= 0.01);
    }

    #[test]
    fn growth_rates() {
        assert!((growth_rate(&binary(10)) - 2.0).abs() < 1e-12);
        let path = TreeSpec::Explicit { parents: (-1..10).collect(), dead_ends: vec![] };
        assert_eq!(growth_rate(&build_truncation(&path, 10).unwrap()), 1.0);
    }
}
