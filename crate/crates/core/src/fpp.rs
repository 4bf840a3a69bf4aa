//! First-passage percolation: passage times `S_σ = Σ_{0<τ≤σ} X_τ`, the
//! fastest level transit `B_n = min_{|σ|=n} S_σ / n`, and level-set counts
//! `N_n(y) = #{|σ| = n : S_σ ≤ y n}`, compared with the rate `m₁(1/br)` and
//! the exponent `log(m(y) br)`.
//!
//! Only level-`n` vertices with an extendable descendant (or that are
//! themselves extendable) enter `B_n` and `N_n`: dead-end branches do not
//! lead to infinity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::branching_number;
use crate::error::{Error, Result};
use crate::ratecalc::{m_inverse, rate_m, Distribution};
use crate::rng;
use crate::trees::{build_truncation, Tree, TreeSpec};

/// Relative slack when comparing `S_σ` with `y n`.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PassageSample<'t> {
    tree: &'t Tree,
    s: Vec<f64>,
    law: Distribution,
    seed: u64,
    lineage: Vec<bool>,
}

/// Draws `X_σ` i.i.d. from `law`, keyed by `(seed, path to σ)`.
pub fn sample_passage_times<'t>(tree: &'t Tree, law: &Distribution, seed: u64) -> Result<PassageSample<'t>> {
    law.require_x_type()?;
    let keys = tree.path_keys(seed, rng::stream::PASSAGE);
    let mut s = vec![0.0; tree.len()];
    for v in 1..tree.len() {
        let p = tree.parent(v as u32).expect("non-root vertex") as usize;
        s[v] = s[p] + law.sample_with(rng::unit(keys[v]));
    }
    Ok(PassageSample { tree, s, law: law.clone(), seed, lineage: tree.lineage() })
}

impl<'t> PassageSample<'t> {
    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn law(&self) -> &Distribution {
        &self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `S_σ`.
    pub fn passage_time(&self, v: u32) -> f64 {
        self.s[v as usize]
    }

    /// `X_σ = S_σ - S_parent(σ)`.
    pub fn edge_time(&self, v: u32) -> f64 {
        match self.tree.parent(v) {
            Some(p) => self.s[v as usize] - self.s[p as usize],
            None => 0.0,
        }
    }

    fn live_level(&self, n: u32) -> Result<Vec<f64>> {
        if n == 0 || n > self.tree.truncation_depth() {
            return Err(Error::arg(format!("level {n} outside 1..={}", self.tree.truncation_depth())));
        }
        let values: Vec<f64> = self
            .tree
            .level(n)
            .filter(|&v| self.lineage[v as usize])
            .map(|v| self.s[v as usize])
            .collect();
        if values.is_empty() {
            return Err(Error::arg(format!("level {n} has no vertex leading to the frontier")));
        }
        Ok(values)
    }
}

/// `B_n = min S_σ / n` over level-`n` vertices leading to the frontier.
pub fn first_passage_min(sample: &PassageSample, n: u32) -> Result<f64> {
    let level = sample.live_level(n)?;
    Ok(level.iter().copied().fold(f64::INFINITY, f64::min) / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub y: f64,
    pub count: u64,
    /// `(1/n) log N_n(y)`; `None` stands for `-inf` (no vertex).
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub seed: u64,
    pub depth: u32,
    pub b_n: f64,
    pub points: Vec<ProfilePoint>,
}

/// Exact level-set counts `N_n(y)` on a grid of `y`.
pub fn level_profile(sample: &PassageSample, n: u32, ygrid: &[f64]) -> Result<ProfileStats> {
    let mut level = sample.live_level(n)?;
    level.sort_by(f64::total_cmp);
    let nf = n as f64;
    let points = ygrid
        .iter()
        .map(|&y| {
            let bound = y * nf;
            let bound = bound + TIE_TOL * bound.abs().max(1.0);
            let count = level.partition_point(|&s| s <= bound) as u64;
            let exponent = (count > 0).then(|| (count as f64).ln() / nf);
            ProfilePoint { y, count, exponent }
        })
        .collect();
    Ok(ProfileStats { seed: sample.seed, depth: n, b_n: level[0] / nf, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub y: f64,
    pub m: f64,
    /// `log(m(y) br)` inside `m₁(1/br) ≤ y < E[X]`, else `None`.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FppReport {
    pub depth: u32,
    pub branching_number: f64,
    pub branching_exact: bool,
    /// `m₁(1/br)`.
    pub predicted_rate: f64,
    pub predictions: Vec<Prediction>,
    pub replicates: Vec<ProfileStats>,
}

/// Replicate `i` uses the derived seed `rng::derive(seed, REPLICATE, i)`.
pub fn fpp_report(
    spec: &TreeSpec,
    law: &Distribution,
    depth: u32,
    seeds: u32,
    ygrid: &[f64],
    seed: u64,
) -> Result<FppReport> {
    law.require_x_type()?;
    if seeds == 0 {
        return Err(Error::arg("need at least one seed"));
    }
    let (br, exact) = match spec.exact_branching_number() {
        Some(b) => (b, true),
        None => (branching_number(spec, depth.max(4), 1e-4)?.point, false),
    };
    if !(br >= 1.0) {
        return Err(Error::Unsupported(format!("branching number {br} below 1")));
    }
    let m_is_one = rate_m(law, law.ess_inf() - 1.0)? >= 1.0;
    if br == 1.0 && m_is_one {
        return Err(Error::Unsupported("br = 1 and m ≡ 1".into()));
    }
    let predicted_rate = m_inverse(law, 1.0 / br)?;
    let mean = law.mean();
    let predictions = ygrid
        .iter()
        .map(|&y| {
            let m = rate_m(law, y)?;
            let exponent = (y >= predicted_rate && y < mean && m > 0.0).then(|| (m * br).ln());
            Ok(Prediction { y, m, exponent })
        })
        .collect::<Result<_>>()?;
    let tree = build_truncation(spec, depth)?;
    let replicates = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let s = rng::derive(seed, rng::stream::REPLICATE, i as u64);
            let sample = sample_passage_times(&tree, law, s)?;
            level_profile(&sample, depth, ygrid)
        })
        .collect::<Result<_>>()?;
    Ok(FppReport { depth, branching_number: br, branching_exact: exact, predicted_rate, predictions, replicates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(n: u32) -> Tree {
        build_truncation(&TreeSpec::Homogeneous { b: 2 }, n).unwrap()
    }

    #[test]
    fn constant_times_are_depths() {
        let t = binary(5);
        let s = sample_passage_times(&t, &Distribution::point_mass(1.0).unwrap(), 3).unwrap();
        for v in 0..t.len() as u32 {
            assert_eq!(s.passage_time(v), t.depth(v) as f64);
        }
        assert_eq!(first_passage_min(&s, 5).unwrap(), 1.0);
        let prof = level_profile(&s, 5, &[1.0, 0.5]).unwrap();
        assert_eq!(prof.points[0].count, 32);
        assert!((prof.points[0].exponent.unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(prof.points[1].count, 0);
        assert_eq!(prof.points[1].exponent, None);
    }

    #[test]
    fn reproducible_samples() {
        let t = binary(8);
        let law = Distribution::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(sample_passage_times(&t, &law, 4).unwrap(), sample_passage_times(&t, &law, 4).unwrap());
    }

    #[test]
    fn min_is_smallest_level_with_a_count() {
        let t = binary(10);
        let law = Distribution::new(vec![0.5, 1.0, 2.5], vec![0.2, 0.5, 0.3]).unwrap();
        let s = sample_passage_times(&t, &law, 11).unwrap();
        let b = first_passage_min(&s, 10).unwrap();
        let prof = level_profile(&s, 10, &[b, b - 0.01]).unwrap();
        assert!(prof.points[0].count >= 1);
        assert_eq!(prof.points[1].count, 0);
        assert_eq!(prof.b_n, b);
    }

    #[test]
    fn dead_branches_are_ignored() {
        let spec = TreeSpec::Explicit { parents: vec![-1, 0, 0, 1, 2], dead_ends: vec![4] };
        let t = build_truncation(&spec, 2).unwrap();
        let law = Distribution::uniform(&[1.0, 5.0]).unwrap();
        let s = sample_passage_times(&t, &law, 2).unwrap();
        let live = t.extendable_frontier().next().unwrap();
        assert_eq!(first_passage_min(&s, 2).unwrap(), s.passage_time(live) / 2.0);
    }

    #[test]
    fn report_for_constant_law() {
        let law = Distribution::point_mass(1.0).unwrap();
        let r = fpp_report(&TreeSpec::Homogeneous { b: 2 }, &law, 8, 3, &[1.0], 1).unwrap();
        assert_eq!(r.predicted_rate, 1.0);
        assert!(r.replicates.iter().all(|p| p.b_n == 1.0));
    }
}
