//! Regime classification for random walks in random environments, plus walk
//! simulation and the Galton-Watson flow fixed point.

mod flow;
mod walk;

use serde::{Deserialize, Serialize};

pub use flow::{gw_flow_iterate, FlowIteration, FlowReport};
pub use walk::{escape_probability, simulate_walk, transition_probs, EscapeEstimate, WalkSummary, Walker};

use crate::branching::{branching_number, cutset_min, cutset_min_spec, BranchingEstimate, DECAY_THRESHOLD};
use crate::error::{Error, Result};
use crate::ratecalc::{p_value, Distribution};
use crate::trees::{build_truncation, TreeSpec};

/// Default tolerance on `p·br = 1` when the branching number is exact.
pub const EXACT_BOUNDARY_TOL: f64 = 1e-9;

/// Bisection tolerance used for branching-number estimates.
const BRANCHING_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Transient,
    Recurrent,
    PositiveRecurrent,
    Boundary,
    Inconclusive,
}

pub mod criterion {
    pub const TRANSIENT: &str = "p·br > 1";
    pub const CUTSET: &str = "cutset infimum 0";
    pub const SUM_FINITE: &str = "level sums finite";
    pub const BOUNDED_CUTSETS: &str = "bounded cutsets";
    pub const GALTON_WATSON: &str = "Galton-Watson pm vs 1";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub regime: Regime,
    /// Criterion that produced the verdict (or, for `Boundary`, the clause
    /// that settles the boundary case when one applies).
    pub criterion: Option<String>,
    /// Verdict implied on the boundary by the named criterion.
    pub boundary_resolution: Option<Regime>,
    pub p: f64,
    pub p_argmin: f64,
    pub branching: BranchingEstimate,
    /// `p · br`, using the exact branching number when known.
    pub product: f64,
    pub tol: f64,
    pub depth: u32,
    /// `Σ_{|σ|≤k} p^|σ|` for `k = 0..=depth`.
    pub partial_sums: Vec<f64>,
    /// `Σ p^|σ|` over level-`k` vertices with an extendable descendant,
    /// `k = 0..=depth`.
    pub level_cut_sums: Vec<f64>,
    /// Minimum cutset sum of `p^|σ|` at depth `depth/2` and `depth`.
    pub cutset_min_half: f64,
    pub cutset_min_full: f64,
}

/// Level sizes and live (extendable-lineage) level sizes up to `depth`.
fn level_profile(spec: &TreeSpec, depth: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(sym) = spec.symmetric() {
        let all = sym.level_sizes(depth)?;
        let live = (0..=depth).map(|k| (sym.live as f64).powi(k as i32)).collect();
        return Ok((all, live));
    }
    let tree = build_truncation(spec, depth)?;
    let lineage = tree.lineage();
    let all = tree.level_sizes().into_iter().map(|m| m as f64).collect();
    let live = (0..=depth)
        .map(|k| tree.level(k).filter(|&v| lineage[v as usize]).count() as f64)
        .collect();
    Ok((all, live))
}

/// Geometric growth rate of a positive sequence between `n/2` and `n`.
fn tail_ratio(terms: &[f64]) -> f64 {
    let n = terms.len() - 1;
    let h = n / 2;
    let gap = (n - h) as f64;
    if terms[n] == 0.0 {
        return 0.0;
    }
    (terms[n] / terms[h]).powf(1.0 / gap)
}

/// Regime of the RWRE with ratio law `a_law` on the tree of `spec`, using
/// the truncation at `depth` for all structural evidence.
pub fn classify(a_law: &Distribution, spec: &TreeSpec, depth: u32, tol: Option<f64>) -> Result<ClassificationReport> {
    a_law.require_positive_finite()?;
    if depth < 4 {
        return Err(Error::arg("classification needs depth >= 4"));
    }
    let pv = p_value(a_law)?;
    let p = pv.p;
    let (all, live) = level_profile(spec, depth)?;
    let mut partial_sums = Vec::with_capacity(all.len());
    let mut acc = 0.0;
    for (k, m) in all.iter().enumerate() {
        acc += m * p.powi(k as i32);
        partial_sums.push(acc);
    }
    let level_cut_sums: Vec<f64> = live.iter().enumerate().map(|(k, m)| m * p.powi(k as i32)).collect();
    let (cutset_min_half, cutset_min_full) = match spec.symmetric() {
        Some(_) => (
            cutset_min_spec(spec, 1.0 / p, depth / 2)?.value,
            cutset_min_spec(spec, 1.0 / p, depth)?.value,
        ),
        None => {
            let tree = build_truncation(spec, depth)?;
            (cutset_min(&tree.prefix(depth / 2)?, 1.0 / p)?.value, cutset_min(&tree, 1.0 / p)?.value)
        }
    };

    let exact = spec.exact_branching_number();
    let branching = match exact {
        Some(b) => BranchingEstimate { lo: b, hi: b, point: b, depth, inconclusive: false, exact: Some(b) },
        None => branching_number(spec, depth, BRANCHING_TOL)?,
    };
    let tol = tol.unwrap_or(if exact.is_some() { EXACT_BOUNDARY_TOL } else { branching.width() });
    let product = p * branching.point;

    let mut report = ClassificationReport {
        regime: Regime::Inconclusive,
        criterion: None,
        boundary_resolution: None,
        p,
        p_argmin: pv.argmin,
        branching,
        product,
        tol,
        depth,
        partial_sums,
        level_cut_sums,
        cutset_min_half,
        cutset_min_full,
    };
    let verdict = |r: &mut ClassificationReport, regime, crit: &str| {
        r.regime = regime;
        r.criterion = Some(crit.to_string());
    };

    if let TreeSpec::GaltonWatson { offspring, .. } = spec {
        let m = offspring.mean();
        if m <= 1.0 {
            return Err(Error::Unsupported(format!("Galton-Watson mean {m} <= 1 dies out")));
        }
        let regime = if product > 1.0 + tol {
            Regime::Transient
        } else if product < 1.0 - tol {
            Regime::PositiveRecurrent
        } else {
            Regime::Recurrent
        };
        verdict(&mut report, regime, criterion::GALTON_WATSON);
        return Ok(report);
    }

    // Σ p^|σ| < ∞: exact for level-symmetric specs, tail ratio otherwise
    let sum_finite = match spec.symmetric() {
        Some(sym) => {
            let top = all[depth as usize].powf(1.0 / depth as f64);
            p * top.max(sym.live as f64) < 1.0 - tol
        }
        None => {
            let terms: Vec<f64> = all.iter().enumerate().map(|(k, m)| m * p.powi(k as i32)).collect();
            tail_ratio(&terms) < 1.0 - tol
        }
    };
    if sum_finite {
        verdict(&mut report, Regime::PositiveRecurrent, criterion::SUM_FINITE);
        return Ok(report);
    }

    let cutset_decays = cutset_min_full < DECAY_THRESHOLD * cutset_min_half;
    let bounded_cuts = tail_ratio(&report.level_cut_sums) <= 1.0 + tol;
    if let Some(b) = exact {
        let pb = p * b;
        if pb > 1.0 + tol {
            verdict(&mut report, Regime::Transient, criterion::TRANSIENT);
        } else if pb < 1.0 - tol {
            verdict(&mut report, Regime::Recurrent, criterion::CUTSET);
        } else {
            report.regime = Regime::Boundary;
            if bounded_cuts {
                report.criterion = Some(criterion::BOUNDED_CUTSETS.to_string());
                report.boundary_resolution = Some(Regime::Recurrent);
            }
        }
        return Ok(report);
    }

    let transient = !report.branching.inconclusive && p * report.branching.lo > 1.0;
    if cutset_decays && transient {
        return Ok(report);
    }
    if cutset_decays {
        verdict(&mut report, Regime::Recurrent, criterion::CUTSET);
    } else if transient {
        verdict(&mut report, Regime::Transient, criterion::TRANSIENT);
    } else if bounded_cuts {
        verdict(&mut report, Regime::Recurrent, criterion::BOUNDED_CUTSETS);
    } else if !report.branching.inconclusive && (product - 1.0).abs() <= p * report.branching.width() {
        report.regime = Regime::Boundary;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::LeafRule;

    fn law(points: &[f64]) -> Distribution {
        Distribution::uniform(points).unwrap()
    }

    #[test]
    fn binary_examples() {
        let spec = TreeSpec::Homogeneous { b: 2 };
        let r = classify(&law(&[0.5, 0.75]), &spec, 20, None).unwrap();
        assert_eq!(r.regime, Regime::Transient);
        assert!((r.p - 0.625).abs() < 1e-10);
        assert!((r.product - 1.25).abs() < 1e-9);
        assert_eq!(r.criterion.as_deref(), Some(criterion::TRANSIENT));

        let r = classify(&law(&[1.0 / 3.0]), &spec, 20, None).unwrap();
        assert_eq!(r.regime, Regime::PositiveRecurrent);

        let r = classify(&law(&[0.5]), &spec, 20, None).unwrap();
        assert_eq!(r.regime, Regime::Boundary);
        assert_eq!(r.boundary_resolution, Some(Regime::Recurrent));
    }

    #[test]
    fn spine_is_recurrent_by_cutsets() {
        let spec = TreeSpec::SpineWithLeaves { leaves: LeafRule::default() };
        let r = classify(&law(&[0.25, 2.0]), &spec, 40, None).unwrap();
        assert_eq!(r.regime, Regime::Recurrent);
        assert_eq!(r.criterion.as_deref(), Some(criterion::CUTSET));
        assert!((r.p - 0.944_940_787_421_153_5).abs() < 1e-6);
        assert!(r.partial_sums.windows(2).all(|w| w[1] > w[0]));
        assert!(*r.partial_sums.last().unwrap() > 1e3);
        assert!(r.cutset_min_full < 0.5 * r.cutset_min_half);
    }

    #[test]
    fn galton_watson_uses_mean() {
        let offspring = Distribution::uniform(&[1.0, 2.0]).unwrap();
        let spec = TreeSpec::GaltonWatson { offspring, seed: 3, conditioned: true };
        assert_eq!(classify(&law(&[0.8]), &spec, 12, None).unwrap().regime, Regime::Transient);
        assert_eq!(classify(&law(&[0.5]), &spec, 12, None).unwrap().regime, Regime::PositiveRecurrent);
        let critical = classify(&law(&[2.0 / 3.0]), &spec, 12, Some(1e-6)).unwrap();
        assert_eq!(critical.regime, Regime::Recurrent);
        let subcritical = TreeSpec::GaltonWatson { offspring: law(&[0.0, 1.0]), seed: 3, conditioned: false };
        assert!(matches!(classify(&law(&[0.5]), &subcritical, 12, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn explicit_path_is_recurrent() {
        let spec = TreeSpec::Explicit { parents: (-1..40).collect(), dead_ends: vec![] };
        let r = classify(&law(&[0.5, 1.5]), &spec, 40, None).unwrap();
        assert!(matches!(r.regime, Regime::Recurrent | Regime::Boundary), "{r:?}");
        assert!(r.branching.contains(1.0) || r.branching.lo < 1.05);
    }

    #[test]
    fn rejects_atoms_at_zero() {
        let a = law(&[0.0, 1.0]);
        assert!(classify(&a, &TreeSpec::Homogeneous { b: 2 }, 10, None).is_err());
    }
}
