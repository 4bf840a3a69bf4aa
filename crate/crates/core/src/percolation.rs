//! Bernoulli edge percolation on trees and the threshold percolations on the
//! contracted tree `Γᵏ` used to prove the phase transitions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpp::PassageSample;
use crate::networks::Environment;
use crate::ratecalc::Distribution;
use crate::rng;
use crate::trees::{build_truncation, contract_k, Contraction, Generator, ShapeNode, Tree, TreeSpec};

/// Relative slack per factor when comparing products with `y^k` or sums
/// with `k y`; ties are kept.
const TIE_TOL: f64 = 1e-12;

/// Enumeration budget for exact retention probabilities.
const ENUMERATION_CAP: usize = 1 << 24;

fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::arg(format!("retention probability {q} outside [0, 1]")))
    }
}

/// Probability that an open path joins the root to the extendable frontier
/// at depth `n` when each edge is kept independently with probability `q`.
pub fn survival_probability(spec: &TreeSpec, q: f64, n: u32) -> Result<f64> {
    check_q(q)?;
    match spec.symmetric() {
        Some(sym) => {
            let mut f = 1.0;
            for _ in 0..n {
                f = 1.0 - (1.0 - q * f).powi(sym.live as i32);
            }
            Ok(f)
        }
        None => survival_probability_tree(&build_truncation(spec, n)?, q),
    }
}

/// `f(σ) = 1 - Π_children (1 - q f(τ))`, `f = 1` on the extendable frontier
/// and `0` at dead ends.
pub fn survival_probability_tree(tree: &Tree, q: f64) -> Result<f64> {
    check_q(q)?;
    let n = tree.truncation_depth();
    // miss[v] = Π over processed children of (1 - q f(child))
    let mut miss = vec![1.0; tree.len()];
    for v in (0..tree.len() as u32).rev() {
        let f = if tree.depth(v) == n {
            if tree.is_extendable(v) { 1.0 } else { 0.0 }
        } else {
            1.0 - miss[v as usize]
        };
        match tree.parent(v) {
            Some(p) => miss[p as usize] *= 1.0 - q * f,
            None => return Ok(f),
        }
    }
    unreachable!("the root is processed last")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PercolationSample {
    /// `open[σ]`: edge `e(σ)` is kept (`true` for the root).
    pub open: Vec<bool>,
    /// Joined to the root by open edges.
    pub reached: Vec<bool>,
    pub survives: bool,
    pub max_depth_reached: u32,
}

/// Keeps each edge with probability `q`, keyed by `(seed, path)`.
pub fn percolate_sample(tree: &Tree, q: f64, seed: u64) -> Result<PercolationSample> {
    check_q(q)?;
    let keys = tree.path_keys(seed, rng::stream::PERCOLATION);
    let mut open: Vec<bool> = keys.iter().map(|&k| rng::unit(k) < q).collect();
    open[0] = true;
    Ok(connect(tree, open))
}

fn connect(tree: &Tree, open: Vec<bool>) -> PercolationSample {
    let mut reached = vec![false; tree.len()];
    reached[0] = true;
    let mut max_depth_reached = 0;
    for v in 1..tree.len() {
        let p = tree.parent(v as u32).expect("non-root vertex") as usize;
        reached[v] = reached[p] && open[v];
        if reached[v] {
            max_depth_reached = max_depth_reached.max(tree.depth(v as u32));
        }
    }
    let survives = tree.extendable_frontier().any(|v| reached[v as usize]);
    PercolationSample { open, reached, survives, max_depth_reached }
}

/// Survival to depth `n` of the percolation keyed by `seed`, explored depth
/// first without materializing the tree; stops at the first open path.
pub fn survives_lazy(spec: &TreeSpec, q: f64, n: u32, seed: u64) -> Result<bool> {
    check_q(q)?;
    let generator = Generator::new(spec)?;
    fn explore(g: &Generator, node: &ShapeNode, key: u64, q: f64, n: u32) -> Result<bool> {
        if node.depth == n {
            return g.extends(node);
        }
        let count = g.child_count(node)?;
        if count == 0 && g.extends(node)? {
            return Err(Error::InvalidTree(format!("open leaf at depth {} above the truncation", node.depth)));
        }
        for i in 0..count {
            let ck = rng::child_key(key, i);
            if rng::unit(ck) < q && explore(g, &g.child(node, i), ck, q, n)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    explore(&generator, &generator.root(), rng::root_key(seed, rng::stream::PERCOLATION), q, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Monte Carlo survival over `trials` derived seeds.
pub fn survival_monte_carlo(spec: &TreeSpec, q: f64, n: u32, trials: u64, seed: u64) -> Result<SurvivalEstimate> {
    if trials == 0 {
        return Err(Error::arg("need at least one trial"));
    }
    if let TreeSpec::GaltonWatson { .. } = spec {
        let tree = build_truncation(spec, n)?;
        let hits: u64 = (0..trials)
            .into_par_iter()
            .map(|t| Ok(u64::from(percolate_sample(&tree, q, rng::derive(seed, rng::stream::REPLICATE, t))?.survives)))
            .sum::<Result<u64>>()?;
        return Ok(estimate(hits, trials));
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| Ok(u64::from(survives_lazy(spec, q, n, rng::derive(seed, rng::stream::REPLICATE, t))?)))
        .sum::<Result<u64>>()?;
    Ok(estimate(hits, trials))
}

fn estimate(hits: u64, trials: u64) -> SurvivalEstimate {
    let p = hits as f64 / trials as f64;
    SurvivalEstimate { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials }
}

/// Open subgraph of `Γᵏ` from a deletion rule on k-step segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofPercolation {
    pub k: u32,
    /// Per contracted vertex: the Γᵏ edge into it is kept.
    pub open: Vec<bool>,
    pub reached: Vec<bool>,
    pub survives: bool,
    pub kept: u64,
    pub edges: u64,
    /// Empirical retention rate and its binomial standard error (segments
    /// are disjoint, so edges of Γᵏ are independent).
    pub q_hat: f64,
    pub stderr: f64,
}

fn proof_percolation(contraction: &Contraction, keep: impl Fn(&[u32]) -> bool, input: &Tree) -> ProofPercolation {
    let tree = &contraction.tree;
    let mut open = vec![true; tree.len()];
    let mut kept = 0u64;
    for v in 1..tree.len() as u32 {
        let segment = contraction.segment(input, v);
        open[v as usize] = keep(&segment);
        kept += u64::from(open[v as usize]);
    }
    let edges = tree.len() as u64 - 1;
    let sample = connect(tree, open);
    let q_hat = if edges == 0 { 0.0 } else { kept as f64 / edges as f64 };
    let stderr = if edges == 0 { 0.0 } else { (q_hat * (1.0 - q_hat) / edges as f64).sqrt() };
    ProofPercolation {
        k: contraction.k,
        open: sample.open,
        reached: sample.reached,
        survives: sample.survives,
        kept,
        edges,
        q_hat,
        stderr,
    }
}

/// Keeps the Γᵏ edge `σ → τ` iff `C_τ / C_σ ≥ y^k` and every `A_ρ ≥ eps` on
/// the segment `σ < ρ ≤ τ`.
pub fn proof_percolation_rwre(env: &Environment, k: u32, y: f64, eps: f64) -> Result<(Contraction, ProofPercolation)> {
    if !(y > 0.0 && y <= 1.0) || !(eps > 0.0) {
        return Err(Error::arg(format!("need y in (0, 1] and eps > 0, got y = {y}, eps = {eps}")));
    }
    let input = env.tree();
    let contraction = contract_k(input, k)?;
    let threshold = k as f64 * y.ln();
    let ln_eps = eps.ln();
    let slack = TIE_TOL * k as f64;
    let result = proof_percolation(
        &contraction,
        |seg| {
            let log_product: f64 = seg.iter().map(|&r| env.log_a(r)).sum();
            log_product >= threshold - slack * threshold.abs().max(1.0)
                && seg.iter().all(|&r| env.log_a(r) >= ln_eps - TIE_TOL * ln_eps.abs().max(1.0))
        },
        input,
    );
    Ok((contraction, result))
}

/// Keeps the Γᵏ edge iff `Σ X_ρ ≤ k y` and every `X_ρ ≤ M` on the segment.
pub fn proof_percolation_fpp(sample: &PassageSample, k: u32, y: f64, big_m: f64) -> Result<(Contraction, ProofPercolation)> {
    if !big_m.is_finite() || y.is_nan() {
        return Err(Error::arg("M must be finite and y a number"));
    }
    let input = sample.tree();
    let contraction = contract_k(input, k)?;
    let bound = k as f64 * y;
    let result = proof_percolation(
        &contraction,
        |seg| {
            let sum: f64 = seg.iter().map(|&r| sample.edge_time(r)).sum();
            sum <= bound + TIE_TOL * k as f64 * bound.abs().max(1.0)
                && seg.iter().all(|&r| sample.edge_time(r) <= big_m + TIE_TOL * big_m.abs().max(1.0))
        },
        input,
    );
    Ok((contraction, result))
}

/// Sum over all `support^k` outcomes of i.i.d. draws of `weight` where
/// `accept` holds.
fn enumerate(law: &Distribution, k: u32, accept: impl Fn(&[f64]) -> bool) -> Result<f64> {
    let size = law.len();
    let total = size
        .checked_pow(k)
        .filter(|&t| t <= ENUMERATION_CAP)
        .ok_or_else(|| Error::ResourceCap(format!("{size}^{k} outcomes exceed the enumeration cap")))?;
    let support = law.support();
    let weights = law.weights();
    let mut values = vec![0.0; k as usize];
    let mut prob = 0.0;
    for code in 0..total {
        let mut c = code;
        let mut w = 1.0;
        for slot in values.iter_mut() {
            let i = c % size;
            c /= size;
            *slot = support[i];
            w *= weights[i];
        }
        if accept(&values) {
            prob += w;
        }
    }
    Ok(prob)
}

/// `P[A_1 ⋯ A_k ≥ y^k and all A_i ≥ eps]`, enumerated exactly.
pub fn retention_probability_rwre(law: &Distribution, k: u32, y: f64, eps: f64) -> Result<f64> {
    law.require_positive_finite()?;
    let threshold = k as f64 * y.ln();
    let ln_eps = eps.ln();
    let slack = TIE_TOL * k as f64;
    enumerate(law, k, |a| {
        let log_product: f64 = a.iter().map(|x| x.ln()).sum();
        log_product >= threshold - slack * threshold.abs().max(1.0)
            && a.iter().all(|x| x.ln() >= ln_eps - TIE_TOL * ln_eps.abs().max(1.0))
    })
}

/// `P[X_1 + ⋯ + X_k ≤ k y and all X_i ≤ M]`, enumerated exactly.
pub fn retention_probability_fpp(law: &Distribution, k: u32, y: f64, big_m: f64) -> Result<f64> {
    law.require_x_type()?;
    let bound = k as f64 * y;
    enumerate(law, k, |x| {
        x.iter().sum::<f64>() <= bound + TIE_TOL * k as f64 * bound.abs().max(1.0)
            && x.iter().all(|&v| v <= big_m + TIE_TOL * big_m.abs().max(1.0))
    })
}
