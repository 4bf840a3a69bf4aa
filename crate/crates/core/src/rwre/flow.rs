use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratecalc::{fractional_moment, Distribution};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowIteration {
    pub iteration: u32,
    /// Sample mean of `F` and its standard error.
    pub mean: f64,
    pub stderr: f64,
    /// Sample mean of `1 ∧ F`.
    pub mean_capped: f64,
    pub max: f64,
    /// `mean(F_t) - m E[A^x] · mean(1 ∧ F_{t-1})`.
    pub residual: f64,
    pub residual_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub x: f64,
    /// `m · E[A^x]`.
    pub mp: f64,
    pub samples: usize,
    pub iterations: Vec<FlowIteration>,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Population dynamics for `F = Σ_{|σ|=1} A_σ^x (1 ∧ F_σ)` started from
/// `F = ∞`: each iteration replaces the population by fresh draws built from
/// uniformly chosen members of the previous one, which after `t` steps
/// samples the max flow of the depth-`t` truncation with capacities `C^x`.
pub fn gw_flow_iterate(
    a_law: &Distribution,
    offspring: &Distribution,
    x: f64,
    iters: u32,
    samples: usize,
    seed: u64,
) -> Result<FlowReport> {
    a_law.require_positive_finite()?;
    offspring.require_counts()?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::arg(format!("x must lie in (0, 1], got {x}")));
    }
    if iters == 0 || samples < 2 {
        return Err(Error::arg("need at least one iteration and two samples"));
    }
    let powers: Vec<f64> = a_law.support().iter().map(|a| a.powf(x)).collect();
    let mp = offspring.mean() * fractional_moment(a_law, x)?;
    let mut population = vec![f64::INFINITY; samples];
    let mut iterations = Vec::with_capacity(iters as usize);
    let base = rng::root_key(seed, rng::stream::POPULATION);
    for t in 1..=iters {
        let tkey = rng::child_key(base, t as usize);
        let next: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|j| {
                let key = rng::child_key(tkey, j);
                let n = offspring.sample_with(rng::unit(rng::child_key(key, 0))) as usize;
                let mut f = 0.0;
                for i in 0..n {
                    let a = powers[a_law.index_for(rng::unit(rng::child_key(key, 2 * i + 1)))];
                    let pick = (rng::unit(rng::child_key(key, 2 * i + 2)) * samples as f64) as usize;
                    f += a * population[pick.min(samples - 1)].min(1.0);
                }
                f
            })
            .collect();
        let capped_old: Vec<f64> = population.iter().map(|f| f.min(1.0)).collect();
        let (old_mean, old_var) = mean_and_var(&capped_old);
        let (mean, var) = mean_and_var(&next);
        let s = samples as f64;
        let capped: f64 = next.iter().map(|f| f.min(1.0)).sum::<f64>() / s;
        iterations.push(FlowIteration {
            iteration: t,
            mean,
            stderr: (var / s).sqrt(),
            mean_capped: capped,
            max: next.iter().copied().fold(0.0, f64::max),
            residual: mean - mp * old_mean,
            residual_stderr: (var / s + mp * mp * old_var / s).sqrt(),
        });
        population = next;
    }
    Ok(FlowReport { x, mp, samples, iterations })
}
