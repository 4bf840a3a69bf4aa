//! Independent oracles: dense grids, exhaustive enumeration, closed forms.
//! Nothing here calls into the optimizers or recursions under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treelab::trees::{build_truncation, Tree, TreeSpec};
use treelab::Distribution;

pub const GRID_STEP: f64 = 1e-4;

fn moment(law: &Distribution, x: f64) -> f64 {
    law.atoms()
        .map(|(a, w)| {
            if a == 0.0 {
                0.0
            } else if a.is_infinite() {
                if x == 0.0 { w } else { f64::INFINITY }
            } else {
                w * a.powf(x)
            }
        })
        .sum()
}

/// `min_{x in [0,1]} E[A^x]` on the grid `x = i·1e-4`.
pub fn grid_p(law: &Distribution) -> f64 {
    (0..=10_000).map(|i| moment(law, i as f64 * GRID_STEP)).fold(f64::INFINITY, f64::min)
}

/// `E[exp(-θ (X - y))]` minimized over `θ = i·1e-4 ∈ [0, theta_max]`.
pub fn grid_m(law: &Distribution, y: f64, theta_max: f64) -> f64 {
    let steps = (theta_max / GRID_STEP) as usize;
    (0..=steps)
        .map(|i| {
            let t = i as f64 * GRID_STEP;
            law.atoms().map(|(x, w)| w * (-t * (x - y)).exp()).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min_{t in [0, t_max]} (-a t + log E[e^{tX}])` on the grid.
pub fn grid_gamma(law: &Distribution, a: f64, t_max: f64) -> f64 {
    let steps = (t_max / GRID_STEP) as usize;
    (0..=steps)
        .map(|i| {
            let t = i as f64 * GRID_STEP;
            -a * t + law.atoms().map(|(x, w)| w * (t * x).exp()).sum::<f64>().ln()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Generalized inverse of the lower-tail rate, traced along the exponential
/// tilt: at tilt `θ` the tilted mean `y(θ)` has `m(y(θ)) = e^{θ y} E[e^{-θX}]`.
/// Scans `θ = i·1e-4` until `m` drops below `z` and interpolates.
pub fn grid_m_inverse(law: &Distribution, z: f64, theta_max: f64) -> f64 {
    let point = |t: f64| {
        let (mut s0, mut s1) = (0.0, 0.0);
        for (x, w) in law.atoms() {
            let e = w * (-t * (x - law.ess_inf())).exp();
            s0 += e;
            s1 += e * x;
        }
        let y = s1 / s0;
        let m = s0 * (t * (y - law.ess_inf())).exp();
        (y, m)
    };
    let steps = (theta_max / GRID_STEP) as usize;
    let mut prev = point(0.0);
    if prev.1 < z {
        return prev.0;
    }
    for i in 1..=steps {
        let cur = point(i as f64 * GRID_STEP);
        if cur.1 < z {
            let f = (prev.1 - z) / (prev.1 - cur.1);
            return prev.0 + f * (cur.0 - prev.0);
        }
        prev = cur;
    }
    if law.mass_at_min() >= z {
        law.ess_inf()
    } else {
        prev.0
    }
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `P[Binomial(n, 1/2) >= k]`.
pub fn binomial_half_tail(n: u64, k: u64) -> f64 {
    (k..=n).map(|j| (ln_choose(n, j) - n as f64 * std::f64::consts::LN_2).exp()).sum()
}

/// `P[Binomial(n, 1/2) <= k]`.
pub fn binomial_half_cdf(n: u64, k: u64) -> f64 {
    (0..=k.min(n)).map(|j| (ln_choose(n, j) - n as f64 * std::f64::consts::LN_2).exp()).sum()
}

/// `-KL(Bernoulli(a) || Bernoulli(1/2))`.
pub fn bernoulli_half_entropy_rate(a: f64) -> f64 {
    let h = |p: f64| if p == 0.0 { 0.0 } else { p * (2.0 * p).ln() };
    -(h(a) + h(1.0 - a))
}

/// Minimum of `Σ caps` over every vertex set that meets each root path to
/// the extendable frontier, by enumerating all subsets of non-root vertices.
pub fn brute_force_cutset_min(tree: &Tree, caps: &[f64]) -> f64 {
    let n = tree.len();
    assert!(n <= 16, "enumeration is exponential");
    let frontier: Vec<u32> = tree.extendable_frontier().collect();
    let paths: Vec<u32> = frontier
        .iter()
        .map(|&f| {
            let mut mask = 0u32;
            let mut v = f;
            while let Some(p) = tree.parent(v) {
                mask |= 1 << v;
                v = p;
            }
            mask
        })
        .collect();
    let mut best = f64::INFINITY;
    for subset in 0u32..(1 << n) {
        if subset & 1 != 0 {
            continue;
        }
        if paths.iter().all(|&p| p & subset != 0) {
            let total: f64 = (1..n).filter(|&v| subset & (1 << v) != 0).map(|v| caps[v]).sum();
            best = best.min(total);
        }
    }
    best
}

/// Random rooted tree on `n` vertices with leaves above the maximal depth
/// marked as dead ends.
pub fn random_small_tree(rng: &mut ChaCha8Rng, n: usize) -> (TreeSpec, Tree) {
    let mut parents = vec![-1i64];
    let mut depth = vec![0u32];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        parents.push(p as i64);
        depth.push(depth[p] + 1);
    }
    let max_depth = *depth.iter().max().unwrap();
    let mut has_child = vec![false; n];
    for &p in &parents[1..] {
        has_child[p as usize] = true;
    }
    let dead_ends: Vec<u32> = (0..n as u32)
        .filter(|&v| !has_child[v as usize] && (depth[v as usize] < max_depth || rng.gen_bool(0.2)))
        .collect();
    let spec = TreeSpec::Explicit { parents, dead_ends };
    let tree = build_truncation(&spec, max_depth).expect("valid random tree");
    (spec, tree)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random law with `size` atoms drawn log-uniformly from `[lo, hi]`.
pub fn random_law(rng: &mut ChaCha8Rng, size: usize, lo: f64, hi: f64) -> Distribution {
    let mut support: Vec<f64> = Vec::new();
    while support.len() < size {
        let v = (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp();
        if !support.contains(&v) {
            support.push(v);
        }
    }
    let raw: Vec<f64> = (0..size).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let rest: f64 = weights[1..].iter().sum();
    weights[0] = 1.0 - rest;
    Distribution::new(support, weights).expect("valid random law")
}

pub fn law(support: &[f64], weights: &[f64]) -> Distribution {
    Distribution::new(support.to_vec(), weights.to_vec()).unwrap()
}

pub fn uniform(support: &[f64]) -> Distribution {
    Distribution::uniform(support).unwrap()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Effective conductance from the root to the grounded extendable frontier,
/// by solving Kirchhoff's equations with Gaussian elimination. `cond[v]` is
/// the conductance of the edge from `v` to its parent.
pub fn kirchhoff_conductance(tree: &Tree, cond: &[f64]) -> f64 {
    let n = tree.len();
    let grounded: Vec<bool> = (0..n as u32)
        .map(|v| tree.depth(v) == tree.truncation_depth() && tree.is_extendable(v))
        .collect();
    // unknown voltages for every vertex other than the root and the ground
    let free: Vec<usize> = (1..n).filter(|&v| !grounded[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let m = free.len();
    let mut mat = vec![vec![0.0; m + 1]; m];
    let couple = |row: usize, other: usize, c: f64, mat: &mut Vec<Vec<f64>>| {
        mat[row][row] += c;
        if other == 0 {
            mat[row][m] += c;
        } else if !grounded[other] {
            mat[row][index[other]] -= c;
        }
    };
    for v in 1..n {
        let p = tree.parent(v as u32).unwrap() as usize;
        if !grounded[v] {
            couple(index[v], p, cond[v], &mut mat);
        }
        if p != 0 && !grounded[p] {
            couple(index[p], v, cond[v], &mut mat);
        }
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs())).unwrap();
        mat.swap(col, pivot);
        let d = mat[col][col];
        if d == 0.0 {
            continue;
        }
        for row in 0..m {
            if row != col && mat[row][col] != 0.0 {
                let f = mat[row][col] / d;
                for k in col..=m {
                    mat[row][k] -= f * mat[col][k];
                }
            }
        }
    }
    let voltage = |v: usize| {
        if grounded[v] {
            0.0
        } else if mat[index[v]][index[v]] == 0.0 {
            1.0
        } else {
            mat[index[v]][m] / mat[index[v]][index[v]]
        }
    };
    tree.children(0).map(|c| cond[c as usize] * (1.0 - voltage(c as usize))).sum()
}

/// Upper quantile of the chi-square law with `df` degrees of freedom at the
/// normal quantile `z` (Wilson-Hilferty).
pub fn chi_square_critical(df: f64, z: f64) -> f64 {
    let c = 2.0 / (9.0 * df);
    df * (1.0 - c + z * c.sqrt()).powi(3)
}

/// Normal quantile for an upper tail of 0.001.
pub const Z_0_001: f64 = 3.090232;
