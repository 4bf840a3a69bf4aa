//! Random environments as electrical and capacitated networks.
//!
//! Edge `e(σ)` joining `σ` to its parent has conductance
//! `C_σ = Π_{0<τ≤σ} A_τ`. Effective conductance to a grounded level is
//! computed with the normalized recursion `g(σ) = s / (1 + s)`,
//! `s = Σ_children A_τ g(τ)`, where `g(σ)` is the conductance of the branch
//! through `e(σ)` divided by `C_σ`. Every quantity stays in `[0, 1]` or is a
//! sum of `A` values, so products of `A` along deep paths are never formed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ratecalc::{log_sum_exp, Distribution};
use crate::rng;
use crate::trees::{build_truncation, Generator, ShapeNode, Tree, TreeSpec};

/// Per-edge ratios `A_σ` and cumulative conductances `C_σ` in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment<'t> {
    tree: &'t Tree,
    log_a: Vec<f64>,
    log_c: Vec<f64>,
    seed: Option<u64>,
}

/// Draws `A_σ` i.i.d. from `law`, keyed by `(seed, path to σ)`.
pub fn sample_environment<'t>(tree: &'t Tree, law: &Distribution, seed: u64) -> Result<Environment<'t>> {
    law.require_positive_finite()?;
    let keys = tree.path_keys(seed, rng::stream::ENVIRONMENT);
    let log_law: Vec<f64> = law.support().iter().map(|a| a.ln()).collect();
    let mut log_a = Vec::with_capacity(tree.len());
    log_a.push(0.0);
    log_a.extend(keys[1..].iter().map(|&k| log_law[law.index_for(rng::unit(k))]));
    let mut env = Environment::from_log_a(tree, log_a)?;
    env.seed = Some(seed);
    Ok(env)
}

impl<'t> Environment<'t> {
    /// Environment with given ratios; `a[0]` (the root) is ignored.
    pub fn from_values(tree: &'t Tree, a: &[f64]) -> Result<Self> {
        if let Some(x) = a.iter().skip(1).find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::arg(format!("ratio {x} is not in (0, inf)")));
        }
        let mut log_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
        if let Some(root) = log_a.first_mut() {
            *root = 0.0;
        }
        Self::from_log_a(tree, log_a)
    }

    pub fn from_log_a(tree: &'t Tree, log_a: Vec<f64>) -> Result<Self> {
        if log_a.len() != tree.len() {
            return Err(Error::arg(format!("{} ratios for {} vertices", log_a.len(), tree.len())));
        }
        let mut log_c = vec![0.0; tree.len()];
        for v in 1..tree.len() {
            let p = tree.parent(v as u32).expect("non-root vertex") as usize;
            log_c[v] = log_c[p] + log_a[v];
        }
        Ok(Self { tree, log_a, log_c, seed: None })
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn log_a(&self, v: u32) -> f64 {
        self.log_a[v as usize]
    }

    pub fn a(&self, v: u32) -> f64 {
        self.log_a[v as usize].exp()
    }

    pub fn log_c(&self, v: u32) -> f64 {
        self.log_c[v as usize]
    }

    pub fn c(&self, v: u32) -> f64 {
        self.log_c[v as usize].exp()
    }

    /// `Σ_{|σ|=k} C_σ`.
    pub fn level_conductance_sum(&self, k: u32) -> f64 {
        log_sum_exp(self.tree.level(k).map(|v| self.log_c[v as usize])).exp()
    }
}

/// Normalized branch conductances with every vertex at depth `ground`
/// grounded (or, when `frontier_only`, only the extendable ones).
fn normalized_branches(env: &Environment, ground: u32, frontier_only: bool) -> f64 {
    let tree = env.tree;
    let end = tree.level(ground).end as usize;
    let mut s = vec![0.0; end];
    for v in (1..end as u32).rev() {
        let g = if tree.depth(v) == ground {
            if !frontier_only || tree.is_extendable(v) { 1.0 } else { 0.0 }
        } else {
            let sv = s[v as usize];
            sv / (1.0 + sv)
        };
        let p = tree.parent(v).expect("non-root vertex") as usize;
        s[p] += env.a(v) * g;
    }
    s[0]
}

/// Conductance from the root to the extendable frontier.
pub fn effective_conductance(env: &Environment) -> f64 {
    if env.tree.truncation_depth() == 0 {
        return f64::INFINITY;
    }
    normalized_branches(env, env.tree.truncation_depth(), true)
}

/// Conductance from the root to the set of all vertices at depth `d`.
pub fn effective_conductance_to_level(env: &Environment, d: u32) -> Result<f64> {
    if d == 0 || d > env.tree.truncation_depth() {
        return Err(Error::arg(format!(
            "ground level {d} outside 1..={}",
            env.tree.truncation_depth()
        )));
    }
    Ok(normalized_branches(env, d, false))
}

/// Max flow from the root to the extendable frontier with capacity
/// `caps[σ]` on `e(σ)` (`caps[0]` is ignored).
pub fn max_flow(tree: &Tree, caps: &[f64]) -> Result<f64> {
    if caps.len() != tree.len() {
        return Err(Error::arg(format!("{} capacities for {} vertices", caps.len(), tree.len())));
    }
    if let Some(c) = caps.iter().skip(1).find(|c| !(**c >= 0.0)) {
        return Err(Error::arg(format!("capacity {c} is negative or NaN")));
    }
    let n = tree.truncation_depth();
    let mut sums = vec![0.0; tree.len()];
    for v in (1..tree.len() as u32).rev() {
        let cap = caps[v as usize];
        let flow = if tree.depth(v) == n {
            if tree.is_extendable(v) { cap } else { 0.0 }
        } else {
            cap.min(sums[v as usize])
        };
        sums[tree.parent(v).expect("non-root vertex") as usize] += flow;
    }
    Ok(sums[0])
}

/// Max flow with capacities given by their logarithms.
pub fn log_max_flow(tree: &Tree, log_caps: &[f64]) -> Result<f64> {
    if log_caps.len() != tree.len() {
        return Err(Error::arg(format!("{} capacities for {} vertices", log_caps.len(), tree.len())));
    }
    let n = tree.truncation_depth();
    let mut sums = vec![f64::NEG_INFINITY; tree.len()];
    for v in (1..tree.len() as u32).rev() {
        let cap = log_caps[v as usize];
        let flow = if tree.depth(v) == n {
            if tree.is_extendable(v) { cap } else { f64::NEG_INFINITY }
        } else {
            cap.min(sums[v as usize])
        };
        if flow > f64::NEG_INFINITY {
            let p = tree.parent(v).expect("non-root vertex") as usize;
            sums[p] = log_sum_exp([sums[p], flow].into_iter());
        }
    }
    Ok(sums[0])
}

/// `inf_Π Σ_{σ∈Π} w^|σ| C_σ`, as the max flow with those capacities.
pub fn weighted_cut_inf(env: &Environment, w: f64) -> Result<f64> {
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::arg(format!("w must lie in (0, 1], got {w}")));
    }
    let ln_w = w.ln();
    let tree = env.tree;
    let log_caps: Vec<f64> = (0..tree.len() as u32)
        .map(|v| tree.depth(v) as f64 * ln_w + env.log_c(v))
        .collect();
    Ok(log_max_flow(tree, &log_caps)?.exp())
}

const MAX_GROUND_LEVELS: usize = 8;

/// Effective conductance to the extendable frontier of the truncation of
/// `spec` at each depth in `depths`, for the environment with the given law
/// and seed. Deep truncations are never materialized: the tree is walked
/// depth first with `A` values regenerated from their path keys, so the
/// result equals `effective_conductance` on the materialized environment.
pub fn effective_conductance_spec(spec: &TreeSpec, law: &Distribution, seed: u64, depths: &[u32]) -> Result<Vec<f64>> {
    law.require_positive_finite()?;
    if depths.is_empty() || depths.len() > MAX_GROUND_LEVELS || depths.contains(&0) {
        return Err(Error::arg(format!("need 1..={MAX_GROUND_LEVELS} positive depths")));
    }
    if let (Some(sym), true) = (spec.symmetric(), law.is_constant()) {
        let a = law.support()[0];
        let live = sym.live as f64;
        return Ok(depths
            .iter()
            .map(|&n| {
                let mut g = 1.0;
                for _ in 1..n {
                    let s = live * a * g;
                    g = s / (1.0 + s);
                }
                live * a * g
            })
            .collect());
    }
    if let TreeSpec::GaltonWatson { .. } = spec {
        let deepest = *depths.iter().max().expect("nonempty");
        let tree = build_truncation(spec, deepest)?;
        return depths
            .iter()
            .map(|&d| {
                let t = tree.prefix(d)?;
                Ok(effective_conductance(&sample_environment(&t, law, seed)?))
            })
            .collect();
    }
    if let TreeSpec::Homogeneous { b } = spec {
        return Ok(homogeneous_conductance(*b, law, seed, depths));
    }
    let generator = Generator::new(spec)?;
    let walker = LazyConductance {
        generator: &generator,
        law,
        depths,
        deepest: *depths.iter().max().expect("nonempty"),
    };
    let root = generator.root();
    let key = rng::root_key(seed, rng::stream::ENVIRONMENT);
    let count = generator.child_count(&root)?;
    // top-level branches are independent; split them across workers
    let parts: Vec<[f64; MAX_GROUND_LEVELS]> = (0..count)
        .into_par_iter()
        .map(|i| {
            let child = generator.child(&root, i);
            let ck = rng::child_key(key, i);
            let mut g = [0.0; MAX_GROUND_LEVELS];
            walker.visit(&child, ck, &mut g)?;
            let a = law.sample_with(rng::unit(ck));
            Ok(g.map(|x| a * x))
        })
        .collect::<Result<_>>()?;
    Ok((0..depths.len()).map(|j| parts.iter().map(|p| p[j]).sum()).collect())
}

/// Inverse-CDF sampling on the 53 key bits behind `rng::unit`, with integer
/// thresholds chosen to pick the same atom as `Distribution::index_for`.
struct SmallLaw {
    /// `h >= thresholds[i]` iff `cumulative[i] <= unit * total`.
    thresholds: Vec<u64>,
    values: Vec<f64>,
}

const UNIT_BITS: u32 = 53;

impl SmallLaw {
    fn new(law: &Distribution) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = law
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let total = acc;
        let values = law.support().to_vec();
        let thresholds = cumulative[..values.len() - 1]
            .iter()
            .map(|&c| {
                // smallest h with c <= unit(h) * total; the map is monotone in h
                let (mut lo, mut hi) = (0u64, 1u64 << UNIT_BITS);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if c <= mid as f64 * (1.0 / (1u64 << UNIT_BITS) as f64) * total {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            })
            .collect();
        Self { thresholds, values }
    }

    #[inline(always)]
    fn sample(&self, key: u64) -> f64 {
        let h = key >> (64 - UNIT_BITS);
        let idx = self.thresholds.iter().filter(|&&t| h >= t).count();
        self.values[idx]
    }

    /// Child keys `child_key(parent, c)` in child-major order together with
    /// their sampled values.
    #[inline(always)]
    fn fill_level(&self, parents: &[u64], b: usize, keys: &mut Vec<u64>, out: &mut Vec<f64>, keep_keys: bool) {
        match self.thresholds.len() {
            0 => self.fill_fixed::<0>(parents, b, keys, out, keep_keys),
            1 => self.fill_fixed::<1>(parents, b, keys, out, keep_keys),
            2 => self.fill_fixed::<2>(parents, b, keys, out, keep_keys),
            3 => self.fill_fixed::<3>(parents, b, keys, out, keep_keys),
            _ => {
                keys.clear();
                out.clear();
                for c in 0..b {
                    for &k in parents {
                        let ck = rng::child_key(k, c);
                        keys.push(ck);
                        out.push(self.sample(ck));
                    }
                }
            }
        }
    }

    #[inline(always)]
    fn fill_fixed<const T: usize>(&self, parents: &[u64], b: usize, keys: &mut Vec<u64>, out: &mut Vec<f64>, keep_keys: bool) {
        let thr: [u64; T] = std::array::from_fn(|i| self.thresholds[i]);
        let vals: [f64; T] = std::array::from_fn(|i| self.values[i + 1]);
        let v0 = self.values[0];
        let n = parents.len();
        keys.clear();
        out.clear();
        out.resize(n * b, 0.0);
        if keep_keys {
            keys.resize(n * b, 0);
        }
        for c in 0..b {
            let gamma = rng::GOLDEN_GAMMA.wrapping_mul(c as u64 + 1);
            let dst = &mut out[c * n..(c + 1) * n];
            if keep_keys {
                let kdst = &mut keys[c * n..(c + 1) * n];
                for ((x, kd), &k) in dst.iter_mut().zip(kdst.iter_mut()).zip(parents) {
                    let ck = rng::mix64(k.wrapping_add(gamma));
                    *kd = ck;
                    *x = select(ck, v0, &thr, &vals);
                }
            } else {
                for (x, &k) in dst.iter_mut().zip(parents) {
                    *x = select(rng::mix64(k.wrapping_add(gamma)), v0, &thr, &vals);
                }
            }
        }
    }
}

/// `out[i] = A_i g_i` for the parents of a child-major level, where
/// `g = s / (1 + s)` and `s` is the sum over the children.
#[inline(always)]
fn reduce_level(b: usize, children: &[f64], a: &[f64], out: &mut Vec<f64>) {
    let parents = a.len();
    out.clear();
    if b == 2 {
        let (left, right) = children.split_at(parents);
        out.extend(left.iter().zip(&right[..parents]).zip(a).map(|((&x, &y), &al)| {
            let acc = x + y;
            al * (acc / (1.0 + acc))
        }));
    } else {
        out.extend_from_slice(&children[..parents]);
        for c in 1..b {
            for (acc, &x) in out.iter_mut().zip(&children[c * parents..(c + 1) * parents]) {
                *acc += x;
            }
        }
        for (acc, &al) in out.iter_mut().zip(a) {
            *acc = al * (*acc / (1.0 + *acc));
        }
    }
}

#[inline(always)]
fn select<const T: usize>(key: u64, v0: f64, thr: &[u64; T], vals: &[f64; T]) -> f64 {
    let h = key >> (64 - UNIT_BITS);
    let mut v = v0;
    for i in 0..T {
        v = if h >= thr[i] { vals[i] } else { v };
    }
    v
}

const BLOCK_VERTICES: usize = 1 << 10;

struct HomogeneousConductance<'a> {
    b: usize,
    law: &'a SmallLaw,
    depths: &'a [u32],
    deepest: u32,
    /// Height of the bottom block evaluated level by level.
    block: u32,
    wide: bool,
}

impl HomogeneousConductance<'_> {
    fn new<'a>(b: usize, law: &'a SmallLaw, depths: &'a [u32]) -> HomogeneousConductance<'a> {
        let deepest = *depths.iter().max().expect("nonempty");
        let mut block = 1;
        while block < deepest - 1 && b.pow(block + 1) <= BLOCK_VERTICES {
            block += 1;
        }
        #[cfg(target_arch = "x86_64")]
        let wide = std::arch::is_x86_feature_detected!("avx512f")
            && std::arch::is_x86_feature_detected!("avx512dq")
            && std::arch::is_x86_feature_detected!("avx512vl");
        #[cfg(not(target_arch = "x86_64"))]
        let wide = false;
        HomogeneousConductance { b, law, depths, deepest, block, wide }
    }

    fn g(&self, j: usize, depth: u32, s: f64) -> f64 {
        let d = self.depths[j];
        if depth == d {
            1.0
        } else if depth < d {
            s / (1.0 + s)
        } else {
            0.0
        }
    }

    /// Sum over the children of a vertex at `depth` of `A_τ g(τ)`, per
    /// ground level.
    fn child_sum(&self, key: u64, depth: u32, s: &mut [f64; MAX_GROUND_LEVELS], scratch: &mut Scratch) {
        if depth + self.block == self.deepest {
            self.bottom_block(key, depth, s, scratch);
            return;
        }
        *s = [0.0; MAX_GROUND_LEVELS];
        let mut inner = [0.0; MAX_GROUND_LEVELS];
        for i in 0..self.b {
            let ck = rng::child_key(key, i);
            let a = self.law.sample(ck);
            self.child_sum(ck, depth + 1, &mut inner, scratch);
            for j in 0..self.depths.len() {
                s[j] += a * self.g(j, depth + 1, inner[j]);
            }
        }
    }

    /// The last `block` levels, one level at a time so that independent key
    /// computations overlap. Within a level, child `c` of parent `i` sits at
    /// `c * parents + i`.
    fn bottom_block(&self, key: u64, depth: u32, s: &mut [f64; MAX_GROUND_LEVELS], scratch: &mut Scratch) {
        #[cfg(target_arch = "x86_64")]
        if self.wide {
            // SAFETY: `wide` is set only when the CPU reports these features.
            unsafe { self.bottom_block_wide(key, depth, s, scratch) };
            return;
        }
        self.bottom_block_kernel(key, depth, s, scratch);
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx512f,avx512dq,avx512vl")]
    unsafe fn bottom_block_wide(&self, key: u64, depth: u32, s: &mut [f64; MAX_GROUND_LEVELS], scratch: &mut Scratch) {
        self.bottom_block_kernel(key, depth, s, scratch);
    }

    #[inline(always)]
    fn bottom_block_kernel(&self, key: u64, depth: u32, s: &mut [f64; MAX_GROUND_LEVELS], scratch: &mut Scratch) {
        let b = self.b;
        let m = self.depths.len();
        let Scratch { keys, a, level, next } = scratch;
        keys[0].clear();
        keys[0].push(key);
        let block = self.block as usize;
        for l in 1..=block {
            let (prev, cur) = keys.split_at_mut(l);
            self.law.fill_level(&prev[l - 1], b, &mut cur[0], &mut a[l], l < block);
        }
        for j in 0..m {
            let d = self.depths[j];
            if depth >= d {
                // the whole block lies below this ground level
                s[j] = 0.0;
                continue;
            }
            // levels below the ground carry nothing; the ground level has g = 1
            let top = (d - depth) as usize;
            if top == 1 {
                s[j] = a[1].iter().sum();
                continue;
            }
            reduce_level(b, &a[top], &a[top - 1], level);
            for l in (1..top - 1).rev() {
                reduce_level(b, level, &a[l], next);
                std::mem::swap(level, next);
            }
            s[j] = level.iter().sum();
        }
    }
}

struct Scratch {
    keys: Vec<Vec<u64>>,
    a: Vec<Vec<f64>>,
    level: Vec<f64>,
    next: Vec<f64>,
}

impl Scratch {
    fn new(levels: usize) -> Self {
        Self {
            keys: vec![Vec::new(); levels + 1],
            a: vec![Vec::new(); levels + 1],
            level: Vec::new(),
            next: Vec::new(),
        }
    }
}

fn homogeneous_conductance(b: u32, law: &Distribution, seed: u64, depths: &[u32]) -> Vec<f64> {
    let small = SmallLaw::new(law);
    let walker = HomogeneousConductance::new(b as usize, &small, depths);
    let key = rng::root_key(seed, rng::stream::ENVIRONMENT);
    let parts: Vec<[f64; MAX_GROUND_LEVELS]> = (0..b as usize)
        .into_par_iter()
        .map(|i| {
            let ck = rng::child_key(key, i);
            let a = small.sample(ck);
            let mut inner = [0.0; MAX_GROUND_LEVELS];
            let mut out = [0.0; MAX_GROUND_LEVELS];
            if walker.deepest > 1 {
                let mut scratch = Scratch::new(walker.block as usize);
                walker.child_sum(ck, 1, &mut inner, &mut scratch);
            }
            for (j, &d) in depths.iter().enumerate() {
                out[j] = if d == 1 { a } else { a * inner[j] / (1.0 + inner[j]) };
            }
            out
        })
        .collect();
    (0..depths.len()).map(|j| parts.iter().map(|p| p[j]).sum()).collect()
}

struct LazyConductance<'a> {
    generator: &'a Generator,
    law: &'a Distribution,
    depths: &'a [u32],
    deepest: u32,
}

impl LazyConductance<'_> {
    /// Fills `g[j]`: normalized branch conductance of `node` for ground depth
    /// `depths[j]` (zero when the node lies below that depth).
    fn visit(&self, node: &ShapeNode, key: u64, g: &mut [f64; MAX_GROUND_LEVELS]) -> Result<()> {
        let m = self.depths.len();
        let mut s = [0.0; MAX_GROUND_LEVELS];
        if node.depth < self.deepest {
            let count = self.generator.child_count(node)?;
            if count == 0 && self.generator.extends(node)? {
                return Err(Error::InvalidTree(format!("open leaf at depth {} above the truncation", node.depth)));
            }
            let mut child_g = [0.0; MAX_GROUND_LEVELS];
            for i in 0..count {
                let child = self.generator.child(node, i);
                let ck = rng::child_key(key, i);
                self.visit(&child, ck, &mut child_g)?;
                let a = self.law.sample_with(rng::unit(ck));
                for j in 0..m {
                    s[j] += a * child_g[j];
                }
            }
        }
        for j in 0..m {
            let d = self.depths[j];
            g[j] = if node.depth == d {
                if self.generator.extends(node)? { 1.0 } else { 0.0 }
            } else if node.depth < d {
                s[j] / (1.0 + s[j])
            } else {
                0.0
            };
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::LeafRule;

    fn tree(spec: TreeSpec, n: u32) -> Tree {
        build_truncation(&spec, n).unwrap()
    }

    fn path(n: u32) -> Tree {
        tree(TreeSpec::Explicit { parents: (-1..n as i64).collect(), dead_ends: vec![] }, n)
    }

    #[test]
    fn constant_environment_products() {
        let t = path(3);
        let env = sample_environment(&t, &Distribution::point_mass(2.0).unwrap(), 1).unwrap();
        assert!((env.c(3) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_rejects_atoms_at_zero() {
        let t = tree(TreeSpec::Homogeneous { b: 2 }, 6);
        let law = Distribution::uniform(&[0.5, 2.0]).unwrap();
        assert_eq!(sample_environment(&t, &law, 3).unwrap(), sample_environment(&t, &law, 3).unwrap());
        assert_ne!(sample_environment(&t, &law, 3).unwrap(), sample_environment(&t, &law, 4).unwrap());
        let zero = Distribution::uniform(&[0.0, 2.0]).unwrap();
        assert!(sample_environment(&t, &zero, 3).is_err());
        let inf = Distribution::new(vec![1.0, f64::INFINITY], vec![0.5, 0.5]).unwrap();
        assert!(sample_environment(&t, &inf, 3).is_err());
    }

    #[test]
    fn series_and_parallel_examples() {
        for n in 1..8 {
            let t = path(n);
            let env = Environment::from_values(&t, &vec![1.0; t.len()]).unwrap();
            assert!((effective_conductance(&env) - 1.0 / n as f64).abs() < 1e-14);
        }
        let t = tree(TreeSpec::Homogeneous { b: 2 }, 2);
        let ones = Environment::from_values(&t, &[1.0; 7]).unwrap();
        assert!((effective_conductance(&ones) - 4.0 / 3.0).abs() < 1e-14);
        let halves = Environment::from_values(&t, &[0.5; 7]).unwrap();
        assert!((effective_conductance(&halves) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dead_ends_carry_no_current() {
        let spec = TreeSpec::Explicit { parents: vec![-1, 0, 0, 1], dead_ends: vec![2] };
        let t = tree(spec, 2);
        let env = Environment::from_values(&t, &[1.0; 4]).unwrap();
        assert!((effective_conductance(&env) - 0.5).abs() < 1e-14);
        // grounding the whole level 1 includes the dead end
        assert!((effective_conductance_to_level(&env, 1).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn max_flow_examples() {
        for n in 1..6 {
            let t = tree(TreeSpec::Homogeneous { b: 2 }, n);
            assert_eq!(max_flow(&t, &vec![1.0; t.len()]).unwrap(), 2.0);
            let caps: Vec<f64> = (0..t.len() as u32).map(|v| 0.5f64.powi(t.depth(v) as i32)).collect();
            assert_eq!(max_flow(&t, &caps).unwrap(), 1.0);
        }
        let t = tree(TreeSpec::SpineWithLeaves { leaves: LeafRule::default() }, 5);
        assert_eq!(max_flow(&t, &vec![1.0; t.len()]).unwrap(), 1.0);
        assert!(max_flow(&t, &vec![-1.0; t.len()]).is_err());
    }

    #[test]
    fn weighted_cut_examples() {
        for n in 1..10 {
            let t = tree(TreeSpec::Homogeneous { b: 2 }, n);
            let env = Environment::from_values(&t, &vec![1.0; t.len()]).unwrap();
            assert!((weighted_cut_inf(&env, 1.0).unwrap() - 2.0).abs() < 1e-12);
            assert!((weighted_cut_inf(&env, 0.5).unwrap() - 1.0).abs() < 1e-12);
            let expected = (2.0f64 / 3.0).powi(n as i32);
            assert!((weighted_cut_inf(&env, 1.0 / 3.0).unwrap() - expected).abs() < 1e-12 * expected.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn lazy_conductance_matches_materialized() {
        let law = Distribution::uniform(&[0.5, 0.75, 1.5]).unwrap();
        let specs = [
            TreeSpec::Homogeneous { b: 2 },
            TreeSpec::SpineWithLeaves { leaves: LeafRule::Constant { count: 2 } },
            TreeSpec::Explicit { parents: vec![-1, 0, 0, 1, 1, 2, 3, 5], dead_ends: vec![4] },
        ];
        for spec in &specs {
            let lazy = effective_conductance_spec(spec, &law, 9, &[2, 3]).unwrap();
            for (j, d) in [2, 3].into_iter().enumerate() {
                let t = tree(spec.clone(), d);
                let direct = effective_conductance(&sample_environment(&t, &law, 9).unwrap());
                assert!((lazy[j] - direct).abs() < 1e-13, "{spec:?} depth {d}: {} vs {direct}", lazy[j]);
            }
        }
    }

    #[test]
    fn homogeneous_fast_path_matches_materialized() {
        let law = Distribution::new(vec![0.3, 0.6, 1.1], vec![0.2, 0.5, 0.3]).unwrap();
        for (b, depths) in [(2u32, vec![5, 9, 14]), (3, vec![1, 4, 8])] {
            let spec = TreeSpec::Homogeneous { b };
            let lazy = effective_conductance_spec(&spec, &law, 21, &depths).unwrap();
            for (j, &d) in depths.iter().enumerate() {
                let t = tree(spec.clone(), d);
                let direct = effective_conductance(&sample_environment(&t, &law, 21).unwrap());
                assert!((lazy[j] - direct).abs() < 1e-13 * direct, "b={b} depth {d}: {} vs {direct}", lazy[j]);
            }
        }
    }

    #[test]
    fn closed_form_constant_environment() {
        let law = Distribution::point_mass(0.5).unwrap();
        let spec = TreeSpec::Homogeneous { b: 2 };
        let closed = effective_conductance_spec(&spec, &law, 0, &[2, 5]).unwrap();
        for (j, d) in [2, 5].into_iter().enumerate() {
            let t = tree(spec.clone(), d);
            let direct = effective_conductance(&sample_environment(&t, &law, 0).unwrap());
            assert!((closed[j] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn level_sums() {
        let t = tree(TreeSpec::Homogeneous { b: 2 }, 3);
        let env = Environment::from_values(&t, &vec![0.5; t.len()]).unwrap();
        assert!((env.level_conductance_sum(3) - 1.0).abs() < 1e-14);
    }
}
