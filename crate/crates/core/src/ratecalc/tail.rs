//! Exact n-fold convolution tails `P[S_n >= n a]`.

use super::Distribution;
use crate::error::{Error, Result};

/// Default cap on the number of grid cells or merged point masses.
pub const DEFAULT_TAIL_POINT_CAP: usize = 1 << 24;

const LATTICE_TOL: f64 = 1e-9;
const MAX_LATTICE_DENOMINATOR: usize = 1000;
const MERGE_TOL: f64 = 1e-12;

/// `P[S_n >= n a]` for `S_n` a sum of `n` i.i.d. copies of `X`.
pub fn exact_tail(x_law: &Distribution, n: usize, a: f64) -> Result<f64> {
    exact_tail_with_cap(x_law, n, a, DEFAULT_TAIL_POINT_CAP)
}

pub fn exact_tail_with_cap(x_law: &Distribution, n: usize, a: f64, cap: usize) -> Result<f64> {
    x_law.require_x_type()?;
    if n == 0 {
        return Err(Error::arg("exact_tail needs n >= 1"));
    }
    if a.is_nan() {
        return Err(Error::arg("exact_tail threshold is NaN"));
    }
    match lattice_step(x_law.support()) {
        Some(h) => lattice_tail(x_law, n, a, h, cap),
        None => point_mass_tail(x_law, n, a, cap),
    }
}

/// Span `h` such that every support point is `x0 + k h` for an integer `k`.
fn lattice_step(support: &[f64]) -> Option<f64> {
    let x0 = support[0];
    if support.len() == 1 {
        return Some(1.0);
    }
    let d1 = support[1] - x0;
    (1..=MAX_LATTICE_DENOMINATOR).map(|q| d1 / q as f64).find(|&h| {
        support.iter().all(|&v| {
            let k = (v - x0) / h;
            (k - k.round()).abs() <= LATTICE_TOL * k.abs().max(1.0)
        })
    })
}

fn lattice_tail(x_law: &Distribution, n: usize, a: f64, h: f64, cap: usize) -> Result<f64> {
    let x0 = x_law.ess_inf();
    let offsets: Vec<(usize, f64)> =
        x_law.atoms().map(|(v, w)| (((v - x0) / h).round() as usize, w)).collect();
    let width = offsets.last().map_or(0, |o| o.0);
    let cells = width
        .checked_mul(n)
        .and_then(|c| c.checked_add(1))
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::ResourceCap(format!("lattice convolution needs more than {cap} cells")))?;
    let mut current = vec![0.0; cells];
    current[0] = 1.0;
    let mut filled = 1;
    let mut next = vec![0.0; cells];
    for _ in 0..n {
        let reach = filled + width;
        next[..reach].iter_mut().for_each(|c| *c = 0.0);
        for (i, &p) in current[..filled].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(k, w) in &offsets {
                next[i + k] += p * w;
            }
        }
        std::mem::swap(&mut current, &mut next);
        filled = reach;
    }
    // S_n = n x0 + K h >= n a  <=>  K >= n (a - x0) / h
    let threshold = n as f64 * (a - x0) / h;
    let k_min = (threshold - LATTICE_TOL * threshold.abs().max(1.0)).ceil();
    if k_min <= 0.0 {
        return Ok(1.0);
    }
    if k_min >= filled as f64 {
        return Ok(0.0);
    }
    Ok(current[k_min as usize..filled].iter().rev().sum::<f64>().min(1.0))
}

fn point_mass_tail(x_law: &Distribution, n: usize, a: f64, cap: usize) -> Result<f64> {
    let mut current: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for _ in 0..n {
        let mut sums: Vec<(f64, f64)> = Vec::with_capacity(current.len() * x_law.len());
        for &(s, p) in &current {
            for (v, w) in x_law.atoms() {
                sums.push((s + v, p * w));
            }
        }
        sums.sort_by(|l, r| l.0.total_cmp(&r.0));
        current.clear();
        for (s, p) in sums {
            match current.last_mut() {
                Some(last) if s - last.0 <= MERGE_TOL * s.abs().max(1.0) => last.1 += p,
                _ => current.push((s, p)),
            }
        }
        if current.len() > cap {
            return Err(Error::ResourceCap(format!("convolution exceeds {cap} point masses")));
        }
    }
    let target = n as f64 * a;
    let slack = LATTICE_TOL * target.abs().max(1.0);
    Ok(current.iter().rev().take_while(|(s, _)| *s >= target - slack).map(|(_, p)| p).sum::<f64>().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_tail() {
        let x = Distribution::uniform(&[0.0, 1.0]).unwrap();
        assert!((exact_tail(&x, 4, 0.75).unwrap() - 5.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn single_step_is_the_law() {
        let x = Distribution::new(vec![-1.0, 0.5, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert!((exact_tail(&x, 1, 0.5).unwrap() - 0.8).abs() < 1e-15);
        assert!((exact_tail(&x, 1, 0.6).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(exact_tail(&x, 1, -2.0).unwrap(), 1.0);
    }

    #[test]
    fn constant_law() {
        let x = Distribution::point_mass(2.5).unwrap();
        assert_eq!(exact_tail(&x, 7, 2.5).unwrap(), 1.0);
        assert_eq!(exact_tail(&x, 7, 2.0).unwrap(), 1.0);
        assert_eq!(exact_tail(&x, 7, 2.6).unwrap(), 0.0);
    }

    #[test]
    fn non_lattice_matches_enumeration() {
        let x = Distribution::new(vec![0.0, 1.0, std::f64::consts::SQRT_2], vec![0.5, 0.25, 0.25]).unwrap();
        let mut brute = 0.0;
        let atoms: Vec<_> = x.atoms().collect();
        for a in &atoms {
            for b in &atoms {
                for c in &atoms {
                    if a.0 + b.0 + c.0 >= 3.0 * 0.8 {
                        brute += a.1 * b.1 * c.1;
                    }
                }
            }
        }
        assert!((exact_tail(&x, 3, 0.8).unwrap() - brute).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let x = Distribution::uniform(&[0.0, 1.0]).unwrap();
        assert!(matches!(exact_tail_with_cap(&x, 100, 0.5, 10), Err(Error::ResourceCap(_))));
    }
}
