//! Moment functionals and large-deviation rate calculus for finitely
//! supported laws.
//!
//! * `p = min_{0<=x<=1} E[A^x]` and its dual form
//!   `max_{0<y<=1} inf_{x>=0} y^(1-x) E[A^x]`;
//! * the lower-tail rate `m(y) = inf_{x<=0} E[exp(x (X - y))]` and its
//!   generalized inverse `m1(z) = sup{y : m(y) < z}`;
//! * the upper-tail exponent `gamma(a) = inf_{t>=0} (-a t + log E[exp(t X)])`;
//! * exact n-fold convolution tails `P[S_n >= n a]`.
//!
//! Infima over half-lines are frequently attained only in the limit; those
//! cases are detected from the slope at infinity and evaluated in closed form.

mod distribution;
mod optimize;
mod tail;

use serde::{Deserialize, Serialize};

pub use distribution::Distribution;
pub use tail::{exact_tail, exact_tail_with_cap, DEFAULT_TAIL_POINT_CAP};

pub(crate) use optimize::{golden_section_max, golden_section_min, minimize_convex_halfline};

use crate::error::{Error, Result};

const X_TOL: f64 = 1e-13;

/// `log sum_i exp(terms_i)`, returning `-inf` for an empty or all `-inf` input.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `log E[A^x]` with the conventions `0^0 = 0` and `inf^0 = 1`.
pub fn log_fractional_moment(a: &Distribution, x: f64) -> f64 {
    let mut terms = Vec::with_capacity(a.len());
    for (v, w) in a.atoms() {
        if v == 0.0 {
            if x < 0.0 {
                return f64::INFINITY;
            }
        } else if v.is_infinite() {
            if x > 0.0 {
                return f64::INFINITY;
            }
            if x == 0.0 {
                terms.push(w.ln());
            }
        } else {
            terms.push(w.ln() + x * v.ln());
        }
    }
    log_sum_exp(terms.iter().copied())
}

/// `E[A^x]` with the conventions `0^0 = 0` and `inf^0 = 1`.
pub fn fractional_moment(a: &Distribution, x: f64) -> Result<f64> {
    a.require_a_type()?;
    Ok(log_fractional_moment(a, x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub p: f64,
    pub argmin: f64,
}

fn require_positive_mass(a: &Distribution) -> Result<()> {
    a.require_a_type()?;
    if a.support().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidDistribution("P[A > 0] must be positive".into()));
    }
    Ok(())
}

/// `p = min_{0<=x<=1} E[A^x]` and a minimizer.
pub fn p_value(a: &Distribution) -> Result<PValue> {
    require_positive_mass(a)?;
    let (x, log_p) = golden_section_min(|x| log_fractional_moment(a, x), 0.0, 1.0, X_TOL);
    Ok(PValue { p: log_p.exp(), argmin: x })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualValue {
    pub value: f64,
    pub argmax: f64,
}

/// `log inf_{x>=0} y^(1-x) E[A^x]` for `t = log y`.
fn log_dual_inner(a: &Distribution, t: f64) -> f64 {
    let phi = |x: f64| (1.0 - x) * t + log_fractional_moment(a, x);
    let top = a.ess_sup();
    if top.is_infinite() {
        return phi(0.0);
    }
    let slope_at_infinity = top.ln() - t;
    if slope_at_infinity <= 0.0 {
        // nonincreasing in x: the infimum is the limit t + log P[A = max]
        return t + a.mass_at_max().ln();
    }
    minimize_convex_halfline(phi, X_TOL).1
}

/// The dual form `max_{0<y<=1} inf_{x>=0} y^(1-x) E[A^x]` by nested 1-D
/// optimization over `log y`.
pub fn dual_p(a: &Distribution) -> Result<DualValue> {
    require_positive_mass(a)?;
    let smallest_positive = a
        .support()
        .iter()
        .copied()
        .find(|&v| v > 0.0)
        .expect("positive atom exists");
    let top = a.ess_sup();
    let t_hi = if top.is_infinite() { 0.0 } else { top.ln().min(0.0) };
    let t_lo = (smallest_positive.ln().min(0.0) - 1.0).min(t_hi - 1.0);
    let (t, value) = golden_section_max(|t| log_dual_inner(a, t), t_lo, t_hi, X_TOL);
    Ok(DualValue { value: value.exp(), argmax: t.exp() })
}

/// Lower-tail rate `m(y) = inf_{x<=0} E[exp(x (X - y))]`.
pub fn rate_m(x_law: &Distribution, y: f64) -> Result<f64> {
    x_law.require_x_type()?;
    if y < x_law.ess_inf() {
        return Ok(0.0);
    }
    if y >= x_law.mean() {
        return Ok(1.0);
    }
    if y == x_law.ess_inf() {
        return Ok(x_law.mass_at_min());
    }
    // substitute x = -t, t >= 0; slope at infinity is y - ess inf > 0
    let psi = |t: f64| t * y + log_sum_exp(x_law.atoms().map(|(v, w)| w.ln() - t * v));
    let (_, log_m) = minimize_convex_halfline(psi, X_TOL);
    Ok(log_m.exp().min(1.0))
}

/// Upper-tail exponent `gamma(a) = inf_{t>=0} (-a t + log E[exp(t X)])`.
pub fn gamma(x_law: &Distribution, a: f64) -> Result<f64> {
    x_law.require_x_type()?;
    if a <= x_law.mean() {
        return Ok(0.0);
    }
    let top = x_law.ess_sup();
    if a > top {
        return Ok(f64::NEG_INFINITY);
    }
    if a == top {
        return Ok(x_law.mass_at_max().ln());
    }
    let f = |t: f64| -a * t + log_sum_exp(x_law.atoms().map(|(v, w)| w.ln() + t * v));
    let (_, g) = minimize_convex_halfline(f, X_TOL);
    Ok(g.min(0.0))
}

/// Generalized inverse `m1(z) = sup{y : m(y) < z}` for `z` in `(0, 1]`.
pub fn m_inverse(x_law: &Distribution, z: f64) -> Result<f64> {
    x_law.require_x_type()?;
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::arg(format!("m_inverse needs z in (0, 1], got {z}")));
    }
    let mut lo = x_law.ess_inf() - 1.0;
    if z == 1.0 {
        if rate_m(x_law, lo)? >= 1.0 {
            return Err(Error::Unsupported("m is identically 1 and z = 1".into()));
        }
        // m(y) < 1 exactly for y < E[X]
        return Ok(x_law.mean());
    }
    // m jumps from 0 to P[X = ess inf] at ess inf and is continuous above it
    if z <= x_law.mass_at_min() {
        return Ok(x_law.ess_inf());
    }
    lo = x_law.ess_inf();
    let mut hi = x_law.mean();
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rate_m(x_law, mid)? < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Tables of rate-function values requested together.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub p: Option<PValue>,
    pub dual: Option<DualValue>,
    pub m: Vec<(f64, f64)>,
    pub m_inverse: Vec<(f64, f64)>,
    pub gamma: Vec<(f64, f64)>,
}

impl RateSummary {
    /// `p` and its dual for an A-type law.
    pub fn for_ratio_law(a: &Distribution) -> Result<Self> {
        Ok(Self { p: Some(p_value(a)?), dual: Some(dual_p(a)?), ..Self::default() })
    }

    /// `m`, `m1` and `gamma` tables for an X-type law.
    pub fn for_increment_law(x: &Distribution, ys: &[f64], zs: &[f64], avals: &[f64]) -> Result<Self> {
        Ok(Self {
            m: ys.iter().map(|&y| Ok((y, rate_m(x, y)?))).collect::<Result<_>>()?,
            m_inverse: zs.iter().map(|&z| Ok((z, m_inverse(x, z)?))).collect::<Result<_>>()?,
            gamma: avals.iter().map(|&a| Ok((a, gamma(x, a)?))).collect::<Result<_>>()?,
            ..Self::default()
        })
    }
}
