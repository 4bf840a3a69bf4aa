use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely supported law on the extended reals.
///
/// A-type laws (transition ratios) live on `[0, +inf]`; X-type laws (passage
/// times, increments) are finite reals. Support points are kept sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct Distribution {
    support: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl Distribution {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not positive")));
        }
        if let Some(x) = support.iter().find(|x| x.is_nan() || **x == f64::NEG_INFINITY) {
            return Err(Error::InvalidDistribution(format!("support point {x} not allowed")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        let mut pairs: Vec<(f64, f64)> = support.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("support points must be distinct".into()));
        }
        let (support, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self { support, weights, cumulative })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    /// Equal weights on the given points.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        Self::new(points.to_vec(), vec![w; points.len()])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    /// Support inside `[0, +inf]`.
    pub fn is_a_type(&self) -> bool {
        self.support.iter().all(|&x| x >= 0.0)
    }

    /// Finite support.
    pub fn is_x_type(&self) -> bool {
        self.support.iter().all(|x| x.is_finite())
    }

    pub fn require_a_type(&self) -> Result<()> {
        if self.is_a_type() {
            Ok(())
        } else {
            Err(Error::InvalidDistribution("expected a law on [0, inf]".into()))
        }
    }

    pub fn require_x_type(&self) -> Result<()> {
        if self.is_x_type() {
            Ok(())
        } else {
            Err(Error::InvalidDistribution("expected a law on finite reals".into()))
        }
    }

    /// Law with every atom strictly inside `(0, inf)`.
    pub fn require_positive_finite(&self) -> Result<()> {
        self.require_a_type()?;
        if self.support.iter().any(|&a| a == 0.0 || a.is_infinite()) {
            return Err(Error::InvalidDistribution(
                "law must satisfy 0 < A < inf almost surely (no atoms at 0 or inf)".into(),
            ));
        }
        Ok(())
    }

    /// Support consists of nonnegative integers (offspring laws).
    pub fn require_counts(&self) -> Result<()> {
        if self
            .support
            .iter()
            .all(|&x| x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64)
        {
            Ok(())
        } else {
            Err(Error::InvalidDistribution("offspring law must live on nonnegative integers".into()))
        }
    }

    pub fn ess_inf(&self) -> f64 {
        self.support[0]
    }

    pub fn ess_sup(&self) -> f64 {
        self.support[self.support.len() - 1]
    }

    /// Weight of the smallest atom.
    pub fn mass_at_min(&self) -> f64 {
        self.weights[0]
    }

    /// Weight of the largest atom.
    pub fn mass_at_max(&self) -> f64 {
        self.weights[self.weights.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(x, w)| x * w).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.support.len() == 1
    }

    /// Mirror image through zero: the law of `-X`.
    pub fn reflect(&self) -> Result<Self> {
        Self::new(self.support.iter().map(|x| -x).collect(), self.weights.clone())
    }

    /// Law of `f(X)`; atoms mapped to the same value are merged.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = self.atoms().map(|(x, w)| (f(x), w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        let (s, w) = merged.into_iter().unzip();
        Self::new(s, w)
    }

    /// Index of the atom selected by a uniform draw `u` in `[0, 1)`.
    #[inline]
    pub fn index_for(&self, u: f64) -> usize {
        let target = u * self.cumulative[self.cumulative.len() - 1];
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.support.len() - 1)
    }

    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        self.support[self.index_for(u)]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SupportPoint {
    Number(f64),
    Token(String),
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    support: Vec<SupportPoint>,
    weights: Vec<f64>,
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let support = raw
            .support
            .into_iter()
            .map(|p| match p {
                SupportPoint::Number(x) => Ok(x),
                SupportPoint::Token(t) => match t.trim().to_ascii_lowercase().as_str() {
                    "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
                    other => Err(Error::InvalidDistribution(format!("unknown support token {other:?}"))),
                },
            })
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(support, raw.weights)
    }
}

impl From<Distribution> for RawDistribution {
    fn from(d: Distribution) -> Self {
        let support = d
            .support
            .iter()
            .map(|&x| {
                if x.is_infinite() {
                    SupportPoint::Token("inf".into())
                } else {
                    SupportPoint::Number(x)
                }
            })
            .collect();
        RawDistribution { support, weights: d.weights }
    }
}
