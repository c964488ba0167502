use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};
use crate::numeric::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// A distribution function, evaluated together with its left limit so that
/// sup-deviations are exact at atoms.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `F(x-)`; equals `cdf(x)` for continuous distributions.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

/// Wraps a closure as a continuous cdf.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// One-dimensional marginal law of a stationary sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    PointMass { value: f64 },
    /// Finitely supported; `values` sorted and distinct, `probs` positive.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl Marginal {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid_param(format!("uniform needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Marginal::Uniform { lo, hi })
    }

    pub fn standard_uniform() -> Self {
        Marginal::Uniform { lo: 0.0, hi: 1.0 }
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(invalid_param(format!("normal needs sd > 0, got sd = {sd}")));
        }
        Ok(Marginal::Normal { mean, sd })
    }

    pub fn standard_normal() -> Self {
        Marginal::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(invalid_param("point mass location must be finite"));
        }
        Ok(Marginal::PointMass { value })
    }

    /// Builds a discrete law from arbitrary (value, weight) pairs, merging
    /// repeated values and dropping zero weights.
    pub fn discrete(values: &[f64], probs: &[f64]) -> Result<Self> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(invalid_param("discrete law needs matching nonempty values and probabilities"));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid_param("discrete probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid_param(format!("discrete probabilities sum to {total}, not 1")));
        }
        let mut pairs: Vec<(f64, f64)> = values
            .iter()
            .copied()
            .zip(probs.iter().copied())
            .filter(|(_, p)| *p > 0.0)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let (values, probs) = merged.into_iter().unzip();
        Ok(Marginal::Discrete { values, probs })
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Marginal::Uniform { .. } | Marginal::Normal { .. })
    }

    pub fn mean(&self) -> f64 {
        match self {
            Marginal::Uniform { lo, hi } => 0.5 * (lo + hi),
            Marginal::Normal { mean, .. } => *mean,
            Marginal::PointMass { value } => *value,
            Marginal::Discrete { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Marginal::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Marginal::Normal { sd, .. } => sd * sd,
            Marginal::PointMass { .. } => 0.0,
            Marginal::Discrete { values, probs } => {
                let m = self.mean();
                values.iter().zip(probs).map(|(v, p)| p * (v - m) * (v - m)).sum()
            }
        }
    }

    /// Supremum of the Lebesgue density, when one exists.
    pub fn density_bound(&self) -> Option<f64> {
        match self {
            Marginal::Uniform { lo, hi } => Some(1.0 / (hi - lo)),
            Marginal::Normal { sd, .. } => Some(std_normal_pdf(0.0) / sd),
            _ => None,
        }
    }

    /// Generalised inverse `inf { x : F(x) >= p }` for `p` in `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            Marginal::Uniform { lo, hi } => lo + p * (hi - lo),
            Marginal::Normal { mean, sd } => mean + sd * std_normal_quantile(p),
            Marginal::PointMass { value } => {
                if p == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    *value
                }
            }
            Marginal::Discrete { values, probs } => {
                if p == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut acc = 0.0;
                for (v, q) in values.iter().zip(probs) {
                    acc += q;
                    if acc >= p - 1e-15 {
                        return *v;
                    }
                }
                *values.last().expect("nonempty support")
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Marginal::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            Marginal::PointMass { value } => *value,
            Marginal::Discrete { values, probs } => values[sample_index(probs, rng)],
        }
    }

    pub fn label(&self) -> String {
        match self {
            Marginal::Uniform { lo, hi } => format!("uniform({lo},{hi})"),
            Marginal::Normal { mean, sd } => format!("normal({mean},{sd})"),
            Marginal::PointMass { value } => format!("point-mass({value})"),
            Marginal::Discrete { values, .. } => format!("discrete({} atoms)", values.len()),
        }
    }
}

impl Cdf for Marginal {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Marginal::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            Marginal::PointMass { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Discrete { values, probs } => {
                let k = values.partition_point(|v| *v <= x);
                probs[..k].iter().sum::<f64>().min(1.0)
            }
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        match self {
            Marginal::PointMass { value } => {
                if x > *value {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Discrete { values, probs } => {
                let k = values.partition_point(|v| *v < x);
                probs[..k].iter().sum::<f64>().min(1.0)
            }
            _ => self.cdf(x),
        }
    }
}

/// Inverse-cdf draw of an index from a probability vector.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding slack above the last partial sum
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Vec<f64> {
        (-400..=400).map(|k| k as f64 * 0.025).collect()
    }

    #[test]
    fn cdfs_are_valid_on_grid() {
        let laws = [
            Marginal::standard_uniform(),
            Marginal::standard_normal(),
            Marginal::point_mass(0.3).unwrap(),
            Marginal::discrete(&[1.0, -1.0, 1.0], &[0.25, 0.5, 0.25]).unwrap(),
        ];
        for law in &laws {
            let g = grid();
            let vals: Vec<f64> = g.iter().map(|x| law.cdf(*x)).collect();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{law:?} not monotone");
            assert!(vals[0] < 1e-6 && vals[vals.len() - 1] > 1.0 - 1e-6);
            for x in &g {
                assert!(law.cdf_left(*x) <= law.cdf(*x));
            }
        }
    }

    #[test]
    fn discrete_merges_duplicates() {
        let d = Marginal::discrete(&[1.0, -1.0, 1.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(
            d,
            Marginal::Discrete {
                values: vec![-1.0, 1.0],
                probs: vec![0.5, 0.5]
            }
        );
        assert_eq!(d.cdf(-1.0), 0.5);
        assert_eq!(d.cdf_left(-1.0), 0.0);
        assert_eq!(d.quantile(0.5), -1.0);
        assert_eq!(d.quantile(0.51), 1.0);
    }

    #[test]
    fn uniform_moments() {
        let u = Marginal::standard_uniform();
        assert_abs_diff_eq!(u.variance(), 1.0 / 12.0);
        assert_eq!(u.quantile(0.5), 0.5);
        assert!(Marginal::uniform(1.0, 1.0).is_err());
    }
}
