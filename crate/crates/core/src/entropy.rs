//! Bracketing numbers for half-line indicator classes, exhaustive
//! shattering checks and VC indices of set families on the real line.
//!
//! Shattering is decided exactly: on a finite point set a family can only
//! pick out finitely many subsets, and each family enumerates parameters
//! that realise all of them (for half-lines: below every point, between
//! consecutive points, above every point).

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::{Bracket, BracketNet, Observable, WIDTH_TOL};
use crate::error::{invalid_param, Error, Result};
use crate::generators::{Cdf, Marginal};
use crate::rng::stream_rng;

/// Largest point set handed to the exhaustive search.
pub const MAX_SHATTER_POINTS: usize = 20;

/// How bracket width is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketNorm {
    /// `E[u - l]`, the cdf increment for indicator brackets.
    L1,
    /// `sqrt(E[(u - l)^2])`, the square root of the cdf increment.
    L2,
}

/// Half-line bracket net together with its thresholds.
#[derive(Clone, Debug)]
pub struct HalfLineNet {
    pub net: BracketNet,
    /// Thresholds `x_0 < ... < x_p`; the ends are `-inf` and `+inf`.
    pub thresholds: Vec<f64>,
    /// `F(x_k)` at each threshold.
    pub levels: Vec<f64>,
    pub norm: BracketNorm,
}

/// Bracket net of level `epsilon` (cdf-increment width) for
/// `{1_(-inf, x] : x real}`, built from the quantiles `F^{-1}(k/p)` with
/// `p = ceil(1/epsilon)`.
pub fn bracket_net_halflines(marginal: &Marginal, epsilon: f64) -> Result<HalfLineNet> {
    bracket_net_halflines_with_norm(marginal, epsilon, BracketNorm::L1)
}

pub fn bracket_net_halflines_with_norm(marginal: &Marginal, epsilon: f64, norm: BracketNorm) -> Result<HalfLineNet> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid_param(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !marginal.is_continuous() {
        return Err(invalid_param(format!(
            "half-line bracket net needs a continuous cdf, got {}",
            marginal.label()
        )));
    }
    let increment = match norm {
        BracketNorm::L1 => epsilon,
        BracketNorm::L2 => epsilon * epsilon,
    };
    // slack so that 1/0.1 does not round up to 11 brackets
    let p = ((1.0 / increment) - 1e-9).ceil().max(1.0) as usize;
    let mut thresholds = Vec::with_capacity(p + 1);
    thresholds.push(f64::NEG_INFINITY);
    for k in 1..p {
        thresholds.push(marginal.quantile(k as f64 / p as f64));
    }
    thresholds.push(f64::INFINITY);
    let levels: Vec<f64> = thresholds.iter().map(|x| marginal.cdf(*x)).collect();
    let brackets = thresholds
        .windows(2)
        .zip(levels.windows(2))
        .map(|(x, f)| Bracket {
            lower: Observable::half_line(x[0]),
            upper: Observable::half_line(x[1]),
            lower_mean: f[0],
            upper_mean: f[1],
        })
        .collect();
    // widths are checked against the cdf increment, whatever the norm
    let net = BracketNet::new(increment, brackets)?;
    Ok(HalfLineNet {
        net,
        thresholds,
        levels,
        norm,
    })
}

/// A family of subsets of the real line, searchable on finite point sets.
pub trait SetFamily: Sync {
    type Param;

    fn label(&self) -> String;

    /// Parameters realising every trace the family leaves on `points`.
    fn critical_parameters(&self, points: &[f64]) -> Vec<Self::Param>;

    fn contains(&self, param: &Self::Param, x: f64) -> bool;

    /// Point sets of size `n` to probe when searching for the VC index:
    /// `1..=n` plus `random` jittered copies. Families on a restricted
    /// universe override this.
    fn probe_configurations(&self, n: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut out = vec![(1..=n).map(|k| k as f64).collect::<Vec<_>>()];
        let mut rng = stream_rng(seed, n as u64);
        for _ in 0..random {
            let mut pts: Vec<f64> = (1..=n).map(|k| k as f64 + rng.random_range(-0.45..0.45)).collect();
            pts.sort_by(f64::total_cmp);
            out.push(pts);
        }
        out
    }
}

/// Threshold candidates below, between and above the sorted points.
fn cut_points(points: &[f64]) -> Vec<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut cuts = Vec::with_capacity(sorted.len() + 1);
    cuts.push(f64::NEG_INFINITY);
    cuts.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(f64::INFINITY);
    cuts
}

/// `{(-inf, t] : t real}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfLines;

impl SetFamily for HalfLines {
    type Param = f64;

    fn label(&self) -> String {
        "half-lines".into()
    }

    fn critical_parameters(&self, points: &[f64]) -> Vec<f64> {
        cut_points(points)
    }

    fn contains(&self, t: &f64, x: f64) -> bool {
        x <= *t
    }
}

/// `{[a, b] : a <= b}` plus the empty set.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClosedIntervals;

impl SetFamily for ClosedIntervals {
    type Param = Option<(f64, f64)>;

    fn label(&self) -> String {
        "closed-intervals".into()
    }

    fn critical_parameters(&self, points: &[f64]) -> Vec<Self::Param> {
        let cuts = cut_points(points);
        let mut out = vec![None];
        for (i, a) in cuts.iter().enumerate() {
            for b in &cuts[i..] {
                out.push(Some((*a, *b)));
            }
        }
        out
    }

    fn contains(&self, param: &Self::Param, x: f64) -> bool {
        param.is_some_and(|(a, b)| a <= x && x <= b)
    }
}

/// Every subset of a finite universe.
#[derive(Clone, Debug)]
pub struct PowerSet {
    universe: Vec<f64>,
}

impl PowerSet {
    pub fn new(universe: Vec<f64>) -> Result<Self> {
        if universe.len() > MAX_SHATTER_POINTS {
            return Err(Error::Capacity {
                points: universe.len(),
                max: MAX_SHATTER_POINTS,
            });
        }
        Ok(PowerSet { universe })
    }
}

impl SetFamily for PowerSet {
    type Param = u32;

    fn label(&self) -> String {
        format!("power-set({} points)", self.universe.len())
    }

    fn critical_parameters(&self, _points: &[f64]) -> Vec<u32> {
        (0..1u32 << self.universe.len()).collect()
    }

    fn contains(&self, mask: &u32, x: f64) -> bool {
        self.universe
            .iter()
            .position(|u| *u == x)
            .is_some_and(|k| mask & (1 << k) != 0)
    }

    /// All `n`-subsets of the universe; none when `n` exceeds its size.
    fn probe_configurations(&self, n: usize, _random: usize, _seed: u64) -> Vec<Vec<f64>> {
        let size = self.universe.len();
        (0..1u32 << size)
            .filter(|m| m.count_ones() as usize == n)
            .map(|m| (0..size).filter(|k| m & (1 << k) != 0).map(|k| self.universe[k]).collect())
            .collect()
    }
}

/// Whether `family` picks out every subset of `points`.
///
/// Duplicate points are merged. At most [`MAX_SHATTER_POINTS`] distinct
/// points are accepted.
pub fn shatters<F: SetFamily + ?Sized>(points: &[f64], family: &F) -> Result<bool> {
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() > MAX_SHATTER_POINTS {
        return Err(Error::Capacity {
            points: pts.len(),
            max: MAX_SHATTER_POINTS,
        });
    }
    let traces: BTreeSet<u32> = family
        .critical_parameters(&pts)
        .iter()
        .map(|param| {
            pts.iter()
                .enumerate()
                .filter(|(_, x)| family.contains(param, **x))
                .fold(0u32, |mask, (k, _)| mask | (1 << k))
        })
        .collect();
    Ok((0..1u32 << pts.len()).all(|subset| traces.contains(&subset)))
}

/// Limits on the VC-index search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeBudget {
    pub max_cardinality: usize,
    pub random_configs: usize,
    pub seed: u64,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget {
            max_cardinality: 8,
            random_configs: 16,
            seed: 0x7c,
        }
    }
}

/// Outcome of the VC-index search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcReport {
    /// Largest probed cardinality with a shattered configuration.
    pub largest_shattered: usize,
    /// Smallest cardinality with no shattered configuration among probes.
    pub smallest_unshattered: Option<usize>,
    /// The index in the "VC class of index n" sense used for half-lines
    /// (index 2): the smallest cardinality that is never shattered.
    pub index: Option<usize>,
    /// `false` when the budget ran out before a non-shattered cardinality
    /// was found.
    pub determined: bool,
}

/// Searches cardinalities `1, 2, ...` for one at which no probed point set
/// is shattered.
pub fn vc_index<F: SetFamily + ?Sized>(family: &F, budget: ProbeBudget) -> Result<VcReport> {
    let max_n = budget.max_cardinality.min(MAX_SHATTER_POINTS);
    let mut largest = 0;
    for n in 1..=max_n {
        let configs = family.probe_configurations(n, budget.random_configs, budget.seed);
        if configs.is_empty() {
            break;
        }
        let mut any = false;
        for c in &configs {
            if shatters(c, family)? {
                any = true;
                break;
            }
        }
        if !any {
            return Ok(VcReport {
                largest_shattered: largest,
                smallest_unshattered: Some(n),
                index: Some(n),
                determined: true,
            });
        }
        largest = n;
    }
    Ok(VcReport {
        largest_shattered: largest,
        smallest_unshattered: None,
        index: None,
        determined: false,
    })
}

/// `K * I * (4e)^I * (1/epsilon)^(r (I - 1))`.
pub fn vc_entropy_bound(index: u32, epsilon: f64, k: f64, r: f64) -> f64 {
    let i = index as f64;
    k * i * (4.0 * std::f64::consts::E).powf(i) * (1.0 / epsilon).powf(r * (i - 1.0))
}

/// Non-normative default universal constants of the entropy bound.
pub const DEFAULT_BOUND_K: f64 = 1.0;
pub const DEFAULT_BOUND_R: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub r: f64,
}

/// Bracketing and VC summary for one family at one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub family: String,
    pub epsilon: f64,
    pub norm: BracketNorm,
    pub bracket_count: usize,
    /// Interior thresholds of the bracket grid.
    pub construction: Vec<f64>,
    pub vc_index: Option<usize>,
    pub bound_params: BoundParams,
    pub bound_value: Option<f64>,
}

/// Entropy report for the half-line class under `marginal`.
pub fn halfline_entropy_report(
    marginal: &Marginal,
    epsilon: f64,
    norm: BracketNorm,
    params: BoundParams,
    budget: ProbeBudget,
) -> Result<EntropyReport> {
    let net = bracket_net_halflines_with_norm(marginal, epsilon, norm)?;
    let vc = vc_index(&HalfLines, budget)?;
    let bound_value = vc.index.map(|i| vc_entropy_bound(i as u32, epsilon, params.k, params.r));
    let construction = net.thresholds[1..net.thresholds.len() - 1].to_vec();
    Ok(EntropyReport {
        family: format!("half-lines[{}]", marginal.label()),
        epsilon,
        norm,
        bracket_count: net.net.len(),
        construction,
        vc_index: vc.index,
        bound_params: params,
        bound_value,
    })
}

/// `true` when every bracket of the net is at most `width` wide (up to the
/// shared tolerance) in the stated norm.
pub fn widths_within(net: &HalfLineNet, width: f64) -> bool {
    net.levels.windows(2).all(|f| {
        let inc = f[1] - f[0];
        let w = match net.norm {
            BracketNorm::L1 => inc,
            BracketNorm::L2 => inc.max(0.0).sqrt(),
        };
        w <= width + WIDTH_TOL
    })
}
