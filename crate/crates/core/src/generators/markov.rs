use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::marginal::{sample_index, Marginal};
use crate::error::{invalid_param, Result};

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
/// States with stationary mass at or below this are treated as transient.
const RECURRENT_MASS: f64 = 1e-12;

/// A finite-state stationary Markov chain with real labels on its states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainSpec {
    transition: Vec<Vec<f64>>,
    values: Vec<f64>,
    stationary: Vec<f64>,
}

impl MarkovChainSpec {
    /// Validates `transition` and solves `pi P = pi`.
    ///
    /// Fails when a row is not a probability vector or when the chain has
    /// more than one closed class (no unique stationary law).
    pub fn new(transition: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let s = transition.len();
        if s == 0 {
            return Err(invalid_param("transition matrix is empty"));
        }
        if values.len() != s {
            return Err(invalid_param(format!(
                "{} state values for a {s}-state chain",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid_param("state values must be finite"));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != s {
                return Err(invalid_param(format!("row {i} has {} entries, expected {s}", row.len())));
            }
            if row.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
                return Err(invalid_param(format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(invalid_param(format!("row {i} sums to {sum}, not 1 (not row-stochastic)")));
            }
        }
        let stationary = solve_stationary(&transition)?;
        let spec = MarkovChainSpec {
            transition,
            values,
            stationary,
        };
        let residual = spec.stationary_residual();
        if residual > STATIONARY_TOL {
            return Err(invalid_param(format!(
                "stationary law residual {residual:e} exceeds {STATIONARY_TOL:e}"
            )));
        }
        Ok(spec)
    }

    pub fn states(&self) -> usize {
        self.values.len()
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// `max_j |(pi P)_j - pi_j|`.
    pub fn stationary_residual(&self) -> f64 {
        let s = self.states();
        (0..s)
            .map(|j| {
                let v: f64 = (0..s).map(|i| self.stationary[i] * self.transition[i][j]).sum();
                (v - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn marginal(&self) -> Marginal {
        Marginal::discrete(&self.values, &self.stationary).expect("stationary law is a probability vector")
    }

    /// `Q = P - 1 pi`. Its powers are `P^r - 1 pi`, and it has no unit
    /// eigenvalue, so rounding in repeated products stays relative to `|Q^r|`.
    fn deflated(&self) -> DMatrix<f64> {
        let s = self.states();
        DMatrix::from_fn(s, s, |i, j| self.transition[i][j] - self.stationary[j])
    }

    /// `phi(1..=r_max)`: the largest total-variation distance between a row
    /// of `P^r` (over recurrent states) and the stationary law.
    ///
    /// For a stationary chain, conditioning on past events reduces to the
    /// state at the last observed time, and future events only see the law
    /// of the state `r` steps later, so `phi(r) = max_i TV(P^r(i, .), pi)`.
    pub fn phi_mixing_profile(&self, r_max: usize) -> Vec<f64> {
        let q = self.deflated();
        let recurrent: Vec<usize> = (0..self.states())
            .filter(|i| self.stationary[*i] > RECURRENT_MASS)
            .collect();
        let mut power = q.clone();
        let mut out = Vec::with_capacity(r_max);
        for r in 1..=r_max {
            if r > 1 {
                power = &power * &q;
            }
            let phi = recurrent
                .iter()
                .map(|i| 0.5 * power.row(*i).iter().map(|x| x.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            out.push(phi.min(1.0));
        }
        out
    }

    /// `Cov(h(X_1), h(X_{1+j}))` for `j = 0..=max_lag`, where `h` assigns
    /// `weights[i]` to state `i`.
    pub fn covariance_table(&self, weights: &[f64], max_lag: usize) -> Vec<f64> {
        let s = self.states();
        let pi = &self.stationary;
        let mean: f64 = (0..s).map(|i| pi[i] * weights[i]).sum();
        let q = self.deflated();
        let mut w = DVector::from_column_slice(weights);
        let mut out = Vec::with_capacity(max_lag + 1);
        out.push((0..s).map(|i| pi[i] * (weights[i] - mean) * (weights[i] - mean)).sum());
        for _ in 1..=max_lag {
            w = &q * w;
            out.push((0..s).map(|i| pi[i] * weights[i] * w[i]).sum());
        }
        out
    }

    /// `Cov(f(X_1), g(X_{1+lag}))` with `f`, `g` given per state.
    pub fn cross_covariance(&self, f: &[f64], g: &[f64], lag: usize) -> f64 {
        let s = self.states();
        let pi = &self.stationary;
        if lag == 0 {
            let ef: f64 = (0..s).map(|i| pi[i] * f[i]).sum();
            let eg: f64 = (0..s).map(|i| pi[i] * g[i]).sum();
            return (0..s).map(|i| pi[i] * (f[i] - ef) * (g[i] - eg)).sum();
        }
        let q = self.deflated();
        let mut w = DVector::from_column_slice(g);
        for _ in 0..lag {
            w = &q * w;
        }
        (0..s).map(|i| pi[i] * f[i] * w[i]).sum()
    }

    /// Exact joint law of `(X_1, X_{1+lag})` as a state-by-state matrix.
    pub fn lag_joint(&self, lag: usize) -> Vec<Vec<f64>> {
        let s = self.states();
        let p = DMatrix::from_fn(s, s, |i, j| self.transition[i][j]);
        let mut power = DMatrix::<f64>::identity(s, s);
        for _ in 0..lag {
            power = &power * &p;
        }
        (0..s)
            .map(|i| (0..s).map(|j| self.stationary[i] * power[(i, j)]).collect())
            .collect()
    }

    pub(crate) fn sample_states<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let mut states = Vec::with_capacity(n);
        let mut current = sample_index(&self.stationary, rng);
        states.push(current);
        for _ in 1..n {
            current = sample_index(&self.transition[current], rng);
            states.push(current);
        }
        states
    }
}

/// Solves `pi (P - I) = 0`, `sum(pi) = 1` by replacing one balance equation
/// with the normalisation; the system is nonsingular iff the chain has a
/// single closed class.
fn solve_stationary(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let s = transition.len();
    let mut a = DMatrix::from_fn(s, s, |i, j| transition[j][i] - if i == j { 1.0 } else { 0.0 });
    for j in 0..s {
        a[(s - 1, j)] = 1.0;
    }
    if a.rank(1e-10) < s {
        return Err(invalid_param(
            "chain has no unique stationary law (more than one closed class)",
        ));
    }
    let mut rhs = DVector::zeros(s);
    rhs[s - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| invalid_param("stationary system is singular"))?;
    if pi.iter().any(|p| *p < -1e-10) {
        return Err(invalid_param("stationary solve produced negative mass"));
    }
    let clipped: Vec<f64> = pi.iter().map(|p| p.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    Ok(clipped.into_iter().map(|p| p / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state() -> MarkovChainSpec {
        MarkovChainSpec::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn two_state_stationary_law() {
        let c = two_state();
        assert_abs_diff_eq!(c.stationary()[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.stationary()[1], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn reducible_chain_rejected() {
        let err = MarkovChainSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn non_stochastic_rows_rejected() {
        assert!(MarkovChainSpec::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]], vec![0.0, 1.0]).is_err());
        assert!(MarkovChainSpec::new(vec![vec![1.2, -0.2], vec![0.5, 0.5]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn transient_state_allowed() {
        // state 2 leaks into the closed class {0, 1}
        let c = MarkovChainSpec::new(
            vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 0.0], vec![0.3, 0.3, 0.4]],
            vec![0.0, 1.0, 2.0],
        )
        .unwrap();
        assert_abs_diff_eq!(c.stationary()[2], 0.0, epsilon = 1e-14);
        // one-step forgetting inside the recurrent class
        assert_abs_diff_eq!(c.phi_mixing_profile(1)[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn phi_of_two_state_chain() {
        let phi = two_state().phi_mixing_profile(400);
        assert_abs_diff_eq!(phi[0], 7.0 / 15.0, epsilon = 1e-12);
        for r in 1..phi.len() {
            assert_abs_diff_eq!(phi[r] / phi[r - 1], 0.7, epsilon = 1e-10);
        }
        assert!(phi[399] > 0.0);
    }

    #[test]
    fn independent_rows_mix_in_one_step() {
        let c = MarkovChainSpec::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![0.0, 1.0]).unwrap();
        assert!(c.phi_mixing_profile(5).iter().all(|p| *p == 0.0));
    }

    #[test]
    fn lag_covariance_of_two_state_chain() {
        let c = two_state();
        let gamma = c.covariance_table(&[0.0, 1.0], 3);
        assert_abs_diff_eq!(gamma[0], 2.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma[1], 0.8 / 3.0 - 1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma[2], gamma[1] * 0.7, epsilon = 1e-14);
    }

    #[test]
    fn lag_joint_matches_covariance() {
        let c = two_state();
        let joint = c.lag_joint(2);
        let e_xy = joint[1][1];
        let gamma = c.covariance_table(&[0.0, 1.0], 2);
        assert_abs_diff_eq!(e_xy - 1.0 / 9.0, gamma[2], epsilon = 1e-14);
    }

    #[test]
    fn cross_covariance_agrees_with_joint() {
        let c = MarkovChainSpec::new(
            vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.5, 0.3], vec![0.1, 0.4, 0.5]],
            vec![-1.0, 0.5, 2.0],
        )
        .unwrap();
        let f = [1.0, -2.0, 0.3];
        let g = [0.0, 4.0, 1.0];
        for lag in 0..6 {
            let joint = c.lag_joint(lag);
            let pi = c.stationary();
            let ef: f64 = (0..3).map(|i| pi[i] * f[i]).sum();
            let eg: f64 = (0..3).map(|i| pi[i] * g[i]).sum();
            let efg: f64 = (0..3).flat_map(|i| (0..3).map(move |k| (i, k))).map(|(i, k)| joint[i][k] * f[i] * g[k]).sum();
            assert_abs_diff_eq!(c.cross_covariance(&f, &g, lag), efg - ef * eg, epsilon = 1e-13);
        }
    }
}
