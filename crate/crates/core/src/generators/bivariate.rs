//! Bivariate standard normal rectangle probabilities.
//!
//! Uses Plackett's identity `d Phi2 / d rho = phi2`, integrated from
//! independence, with the substitution `r = sin(theta)` that removes the
//! `1/sqrt(1 - r^2)` singularity:
//!
//! `Phi2(h, k; rho) - Phi(h) Phi(k)
//!     = (1 / 2 pi) * int_0^{asin rho} exp(-(h^2 - 2 h k sin t + k^2) / (2 cos^2 t)) dt`.

use std::f64::consts::PI;

use crate::numeric::{adaptive_simpson, std_normal_cdf};

/// Absolute accuracy target of the quadrature.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// `P(Z_1 <= h, Z_2 <= k) - Phi(h) Phi(k)` for standard normals with
/// correlation `rho` in `[-1, 1]`.
pub fn normal_orthant_covariance(h: f64, k: f64, rho: f64) -> f64 {
    if rho == 0.0 || h.is_infinite() || k.is_infinite() {
        return 0.0;
    }
    if rho >= 1.0 {
        return std_normal_cdf(h.min(k)) - std_normal_cdf(h) * std_normal_cdf(k);
    }
    if rho <= -1.0 {
        let joint = (std_normal_cdf(h) + std_normal_cdf(k) - 1.0).max(0.0);
        return joint - std_normal_cdf(h) * std_normal_cdf(k);
    }
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        let c2 = c * c;
        if c2 <= 0.0 {
            return if h == k { (-0.5 * h * h).exp() } else { 0.0 };
        }
        (-(h * h - 2.0 * h * k * s + k * k) / (2.0 * c2)).exp()
    };
    // scale tolerance by 2 pi so the returned value meets QUADRATURE_TOL
    adaptive_simpson(integrand, 0.0, rho.asin(), 0.1 * QUADRATURE_TOL * 2.0 * PI) / (2.0 * PI)
}

/// `P(Z_1 <= h, Z_2 <= k)`.
pub fn normal_joint_cdf(h: f64, k: f64, rho: f64) -> f64 {
    std_normal_cdf(h) * std_normal_cdf(k) + normal_orthant_covariance(h, k, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orthant_formula_at_origin() {
        for rho in [-0.9f64, -0.3, 0.1, 0.25, 0.5, 0.9, 0.999] {
            let expected = rho.asin() / (2.0 * PI);
            assert_abs_diff_eq!(normal_orthant_covariance(0.0, 0.0, rho), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = normal_orthant_covariance(0.3, -1.2, 0.6);
        let b = normal_orthant_covariance(-1.2, 0.3, 0.6);
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn perfect_correlation_limit() {
        let near = normal_orthant_covariance(0.4, 0.4, 1.0 - 1e-9);
        let exact = normal_orthant_covariance(0.4, 0.4, 1.0);
        assert_abs_diff_eq!(near, exact, epsilon = 1e-5);
    }

    #[test]
    fn matches_finite_difference_in_h() {
        // dPhi2/dh = phi(h) Phi((k - rho h)/sqrt(1-rho^2))
        let (h, k, rho) = (0.7, -0.2, 0.45);
        let d = 1e-4;
        let fd = (normal_joint_cdf(h + d, k, rho) - normal_joint_cdf(h - d, k, rho)) / (2.0 * d);
        let exact = crate::numeric::std_normal_pdf(h) * std_normal_cdf((k - rho * h) / (1.0 - rho * rho).sqrt());
        assert_abs_diff_eq!(fd, exact, epsilon = 1e-6);
    }
}
