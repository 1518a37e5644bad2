use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

use crate::error::NumericsError;

/// Standard normal upper tail `Q(x) = P(Z > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal CDF `Phi(x) = P(Z <= x)`.
pub fn gaussian_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// `C_alpha = ∫_0^∞ dz / (1 + z^{alpha/2})`, the interference integral of a
/// Rayleigh-faded Poisson field, in closed form `(2π/α) / sin(2π/α)`.
pub fn interference_constant(alpha: f64) -> Result<f64, NumericsError> {
    if !(alpha > 2.0) {
        return Err(NumericsError::Domain(format!(
            "interference integral diverges for alpha = {alpha} (needs alpha > 2)"
        )));
    }
    if alpha.is_infinite() {
        return Ok(1.0);
    }
    let x = 2.0 * PI / alpha;
    Ok(x / x.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;

    #[test]
    fn q_and_phi_at_zero() {
        assert_eq!(gaussian_q(0.0), 0.5);
        assert_eq!(gaussian_cdf(0.0), 0.5);
    }

    #[test]
    fn q_at_two_sided_five_percent() {
        // mpmath, 40 digits: 1 - ncdf(1.959964)
        assert!((gaussian_q(1.959964) - 0.024_999_999_096_442_404).abs() < 1e-12);
    }

    #[test]
    fn q_plus_phi_is_one() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((gaussian_q(x) + gaussian_cdf(x) - 1.0).abs() <= 1e-15, "x = {x}");
            x += 0.01;
        }
    }

    #[test]
    fn phi_monotone() {
        let xs: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.02).collect();
        for w in xs.windows(2) {
            assert!(gaussian_cdf(w[1]) >= gaussian_cdf(w[0]));
        }
    }

    #[test]
    fn interference_constant_special_values() {
        assert_relative_eq!(interference_constant(4.0).unwrap(), PI / 2.0, max_relative = 1e-15);
        // mpmath quad of the defining integral
        assert_relative_eq!(interference_constant(3.0).unwrap(), 2.418_399_152_312_290_5, max_relative = 1e-14);
        assert_relative_eq!(interference_constant(1e9).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(interference_constant(f64::INFINITY).unwrap(), 1.0);
        assert!(interference_constant(2.0).is_err());
        assert!(interference_constant(1.5).is_err());
    }

    #[test]
    fn interference_constant_matches_quadrature() {
        let spec = QuadratureSpec::default();
        for alpha in [2.5, 3.0, 3.5, 4.0, 5.0, 6.0] {
            let half = alpha / 2.0;
            let q = integrate(|z: f64| 1.0 / (1.0 + z.powf(half)), 0.0, f64::INFINITY, &spec).unwrap();
            let c = interference_constant(alpha).unwrap();
            assert_relative_eq!(q.value, c, max_relative = 1e-9);
        }
    }
}
