//! Bernoulli tail bounds in the forms used for the concentration lemmas.

/// `2 exp(-N p eps^2 / (1 - p))`, stated as a bound on
/// `P(|mean - p| >= eps p)` for `N` i.i.d. Bernoulli(`p`) variables.
///
/// This is tighter than the standard Chernoff form `2 exp(-N p eps^2 / 3)`
/// and can sit below the true tail when `eps` is small (for example
/// `N = 1000, p = 0.3, eps = 0.1`).
pub fn hoeffding_two_sided(samples: u64, p: f64, eps: f64) -> f64 {
    2.0 * (-(samples as f64) * p * eps * eps / (1.0 - p)).exp()
}

/// `exp(-x^2 / (2 N p (1 - p)))`, a bound on `P(sum - N p >= x)`.
pub fn hoeffding_one_sided(samples: u64, p: f64, x: f64) -> f64 {
    (-(x * x) / (2.0 * samples as f64 * p * (1.0 - p))).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_cases() {
        assert_eq!(hoeffding_two_sided(1000, 0.3, 0.0), 2.0);
        assert_eq!(hoeffding_one_sided(1000, 0.3, 0.0), 1.0);
    }

    #[test]
    fn values() {
        assert!((hoeffding_two_sided(1000, 0.3, 0.1) - 2.0 * (-3.0f64 / 0.7).exp()).abs() < 1e-15);
        assert!((hoeffding_one_sided(1000, 0.3, 30.0) - (-900.0f64 / 420.0).exp()).abs() < 1e-15);
    }
}
