use alloc::format;

use crate::error::{Error, Result};

/// Inverse temperatures and scent strengths delimiting the bridge / no
/// bridge regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub beta1: f64,
    pub beta2: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Whether `1/2 < rho < alpha - 2`, the range in which the regimes are
    /// proven.
    pub hypothesis_holds: bool,
}

/// `rho` is the particle density `n / h^2`, `alpha` the aspect ratio `w / h`,
/// `phi` the column scent and `beta` the inverse temperature used for `eta2`.
pub fn thresholds(rho: f64, alpha: f64, phi: f64, beta: f64) -> Result<Thresholds> {
    if rho.is_nan() || rho <= 0.5 || rho.is_infinite() {
        return Err(Error::InvalidParameter(format!("density must exceed 1/2, got {rho}")));
    }
    if beta.is_nan() || beta <= 0.0 || phi.is_nan() || phi <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need beta > 0 and phi > 0, got beta = {beta}, phi = {phi}"
        )));
    }
    let ln2 = core::f64::consts::LN_2;
    let half_alpha = 1.0 + alpha / 2.0;
    let eta2 = (2.0 * (1.0 - ln2 / beta)).min(4.0 / (1.0 + rho) * (1.0 - half_alpha * ln2 / beta)) / phi;
    Ok(Thresholds {
        beta1: (2.0 * rho + 3.0 + 4.0 * alpha) / (2.0 * rho - 1.0) * ln2,
        beta2: half_alpha * ln2,
        eta1: 4.0 / phi * (1.0 + 1.0 / rho),
        eta2,
        hypothesis_holds: rho < alpha - 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::LN_2;

    #[test]
    fn reference_point() {
        let t = thresholds(1.0, 3.0, 1.0, 5.0 * LN_2).unwrap();
        assert_abs_diff_eq!(t.beta1, 17.0 * LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(t.beta2, 2.5 * LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(t.eta1, 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.eta2, 1.0, epsilon = 1e-12);
        assert!(!t.hypothesis_holds);
        assert!(thresholds(1.0, 4.0, 1.0, 1.0).unwrap().hypothesis_holds);
    }

    #[test]
    fn eta2_vanishes_at_beta2() {
        let t = thresholds(1.0, 3.0, 1.0, 2.5 * LN_2).unwrap();
        assert_abs_diff_eq!(t.eta2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scales_with_inverse_phi() {
        let a = thresholds(1.5, 5.0, 1.0, 4.0).unwrap();
        let b = thresholds(1.5, 5.0, 4.0, 4.0).unwrap();
        assert_abs_diff_eq!(a.eta1, 4.0 * b.eta1, epsilon = 1e-12);
        assert_abs_diff_eq!(a.eta2, 4.0 * b.eta2, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(thresholds(0.5, 3.0, 1.0, 1.0).is_err());
        assert!(thresholds(1.0, 3.0, 0.0, 1.0).is_err());
        assert!(thresholds(1.0, 3.0, 1.0, 0.0).is_err());
    }
}
