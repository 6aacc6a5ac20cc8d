//! Correspondence similarity statistics.
//!
//! Three scores over a pair of luminance windows `w_L`, `w_R` centered at a
//! candidate correspondence with disparity `d`:
//!
//! * [`mncc`] — Moravec's normalized cross-correlation, in `[-1, 1]`.
//! * [`expssd`] — exponentiated energy-normalized SSD acting as an image
//!   likelihood, in `(0, 1]`.
//! * [`epc`] — `expssd` multiplied by a Gaussian range-sensor likelihood
//!   centered on the prior disparity `d_p`, in `(0, 1]`. Where no prior is
//!   available the prior factor is omitted and `epc` degrades to `expssd`.
//!
//! All moments are population (divide-by-N) and all arithmetic is `f64`.

use crate::error::{Error, Result};

/// Similarity statistic selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Mncc,
    Expssd,
    Epc,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Mncc => "mncc",
            Statistic::Expssd => "expssd",
            Statistic::Epc => "epc",
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mncc" => Ok(Statistic::Mncc),
            "expssd" => Ok(Statistic::Expssd),
            "epc" => Ok(Statistic::Epc),
            other => Err(Error::InvalidParameter(format!(
                "unknown statistic {other:?} (expected mncc, expssd, or epc)"
            ))),
        }
    }
}

/// Prior-likelihood spread used by published parameterizations of the fused
/// statistic; with disparity measured in pixels it pins growth to the prior.
pub const PRESET_SIGMA_P_SQ: f64 = 0.001;

/// Shipping default for the prior-likelihood spread, calibrated by the
/// `sweep-sigma-p` grid over piecewise-planar evaluation scenes.
pub const DEFAULT_SIGMA_P_SQ: f64 = 2.0;

/// Parameters shared by the similarity kernels and the grower.
#[derive(Debug, Clone, Copy)]
pub struct SimilarityParams {
    /// Window side length, odd, at least 3.
    pub window: usize,
    /// MNCC stabilizer against zero-variance windows.
    pub epsilon: f64,
    /// Image-likelihood scale (sigma_s squared).
    pub sigma_s_sq: f64,
    /// Prior-likelihood scale (sigma_p squared).
    pub sigma_p_sq: f64,
    pub statistic: Statistic,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self {
            window: 5,
            epsilon: f64::EPSILON,
            sigma_s_sq: 0.1,
            sigma_p_sq: DEFAULT_SIGMA_P_SQ,
            statistic: Statistic::Epc,
        }
    }
}

impl SimilarityParams {
    pub fn validate(&self) -> Result<()> {
        if self.window.is_multiple_of(2) || self.window < 3 {
            return Err(Error::InvalidParameter(format!(
                "window side must be odd and >= 3, got {}",
                self.window
            )));
        }
        for (name, x) in [
            ("epsilon", self.epsilon),
            ("sigma-s-sq", self.sigma_s_sq),
            ("sigma-p-sq", self.sigma_p_sq),
        ] {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {x}"
                )));
            }
        }
        Ok(())
    }

    /// Scores one candidate given its windows, disparity, and optional prior
    /// disparity at the left pixel.
    #[inline]
    pub fn score(&self, left: &[f64], right: &[f64], d: f64, prior: Option<f64>) -> f64 {
        match self.statistic {
            Statistic::Mncc => mncc(left, right, self.epsilon),
            Statistic::Expssd => expssd(left, right, self.sigma_s_sq),
            Statistic::Epc => epc(left, right, d, prior, self.sigma_s_sq, self.sigma_p_sq),
        }
    }
}

/// Moravec's normalized cross-correlation with population moments:
/// `2 cov(wL, wR) / (var(wL) + var(wR) + epsilon)`.
pub fn mncc(left: &[f64], right: &[f64], epsilon: f64) -> f64 {
    assert_eq!(left.len(), right.len(), "window sizes differ");
    let n = left.len() as f64;
    let mean_l = left.iter().sum::<f64>() / n;
    let mean_r = right.iter().sum::<f64>() / n;
    let (mut cov, mut var_l, mut var_r) = (0.0, 0.0, 0.0);
    for (a, b) in left.iter().zip(right) {
        let da = a - mean_l;
        let db = b - mean_r;
        cov += da * db;
        var_l += da * da;
        var_r += db * db;
    }
    2.0 * (cov / n) / (var_l / n + var_r / n + epsilon)
}

/// Exponentiated SSD normalized by window energy:
/// `exp(-sum (wL - wR)^2 / (sigma_s_sq * sum (wL^2 + wR^2)))`.
///
/// Two identically zero windows are identical, so the 0/0 case scores 1.
pub fn expssd(left: &[f64], right: &[f64], sigma_s_sq: f64) -> f64 {
    assert_eq!(left.len(), right.len(), "window sizes differ");
    let (mut ssd, mut energy) = (0.0, 0.0);
    for (a, b) in left.iter().zip(right) {
        let d = a - b;
        ssd += d * d;
        energy += a * a + b * b;
    }
    if ssd == 0.0 {
        return 1.0;
    }
    (-ssd / (sigma_s_sq * energy)).exp()
}

/// Gaussian range-sensor likelihood `exp(-(d - dp)^2 / (2 sigma_p_sq))`.
pub fn range_likelihood(d: f64, dp: f64, sigma_p_sq: f64) -> f64 {
    let r = d - dp;
    (-(r * r) / (2.0 * sigma_p_sq)).exp()
}

/// Fused statistic: `expssd * range_likelihood`. With no prior at the pixel
/// the prior exponent is omitted.
pub fn epc(
    left: &[f64],
    right: &[f64],
    d: f64,
    prior: Option<f64>,
    sigma_s_sq: f64,
    sigma_p_sq: f64,
) -> f64 {
    let image = expssd(left, right, sigma_s_sq);
    match prior {
        Some(dp) => image * range_likelihood(d, dp, sigma_p_sq),
        None => image,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mncc_self_similarity() {
        let w = [0.0, 1.0, 0.0, 1.0];
        let s = mncc(&w, &w, f64::EPSILON);
        // 2*0.25 / (0.25 + 0.25 + eps)
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mncc_textureless_window_scores_zero() {
        let flat = [0.3; 9];
        let tex = [0.1, 0.9, 0.4, 0.2, 0.8, 0.5, 0.6, 0.3, 0.7];
        assert!(mncc(&flat, &tex, f64::EPSILON).abs() < 1e-9);
        assert!(mncc(&flat, &flat, f64::EPSILON).abs() < 1e-9);
    }

    #[test]
    fn mncc_anticorrelated_hits_minus_one() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [4.0, 3.0, 2.0, 1.0];
        assert!((mncc(&a, &b, f64::EPSILON) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn expssd_identical_windows() {
        let w = [0.2, 0.5, 0.9, 0.1];
        assert_eq!(expssd(&w, &w, 0.1), 1.0);
    }

    #[test]
    fn expssd_all_zero_convention() {
        assert_eq!(expssd(&[0.0; 4], &[0.0; 4], 0.1), 1.0);
    }

    #[test]
    fn expssd_hand_oracle() {
        let l = [1.0, 0.0, 0.0, 0.0];
        let r = [0.0, 1.0, 0.0, 0.0];
        // exp(-2 / (0.1 * 2)) = exp(-10)
        let expect = (-10.0f64).exp();
        assert!((expssd(&l, &r, 0.1) - expect).abs() < 1e-12);
    }

    #[test]
    fn range_likelihood_oracles() {
        assert_eq!(range_likelihood(5.0, 5.0, 0.5), 1.0);
        let got = range_likelihood(6.0, 5.0, 0.5);
        assert!((got - (-1.0f64).exp()).abs() < 1e-12);
        // Strictly decreasing in |d - dp|.
        let mut prev = 1.0;
        for k in 1..6 {
            let s = range_likelihood(5.0 + k as f64, 5.0, 0.5);
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn epc_product_oracle() {
        let l = [1.0, 0.0, 0.0, 0.0];
        let r = [0.0, 1.0, 0.0, 0.0];
        let got = epc(&l, &r, 6.0, Some(5.0), 0.1, 0.5);
        let expect = (-11.0f64).exp();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn epc_both_exponents_zero() {
        let w = [0.4, 0.6, 0.1, 0.9];
        assert_eq!(epc(&w, &w, 7.0, Some(7.0), 0.1, 0.5), 1.0);
    }

    #[test]
    fn epc_without_prior_degrades_to_expssd() {
        let l = [0.6, 0.1, 0.8, 0.3];
        let r = [0.5, 0.2, 0.7, 0.4];
        assert_eq!(epc(&l, &r, 9.0, None, 0.1, 0.5), expssd(&l, &r, 0.1));
    }

    #[test]
    fn epc_at_prior_equals_expssd_exactly() {
        let l = [0.6, 0.1, 0.8, 0.3];
        let r = [0.5, 0.2, 0.7, 0.4];
        assert_eq!(epc(&l, &r, 9.0, Some(9.0), 0.1, 0.5), expssd(&l, &r, 0.1));
    }

    #[test]
    fn params_validation() {
        assert!(SimilarityParams::default().validate().is_ok());
        let p = SimilarityParams {
            window: 4,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SimilarityParams {
            sigma_p_sq: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
