//! Closed-form laws for the median-based estimators under independent
//! Gaussian coefficients with variance `sigma^2 2^{-(2H+1) j}`, plus
//! normality diagnostics of estimator samples against a normal law.
//!
//! All logarithms are natural.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::estimators::Method;
use crate::stats::{mean, normal_cdf, normal_quantile, shape_moments, variance};

/// `Q = (Phi^{-1}(3/4))^2`, about 0.4549.
pub fn q_constant() -> f64 {
    let z = normal_quantile(0.75);
    z * z
}

/// `A = pi e^Q / (2 Q)`, about 5.4418.
pub fn a_constant() -> f64 {
    let q = q_constant();
    PI * q.exp() / (2.0 * q)
}

/// Population median of `ln d_j^2`:
/// `-ln2 (2H+1) j + ln sigma^2 + 2 ln Phi^{-1}(3/4)`. `sigma2` must be positive.
pub fn medl_population_median(hurst: f64, sigma2: f64, j: i32) -> f64 {
    -LN_2 * (2.0 * hurst + 1.0) * j as f64 + sigma2.ln() + q_constant().ln()
}

/// Population median of `ln((d_a^2 + d_b^2) / 2)` for independent `d_a, d_b`:
/// `-ln2 (2H+1) j + ln sigma^2 + ln ln 2`. `sigma2` must be positive.
pub fn medla_population_median(hurst: f64, sigma2: f64, j: i32) -> f64 {
    -LN_2 * (2.0 * hurst + 1.0) * j as f64 + sigma2.ln() + LN_2.ln()
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(HurstError::InvalidParameter(
            "sample size N must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Large-sample variance of the MEDL level median, `A / N`.
pub fn medl_median_variance(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(a_constant() / n as f64)
}

/// Large-sample variance of the MEDLA level median, `1 / (N ln^2 2)`.
pub fn medla_median_variance(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 / (n as f64 * LN_2 * LN_2))
}

/// Normal approximation to the sampling law of `H-hat` from `m` levels
/// with `N` values per level. The law is centered at the true `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalLaw {
    pub method: Method,
    pub variance: f64,
    pub n: usize,
    pub m: usize,
    /// Set when the law is commonly confused with another one.
    pub note: Option<String>,
}

impl TheoreticalLaw {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn centered_at(&self, hurst: f64) -> NormalLaw {
        NormalLaw {
            mean: hurst,
            variance: self.variance,
        }
    }
}

/// Variance of `H-hat`:
/// MEDL `3A / (N m (m^2-1) ln^2 2)`, MEDLA `3 / (N m (m^2-1) ln^4 2)`.
pub fn hurst_sampling_law(method: Method, n: usize, m: usize) -> Result<TheoreticalLaw> {
    check_n(n)?;
    if m < 3 {
        return Err(HurstError::TooFewLevels(m));
    }
    let design = n as f64 * m as f64 * ((m * m - 1) as f64);
    let ln2_sq = LN_2 * LN_2;
    let (variance, note) = match method {
        Method::Medl => (3.0 * a_constant() / (design * ln2_sq), None),
        Method::Medla => {
            let medl = 3.0 * a_constant() / (design * ln2_sq);
            (
                3.0 / (design * ln2_sq * ln2_sq),
                Some(format!(
                    "MEDLA variance uses ln(2)^4 in the denominator; it is not the MEDL \
                     value {medl:.4e} for the same N and m (ratio {:.4})",
                    a_constant() * ln2_sq
                )),
            )
        }
        other => {
            return Err(HurstError::InvalidParameter(format!(
                "no closed-form sampling law for {other}"
            )))
        }
    };
    Ok(TheoreticalLaw {
        method,
        variance,
        n,
        m,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalLaw {
    pub mean: f64,
    pub variance: f64,
}

impl NormalLaw {
    /// Moment-matched law (sample mean, unbiased sample variance).
    pub fn fitted(values: &[f64]) -> Self {
        NormalLaw {
            mean: mean(values),
            variance: variance(values),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let sd = self.variance.sqrt();
        if sd == 0.0 {
            return if x < self.mean { 0.0 } else { 1.0 };
        }
        normal_cdf((x - self.mean) / sd)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.mean + self.variance.sqrt() * normal_quantile(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub count: usize,
    pub law: NormalLaw,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_distance: f64,
    /// Asymptotic Kolmogorov critical value at alpha = 0.01, `1.628 / sqrt(n)`.
    pub ks_critical_01: f64,
    pub consistent_at_01: bool,
    pub qq: Vec<QqPoint>,
}

pub const MIN_DIAGNOSTIC_SAMPLE: usize = 30;

const KS_COEFF_01: f64 = 1.628;

/// Moments, Kolmogorov-Smirnov distance and Q-Q pairs of `estimates`
/// against `law`. Q-Q plotting positions are `(i - 1/2) / n`.
pub fn normality_diagnostics(estimates: &[f64], law: NormalLaw) -> Result<NormalityReport> {
    let count = estimates.len();
    if count < MIN_DIAGNOSTIC_SAMPLE {
        return Err(HurstError::TooFewEstimates {
            got: count,
            min: MIN_DIAGNOSTIC_SAMPLE,
        });
    }
    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = count as f64;

    let ks_distance = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = law.cdf(x);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);

    let qq = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| QqPoint {
            theoretical: law.quantile((i as f64 + 0.5) / nf),
            empirical: x,
        })
        .collect();

    let (skewness, excess_kurtosis) = shape_moments(estimates);
    let ks_critical_01 = KS_COEFF_01 / nf.sqrt();
    Ok(NormalityReport {
        count,
        law,
        mean: mean(estimates),
        variance: variance(estimates),
        skewness,
        excess_kurtosis,
        ks_distance,
        ks_critical_01,
        consistent_at_01: ks_distance < ks_critical_01,
        qq,
    })
}
