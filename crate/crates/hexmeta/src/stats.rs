//! Small statistical helpers for the experiment harness: least squares on
//! the log-time/beta relation and the Kolmogorov-Smirnov distance to the
//! unit exponential.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

/// Ordinary least squares fit of `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

impl OlsFit {
    /// Normal-approximation 95% confidence interval for the slope.
    pub fn slope_ci95(&self) -> (f64, f64) {
        (
            self.slope - 1.96 * self.slope_stderr,
            self.slope + 1.96 * self.slope_stderr,
        )
    }
}

pub fn ols_fit(xs: &[f64], ys: &[f64]) -> Result<OlsFit, StatsError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(StatsError::InsufficientSamples {
            needed: 2,
            got: xs.len().min(ys.len()),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::Degenerate("all abscissae are equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let dof = xs.len().saturating_sub(2);
    let slope_stderr = if dof > 0 {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
            .sum();
        (ss_res / dof as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(OlsFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of the samples and
/// the unit exponential.
pub fn ks_distance_exp1(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = 1.0 - (-x).exp();
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    d
}

/// Exponential-law diagnostics for a sample of hitting times: normalizes by
/// the sample mean and compares against the unit exponential.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpLawReport {
    pub n: usize,
    pub ks_distance: f64,
    pub mean: f64,
    /// Mean over the empirical (1 - 1/e) quantile: close to one when the
    /// law is exponential.
    pub mean_over_quantile: f64,
}

pub fn exponential_law_test(taus: &[f64]) -> Result<ExpLawReport, StatsError> {
    if taus.len() < 100 {
        return Err(StatsError::InsufficientSamples {
            needed: 100,
            got: taus.len(),
        });
    }
    let mean = taus.iter().sum::<f64>() / taus.len() as f64;
    if mean <= 0.0 {
        return Err(StatsError::Degenerate("non-positive sample mean"));
    }
    let normalized: Vec<f64> = taus.iter().map(|t| t / mean).collect();
    let mut sorted = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = 1.0 - (-1.0f64).exp();
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let quantile = sorted[rank - 1];
    Ok(ExpLawReport {
        n: taus.len(),
        ks_distance: ks_distance_exp1(&normalized),
        mean,
        mean_over_quantile: mean / quantile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [0.40, 0.45, 0.50, 0.55];
        let gamma = 28.4;
        let ys: Vec<f64> = xs.iter().map(|b| gamma * b + 3.21).collect();
        let fit = ols_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, gamma, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 3.21, epsilon = 1e-10);
        assert!(fit.slope_stderr < 1e-10);
    }

    #[test]
    fn ols_recovers_synthetic_arrhenius() {
        // ln tau = beta * Gamma - ln k, exactly.
        let gamma = 28.4f64;
        let k = 10.0f64;
        let xs = [0.40, 0.45, 0.50, 0.55];
        let ys: Vec<f64> = xs.iter().map(|b| ((b * gamma).exp() / k).ln()).collect();
        let fit = ols_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, gamma, epsilon = 1e-9);
        assert_relative_eq!(fit.intercept, -k.ln(), epsilon = 1e-9);
    }

    #[test]
    fn ols_rejects_degenerate() {
        assert!(ols_fit(&[1.0], &[2.0]).is_err());
        assert!(matches!(
            ols_fit(&[1.0, 1.0], &[2.0, 3.0]),
            Err(StatsError::Degenerate(_))
        ));
    }

    #[test]
    fn ks_on_true_exponential_sample() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 4000;
        let samples: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
        let d = ks_distance_exp1(&samples);
        // The expected distance is of order 1/sqrt(n).
        assert!(d < 3.0 / (n as f64).sqrt(), "ks {d}");
    }

    #[test]
    fn exponential_law_on_exponential_and_degenerate_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let scale = 1234.5;
        let taus: Vec<f64> = (0..2000).map(|_| -scale * rng.random::<f64>().ln()).collect();
        let report = exponential_law_test(&taus).unwrap();
        assert!(report.ks_distance < 0.05, "ks {}", report.ks_distance);
        assert!((report.mean_over_quantile - 1.0).abs() < 0.1);

        // All-equal samples are far from exponential.
        let flat = vec![7.0; 500];
        let report = exponential_law_test(&flat).unwrap();
        assert!(report.ks_distance > 0.5);

        assert!(matches!(
            exponential_law_test(&[1.0; 99]),
            Err(StatsError::InsufficientSamples { .. })
        ));
    }
}
