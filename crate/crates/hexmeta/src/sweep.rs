//! Experiment orchestration: hitting-time ensembles across an inverse
//! temperature grid, with the Arrhenius slope fit and per-temperature
//! exponential-law diagnostics.

use crate::energy::ModelParams;
use crate::gates::GateShapes;
use crate::lattice::LatticeTopology;
use crate::metropolis::{default_max_steps, replica_ensemble, EnsembleSummary, HittingRecord};
use crate::stats::{exponential_law_test, ols_fit, ExpLawReport, OlsFit};
use crate::theory::theory_values;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Acceptance thresholds; exposed in the configuration so experiment files
/// pin them explicitly.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Thresholds {
    /// Relative tolerance of the fitted slope against the predicted barrier.
    pub slope_rel_tol: f64,
    /// Bound on the Kolmogorov-Smirnov distance at the largest beta.
    pub ks_max: f64,
    /// Lower bound on the gate-visited fraction at the largest beta.
    pub gate_fraction_min: f64,
    /// Timeout fraction above which a per-beta summary is flagged.
    pub timeout_warn_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            slope_rel_tol: 0.15,
            ks_max: 0.10,
            gate_fraction_min: 0.9,
            timeout_warn_fraction: 0.10,
        }
    }
}

/// A full sweep specification; serializable as the experiment file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub coupling: f64,
    pub field: f64,
    pub side: u32,
    pub beta_grid: Vec<f64>,
    pub replicas: u32,
    pub base_seed: u64,
    /// Step budget per replica; when absent each beta uses one hundred
    /// times its predicted mean transition time.
    #[serde(default)]
    pub max_steps: Option<u64>,
    #[serde(default = "default_true")]
    pub gate_detection: bool,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.replicas == 0 {
            return Err(SweepError::InvalidConfig("replicas must be at least 1".into()));
        }
        if self.beta_grid.is_empty() {
            return Err(SweepError::InvalidConfig("beta grid is empty".into()));
        }
        if !self.beta_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(SweepError::InvalidConfig(
                "beta grid must be strictly increasing".into(),
            ));
        }
        if self.beta_grid.iter().any(|b| *b <= 0.0) {
            return Err(SweepError::InvalidConfig("beta must be positive".into()));
        }
        if self.coupling <= 0.0 || self.field <= 0.0 {
            return Err(SweepError::InvalidConfig("coupling and field must be positive".into()));
        }
        Ok(())
    }

    pub fn params_at(&self, beta: f64) -> ModelParams {
        ModelParams::new(self.coupling, self.field, beta)
    }
}

/// Ensemble summary at one inverse temperature.
#[derive(Clone, Debug, Serialize)]
pub struct BetaSummary {
    pub beta: f64,
    pub summary: EnsembleSummary,
    /// Exponential-law diagnostics; absent below 100 completed replicas.
    pub exp_law: Option<ExpLawReport>,
    pub timeout_flagged: bool,
}

/// Arrhenius fit of ln(mean tau) against beta.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub fit: OlsFit,
    /// Predicted barrier, when the droplet formulas apply.
    pub predicted_gamma: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub per_beta: Vec<BetaSummary>,
    /// Absent for grids of length one.
    pub slope: Option<SlopeFit>,
    /// Any per-beta summary exceeded the timeout warning fraction; the
    /// slope is then biased toward completed runs.
    pub timeout_warning: bool,
}

/// Per-replica records of a sweep, grouped by beta in grid order.
pub type SweepRecords = Vec<(f64, Vec<HittingRecord>)>;

/// Runs the sweep; returns the per-replica records alongside the summaries
/// so callers can persist both.
pub fn run_sweep(config: &ExperimentConfig) -> Result<(SweepResult, SweepRecords), SweepError> {
    config.validate()?;
    let topo = LatticeTopology::new(config.side)?;
    let mut per_beta = Vec::new();
    let mut records_by_beta = Vec::new();
    let mut timeout_warning = false;
    for &beta in &config.beta_grid {
        let params = config.params_at(beta);
        let gate = if config.gate_detection {
            GateShapes::for_params(&params).ok()
        } else {
            None
        };
        let max_steps = config.max_steps.unwrap_or_else(|| default_max_steps(&params));
        let ensemble = replica_ensemble(
            &params,
            &topo,
            config.replicas,
            config.base_seed,
            max_steps,
            gate.as_ref(),
        );
        let taus: Vec<f64> = ensemble
            .records
            .iter()
            .filter_map(|r| r.tau)
            .map(|t| t as f64)
            .collect();
        let exp_law = exponential_law_test(&taus).ok();
        let timeout_fraction =
            ensemble.summary.timeouts as f64 / ensemble.summary.replicas.max(1) as f64;
        let timeout_flagged = timeout_fraction > config.thresholds.timeout_warn_fraction;
        timeout_warning |= timeout_flagged;
        per_beta.push(BetaSummary {
            beta,
            summary: ensemble.summary.clone(),
            exp_law,
            timeout_flagged,
        });
        records_by_beta.push((beta, ensemble.records));
    }

    let slope = if config.beta_grid.len() >= 2 {
        let xs: Vec<f64> = per_beta.iter().map(|b| b.beta).collect();
        let ys: Vec<f64> = per_beta.iter().map(|b| b.summary.mean_tau.ln()).collect();
        let fit = ols_fit(&xs, &ys)
            .map_err(|e| SweepError::InvalidConfig(format!("slope fit failed: {e}")))?;
        let predicted_gamma = theory_values(&config.params_at(1.0)).ok().map(|tv| tv.gamma_hex);
        let relative_error =
            predicted_gamma.map(|gamma| ((fit.slope - gamma) / gamma).abs());
        Some(SlopeFit {
            fit,
            predicted_gamma,
            relative_error,
        })
    } else {
        None
    };

    Ok((
        SweepResult {
            per_beta,
            slope,
            timeout_warning,
        },
        records_by_beta,
    ))
}
