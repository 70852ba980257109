//! Closed-form droplet predictions derived from the coupling and field:
//! critical radius and area, energy barrier, transition-time prefactor and
//! gate cardinalities.

use crate::energy::{EnergyLevel, ModelParams};
use crate::polyiamond::standard_perimeter;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("degenerate regime: the fractional part of J/(2h) - 1/2 is exactly 1/2, \
             the two critical-droplet shapes are tied in energy")]
    DegenerateDelta,
    #[error("unsupported regime: the critical radius is zero (need J/(2h) - 1/2 >= 1)")]
    UnsupportedRadius,
}

/// Which side of the tie the fractional part falls on; decides the critical
/// shape family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeltaRegime {
    /// 0 < delta < 1/2: critical shapes grow out of `E_B5(r*)`.
    Small,
    /// 1/2 < delta < 1: critical shapes grow out of `E_B1(r* + 1)`.
    Large,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TheoryValues {
    pub r_star: u32,
    pub delta: f64,
    pub regime: DeltaRegime,
    /// Energy barrier between the metastable and stable states.
    pub gamma_hex: f64,
    /// Exact integer pair realizing the barrier: (perimeter, area) of the
    /// critical droplet.
    pub gamma_level: EnergyLevel,
    /// Area of the critical droplet.
    pub a_star: u64,
    /// Combinatorial prefactor in the mean transition time.
    pub k_prefactor: u32,
    /// Length of the longest side of the gate hexagon: r* + 2.
    pub l: u32,
    /// e^{beta Gamma} / k at the parameter's inverse temperature.
    pub predicted_mean_tau: f64,
    /// The mixing time grows as e^{beta Gamma}: log-asymptotic exponent.
    pub predicted_log_mixing_exponent: f64,
}

/// Evaluates all droplet predictions. Fails in the degenerate regimes the
/// formulas do not cover.
pub fn theory_values(params: &ModelParams) -> Result<TheoryValues, TheoryError> {
    let ratio = params.radius_ratio();
    let r_star_f = ratio.floor();
    let delta = ratio - r_star_f;
    if r_star_f < 1.0 {
        return Err(TheoryError::UnsupportedRadius);
    }
    if delta == 0.5 {
        return Err(TheoryError::DegenerateDelta);
    }
    let r_star = r_star_f as u32;
    let r = r_star as u64;
    let regime = if delta < 0.5 { DeltaRegime::Small } else { DeltaRegime::Large };
    let a_star = match regime {
        DeltaRegime::Small => 6 * r * r + 10 * r + 5,
        DeltaRegime::Large => 6 * (r + 1) * (r + 1) + 2 * (r + 1) + 1,
    };
    let k_prefactor = match regime {
        DeltaRegime::Small => 5 * (r_star + 1),
        DeltaRegime::Large => 10 * (r_star + 1),
    };
    let gamma_level = EnergyLevel::new(standard_perimeter(a_star) as i64, a_star as i64);
    let gamma_hex = gamma_level.realize(params);
    Ok(TheoryValues {
        r_star,
        delta,
        regime,
        gamma_hex,
        gamma_level,
        a_star,
        k_prefactor,
        l: r_star + 2,
        predicted_mean_tau: (params.beta() * gamma_hex).exp() / k_prefactor as f64,
        predicted_log_mixing_exponent: gamma_hex,
    })
}

/// Energy of the standard polyiamond of a given area relative to all-minus:
/// `J p(S(A)) - h A`.
pub fn standard_energy(area: u64, params: &ModelParams) -> f64 {
    EnergyLevel::new(standard_perimeter(area) as i64, area as i64).realize(params)
}

/// Cardinalities of the two gate families on a torus of side `L`:
/// droplets with a protuberance pair forming a rhombus, and droplets with
/// the pair split at distance two.
pub fn gate_cardinalities(params: &ModelParams, side: u32) -> Result<(u64, u64), TheoryError> {
    let tv = theory_values(params)?;
    let lambda = 2 * (side as u64) * (side as u64);
    let l1 = (tv.l - 1) as u64;
    Ok(match tv.regime {
        DeltaRegime::Small => (6 * l1 * lambda, 3 * l1 * lambda),
        DeltaRegime::Large => (12 * l1 * lambda, 6 * l1 * lambda),
    })
}
