//! The Metropolis chain: pick a site uniformly, flip it with probability
//! `min(1, e^{-beta dH})`. Hitting-time runs go from all-minus to all-plus
//! and can match critical-area crossings against the gate shapes.
//!
//! Randomness is pinned: every replica runs `ChaCha8` seeded with the base
//! seed on stream `replica index`, so ensembles are bit-stable at any level
//! of parallelism.

use crate::energy::{delta_energy, EnergyLevel, ModelParams};
use crate::gates::{GateShape, GateShapes};
use crate::lattice::{lifted_cluster_at, LatticeTopology, SpinConfiguration};
use crate::theory::theory_values;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Acceptance probabilities for the eight possible moves, indexed by the
/// current spin and the number of plus neighbors. Precomputing them removes
/// all transcendental calls from the step loop.
#[derive(Clone, Copy, Debug)]
pub struct FlipTable {
    accept: [[f64; 4]; 2],
}

impl FlipTable {
    pub fn new(params: &ModelParams) -> Self {
        let mut accept = [[0.0; 4]; 2];
        for a in 0..4 {
            let dh_up = (3 - 2 * a) as f64 * params.coupling() - params.field();
            let dh_down = (2 * a - 3) as f64 * params.coupling() + params.field();
            accept[0][a as usize] = (-params.beta() * dh_up).exp().min(1.0);
            accept[1][a as usize] = (-params.beta() * dh_down).exp().min(1.0);
        }
        FlipTable { accept }
    }

    #[inline]
    pub fn acceptance(&self, spin: i8, plus_neighbors: u32) -> f64 {
        self.accept[usize::from(spin > 0)][plus_neighbors as usize]
    }
}

/// One Metropolis step; returns the proposed site and whether it flipped.
pub fn step(
    config: &mut SpinConfiguration,
    topo: &LatticeTopology,
    table: &FlipTable,
    rng: &mut impl Rng,
) -> (usize, bool) {
    let site = rng.random_range(0..topo.site_count());
    let p = table.acceptance(config.spin(site), config.plus_neighbors(site, topo));
    let accepted = p >= 1.0 || rng.random::<f64>() < p;
    if accepted {
        config.flip(site, topo);
    }
    (site, accepted)
}

/// Outcome of one hitting-time run from all-minus.
#[derive(Clone, Debug, Serialize)]
pub struct HittingRecord {
    pub replica: u32,
    pub seed: u64,
    /// Chain steps until the first visit to all-plus; `None` on timeout.
    pub tau: Option<u64>,
    pub accepted_flips: u64,
    /// Whether any cluster reaching the critical area matched a gate shape.
    pub gate_visited: bool,
    /// Gate family matched at the last critical-area event before
    /// absorption, if that event was a gate configuration.
    pub gate_shape_last: Option<GateShape>,
    pub max_level: EnergyLevel,
    pub max_energy: f64,
}

/// Default step budget: one hundred times the predicted mean transition
/// time, capped at 2^48. Falls back to the cap when the droplet formulas do
/// not apply.
pub fn default_max_steps(params: &ModelParams) -> u64 {
    const CAP: u64 = 1 << 48;
    match theory_values(params) {
        Ok(tv) => {
            let budget = 100.0 * tv.predicted_mean_tau;
            if budget.is_finite() && budget < CAP as f64 {
                budget.ceil() as u64
            } else {
                CAP
            }
        }
        Err(_) => CAP,
    }
}

/// Runs the chain from all-minus until all-plus or until the step budget is
/// exhausted. When gate shapes are supplied, every flip after which the
/// affected cluster sits at the critical area is checked for a gate match;
/// the trigger is per cluster rather than on the global plus count, since
/// at positive temperature stray plus spins elsewhere would otherwise hide
/// the droplet's own critical crossings.
pub fn run_hitting(
    params: &ModelParams,
    topo: &LatticeTopology,
    base_seed: u64,
    replica: u32,
    max_steps: u64,
    gate: Option<&GateShapes>,
) -> HittingRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(replica as u64);
    let table = FlipTable::new(params);
    let mut config = SpinConfiguration::all_minus(topo);
    let n = topo.site_count() as u32;
    let critical = gate.map(|g| g.critical_area() as usize);

    let mut level = EnergyLevel::default();
    let mut max_level = level;
    let mut max_energy = 0.0f64;
    let mut accepted_flips = 0u64;
    let mut gate_visited = false;
    let mut gate_shape_last: Option<GateShape> = None;

    let mut steps = 0u64;
    let tau = loop {
        if config.plus_count() == n {
            break Some(steps);
        }
        if steps == max_steps {
            break None;
        }
        let site = rng.random_range(0..topo.site_count());
        let a = config.plus_neighbors(site, topo);
        let p = table.acceptance(config.spin(site), a);
        let accepted = p >= 1.0 || rng.random::<f64>() < p;
        steps += 1;
        if accepted {
            level += delta_energy(&config, site, topo);
            config.flip(site, topo);
            accepted_flips += 1;
            let e = level.realize(params);
            if e > max_energy {
                max_energy = e;
                max_level = level;
            }
            if let Some(a_star) = critical {
                // Clusters touching the flipped site: the grown cluster
                // after an upward flip, or up to three fragments after a
                // downward one.
                let mut hit = false;
                let mut matched = None;
                if config.spin(site) > 0 {
                    if let Some(faces) = lifted_cluster_at(&config, topo, site, a_star) {
                        if faces.len() == a_star {
                            hit = true;
                            matched = gate.unwrap().match_cluster(&faces);
                        }
                    }
                } else {
                    for &nb in topo.neighbors(site).iter() {
                        let nb = nb as usize;
                        if config.spin(nb) < 0 {
                            continue;
                        }
                        if let Some(faces) = lifted_cluster_at(&config, topo, nb, a_star) {
                            if faces.len() == a_star {
                                hit = true;
                                matched = matched.or(gate.unwrap().match_cluster(&faces));
                            }
                        }
                    }
                }
                if hit {
                    gate_visited |= matched.is_some();
                    gate_shape_last = matched;
                }
            }
            if cfg!(debug_assertions) && accepted_flips % (1 << 20) == 0 {
                let (plus, contour) = config.recompute(topo);
                debug_assert_eq!(level, EnergyLevel::new(contour as i64, plus as i64));
            }
        }
    };

    HittingRecord {
        replica,
        seed: base_seed,
        tau,
        accepted_flips,
        gate_visited,
        gate_shape_last,
        max_level,
        max_energy,
    }
}

/// Ensemble statistics over completed replicas.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleSummary {
    pub replicas: u32,
    pub completed: u32,
    pub timeouts: u32,
    pub mean_tau: f64,
    pub stderr_tau: f64,
    /// Empirical (1 - 1/e) quantile of the hitting time: the finite-sample
    /// stand-in for the theoretical time scale of the exponential law.
    pub t_beta_estimate: f64,
    /// Mean hitting time over the quantile estimate.
    pub mean_over_t_beta: f64,
    pub gate_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub records: Vec<HittingRecord>,
    pub summary: EnsembleSummary,
}

/// Runs `n` independent replicas in parallel. Each replica derives its own
/// RNG stream, so the result is independent of thread scheduling.
pub fn replica_ensemble(
    params: &ModelParams,
    topo: &LatticeTopology,
    n: u32,
    base_seed: u64,
    max_steps: u64,
    gate: Option<&GateShapes>,
) -> EnsembleResult {
    let records: Vec<HittingRecord> = (0..n)
        .into_par_iter()
        .map(|replica| run_hitting(params, topo, base_seed, replica, max_steps, gate))
        .collect();
    let summary = summarize(&records);
    EnsembleResult { records, summary }
}

pub fn summarize(records: &[HittingRecord]) -> EnsembleSummary {
    let taus: Vec<f64> = records.iter().filter_map(|r| r.tau).map(|t| t as f64).collect();
    let completed = taus.len() as u32;
    let timeouts = records.len() as u32 - completed;
    let mean = if taus.is_empty() {
        f64::NAN
    } else {
        taus.iter().sum::<f64>() / taus.len() as f64
    };
    let stderr = if taus.len() > 1 {
        let var = taus.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (taus.len() - 1) as f64;
        (var / taus.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    let t_beta = quantile(&taus, 1.0 - (-1.0f64).exp());
    let gate_fraction = if records.is_empty() {
        0.0
    } else {
        records.iter().filter(|r| r.gate_visited).count() as f64 / records.len() as f64
    };
    EnsembleSummary {
        replicas: records.len() as u32,
        completed,
        timeouts,
        mean_tau: mean,
        stderr_tau: stderr,
        t_beta_estimate: t_beta,
        mean_over_t_beta: mean / t_beta,
        gate_fraction,
    }
}

/// Empirical quantile: smallest sample value with at least a `q` fraction
/// of the sample at or below it.
fn quantile(samples: &[f64], q: f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn topo2() -> LatticeTopology {
        LatticeTopology::new(2).unwrap()
    }

    #[test]
    fn downhill_moves_always_accepted() {
        let params = ModelParams::new(1.0, 0.5, 2.0);
        let table = FlipTable::new(&params);
        // Isolated up spin: dH = -(3J - h) < 0.
        assert_eq!(table.acceptance(1, 0), 1.0);
        // Down spin with two plus neighbors: dH = -(J + h) < 0.
        assert_eq!(table.acceptance(-1, 2), 1.0);
        // Up spin surrounded by pluses: dH = 3J + h > 0.
        assert!(table.acceptance(1, 3) < 1.0);
    }

    #[test]
    fn acceptance_example() {
        // dH = 3J - h with J = 1, h = 0.5, beta = 1: acceptance e^{-2.5}.
        let params = ModelParams::new(1.0, 0.5, 1.0);
        let table = FlipTable::new(&params);
        assert_relative_eq!(table.acceptance(-1, 0), (-2.5f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn fixed_seed_is_bit_stable() {
        let params = ModelParams::new(1.0, 0.5, 1.0);
        let topo = topo2();
        let a = run_hitting(&params, &topo, 42, 0, 1 << 20, None);
        let b = run_hitting(&params, &topo, 42, 0, 1 << 20, None);
        assert_eq!(a.tau, b.tau);
        assert_eq!(a.accepted_flips, b.accepted_flips);
        assert_eq!(a.max_level, b.max_level);
        let c = run_hitting(&params, &topo, 43, 0, 1 << 20, None);
        assert!(a.tau != c.tau || a.accepted_flips != c.accepted_flips);
    }

    #[test]
    fn hitting_needs_at_least_site_count_steps() {
        let params = ModelParams::new(1.0, 0.5, 1.5);
        let topo = topo2();
        for replica in 0..20 {
            let r = run_hitting(&params, &topo, 7, replica, 1 << 22, None);
            let tau = r.tau.expect("L = 2 absorbs quickly at this beta");
            assert!(tau >= topo.site_count() as u64);
            assert!(r.accepted_flips >= topo.site_count() as u64);
        }
    }

    #[test]
    fn timeout_yields_none() {
        let params = ModelParams::new(1.0, 0.5, 3.0);
        let topo = topo2();
        let r = run_hitting(&params, &topo, 1, 0, 4, None);
        assert_eq!(r.tau, None);
    }

    #[test]
    fn ensemble_is_deterministic_across_thread_counts() {
        let params = ModelParams::new(1.0, 0.5, 1.0);
        let topo = topo2();
        let a = replica_ensemble(&params, &topo, 64, 5, 1 << 20, None);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = single.install(|| replica_ensemble(&params, &topo, 64, 5, 1 << 20, None));
        let taus_a: Vec<_> = a.records.iter().map(|r| r.tau).collect();
        let taus_b: Vec<_> = b.records.iter().map(|r| r.tau).collect();
        assert_eq!(taus_a, taus_b);
        assert_eq!(a.summary.mean_tau, b.summary.mean_tau);
    }

    #[test]
    fn single_replica_summary_matches_record() {
        let params = ModelParams::new(1.0, 0.5, 1.0);
        let topo = topo2();
        let e = replica_ensemble(&params, &topo, 1, 9, 1 << 20, None);
        assert_eq!(e.summary.replicas, 1);
        assert_relative_eq!(e.summary.mean_tau, e.records[0].tau.unwrap() as f64);
    }

    #[test]
    fn quantile_of_known_sample() {
        let samples: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        // 1 - 1/e is about 0.632: the 64th order statistic.
        assert_eq!(quantile(&samples, 1.0 - (-1.0f64).exp()), 64.0);
        assert_eq!(quantile(&samples, 0.5), 50.0);
    }

    #[test]
    fn gate_detection_runs_on_supported_parameters() {
        // Small but supported droplet regime on a lattice big enough for
        // the critical cluster; moderate beta keeps the run fast.
        let params = ModelParams::new(3.8, 1.0, 0.45);
        let topo = LatticeTopology::new(12).unwrap();
        let shapes = GateShapes::for_params(&params).unwrap();
        let r = run_hitting(&params, &topo, 11, 3, 1 << 26, Some(&shapes));
        assert!(r.tau.is_some());
        // The run crossed the critical area on its way to absorption, so
        // the maximum level is at least the barrier.
        assert!(r.max_energy >= shapes.values.gamma_hex - 1e-9);
    }
}
