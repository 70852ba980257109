//! Metropolis dynamics for the Ising model on a hexagonal-lattice torus,
//! together with the exact and combinatorial machinery needed to check its
//! low-temperature nucleation behavior at desk scale: triangular-lattice
//! polyiamond geometry and isoperimetric oracles, closed-form droplet
//! predictions, reference-path energy profiles, exact computations on tiny
//! state spaces, and a seeded parallel simulation harness.

pub mod energy;
pub mod exact;
pub mod face;
pub mod gates;
pub mod lattice;
pub mod metropolis;
pub mod polyiamond;
pub mod refpath;
pub mod stats;
pub mod sweep;
pub mod theory;

pub use energy::{
    delta_energy, energy_level, validate_params, ConditionReport, EnergyLevel, ModelParams,
};
pub use lattice::{clusters, ClusterDecomposition, LatticeTopology, SpinConfiguration};
pub use polyiamond::Polyiamond;
pub use theory::{gate_cardinalities, standard_energy, theory_values, TheoryValues};
