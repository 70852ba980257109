//! The critical-droplet gate: the two families of configurations every
//! optimal transition path must cross, and their exhaustive enumeration on
//! the torus.
//!
//! Depending on the fractional part of `J/(2h) - 1/2` the gate hexagon is
//! `E_B5(r*)` (one longest side) or `E_B1(r* + 1)` (two longest sides).
//! The gate consists of that hexagon plus two extra faces on a longest
//! side, either edge-adjacent (a protuberance pair forming a rhombus) or
//! split at triangular-lattice distance two.

use crate::energy::ModelParams;
use crate::face::{self, Face, ISOMETRY_COUNT, ROTATION_COUNT};
use crate::lattice::LatticeTopology;
use crate::polyiamond::{quasi_regular_hexagon, Polyiamond};
use crate::theory::{theory_values, DeltaRegime, TheoryError, TheoryValues};
use std::collections::HashSet;

/// Which gate family a configuration matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum GateShape {
    /// Hexagon plus an elementary rhombus on a longest side.
    Rhombus,
    /// Hexagon plus two units at distance two on a longest side.
    Split,
}

/// The gate shapes for a parameter set, as infinite-lattice polyiamonds and
/// as canonical forms for fast cluster matching.
#[derive(Clone, Debug)]
pub struct GateShapes {
    pub values: TheoryValues,
    pub rhombus_variants: Vec<Polyiamond>,
    pub split_variants: Vec<Polyiamond>,
    canon_rhombus: HashSet<Vec<Face>>,
    canon_split: HashSet<Vec<Face>>,
}

impl GateShapes {
    pub fn for_params(params: &ModelParams) -> Result<Self, TheoryError> {
        let values = theory_values(params)?;
        let hexagon = match values.regime {
            DeltaRegime::Small => quasi_regular_hexagon(values.r_star, 5),
            DeltaRegime::Large => quasi_regular_hexagon(values.r_star + 1, 1),
        }
        .expect("gate hexagon exists for r* >= 1");
        debug_assert_eq!(hexagon.area(), values.a_star - 2);

        let sides = hexagon.sides();
        let longest = sides.iter().map(|s| s.len()).max().unwrap();
        debug_assert_eq!(longest, values.l as usize);
        let mut rhombus_variants = Vec::new();
        let mut split_variants = Vec::new();
        for side in sides.iter().filter(|s| s.len() == longest) {
            // Base faces across the side edges; between consecutive base
            // faces sits one inverted face, adjacent to both.
            for pair in side.windows(2) {
                let between = pair[0]
                    .neighbors()
                    .into_iter()
                    .find(|f| f.is_adjacent(&pair[1]))
                    .expect("consecutive attachment faces share a neighbor");
                debug_assert!(!hexagon.contains(&between));
                for base in [pair[0], pair[1]] {
                    let mut faces = hexagon.faces().to_vec();
                    faces.extend([base, between]);
                    rhombus_variants.push(Polyiamond::new(faces).unwrap());
                }
                let mut faces = hexagon.faces().to_vec();
                faces.extend([pair[0], pair[1]]);
                split_variants.push(Polyiamond::new(faces).unwrap());
            }
        }
        let canon_rhombus = rhombus_variants
            .iter()
            .map(|p| p.canonical_form().faces().to_vec())
            .collect();
        let canon_split = split_variants
            .iter()
            .map(|p| p.canonical_form().faces().to_vec())
            .collect();
        Ok(GateShapes {
            values,
            rhombus_variants,
            split_variants,
            canon_rhombus,
            canon_split,
        })
    }

    pub fn critical_area(&self) -> u64 {
        self.values.a_star
    }

    /// Matches a lifted cluster (faces on the infinite lattice) against the
    /// gate families, up to isometry.
    pub fn match_cluster(&self, lifted: &[Face]) -> Option<GateShape> {
        if lifted.len() as u64 != self.values.a_star {
            return None;
        }
        let canon = face::canonical_form(lifted);
        if self.canon_rhombus.contains(&canon) {
            Some(GateShape::Rhombus)
        } else if self.canon_split.contains(&canon) {
            Some(GateShape::Split)
        } else {
            None
        }
    }
}

/// Result of enumerating all torus placements of the gate shapes.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GateCount {
    /// Distinct spin configurations with a rhombus-type critical cluster.
    pub rhombus_configs: u64,
    /// Distinct spin configurations with a split-type critical cluster.
    pub split_configs: u64,
    /// Same counts when placements are restricted to rotations only (no
    /// reflections); the gate families are mirror-closed, so these agree
    /// with the full counts.
    pub rhombus_configs_rotations_only: u64,
    pub split_configs_rotations_only: u64,
}

/// Places every gate variant on the torus in all orientations and
/// translations and counts distinct spin configurations.
pub fn enumerate_gate_configurations(
    shapes: &GateShapes,
    topo: &LatticeTopology,
) -> GateCount {
    let count = |variants: &[Polyiamond], group: usize| -> u64 {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let side = topo.side() as i32;
        for variant in variants {
            for k in 0..group {
                let image: Vec<Face> = variant
                    .faces()
                    .iter()
                    .map(|f| face::apply_isometry(*f, k))
                    .collect();
                for dx in 0..side {
                    for dy in 0..side {
                        let mut sites: Vec<u32> = image
                            .iter()
                            .map(|f| topo.site_of(&f.translate(dx, dy)) as u32)
                            .collect();
                        sites.sort_unstable();
                        sites.dedup();
                        if sites.len() == variant.faces().len() {
                            seen.insert(sites);
                        }
                    }
                }
            }
        }
        seen.len() as u64
    };
    GateCount {
        rhombus_configs: count(&shapes.rhombus_variants, ISOMETRY_COUNT),
        split_configs: count(&shapes.split_variants, ISOMETRY_COUNT),
        rhombus_configs_rotations_only: count(&shapes.rhombus_variants, ROTATION_COUNT),
        split_configs_rotations_only: count(&shapes.split_variants, ROTATION_COUNT),
    }
}
