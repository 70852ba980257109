//! The reference path from all-minus to all-plus: grow standard polyiamonds
//! clockwise while they embed cleanly on the torus, then close the torus
//! with a greedy bar-filling sweep. The energy profile along the path
//! certifies the barrier and the saddle locations.

use crate::energy::{delta_energy, EnergyLevel, ModelParams};
use crate::lattice::{LatticeTopology, SpinConfiguration};
use crate::polyiamond::{quasi_regular_area, standard_spiral};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefPathError {
    #[error("torus side {side} is too small: the standard droplet of radius {needed_radius} \
             does not embed without self-interaction")]
    LatticeTooSmall { side: u32, needed_radius: u32 },
}

/// A single-flip path from all-minus together with its exact energy
/// profile; `profile[k]` is the level after `k` flips, so `profile[0]` is
/// the all-minus level. Every flip on this path turns a minus into a plus,
/// hence the plus count after `k` flips is `k`.
#[derive(Clone, Debug)]
pub struct FlipPath {
    pub flips: Vec<usize>,
    pub profile: Vec<EnergyLevel>,
    /// Number of leading flips whose prefixes are standard polyiamonds
    /// embedded without wrapping.
    pub prewrap_len: usize,
}

/// Maximum of the realized profile and where it is attained.
#[derive(Clone, Debug)]
pub struct BarrierCertificate {
    pub max: f64,
    pub max_level: EnergyLevel,
    /// Areas (= path positions) where the maximum is attained.
    pub argmax_areas: Vec<u64>,
}

/// Profile maximum between two consecutive quasi-regular hexagons along
/// the path.
#[derive(Clone, Copy, Debug)]
pub struct SegmentHeight {
    pub radius: u32,
    pub bars: u8,
    pub max: f64,
    pub argmax_area: u64,
}

/// Profile maximum between two consecutive regular hexagons.
#[derive(Clone, Copy, Debug)]
pub struct RingHeight {
    pub radius: u32,
    pub max: f64,
    pub argmax_area: u64,
}

/// Builds the reference path. The torus must accommodate the regular
/// hexagon three radii past the critical one, so that every segment the
/// saddle comparisons need lies in the clean-embedding phase.
pub fn build_reference_path(
    params: &ModelParams,
    topo: &LatticeTopology,
) -> Result<FlipPath, RefPathError> {
    let ratio = params.radius_ratio();
    let needed_radius = if ratio >= 1.0 { ratio.floor() as u32 + 3 } else { 3 };
    let needed_area = quasi_regular_area(needed_radius, 0);

    let n = topo.site_count();
    let spiral = standard_spiral(n);
    let mut config = SpinConfiguration::all_minus(topo);
    let mut flips = Vec::with_capacity(n);
    let mut profile = Vec::with_capacity(n + 1);
    let mut level = EnergyLevel::default();
    profile.push(level);

    // Phase 1: follow the spiral while each prefix embeds cleanly, i.e.
    // the face is still free and its filled-neighbor count on the torus
    // equals the count in the infinite lattice.
    let mut filled_infinite: std::collections::HashSet<crate::face::Face> =
        std::collections::HashSet::new();
    for face in &spiral {
        let site = topo.site_of(face);
        if config.spin(site) > 0 {
            break;
        }
        let infinite_adjacent = face
            .neighbors()
            .iter()
            .filter(|nb| filled_infinite.contains(*nb))
            .count() as u32;
        if config.plus_neighbors(site, topo) != infinite_adjacent {
            break;
        }
        level += delta_energy(&config, site, topo);
        config.flip(site, topo);
        filled_infinite.insert(*face);
        flips.push(site);
        profile.push(level);
    }
    let prewrap_len = flips.len();
    if (prewrap_len as u64) < needed_area {
        return Err(RefPathError::LatticeTooSmall {
            side: topo.side(),
            needed_radius,
        });
    }

    // Phase 2: the droplet now interacts with itself around the torus.
    // Fill the remaining minus sites bar by bar: take the flip with the
    // most plus neighbors, break ties toward the last flipped site, then
    // by site index.
    while (config.plus_count() as usize) < n {
        let last = *flips.last().unwrap();
        let last_neighbors = topo.neighbors(last);
        let mut best: Option<(u32, bool, std::cmp::Reverse<usize>)> = None;
        let mut best_site = usize::MAX;
        for site in 0..n {
            if config.spin(site) > 0 {
                continue;
            }
            let a = config.plus_neighbors(site, topo);
            if a == 0 {
                continue;
            }
            let adjacent_to_last = last_neighbors.contains(&(site as u32));
            let key = (a, adjacent_to_last, std::cmp::Reverse(site));
            if best.is_none() || key > best.unwrap() {
                best = Some(key);
                best_site = site;
            }
        }
        let site = best_site;
        level += delta_energy(&config, site, topo);
        config.flip(site, topo);
        flips.push(site);
        profile.push(level);
    }
    debug_assert_eq!(level, EnergyLevel::new(0, n as i64));

    Ok(FlipPath {
        flips,
        profile,
        prewrap_len,
    })
}

/// Maximum of the realized energy along the path.
pub fn barrier(path: &FlipPath, params: &ModelParams) -> BarrierCertificate {
    let realized: Vec<f64> = path.profile.iter().map(|l| l.realize(params)).collect();
    let max = realized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax_areas: Vec<u64> = realized
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == max)
        .map(|(i, _)| i as u64)
        .collect();
    let max_level = path.profile[argmax_areas[0] as usize];
    BarrierCertificate {
        max,
        max_level,
        argmax_areas,
    }
}

/// Profile maxima between consecutive quasi-regular hexagons
/// `E_{B_i}(r) -> E_{B_{i+1}}(r)`, for every segment that lies in the
/// clean-embedding phase.
pub fn communication_heights(path: &FlipPath, params: &ModelParams) -> Vec<SegmentHeight> {
    let mut out = Vec::new();
    let mut radius = 1u32;
    while quasi_regular_area(radius, 6) <= path.prewrap_len as u64 {
        for bars in 0..6u8 {
            let start = quasi_regular_area(radius, bars);
            let end = quasi_regular_area(radius, bars + 1);
            let (max, argmax_area) = segment_max(path, params, start, end);
            out.push(SegmentHeight {
                radius,
                bars,
                max,
                argmax_area,
            });
        }
        radius += 1;
    }
    out
}

/// Profile maxima between consecutive regular hexagons `E(r) -> E(r+1)`;
/// radius zero covers the segment from all-minus to the first hexagon.
pub fn ring_heights(path: &FlipPath, params: &ModelParams) -> Vec<RingHeight> {
    let mut out = Vec::new();
    let mut radius = 0u32;
    loop {
        let start = if radius == 0 { 0 } else { quasi_regular_area(radius, 0) };
        let end = quasi_regular_area(radius, 6);
        if end > path.prewrap_len as u64 {
            break;
        }
        let (max, argmax_area) = segment_max(path, params, start, end);
        out.push(RingHeight {
            radius,
            max,
            argmax_area,
        });
        radius += 1;
    }
    out
}

fn segment_max(path: &FlipPath, params: &ModelParams, start: u64, end: u64) -> (f64, u64) {
    let mut max = f64::NEG_INFINITY;
    let mut argmax = start;
    for area in start..=end {
        let v = path.profile[area as usize].realize(params);
        if v > max {
            max = v;
            argmax = area;
        }
    }
    (max, argmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyiamond::standard_perimeter;
    use approx::assert_relative_eq;

    #[test]
    fn too_small_lattice_is_rejected() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        // r* = 1, so E(4) with 96 faces is needed; L = 4 has only 32 sites.
        let topo = LatticeTopology::new(4).unwrap();
        assert!(matches!(
            build_reference_path(&params, &topo),
            Err(RefPathError::LatticeTooSmall { .. })
        ));
    }

    #[test]
    fn path_reaches_all_plus_and_profile_is_exact() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        assert_eq!(path.flips.len(), topo.site_count());
        assert_eq!(path.profile.len(), topo.site_count() + 1);
        assert_eq!(path.profile[0], EnergyLevel::default());
        assert_eq!(*path.profile.last().unwrap(), EnergyLevel::new(0, 288));

        // Replay the flips and compare the profile step by step.
        let mut config = SpinConfiguration::all_minus(&topo);
        let mut level = EnergyLevel::default();
        for (k, &site) in path.flips.iter().enumerate() {
            let delta = delta_energy(&config, site, &topo);
            // Single-flip deltas only.
            assert_eq!(delta.n_plus, 1);
            level += delta;
            config.flip(site, &topo);
            assert_eq!(path.profile[k + 1], level);
        }
    }

    #[test]
    fn prewrap_prefixes_are_standard_levels() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        // E(4) = 96 faces must fit on L = 12.
        assert!(path.prewrap_len as u64 >= quasi_regular_area(4, 0));
        for area in 1..=path.prewrap_len as u64 {
            let level = path.profile[area as usize];
            assert_eq!(level.n_plus, area as i64);
            assert_eq!(level.n_gamma, standard_perimeter(area) as i64, "area {area}");
        }
    }

    #[test]
    fn first_flip_and_bar_rhythm() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        // Isolated plus costs 3J - h.
        let d0 = path.profile[1] - path.profile[0];
        assert_eq!(d0, EnergyLevel::new(3, 1));
        // One bar addition: after two flips the level sits 2J - 2h above
        // the bar start (the elementary rhombus of the saddle).
        // Segment E(1) -> E_B1(1) starts at area 6.
        let bar_start = path.profile[6];
        let two_in = path.profile[8];
        let diff = two_in - bar_start;
        assert_eq!(diff, EnergyLevel::new(2, 2));
    }

    #[test]
    fn wrap_phase_stays_below_prewrap_maximum() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        let prewrap_max = path.profile[..=path.prewrap_len]
            .iter()
            .map(|l| l.realize(&params))
            .fold(f64::NEG_INFINITY, f64::max);
        let wrap_max = path.profile[path.prewrap_len..]
            .iter()
            .map(|l| l.realize(&params))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(wrap_max < prewrap_max);
    }

    #[test]
    fn barrier_at_critical_area_for_small_radius() {
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        let cert = barrier(&path, &params);
        assert_relative_eq!(cert.max, 28.4, epsilon = 1e-9);
        assert_eq!(cert.argmax_areas, vec![21]);
        assert_eq!(cert.max_level, EnergyLevel::new(13, 21));
    }

    #[test]
    fn segment_maxima_follow_the_rhombus_rule() {
        // The maximum between consecutive quasi-regular hexagons sits two
        // units past the smaller one.
        let params = ModelParams::new(3.8, 1.0, 0.5);
        let topo = LatticeTopology::new(12).unwrap();
        let path = build_reference_path(&params, &topo).unwrap();
        for seg in communication_heights(&path, &params) {
            let hex_area = quasi_regular_area(seg.radius, seg.bars);
            let bar_size = quasi_regular_area(seg.radius, seg.bars + 1) - hex_area;
            // The first bar at radius one is a single face; the rhombus
            // saddle needs a bar of at least two faces.
            let expect = if bar_size >= 2 { hex_area + 2 } else { hex_area + 1 };
            assert_eq!(seg.argmax_area, expect, "r={} i={}", seg.radius, seg.bars);
            assert_relative_eq!(
                seg.max,
                crate::theory::standard_energy(expect, &params),
                epsilon = 1e-9
            );
        }
    }
}
