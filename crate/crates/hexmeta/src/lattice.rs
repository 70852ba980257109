//! The periodic hexagonal lattice and spin configurations on it.
//!
//! Sites of the hexagonal lattice are in bijection with the faces of the
//! dual triangular lattice. The torus is an `L x L` rhombus of unit cells,
//! each holding one up face and one down face, so there are `2 L^2` sites
//! and the site index is `2 * (y * L + x) + orientation`.

use crate::face::Face;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("side length {0} is too small: the torus needs L >= 2")]
    SideTooSmall(u32),
}

/// Site indexing and the 3-neighbor table of the hexagonal torus.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct LatticeTopology {
    side: u32,
    neighbors: Vec<[u32; 3]>,
}

impl LatticeTopology {
    pub fn new(side: u32) -> Result<Self, LatticeError> {
        if side < 2 {
            return Err(LatticeError::SideTooSmall(side));
        }
        let l = side as i64;
        let n = (2 * l * l) as usize;
        let mut neighbors = Vec::with_capacity(n);
        for site in 0..n {
            let f = face_of_index(site, side);
            let mut ns = [0u32; 3];
            for (k, nb) in f.neighbors().into_iter().enumerate() {
                ns[k] = index_of_face(&nb, side) as u32;
            }
            neighbors.push(ns);
        }
        Ok(LatticeTopology { side, neighbors })
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn site_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, site: usize) -> [u32; 3] {
        self.neighbors[site]
    }

    /// Triangular-face coordinate of a site: cell row, cell column and
    /// orientation.
    pub fn face_of(&self, site: usize) -> Face {
        face_of_index(site, self.side)
    }

    /// Site of a (possibly out-of-range) face coordinate, wrapping
    /// periodically.
    pub fn site_of(&self, face: &Face) -> usize {
        index_of_face(face, self.side)
    }

    /// Number of unordered neighbor pairs.
    pub fn edge_count(&self) -> usize {
        3 * self.site_count() / 2
    }
}

fn face_of_index(site: usize, side: u32) -> Face {
    let cell = site / 2;
    let l = side as usize;
    Face {
        x: (cell % l) as i32,
        y: (cell / l) as i32,
        up: site % 2 == 0,
    }
}

fn index_of_face(face: &Face, side: u32) -> usize {
    let l = side as i64;
    let x = (face.x as i64).rem_euclid(l) as usize;
    let y = (face.y as i64).rem_euclid(l) as usize;
    2 * (y * side as usize + x) + usize::from(!face.up)
}

/// A spin assignment with cached plus count and contour length. The caches
/// are maintained incrementally under single flips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
    plus_count: u32,
    contour_length: u32,
}

impl SpinConfiguration {
    pub fn all_minus(topo: &LatticeTopology) -> Self {
        SpinConfiguration {
            spins: vec![-1; topo.site_count()],
            plus_count: 0,
            contour_length: 0,
        }
    }

    pub fn all_plus(topo: &LatticeTopology) -> Self {
        SpinConfiguration {
            spins: vec![1; topo.site_count()],
            plus_count: topo.site_count() as u32,
            contour_length: 0,
        }
    }

    pub fn from_spins(spins: Vec<i8>, topo: &LatticeTopology) -> Self {
        assert_eq!(spins.len(), topo.site_count());
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        let mut config = SpinConfiguration {
            spins,
            plus_count: 0,
            contour_length: 0,
        };
        let (plus, contour) = config.recompute(topo);
        config.plus_count = plus;
        config.contour_length = contour;
        config
    }

    /// All-minus background with the given sites flipped up.
    pub fn with_plus_sites(sites: &[usize], topo: &LatticeTopology) -> Self {
        let mut spins = vec![-1i8; topo.site_count()];
        for &s in sites {
            spins[s] = 1;
        }
        Self::from_spins(spins, topo)
    }

    pub fn spin(&self, site: usize) -> i8 {
        self.spins[site]
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn plus_count(&self) -> u32 {
        self.plus_count
    }

    pub fn contour_length(&self) -> u32 {
        self.contour_length
    }

    /// Number of plus neighbors of a site.
    pub fn plus_neighbors(&self, site: usize, topo: &LatticeTopology) -> u32 {
        topo.neighbors(site)
            .iter()
            .filter(|&&n| self.spins[n as usize] > 0)
            .count() as u32
    }

    /// Flips one spin, updating the caches in O(1).
    pub fn flip(&mut self, site: usize, topo: &LatticeTopology) {
        let a = self.plus_neighbors(site, topo) as i32;
        if self.spins[site] > 0 {
            self.spins[site] = -1;
            self.plus_count -= 1;
            self.contour_length = (self.contour_length as i32 + (2 * a - 3)) as u32;
        } else {
            self.spins[site] = 1;
            self.plus_count += 1;
            self.contour_length = (self.contour_length as i32 + (3 - 2 * a)) as u32;
        }
    }

    /// Recomputes (plus count, contour length) from scratch.
    pub fn recompute(&self, topo: &LatticeTopology) -> (u32, u32) {
        let plus = self.spins.iter().filter(|&&s| s > 0).count() as u32;
        let mut contour = 0u32;
        for site in 0..topo.site_count() {
            for &n in topo.neighbors(site).iter() {
                if (n as usize) > site && self.spins[site] != self.spins[n as usize] {
                    contour += 1;
                }
            }
        }
        (plus, contour)
    }

    pub fn plus_sites(&self) -> Vec<usize> {
        (0..self.spins.len()).filter(|&i| self.spins[i] > 0).collect()
    }
}

/// Winding behavior of a connected component of equal-spin faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WrapClass {
    /// Contractible: lifts to a finite patch of the infinite lattice.
    Contractible,
    /// Winds around exactly one torus direction.
    Strip,
    /// Winds around both torus directions.
    Spanning,
}

/// A maximal edge-connected set of same-spin faces.
#[derive(Clone, Debug)]
pub struct Component {
    pub sites: Vec<usize>,
    pub class: WrapClass,
    /// Lift to the infinite lattice; present only for contractible
    /// components.
    pub lifted: Option<Vec<Face>>,
}

/// Plus components are clusters, plus strips or torus-spanning; minus
/// components are holes, minus strips or the sea of minuses.
#[derive(Clone, Debug)]
pub struct ClusterDecomposition {
    pub plus: Vec<Component>,
    pub minus: Vec<Component>,
}

impl ClusterDecomposition {
    pub fn plus_area_total(&self) -> u64 {
        self.plus.iter().map(|c| c.sites.len() as u64).sum()
    }
}

/// Splits a configuration into its maximal edge-connected components of
/// plus and of minus faces, classifying each by winding.
pub fn clusters(config: &SpinConfiguration, topo: &LatticeTopology) -> ClusterDecomposition {
    let mut decomposition = ClusterDecomposition {
        plus: Vec::new(),
        minus: Vec::new(),
    };
    let mut seen = vec![false; topo.site_count()];
    for start in 0..topo.site_count() {
        if seen[start] {
            continue;
        }
        let spin = config.spin(start);
        let component = explore(start, spin, config, topo, &mut seen);
        if spin > 0 {
            decomposition.plus.push(component);
        } else {
            decomposition.minus.push(component);
        }
    }
    decomposition
}

fn explore(
    start: usize,
    spin: i8,
    config: &SpinConfiguration,
    topo: &LatticeTopology,
    seen: &mut [bool],
) -> Component {
    let side = topo.side() as i64;
    // BFS assigning each visited site an unwrapped face coordinate; a
    // revisit with a different lift reveals a winding vector.
    let mut lift: HashMap<usize, Face> = HashMap::new();
    let mut sites = vec![start];
    let mut queue = std::collections::VecDeque::new();
    seen[start] = true;
    lift.insert(start, topo.face_of(start));
    queue.push_back(start);
    let mut windings: Vec<(i64, i64)> = Vec::new();
    while let Some(site) = queue.pop_front() {
        let here = lift[&site];
        for nb in here.neighbors() {
            let nb_site = topo.site_of(&nb);
            if config.spin(nb_site) != spin {
                continue;
            }
            match lift.get(&nb_site) {
                Some(prev) => {
                    let wx = (nb.x - prev.x) as i64;
                    let wy = (nb.y - prev.y) as i64;
                    if wx != 0 || wy != 0 {
                        debug_assert!(wx % side == 0 && wy % side == 0);
                        windings.push((wx / side, wy / side));
                    }
                }
                None => {
                    seen[nb_site] = true;
                    lift.insert(nb_site, nb);
                    sites.push(nb_site);
                    queue.push_back(nb_site);
                }
            }
        }
    }
    sites.sort_unstable();
    let class = match winding_rank(&windings) {
        0 => WrapClass::Contractible,
        1 => WrapClass::Strip,
        _ => WrapClass::Spanning,
    };
    let lifted = (class == WrapClass::Contractible).then(|| {
        let mut faces: Vec<Face> = sites.iter().map(|s| lift[s]).collect();
        faces.sort_unstable();
        faces
    });
    Component { sites, class, lifted }
}

/// Lifts the plus faces to the infinite lattice when they form a single
/// contractible component; returns `None` for empty, split or winding plus
/// sets. Used on the hot path of gate detection.
pub fn lift_plus_cluster(config: &SpinConfiguration, topo: &LatticeTopology) -> Option<Vec<Face>> {
    let plus_total = config.plus_count() as usize;
    if plus_total == 0 {
        return None;
    }
    let start = (0..topo.site_count()).find(|&s| config.spin(s) > 0).unwrap();
    let mut lift: HashMap<usize, Face> = HashMap::with_capacity(plus_total);
    let mut queue = std::collections::VecDeque::new();
    lift.insert(start, topo.face_of(start));
    queue.push_back(start);
    while let Some(site) = queue.pop_front() {
        let here = lift[&site];
        for nb in here.neighbors() {
            let nb_site = topo.site_of(&nb);
            if config.spin(nb_site) < 0 {
                continue;
            }
            match lift.get(&nb_site) {
                Some(prev) => {
                    if *prev != nb {
                        return None; // winds around the torus
                    }
                }
                None => {
                    lift.insert(nb_site, nb);
                    queue.push_back(nb_site);
                }
            }
        }
    }
    if lift.len() != plus_total {
        return None; // more than one component
    }
    let mut faces: Vec<Face> = lift.into_values().collect();
    faces.sort_unstable();
    Some(faces)
}

/// Lifts the plus cluster containing `site` to the infinite lattice,
/// aborting with `None` if the cluster exceeds `cap` faces or winds around
/// the torus. Used on the hot path of gate detection, so the search is
/// bounded.
pub fn lifted_cluster_at(
    config: &SpinConfiguration,
    topo: &LatticeTopology,
    site: usize,
    cap: usize,
) -> Option<Vec<Face>> {
    if config.spin(site) < 0 {
        return None;
    }
    let mut lift: HashMap<usize, Face> = HashMap::with_capacity(cap + 1);
    let mut queue = std::collections::VecDeque::new();
    lift.insert(site, topo.face_of(site));
    queue.push_back(site);
    while let Some(s) = queue.pop_front() {
        let here = lift[&s];
        for nb in here.neighbors() {
            let nb_site = topo.site_of(&nb);
            if config.spin(nb_site) < 0 {
                continue;
            }
            match lift.get(&nb_site) {
                Some(prev) => {
                    if *prev != nb {
                        return None; // winds around the torus
                    }
                }
                None => {
                    if lift.len() == cap {
                        return None;
                    }
                    lift.insert(nb_site, nb);
                    queue.push_back(nb_site);
                }
            }
        }
    }
    let mut faces: Vec<Face> = lift.into_values().collect();
    faces.sort_unstable();
    Some(faces)
}

/// Rank of the integer lattice spanned by the winding vectors.
fn winding_rank(windings: &[(i64, i64)]) -> usize {
    let mut basis: Vec<(i64, i64)> = Vec::new();
    for &w in windings {
        if w == (0, 0) {
            continue;
        }
        match basis.len() {
            0 => basis.push(w),
            1 => {
                if basis[0].0 * w.1 - basis[0].1 * w.0 != 0 {
                    basis.push(w);
                    break;
                }
            }
            _ => break,
        }
    }
    basis.len()
}
