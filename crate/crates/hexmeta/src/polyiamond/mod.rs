//! Polyiamonds: finite edge-connected unions of triangular faces, with the
//! area/perimeter/angle machinery used to reason about droplet shapes.

mod enumerate;
mod shapes;

pub use enumerate::{enumerate_polyiamonds, DEFAULT_ENUMERATION_CAP};
pub use shapes::{
    defective_polyiamond, hex_deficit, hexagon_from_params, quasi_regular_area,
    quasi_regular_hexagon, regular_hexagon, ring_cycle, standard_decomposition, standard_perimeter,
    standard_polyiamond, standard_spiral, HexagonParams, QuasiRegularId, StandardDecomposition,
};

use crate::face::{self, Face};
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyiamondError {
    #[error("a polyiamond must contain at least one face")]
    Empty,
    #[error("faces are not edge-connected")]
    Disconnected,
    #[error("invalid bar count {0}: a quasi-regular hexagon has 0..=6 bars")]
    InvalidBars(u8),
    #[error("invalid hexagon parameters (a={a}, b={b}, c={c}, d={d})")]
    InvalidHexagonParams { a: u32, b: u32, c: u32, d: u32 },
    #[error("no defective polyiamond of area {0}: area - 2 is not a quasi-regular hexagon with a longest side of length >= 3")]
    NoDefectivePlacement(u64),
    #[error("enumeration area {requested} exceeds the cap {cap}")]
    EnumerationCapExceeded { requested: usize, cap: usize },
}

/// An edge-connected, non-empty set of triangular faces. Faces are kept
/// sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polyiamond {
    faces: Vec<Face>,
}

/// Counts of internal angles along the oriented boundary, together with the
/// two derived quantities entering the site/edge perimeter relation.
///
/// An empty face sharing exactly two edges with the polyiamond marks a
/// 5pi/3 internal angle at the vertex where those edges meet, and an
/// elementary hole shows three of them. `nu` counts the two-edge faces
/// directly: at a vertex visited by several boundary passages the walk
/// splits the reflex angle between passages, so the raw `five_pi_third`
/// tally can differ on such pinched shapes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AngleCensus {
    pub pi_third: usize,
    pub two_pi_third: usize,
    pub pi: usize,
    pub four_pi_third: usize,
    pub five_pi_third: usize,
    /// Empty faces sharing exactly two edges with the polyiamond.
    pub nu: usize,
    /// Empty faces sharing all three edges: single-face holes.
    pub elementary_holes: usize,
}

/// An oriented lattice edge: start vertex plus one of the six unit
/// directions.
type OrientedEdge = ((i32, i32), u8);

impl Polyiamond {
    pub fn new(faces: Vec<Face>) -> Result<Self, PolyiamondError> {
        let set: BTreeSet<Face> = faces.into_iter().collect();
        if set.is_empty() {
            return Err(PolyiamondError::Empty);
        }
        let faces: Vec<Face> = set.into_iter().collect();
        if !face::is_edge_connected(&faces) {
            return Err(PolyiamondError::Disconnected);
        }
        Ok(Polyiamond { faces })
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.faces.binary_search(f).is_ok()
    }

    pub fn area(&self) -> u64 {
        self.faces.len() as u64
    }

    /// Number of unit edges separating a face of the polyiamond from an
    /// empty face.
    pub fn edge_perimeter(&self) -> u64 {
        let shared: u64 = self
            .faces
            .iter()
            .map(|f| f.neighbors().iter().filter(|n| self.contains(n)).count() as u64)
            .sum();
        // Every internal adjacency is seen from both sides.
        3 * self.area() - shared
    }

    /// Number of distinct empty faces sharing at least one edge with the
    /// polyiamond.
    pub fn site_perimeter(&self) -> u64 {
        let mut empty: HashSet<Face> = HashSet::new();
        for f in &self.faces {
            for n in f.neighbors() {
                if !self.contains(&n) {
                    empty.insert(n);
                }
            }
        }
        empty.len() as u64
    }

    /// Finite maximal edge-connected components of empty faces.
    pub fn holes(&self) -> Vec<Vec<Face>> {
        let (min_x, max_x, min_y, max_y) = self.bounds();
        let in_box = |f: &Face| {
            f.x >= min_x - 2 && f.x <= max_x + 2 && f.y >= min_y - 2 && f.y <= max_y + 2
        };
        let on_rim = |f: &Face| {
            f.x == min_x - 2 || f.x == max_x + 2 || f.y == min_y - 2 || f.y == max_y + 2
        };
        let mut seen: HashSet<Face> = HashSet::new();
        let mut holes = Vec::new();
        for x in (min_x - 2)..=(max_x + 2) {
            for y in (min_y - 2)..=(max_y + 2) {
                for f in [Face::up(x, y), Face::down(x, y)] {
                    if self.contains(&f) || seen.contains(&f) {
                        continue;
                    }
                    let mut component = vec![f];
                    let mut stack = vec![f];
                    seen.insert(f);
                    let mut touches_rim = on_rim(&f);
                    while let Some(g) = stack.pop() {
                        for n in g.neighbors() {
                            if !in_box(&n) || self.contains(&n) || !seen.insert(n) {
                                continue;
                            }
                            touches_rim |= on_rim(&n);
                            component.push(n);
                            stack.push(n);
                        }
                    }
                    if !touches_rim {
                        component.sort_unstable();
                        holes.push(component);
                    }
                }
            }
        }
        holes.sort();
        holes
    }

    /// Tallies the internal angle at every boundary passage, walking the
    /// exterior boundary counter-clockwise and hole boundaries clockwise.
    pub fn angle_census(&self) -> AngleCensus {
        let mut census = AngleCensus::default();
        for cycle in self.boundary_cycles() {
            for (_, angle) in cycle {
                match angle {
                    1 => census.pi_third += 1,
                    2 => census.two_pi_third += 1,
                    3 => census.pi += 1,
                    4 => census.four_pi_third += 1,
                    5 => census.five_pi_third += 1,
                    _ => unreachable!("internal angles are k*pi/3 with k in 1..=5"),
                }
            }
        }
        // Classify adjacent empty faces by how many edges they share.
        let mut shared: HashMap<Face, u32> = HashMap::new();
        for f in &self.faces {
            for n in f.neighbors() {
                if !self.contains(&n) {
                    *shared.entry(n).or_insert(0) += 1;
                }
            }
        }
        census.nu = shared.values().filter(|&&c| c == 2).count();
        census.elementary_holes = shared.values().filter(|&&c| c == 3).count();
        debug_assert_eq!(
            census.elementary_holes,
            self.holes().iter().filter(|h| h.len() == 1).count()
        );
        census
    }

    /// Checks p = s + nu + 2e, with nu and e obtained from the boundary walk
    /// and hole detection rather than from per-face edge counting.
    pub fn site_edge_relation_holds(&self) -> bool {
        let census = self.angle_census();
        self.edge_perimeter()
            == self.site_perimeter() + census.nu as u64 + 2 * census.elementary_holes as u64
    }

    /// Boundary sides: maximal straight runs of boundary edges. Each side is
    /// reported as the ordered list of empty faces across its edges, so a
    /// side of length `s` carries `s` attachment positions.
    pub fn sides(&self) -> Vec<Vec<Face>> {
        let mut sides = Vec::new();
        for cycle in self.boundary_cycles() {
            let n = cycle.len();
            // The angle stored with each edge is the one at its start
            // vertex; a run of edges is straight when the angles between
            // them are pi. Start right after a corner.
            let corner = match (0..n).find(|&i| cycle[(i + 1) % n].1 != 3) {
                Some(i) => i,
                None => continue,
            };
            let mut run: Vec<Face> = Vec::new();
            for k in 1..=n {
                let (edge, _) = cycle[(corner + k) % n];
                run.push(across(edge));
                let next_angle = cycle[(corner + k + 1) % n].1;
                if next_angle != 3 {
                    sides.push(std::mem::take(&mut run));
                }
            }
        }
        sides
    }

    fn bounds(&self) -> (i32, i32, i32, i32) {
        let min_x = self.faces.iter().map(|f| f.x).min().unwrap();
        let max_x = self.faces.iter().map(|f| f.x).max().unwrap();
        let min_y = self.faces.iter().map(|f| f.y).min().unwrap();
        let max_y = self.faces.iter().map(|f| f.y).max().unwrap();
        (min_x, max_x, min_y, max_y)
    }

    /// Canonical representative under translations, rotations by multiples
    /// of pi/3 and reflection.
    pub fn canonical_form(&self) -> Polyiamond {
        Polyiamond {
            faces: face::canonical_form(&self.faces),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.faces == face::canonical_form(&self.faces)
    }

    /// Closed boundary walks. Every edge carries the polyiamond on its left
    /// and is annotated with the internal angle at its start vertex.
    fn boundary_cycles(&self) -> Vec<Vec<(OrientedEdge, u8)>> {
        let mut out_edges: HashMap<(i32, i32), [bool; 6]> = HashMap::new();
        let mut pending: BTreeSet<OrientedEdge> = BTreeSet::new();
        for f in &self.faces {
            for n in f.neighbors() {
                if self.contains(&n) {
                    continue;
                }
                let (u, dir) = oriented_boundary_edge(f, &n);
                out_edges.entry(u).or_default()[dir as usize] = true;
                pending.insert((u, dir));
            }
        }

        let mut cycles = Vec::new();
        while let Some(&(start, start_dir)) = pending.iter().next() {
            let mut edges: Vec<OrientedEdge> = Vec::new();
            let mut entry_angles: Vec<u8> = Vec::new();
            let mut u = start;
            let mut dir = start_dir;
            loop {
                pending.remove(&(u, dir));
                edges.push((u, dir));
                let v = step(u, dir);
                // Sweep clockwise from the reversed incoming direction; the
                // number of (necessarily filled) wedges crossed before the
                // next outgoing boundary edge is the internal angle at v.
                let rev = (dir + 3) % 6;
                let mut turns = 0u8;
                let next_dir = loop {
                    turns += 1;
                    let cand = (rev + 6 - turns) % 6;
                    if out_edges.get(&v).is_some_and(|dirs| dirs[cand as usize]) {
                        break cand;
                    }
                    assert!(turns < 6, "boundary walk failed to find an outgoing edge");
                };
                entry_angles.push(turns);
                u = v;
                dir = next_dir;
                if (u, dir) == (start, start_dir) {
                    break;
                }
            }
            // entry_angles[k] is the angle at the END of edge k, i.e. at the
            // start of edge k+1 (cyclically).
            let n = edges.len();
            let cycle: Vec<(OrientedEdge, u8)> = (0..n)
                .map(|k| (edges[k], entry_angles[(k + n - 1) % n]))
                .collect();
            cycles.push(cycle);
        }
        cycles
    }
}

const DIRS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn step(v: (i32, i32), dir: u8) -> (i32, i32) {
    let d = DIRS[dir as usize];
    (v.0 + d.0, v.1 + d.1)
}

fn dir_index(d: (i32, i32)) -> u8 {
    DIRS.iter()
        .position(|&x| x == d)
        .expect("not a unit lattice direction") as u8
}

/// The two faces flanking the lattice edge from `a` to `b`.
fn flanking_faces(a: (i32, i32), b: (i32, i32)) -> [Face; 2] {
    match (b.0 - a.0, b.1 - a.1) {
        (1, 0) => [Face::up(a.0, a.1), Face::down(a.0, a.1 - 1)],
        (-1, 0) => [Face::up(b.0, b.1), Face::down(b.0, b.1 - 1)],
        (0, 1) => [Face::up(a.0, a.1), Face::down(a.0 - 1, a.1)],
        (0, -1) => [Face::up(b.0, b.1), Face::down(b.0 - 1, b.1)],
        (-1, 1) => [Face::up(b.0, a.1), Face::down(b.0, a.1)],
        (1, -1) => [Face::up(a.0, b.1), Face::down(a.0, b.1)],
        _ => unreachable!("not a unit lattice edge"),
    }
}

fn cross_from(u: (i32, i32), p: (i32, i32), q: (i32, i32)) -> i32 {
    // In cell coordinates the sign of the euclidean cross product of
    // (p - u) and (q - u) reduces to this integer expression.
    let d1 = (p.0 - u.0, p.1 - u.1);
    let d2 = (q.0 - u.0, q.1 - u.1);
    d1.0 * d2.1 - d1.1 * d2.0
}

/// The boundary edge between a filled face and an empty neighbor, oriented
/// with the filled face on the left.
fn oriented_boundary_edge(filled: &Face, empty: &Face) -> OrientedEdge {
    let vf = filled.vertices();
    let ve = empty.vertices();
    let shared: Vec<(i32, i32)> = vf.iter().copied().filter(|v| ve.contains(v)).collect();
    debug_assert_eq!(shared.len(), 2, "faces are not edge-adjacent");
    let w = vf.iter().copied().find(|v| !shared.contains(v)).unwrap();
    let (a, b) = (shared[0], shared[1]);
    if cross_from(a, b, w) > 0 {
        (a, dir_index((b.0 - a.0, b.1 - a.1)))
    } else {
        (b, dir_index((a.0 - b.0, a.1 - b.1)))
    }
}

/// The face on the right of an oriented boundary edge (an empty face, since
/// the polyiamond lies on the left).
fn across(edge: OrientedEdge) -> Face {
    let (u, dir) = edge;
    let v = step(u, dir);
    for f in flanking_faces(u, v) {
        let w = f.vertices().into_iter().find(|&x| x != u && x != v).unwrap();
        if cross_from(u, v, w) < 0 {
            return f;
        }
    }
    unreachable!("every lattice edge has a face on its right")
}
