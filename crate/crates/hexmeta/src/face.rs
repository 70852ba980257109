//! Faces of the infinite triangular lattice and their isometries.
//!
//! A face is addressed by the unit cell `(x, y)` it lives in together with
//! its orientation. Cell coordinates are taken with respect to the basis
//! `e1 = (1, 0)`, `e2 = (1/2, sqrt(3)/2)`. The up face of cell `(x, y)` has
//! vertices `(x, y)`, `(x+1, y)`, `(x, y+1)`; the down face has vertices
//! `(x+1, y)`, `(x, y+1)`, `(x+1, y+1)`. Two faces are adjacent exactly when
//! they share an edge, which makes the face-adjacency graph 3-regular.

use std::collections::BTreeSet;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Face {
    pub x: i32,
    pub y: i32,
    pub up: bool,
}

impl Face {
    pub fn up(x: i32, y: i32) -> Self {
        Face { x, y, up: true }
    }

    pub fn down(x: i32, y: i32) -> Self {
        Face { x, y, up: false }
    }

    /// The three faces sharing an edge with `self`.
    pub fn neighbors(&self) -> [Face; 3] {
        if self.up {
            [
                Face::down(self.x, self.y),
                Face::down(self.x - 1, self.y),
                Face::down(self.x, self.y - 1),
            ]
        } else {
            [
                Face::up(self.x, self.y),
                Face::up(self.x + 1, self.y),
                Face::up(self.x, self.y + 1),
            ]
        }
    }

    pub fn is_adjacent(&self, other: &Face) -> bool {
        self.neighbors().contains(other)
    }

    /// Faces at triangular-lattice distance two: not adjacent but sharing
    /// an adjacent face.
    pub fn at_distance_two(&self, other: &Face) -> bool {
        if self == other || self.is_adjacent(other) {
            return false;
        }
        let n2 = other.neighbors();
        self.neighbors().iter().any(|f| n2.contains(f))
    }

    /// Vertices in cell coordinates, counter-clockwise.
    pub fn vertices(&self) -> [(i32, i32); 3] {
        if self.up {
            [(self.x, self.y), (self.x + 1, self.y), (self.x, self.y + 1)]
        } else {
            [(self.x + 1, self.y), (self.x + 1, self.y + 1), (self.x, self.y + 1)]
        }
    }

    /// Rotation by pi/3 counter-clockwise about the lattice vertex (0, 0).
    pub fn rot60(&self) -> Face {
        if self.up {
            Face::down(-self.y - 1, self.x + self.y)
        } else {
            Face::up(-self.y - 1, self.x + self.y + 1)
        }
    }

    /// Reflection across the bisector of the two basis vectors.
    pub fn mirror(&self) -> Face {
        Face {
            x: self.y,
            y: self.x,
            up: self.up,
        }
    }

    pub fn translate(&self, dx: i32, dy: i32) -> Face {
        Face {
            x: self.x + dx,
            y: self.y + dy,
            up: self.up,
        }
    }
}

/// Applies the `k`-th element of the point group (k in 0..12): rotations by
/// `k * pi/3` for k < 6, the same rotations composed with the mirror for
/// k >= 6.
pub fn apply_isometry(face: Face, k: usize) -> Face {
    let mut f = if k >= 6 { face.mirror() } else { face };
    for _ in 0..(k % 6) {
        f = f.rot60();
    }
    f
}

pub const ISOMETRY_COUNT: usize = 12;
pub const ROTATION_COUNT: usize = 6;

/// Translates a face set so its lexicographic minimum sits at the origin
/// cell, then sorts it. Shape equality up to translation reduces to equality
/// of normalized sets.
pub fn normalize(faces: &[Face]) -> Vec<Face> {
    let dx = faces.iter().map(|f| f.x).min().unwrap_or(0);
    let dy = faces.iter().map(|f| f.y).min().unwrap_or(0);
    let mut out: Vec<Face> = faces.iter().map(|f| f.translate(-dx, -dy)).collect();
    out.sort_unstable();
    out
}

/// Canonical representative of a face set under the full isometry group
/// (12 point-group elements times translations): the lexicographically
/// smallest normalized image.
pub fn canonical_form(faces: &[Face]) -> Vec<Face> {
    canonical_over(faces, ISOMETRY_COUNT)
}

/// Canonical representative under rotations and translations only.
pub fn canonical_form_rotations(faces: &[Face]) -> Vec<Face> {
    canonical_over(faces, ROTATION_COUNT)
}

fn canonical_over(faces: &[Face], group: usize) -> Vec<Face> {
    let mut best: Option<Vec<Face>> = None;
    for k in 0..group {
        let image: Vec<Face> = faces.iter().map(|f| apply_isometry(*f, k)).collect();
        let norm = normalize(&image);
        match &best {
            Some(b) if *b <= norm => {}
            _ => best = Some(norm),
        }
    }
    best.unwrap_or_default()
}

/// Edge-connectivity of a face set.
pub fn is_edge_connected(faces: &[Face]) -> bool {
    if faces.is_empty() {
        return false;
    }
    let set: BTreeSet<Face> = faces.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut stack = vec![*faces.first().unwrap()];
    seen.insert(stack[0]);
    while let Some(f) = stack.pop() {
        for n in f.neighbors() {
            if set.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == set.len()
}
