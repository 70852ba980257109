//! Exhaustive enumeration of free polyiamonds by canonical-form growth.

use super::{Polyiamond, PolyiamondError};
use crate::face::{self, Face};
use std::collections::HashSet;

/// Free 13-iamonds already number close to ten thousand; the cap guards
/// against accidentally exponential requests. Callers may raise it.
pub const DEFAULT_ENUMERATION_CAP: usize = 13;

/// All free polyiamonds of the given area, one canonical representative
/// each, sorted for deterministic output.
pub fn enumerate_polyiamonds(area: usize, cap: usize) -> Result<Vec<Polyiamond>, PolyiamondError> {
    if area == 0 {
        return Err(PolyiamondError::Empty);
    }
    if area > cap {
        return Err(PolyiamondError::EnumerationCapExceeded { requested: area, cap });
    }
    let mut level: HashSet<Vec<Face>> = HashSet::new();
    level.insert(face::canonical_form(&[Face::up(0, 0)]));
    for _ in 1..area {
        let mut next: HashSet<Vec<Face>> = HashSet::with_capacity(level.len() * 4);
        for shape in &level {
            let occupied: HashSet<Face> = shape.iter().copied().collect();
            let mut tried: HashSet<Face> = HashSet::new();
            for f in shape {
                for n in f.neighbors() {
                    if occupied.contains(&n) || !tried.insert(n) {
                        continue;
                    }
                    let mut grown = shape.clone();
                    grown.push(n);
                    next.insert(face::canonical_form(&grown));
                }
            }
        }
        level = next;
    }
    let mut shapes: Vec<Vec<Face>> = level.into_iter().collect();
    shapes.sort();
    Ok(shapes
        .into_iter()
        .map(|faces| Polyiamond::new(faces).expect("grown shapes are edge-connected"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_polyiamond_counts() {
        // Known counts of free polyiamonds by area.
        let expected = [1usize, 1, 1, 3, 4, 12, 24, 66];
        for (i, want) in expected.iter().enumerate() {
            let area = i + 1;
            let got = enumerate_polyiamonds(area, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(got.len(), *want, "area {area}");
            for p in &got {
                assert_eq!(p.area() as usize, area);
                assert!(p.is_canonical());
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_polyiamonds(14, DEFAULT_ENUMERATION_CAP),
            Err(PolyiamondError::EnumerationCapExceeded { requested: 14, cap: 13 })
        ));
        assert!(enumerate_polyiamonds(5, 5).is_ok());
    }

    #[test]
    fn distinct_tetriamonds_have_distinct_canonical_forms() {
        let tetr = enumerate_polyiamonds(4, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(tetr.len(), 3);
        let forms: HashSet<_> = tetr.iter().map(|p| p.faces().to_vec()).collect();
        assert_eq!(forms.len(), 3);
    }
}
