//! Constructors for the droplet shapes: regular and quasi-regular hexagons,
//! the clockwise standard-polyiamond spiral, defective shapes and the
//! cut-corner hexagon parametrization.

use super::{Polyiamond, PolyiamondError};
use crate::face::Face;
use std::collections::HashSet;

/// Identifies the quasi-regular hexagon with `bars` complete bars attached
/// to the regular hexagon of the given radius. Six bars close the next
/// radius, so `(r, 6)` names the same shape as `(r + 1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuasiRegularId {
    pub radius: u32,
    pub bars: u8,
}

impl QuasiRegularId {
    pub fn area(&self) -> u64 {
        quasi_regular_area(self.radius, self.bars)
    }
}

/// Output of the standard-polyiamond construction for a given area:
/// radius, number of complete bars, cardinality of the incomplete bar, and
/// the enclosing/enclosed quasi-regular hexagons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StandardDecomposition {
    pub radius: u32,
    pub bars: u8,
    pub incomplete: u64,
    /// Smallest quasi-regular hexagon containing at least the given area.
    pub min_hexagon: QuasiRegularId,
    /// Largest quasi-regular hexagon containing at most the given area.
    pub max_hexagon: QuasiRegularId,
}

/// Area of the quasi-regular hexagon `E_{B_m}(r)`: the regular hexagon of
/// radius `r` carries `6r^2` faces and the bars have cardinalities
/// `2r-1, 2r+1, 2r+1, 2r+1, 2r+1, 2r+3`.
pub fn quasi_regular_area(radius: u32, bars: u8) -> u64 {
    let r = radius as u64;
    let extra = match bars {
        0 => 0,
        1 => 2 * r - 1,
        2 => 4 * r,
        3 => 6 * r + 1,
        4 => 8 * r + 2,
        5 => 10 * r + 3,
        6 => 12 * r + 6,
        _ => panic!("a quasi-regular hexagon has at most six bars"),
    };
    6 * r * r + extra
}

fn hexnorm(x: i32, y: i32) -> i32 {
    x.abs().max(y.abs()).max((x + y).abs())
}

fn in_hexagon(f: &Face, r: i32) -> bool {
    f.vertices().iter().all(|&(x, y)| hexnorm(x, y) <= r)
}

/// Face set of the regular hexagon of radius `r` centered at the origin
/// vertex; `r = 0` yields the empty set.
pub fn hexagon_faces(r: u32) -> Vec<Face> {
    let r = r as i32;
    let mut out = Vec::new();
    for x in -r - 1..=r {
        for y in -r - 1..=r {
            for f in [Face::up(x, y), Face::down(x, y)] {
                if in_hexagon(&f, r) {
                    out.push(f);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn regular_hexagon(r: u32) -> Result<Polyiamond, PolyiamondError> {
    if r == 0 {
        return Err(PolyiamondError::Empty);
    }
    Polyiamond::new(hexagon_faces(r))
}

/// The first regular hexagon, listed clockwise starting from its top face.
const FIRST_HEXAGON: [Face; 6] = [
    Face { x: -1, y: 0, up: false },
    Face { x: 0, y: 0, up: true },
    Face { x: 0, y: -1, up: false },
    Face { x: 0, y: -1, up: true },
    Face { x: -1, y: -1, up: false },
    Face { x: -1, y: 0, up: true },
];

/// The annulus `E(r+1) - E(r)` ordered as a clockwise cycle starting with
/// the first face of the bar on the top side of `E(r)`. Splitting the cycle
/// into consecutive arcs of sizes `2r-1, 2r+1, 2r+1, 2r+1, 2r+1, 2r+3`
/// yields the six bars in their clockwise attachment order.
pub fn ring_cycle(r: u32) -> Vec<Face> {
    assert!(r >= 1);
    let ri = r as i32;
    let ring: HashSet<Face> = hexagon_faces(r + 1)
        .into_iter()
        .filter(|f| !in_hexagon(f, ri))
        .collect();
    let expected = 12 * r as usize + 6;
    debug_assert_eq!(ring.len(), expected);

    let start = Face::up(-ri, ri);
    let second = Face::down(-ri, ri);
    debug_assert!(ring.contains(&start) && ring.contains(&second));
    let mut cycle = Vec::with_capacity(expected);
    cycle.push(start);
    let mut prev = start;
    let mut cur = second;
    while cur != start {
        cycle.push(cur);
        let next = cur
            .neighbors()
            .into_iter()
            .find(|n| *n != prev && ring.contains(n))
            .expect("the annulus of a hexagon is a single face-width cycle");
        prev = cur;
        cur = next;
    }
    debug_assert_eq!(cycle.len(), expected);
    cycle
}

/// The clockwise growth order of standard polyiamonds: the first `A` faces
/// form the standard polyiamond of area `A`, so prefixes are nested.
pub fn standard_spiral(area: usize) -> Vec<Face> {
    let mut faces = Vec::with_capacity(area);
    faces.extend_from_slice(&FIRST_HEXAGON[..area.min(6)]);
    let mut r = 1;
    while faces.len() < area {
        let ring = ring_cycle(r);
        let take = (area - faces.len()).min(ring.len());
        faces.extend_from_slice(&ring[..take]);
        r += 1;
    }
    faces
}

/// The quasi-regular hexagon `E_{B_m}(r)` for `r >= 1` and `m` in `0..=6`.
pub fn quasi_regular_hexagon(r: u32, bars: u8) -> Result<Polyiamond, PolyiamondError> {
    if bars > 6 {
        return Err(PolyiamondError::InvalidBars(bars));
    }
    if r == 0 {
        return Err(PolyiamondError::Empty);
    }
    let area = quasi_regular_area(r, bars) as usize;
    Polyiamond::new(standard_spiral(area))
}

/// The standard polyiamond of the given area: spiral prefix.
pub fn standard_polyiamond(area: u64) -> Result<Polyiamond, PolyiamondError> {
    if area == 0 {
        return Err(PolyiamondError::Empty);
    }
    Polyiamond::new(standard_spiral(area as usize))
}

/// Radius, bar count and incomplete-bar cardinality realizing a given area,
/// together with the enclosing quasi-regular hexagons. Areas below six are
/// handled by the convention that the standard polyiamond is a prefix of
/// the first hexagon.
pub fn standard_decomposition(area: u64) -> StandardDecomposition {
    assert!(area >= 1);
    if area < 6 {
        return StandardDecomposition {
            radius: 0,
            bars: 0,
            incomplete: area,
            min_hexagon: QuasiRegularId { radius: 1, bars: 0 },
            max_hexagon: QuasiRegularId { radius: 0, bars: 0 },
        };
    }
    let mut r = ((area as f64) / 6.0).sqrt().floor() as u64;
    while 6 * (r + 1) * (r + 1) <= area {
        r += 1;
    }
    while 6 * r * r > area {
        r -= 1;
    }
    let radius = r as u32;
    let l = area - 6 * r * r;
    // Cumulative bar cardinalities after each complete bar.
    let cum = [
        0,
        2 * r - 1,
        4 * r,
        6 * r + 1,
        8 * r + 2,
        10 * r + 3,
        12 * r + 6,
    ];
    for i in 0..6u8 {
        if l == cum[i as usize] {
            return StandardDecomposition {
                radius,
                bars: i,
                incomplete: 0,
                min_hexagon: QuasiRegularId { radius, bars: i },
                max_hexagon: QuasiRegularId { radius, bars: i },
            };
        }
        if l < cum[i as usize + 1] {
            return StandardDecomposition {
                radius,
                bars: i,
                incomplete: l - cum[i as usize],
                min_hexagon: QuasiRegularId { radius, bars: i + 1 },
                max_hexagon: QuasiRegularId { radius, bars: i },
            };
        }
    }
    unreachable!("area below 6(r+1)^2 falls in one of the seven cases")
}

/// Minimal edge-perimeter at the given area: `6r + i + 1 + 1` with the two
/// indicators for a non-empty and an even incomplete bar. Areas below six
/// follow the prefix convention.
pub fn standard_perimeter(area: u64) -> u64 {
    assert!(area >= 1);
    if area <= 5 {
        return area + 2;
    }
    let d = standard_decomposition(area);
    6 * d.radius as u64
        + d.bars as u64
        + u64::from(d.incomplete > 0)
        + u64::from(d.incomplete > 0 && d.incomplete % 2 == 0)
}

/// Cut-corner hexagon parameters: an equilateral triangle of side `d` with
/// equilateral corners of sides `a`, `b`, `c` removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HexagonParams {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl HexagonParams {
    pub fn is_valid(&self) -> bool {
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        d >= 1 && a + b <= d && a + c <= d && b + c <= d && d * d > a * a + b * b + c * c
    }

    pub fn area(&self) -> u64 {
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        d * d - a * a - b * b - c * c
    }

    pub fn site_perimeter(&self) -> u64 {
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        3 * d - a - b - c
    }
}

/// Builds the hexagon `T^d_{a,b,c}`: corners of sides `a`, `b`, `c` are cut
/// at the vertices `(0,0)`, `(d,0)` and `(0,d)` of the triangle.
pub fn hexagon_from_params(hp: HexagonParams) -> Result<Polyiamond, PolyiamondError> {
    if !hp.is_valid() {
        return Err(PolyiamondError::InvalidHexagonParams {
            a: hp.a,
            b: hp.b,
            c: hp.c,
            d: hp.d,
        });
    }
    let (a, b, c, d) = (hp.a as i32, hp.b as i32, hp.c as i32, hp.d as i32);
    let mut faces = Vec::new();
    for x in 0..d {
        for y in 0..d - x {
            if x + y > a - 1 && x < d - b && y < d - c {
                faces.push(Face::up(x, y));
            }
            if x + y <= d - 2 && x + y > a - 2 && x < d - b && y < d - c {
                faces.push(Face::down(x, y));
            }
        }
    }
    let poly = Polyiamond::new(faces)?;
    debug_assert_eq!(poly.area(), hp.area());
    Ok(poly)
}

/// The deficit `M = s^2 - 6 A` of a cut-corner hexagon; zero exactly for
/// regular hexagons.
pub fn hex_deficit(hp: HexagonParams) -> i64 {
    let s = hp.site_perimeter() as i64;
    s * s - 6 * hp.area() as i64
}

/// A quasi-regular hexagon of area `A - 2` with two extra faces attached to
/// one of its longest sides at triangular-lattice distance two.
pub fn defective_polyiamond(area: u64) -> Result<Polyiamond, PolyiamondError> {
    let hex_area = area.checked_sub(2).ok_or(PolyiamondError::NoDefectivePlacement(area))?;
    let mut found = None;
    let mut r = 1u32;
    while quasi_regular_area(r, 0) <= hex_area {
        for bars in 0..6u8 {
            if quasi_regular_area(r, bars) == hex_area {
                found = Some(QuasiRegularId { radius: r, bars });
            }
        }
        r += 1;
    }
    let id = found.ok_or(PolyiamondError::NoDefectivePlacement(area))?;
    let hexagon = quasi_regular_hexagon(id.radius, id.bars)?;
    let sides = hexagon.sides();
    let longest = sides.iter().map(|s| s.len()).max().unwrap_or(0);
    if longest < 3 {
        return Err(PolyiamondError::NoDefectivePlacement(area));
    }
    let side = sides.iter().find(|s| s.len() == longest).unwrap();
    let mut faces = hexagon.faces().to_vec();
    faces.push(side[0]);
    faces.push(side[1]);
    Polyiamond::new(faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hexagon_areas() {
        for r in 0..6u32 {
            assert_eq!(hexagon_faces(r).len() as u64, 6 * (r as u64) * (r as u64));
        }
    }

    #[test]
    fn first_hexagon_matches_radius_one() {
        let mut listed = FIRST_HEXAGON.to_vec();
        listed.sort_unstable();
        assert_eq!(listed, hexagon_faces(1));
    }

    #[test]
    fn ring_cycle_partitions_annulus_and_closes() {
        for r in 1..5u32 {
            let cycle = ring_cycle(r);
            assert_eq!(cycle.len(), 12 * r as usize + 6);
            // Consecutive faces (cyclically) share an edge.
            for k in 0..cycle.len() {
                assert!(cycle[k].is_adjacent(&cycle[(k + 1) % cycle.len()]));
            }
            // Together with E(r) the cycle fills E(r+1).
            let mut all = hexagon_faces(r);
            all.extend_from_slice(&cycle);
            all.sort_unstable();
            assert_eq!(all, hexagon_faces(r + 1));
        }
    }

    #[test]
    fn spiral_prefixes_are_polyiamonds_with_quasi_regular_checkpoints() {
        for area in 1..=150u64 {
            let p = standard_polyiamond(area).unwrap();
            assert_eq!(p.area(), area);
        }
        for r in 1..4u32 {
            for m in 0..=6u8 {
                let q = quasi_regular_hexagon(r, m).unwrap();
                assert_eq!(q.area(), quasi_regular_area(r, m));
                if m < 6 {
                    // Site-perimeter of a quasi-regular hexagon is 6r + m.
                    assert_eq!(q.site_perimeter(), 6 * r as u64 + m as u64);
                    assert_eq!(q.edge_perimeter(), 6 * r as u64 + m as u64);
                }
            }
        }
        // E_{B_6}(r) is E(r+1).
        assert_eq!(
            quasi_regular_hexagon(2, 6).unwrap().canonical_form(),
            regular_hexagon(3).unwrap().canonical_form()
        );
    }

    #[test]
    fn quasi_regular_hexagons_match_cut_corner_parametrization() {
        // E(r) = T^{3r}_{r,r,r}; one bar cuts one corner deeper, and so on.
        let cases: [(u32, u8, fn(u32) -> HexagonParams); 4] = [
            (2, 0, |r| HexagonParams { a: r, b: r, c: r, d: 3 * r }),
            (2, 1, |r| HexagonParams { a: r - 1, b: r, c: r, d: 3 * r }),
            (2, 3, |r| HexagonParams { a: r, b: r, c: r, d: 3 * r + 1 }),
            (3, 5, |r| HexagonParams { a: r, b: r, c: r + 1, d: 3 * r + 2 }),
        ];
        for (r, m, hp) in cases {
            let via_spiral = quasi_regular_hexagon(r, m).unwrap().canonical_form();
            let via_params = hexagon_from_params(hp(r)).unwrap().canonical_form();
            assert_eq!(via_spiral, via_params, "E_B{m}({r})");
        }
    }

    #[test]
    fn standard_decomposition_examples() {
        let d = standard_decomposition(6);
        assert_eq!((d.radius, d.bars, d.incomplete), (1, 0, 0));
        let d = standard_decomposition(21);
        assert_eq!((d.radius, d.bars, d.incomplete), (1, 5, 2));
        assert_eq!(d.max_hexagon, QuasiRegularId { radius: 1, bars: 5 });
        let d = standard_decomposition(10);
        assert_eq!((d.radius, d.bars, d.incomplete), (1, 2, 0));
        // Decomposition reproduces the area.
        for a in 1..500u64 {
            let d = standard_decomposition(a);
            assert_eq!(d.max_hexagon.area() + d.incomplete, a);
            assert!(d.max_hexagon.area() <= a && a <= d.min_hexagon.area());
        }
    }

    #[test]
    fn standard_perimeter_examples() {
        assert_eq!(standard_perimeter(6), 6);
        assert_eq!(standard_perimeter(7), 7);
        assert_eq!(standard_perimeter(21), 13);
        // The construction realizes the formula.
        for a in 1..200u64 {
            assert_eq!(
                standard_polyiamond(a).unwrap().edge_perimeter(),
                standard_perimeter(a),
                "area {a}"
            );
        }
    }

    #[test]
    fn hexagon_params_formulas() {
        let hp = HexagonParams { a: 1, b: 1, c: 1, d: 3 };
        let p = hexagon_from_params(hp).unwrap();
        assert_eq!(p.area(), 6);
        assert_eq!(p.site_perimeter(), 6);
        assert_eq!(hex_deficit(hp), 0);

        let tri = HexagonParams { a: 0, b: 0, c: 0, d: 4 };
        let p = hexagon_from_params(tri).unwrap();
        assert_eq!(p.area(), 16);
        assert_eq!(p.site_perimeter(), 12);

        assert!(hexagon_from_params(HexagonParams { a: 3, b: 3, c: 0, d: 4 }).is_err());
    }

    #[test]
    fn deficit_closed_form() {
        for d in 1..=8u32 {
            for a in 0..=d {
                for b in 0..=d {
                    for c in 0..=d {
                        let hp = HexagonParams { a, b, c, d };
                        if !hp.is_valid() {
                            continue;
                        }
                        let (ai, bi, ci, di) = (a as i64, b as i64, c as i64, d as i64);
                        let alpha = di - ai - bi - ci;
                        let beta = (ai - bi).pow(2) + (ai - ci).pow(2) + (bi - ci).pow(2);
                        assert_eq!(hex_deficit(hp), 3 * alpha * alpha + 2 * beta);
                    }
                }
            }
        }
    }

    #[test]
    fn defective_examples() {
        // Area 21: E_B5(1) of area 19 plus the two gap-separated units.
        let d21 = defective_polyiamond(21).unwrap();
        assert_eq!(d21.area(), 21);
        assert_eq!(d21.edge_perimeter(), standard_perimeter(21));
        let census = d21.angle_census();
        assert_eq!(census.five_pi_third, 1);
        assert_eq!(census.elementary_holes, 0);

        // Area 29 = ||E_B1(2)|| + 2.
        let d29 = defective_polyiamond(29).unwrap();
        assert_eq!(d29.area(), 29);
        assert_eq!(d29.edge_perimeter(), standard_perimeter(29));

        // Area 20 would need a quasi-regular hexagon of area 18.
        assert!(matches!(
            defective_polyiamond(20),
            Err(PolyiamondError::NoDefectivePlacement(20))
        ));
    }

    #[test]
    fn spiral_prefix_monotone() {
        let big = standard_spiral(200);
        for a in 1..200 {
            assert_eq!(&big[..a], &standard_spiral(a)[..]);
        }
    }
}
