//! Affine polygon exchange maps with exact rational arithmetic.
//!
//! An exchange is a finite list of convex labeled cells tiling a domain, each
//! carrying a rigid map, such that the images tile the domain again. Labels
//! give the natural coding: two cells may share a label, which happens both
//! when a logical cell is stored pre-split (torus seams) and when the coding
//! deliberately merges continuity pieces (a billiard section coded by face).
//! The machinery downstream (language, diagonals, certification) is exact:
//! every boundary coincidence is detected, not approximated.

mod atlas;
mod bispecial;
mod idoc2;
mod push;
mod refine;

pub use atlas::{canonical_point, DiscComponent, DiscSet, WallAtlas};
pub use bispecial::{bispecial_stats, cassaigne_delta, BispecialStats};
pub use idoc2::{idoc2_certify, Idoc2Certificate, Idoc2Status, Idoc2Violation};
pub use push::{generalized_diagonals, DiagWitness, DiagonalTable};
pub use refine::{language, LanguageTable, RefinePiece, Word};

use crate::error::{PexError, Result};
use crate::geom::{pt, ConvexPolygon, Location, Point2};
use crate::rat::{format_rat, parse_rat, rat_i, Rat};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

/// Rigid affine map x -> M x + t with exact rational entries.
/// Row-major matrix [a, b, c, d] acts as (x, y) -> (a x + b y, c x + d y).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Isometry {
    pub m: [Rat; 4],
    pub t: Point2,
}

impl Isometry {
    pub fn identity() -> Isometry {
        Isometry {
            m: [rat_i(1), rat_i(0), rat_i(0), rat_i(1)],
            t: pt(rat_i(0), rat_i(0)),
        }
    }

    pub fn translation(v: Point2) -> Isometry {
        Isometry {
            m: [rat_i(1), rat_i(0), rat_i(0), rat_i(1)],
            t: v,
        }
    }

    pub fn new(m: [Rat; 4], t: Point2) -> Isometry {
        Isometry { m, t }
    }

    /// True iff the linear part is orthogonal (columns orthonormal), which
    /// for rational matrices pins determinant to exactly +1 or -1.
    pub fn is_orthogonal(&self) -> bool {
        let [a, b, c, d] = &self.m;
        a * a + c * c == Rat::one() && b * b + d * d == Rat::one() && a * b + c * d == Rat::zero()
    }

    pub fn is_translation(&self) -> bool {
        let [a, b, c, d] = &self.m;
        a.is_one() && b.is_zero() && c.is_zero() && d.is_one()
    }

    pub fn det(&self) -> Rat {
        let [a, b, c, d] = &self.m;
        a * d - b * c
    }

    pub fn apply(&self, p: &Point2) -> Point2 {
        let [a, b, c, d] = &self.m;
        pt(a * &p.x + b * &p.y + &self.t.x, c * &p.x + d * &p.y + &self.t.y)
    }

    pub fn apply_seg(&self, s: &crate::geom::Segment2) -> crate::geom::Segment2 {
        crate::geom::seg(self.apply(&s.a), self.apply(&s.b))
    }

    pub fn apply_poly(&self, p: &ConvexPolygon) -> ConvexPolygon {
        let verts: Vec<Point2> = p.verts().iter().map(|v| self.apply(v)).collect();
        // A rigid image of a strictly convex polygon is strictly convex.
        ConvexPolygon::from_ccw_loop(verts).expect("rigid image of a convex polygon")
    }

    /// self after other: (self.compose(other))(x) = self(other(x)).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Isometry {
            m: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
            t: self.apply(&other.t),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let det = self.det();
        assert!(!det.is_zero(), "singular isometry");
        let [a, b, c, d] = &self.m;
        let m = [d / &det, -(b / &det), -(c / &det), a / &det];
        let inv_lin = Isometry {
            m: m.clone(),
            t: pt(rat_i(0), rat_i(0)),
        };
        let ti = inv_lin.apply(&self.t);
        Isometry {
            m,
            t: pt(-ti.x, -ti.y),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Disk,
    Torus,
}

/// One stored cell: convex piece, coding label, rigid map.
#[derive(Clone, Debug)]
pub struct ExCell {
    pub label: u16,
    pub poly: ConvexPolygon,
    pub map: Isometry,
}

#[derive(Clone, Debug)]
pub struct Exchange {
    pub alphabet: Vec<String>,
    pub domain: Vec<ConvexPolygon>,
    pub cells: Vec<ExCell>,
    pub topology: Topology,
    /// Generators of the gluing lattice for torus topology (seam
    /// identifications x ~ x + g). Ignored for disks.
    pub gluings: Vec<Point2>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    OverlapOfCells { i: usize, j: usize },
    GapInCover { missing_area: Rat },
    CellOutsideDomain { i: usize },
    ImageOverlap { i: usize, j: usize },
    ImageGap { missing_area: Rat },
    NonIsometry { i: usize },
}

impl Exchange {
    pub fn label_name(&self, id: u16) -> &str {
        &self.alphabet[id as usize]
    }

    /// Distinct labels actually used by cells.
    pub fn labels_in_use(&self) -> Vec<u16> {
        let mut v: Vec<u16> = self.cells.iter().map(|c| c.label).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn domain_area(&self) -> Rat {
        self.domain.iter().map(|p| p.area()).sum()
    }

    /// Candidate gluing translations: small integer combinations of the
    /// gluing generators (plus zero first). For disks only zero.
    pub fn glue_candidates(&self) -> Vec<Point2> {
        let mut out = vec![pt(rat_i(0), rat_i(0))];
        if self.topology == Topology::Torus {
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let mut v = pt(rat_i(0), rat_i(0));
                    if let Some(g) = self.gluings.first() {
                        v = v.add(&g.scale(&rat_i(a)));
                    }
                    if let Some(g) = self.gluings.get(1) {
                        v = v.add(&g.scale(&rat_i(b)));
                    }
                    if !v.is_zero() && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// Is v in the gluing lattice? (Always false for nonzero v on disks.)
    pub fn in_glue_lattice(&self, v: &Point2) -> bool {
        if v.is_zero() {
            return true;
        }
        if self.topology == Topology::Disk {
            return false;
        }
        match self.gluings.len() {
            0 => false,
            1 => {
                let g = &self.gluings[0];
                // v = k g with integer k.
                let k = if !g.x.is_zero() { &v.x / &g.x } else { &v.y / &g.y };
                k.is_integer() && v == &g.scale(&k)
            }
            _ => {
                let g1 = &self.gluings[0];
                let g2 = &self.gluings[1];
                let det = g1.cross(g2);
                if det.is_zero() {
                    return false;
                }
                // Solve a g1 + b g2 = v.
                let a = v.cross(g2) / &det;
                let b = g1.cross(v) / &det;
                a.is_integer() && b.is_integer()
            }
        }
    }

    /// Exact two-sided partition check: cells tile the domain, images tile
    /// the domain, every map is rigid. Returns the first violation found.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        for (i, c) in self.cells.iter().enumerate() {
            if !c.map.is_orthogonal() {
                return Err(Violation::NonIsometry { i });
            }
        }
        let dom_area = self.domain_area();
        // Cells inside the domain.
        for (i, c) in self.cells.iter().enumerate() {
            let covered: Rat = self
                .domain
                .iter()
                .filter_map(|d| crate::geom::intersect_polygons(&c.poly, d))
                .map(|p| p.area())
                .sum();
            if covered != c.poly.area() {
                return Err(Violation::CellOutsideDomain { i });
            }
        }
        // Pairwise disjoint interiors.
        for i in 0..self.cells.len() {
            for j in (i + 1)..self.cells.len() {
                if crate::geom::intersect_polygons(&self.cells[i].poly, &self.cells[j].poly)
                    .is_some()
                {
                    return Err(Violation::OverlapOfCells { i, j });
                }
            }
        }
        let total: Rat = self.cells.iter().map(|c| c.poly.area()).sum();
        if total != dom_area {
            return Err(Violation::GapInCover {
                missing_area: dom_area - total,
            });
        }
        // Image side: images inside the domain and pairwise disjoint; area
        // is preserved by rigidity, so covering follows from disjointness.
        let images: Vec<ConvexPolygon> =
            self.cells.iter().map(|c| c.map.apply_poly(&c.poly)).collect();
        for im in images.iter() {
            let covered: Rat = self
                .domain
                .iter()
                .filter_map(|d| crate::geom::intersect_polygons(im, d))
                .map(|p| p.area())
                .sum();
            if covered != im.area() {
                return Err(Violation::ImageGap {
                    missing_area: im.area() - covered,
                });
            }
        }
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                if crate::geom::intersect_polygons(&images[i], &images[j]).is_some() {
                    return Err(Violation::ImageOverlap { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn validated(&self) -> Result<()> {
        self.validate()
            .map_err(|v| PexError::InvalidExchange(format!("{v:?}")))
    }

    /// The inverse exchange: image cells with inverse maps. Valid whenever
    /// self is.
    pub fn inverse(&self) -> Exchange {
        Exchange {
            alphabet: self.alphabet.clone(),
            domain: self.domain.clone(),
            cells: self
                .cells
                .iter()
                .map(|c| ExCell {
                    label: c.label,
                    poly: c.map.apply_poly(&c.poly),
                    map: c.map.inverse(),
                })
                .collect(),
            topology: self.topology,
            gluings: self.gluings.clone(),
        }
    }

    pub fn locate_cell(&self, x: &Point2) -> CellLocation {
        let mut inside: Option<usize> = None;
        let mut boundary = false;
        for (i, c) in self.cells.iter().enumerate() {
            match c.poly.locate(x) {
                Location::Inside => inside = Some(i),
                Location::Boundary => boundary = true,
                Location::Outside => {}
            }
        }
        match inside {
            Some(i) => CellLocation::Interior(i),
            None if boundary => CellLocation::Boundary,
            None => CellLocation::Outside,
        }
    }

    /// Natural coding itinerary of x for n steps through open cells.
    pub fn code_orbit(&self, x: &Point2, n: usize) -> Result<Coding> {
        let mut word: Word = Vec::with_capacity(n);
        let mut p = x.clone();
        for step in 0..n {
            match self.locate_cell(&p) {
                CellLocation::Interior(i) => {
                    word.push(self.cells[i].label);
                    p = self.cells[i].map.apply(&p);
                }
                CellLocation::Boundary => return Ok(Coding::Singular { step }),
                CellLocation::Outside => {
                    return Err(PexError::Degenerate(format!(
                        "orbit point {p:?} left the domain at step {step}"
                    )))
                }
            }
        }
        Ok(Coding::Regular(word))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellLocation {
    Interior(usize),
    Boundary,
    Outside,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Coding {
    Regular(Word),
    /// The orbit hit a cell boundary at this step (before emitting a letter
    /// for it).
    Singular { step: usize },
}

/// Closed-form complexity from the first two values and diagonal counts:
/// p(n) = (2-n) p(1) + (n-1) p(2) + sum_{i=2}^{n-1} sum_{j=1}^{i-1} N(j),
/// for n > 2, with N(j) supplied for 1 <= j <= n-2.
pub fn prop1_complexity(p1: u64, p2: u64, diag: &[u64], n: usize) -> Result<u64> {
    if n <= 2 {
        return Err(PexError::Unsupported(format!(
            "closed-form complexity needs n > 2, got {n}"
        )));
    }
    if diag.len() < n - 2 {
        return Err(PexError::Unsupported(format!(
            "need diagonal counts up to {} but got {}",
            n - 2,
            diag.len()
        )));
    }
    let mut total: i128 = (2 - n as i128) * p1 as i128 + (n as i128 - 1) * p2 as i128;
    for i in 2..n {
        for j in 1..i {
            total += diag[j - 1] as i128;
        }
    }
    if total < 0 {
        return Err(PexError::Degenerate(format!(
            "closed-form complexity is negative ({total})"
        )));
    }
    Ok(total as u64)
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ExchangeDto {
    alphabet: Vec<String>,
    domain: Vec<Vec<[String; 2]>>,
    cells: Vec<CellDto>,
    maps: Vec<MapDto>,
    topology: Topology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gluings: Option<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct CellDto {
    label: String,
    vertices: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MapDto {
    matrix: [String; 4],
    translation: [String; 2],
}

fn poly_to_dto(p: &ConvexPolygon) -> Vec<[String; 2]> {
    p.verts()
        .iter()
        .map(|v| [format_rat(&v.x), format_rat(&v.y)])
        .collect()
}

fn poly_from_dto(v: &[[String; 2]]) -> Result<ConvexPolygon> {
    let pts = v
        .iter()
        .map(|[x, y]| Ok(pt(parse_rat(x)?, parse_rat(y)?)))
        .collect::<Result<Vec<_>>>()?;
    ConvexPolygon::from_ccw_loop(pts)
}

impl Exchange {
    pub fn to_json(&self) -> String {
        let dto = ExchangeDto {
            alphabet: self.alphabet.clone(),
            domain: self.domain.iter().map(poly_to_dto).collect(),
            cells: self
                .cells
                .iter()
                .map(|c| CellDto {
                    label: self.alphabet[c.label as usize].clone(),
                    vertices: poly_to_dto(&c.poly),
                })
                .collect(),
            maps: self
                .cells
                .iter()
                .map(|c| MapDto {
                    matrix: [
                        format_rat(&c.map.m[0]),
                        format_rat(&c.map.m[1]),
                        format_rat(&c.map.m[2]),
                        format_rat(&c.map.m[3]),
                    ],
                    translation: [format_rat(&c.map.t.x), format_rat(&c.map.t.y)],
                })
                .collect(),
            topology: self.topology,
            gluings: match self.topology {
                Topology::Disk => None,
                Topology::Torus => Some(
                    self.gluings
                        .iter()
                        .map(|g| [format_rat(&g.x), format_rat(&g.y)])
                        .collect(),
                ),
            },
        };
        serde_json::to_string_pretty(&dto).expect("exchange serialization")
    }

    pub fn from_json(s: &str) -> Result<Exchange> {
        let dto: ExchangeDto = serde_json::from_str(s)?;
        if dto.cells.len() != dto.maps.len() {
            return Err(PexError::Parse(format!(
                "{} cells but {} maps",
                dto.cells.len(),
                dto.maps.len()
            )));
        }
        let domain = dto
            .domain
            .iter()
            .map(|p| poly_from_dto(p))
            .collect::<Result<Vec<_>>>()?;
        let mut cells = Vec::with_capacity(dto.cells.len());
        for (c, m) in dto.cells.iter().zip(&dto.maps) {
            let label = dto
                .alphabet
                .iter()
                .position(|a| *a == c.label)
                .ok_or_else(|| {
                    PexError::Parse(format!("cell label {:?} not in alphabet", c.label))
                })? as u16;
            let poly = poly_from_dto(&c.vertices)?;
            let mat = [
                parse_rat(&m.matrix[0])?,
                parse_rat(&m.matrix[1])?,
                parse_rat(&m.matrix[2])?,
                parse_rat(&m.matrix[3])?,
            ];
            let t = pt(parse_rat(&m.translation[0])?, parse_rat(&m.translation[1])?);
            cells.push(ExCell {
                label,
                poly,
                map: Isometry::new(mat, t),
            });
        }
        let gluings = match (&dto.topology, &dto.gluings) {
            (Topology::Disk, _) => vec![],
            (Topology::Torus, Some(g)) => g
                .iter()
                .map(|[x, y]| Ok(pt(parse_rat(x)?, parse_rat(y)?)))
                .collect::<Result<Vec<_>>>()?,
            (Topology::Torus, None) => {
                vec![pt(rat_i(1), rat_i(0)), pt(rat_i(0), rat_i(1))]
            }
        };
        Ok(Exchange {
            alphabet: dto.alphabet,
            domain,
            cells,
            topology: dto.topology,
            gluings,
        })
    }
}

// ---------------------------------------------------------------------------
// Fixture builders (used across the crate's tests and by the benchmarks)
// ---------------------------------------------------------------------------

pub mod fixtures {
    use super::*;
    use crate::geom::seg;

    /// Torus translation by `shift` on the unit square, coded by the grid of
    /// label strips given by interior x-cuts and y-cuts. Stored cells are the
    /// label grid further split so every piece translates without wrapping.
    pub fn torus_translation(shift: &Point2, x_cuts: &[Rat], y_cuts: &[Rat]) -> Exchange {
        let frac = |r: &Rat| r - r.floor();
        let sx = frac(&shift.x);
        let sy = frac(&shift.y);
        let mut xs: Vec<Rat> = vec![rat_i(0), rat_i(1)];
        xs.extend_from_slice(x_cuts);
        let wrap_x = frac(&(rat_i(1) - &sx));
        if !wrap_x.is_zero() {
            xs.push(wrap_x);
        }
        let mut ys: Vec<Rat> = vec![rat_i(0), rat_i(1)];
        ys.extend_from_slice(y_cuts);
        let wrap_y = frac(&(rat_i(1) - &sy));
        if !wrap_y.is_zero() {
            ys.push(wrap_y);
        }
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        // Label of a strip: index in the cut partition.
        let strip = |cuts: &[Rat], v: &Rat| cuts.iter().filter(|c| *c <= v).count();
        let mut x_sorted = x_cuts.to_vec();
        x_sorted.sort();
        let mut y_sorted = y_cuts.to_vec();
        y_sorted.sort();
        let nx = x_sorted.len() + 1;
        let mut alphabet = Vec::new();
        for ly in 0..(y_sorted.len() + 1) {
            for lx in 0..nx {
                alphabet.push(format!("c{lx}{ly}"));
            }
        }
        let mut cells = Vec::new();
        for i in 0..xs.len() - 1 {
            for j in 0..ys.len() - 1 {
                let (x0, x1) = (&xs[i], &xs[i + 1]);
                let (y0, y1) = (&ys[j], &ys[j + 1]);
                let poly = ConvexPolygon::from_ccw_loop(vec![
                    pt(x0.clone(), y0.clone()),
                    pt(x1.clone(), y0.clone()),
                    pt(x1.clone(), y1.clone()),
                    pt(x0.clone(), y1.clone()),
                ])
                .unwrap();
                let mid_x = (x0 + x1) / rat_i(2);
                let mid_y = (y0 + y1) / rat_i(2);
                let label = (strip(&y_sorted, &mid_y) * nx + strip(&x_sorted, &mid_x)) as u16;
                let tx = if &mid_x + &sx < rat_i(1) { sx.clone() } else { &sx - rat_i(1) };
                let ty = if &mid_y + &sy < rat_i(1) { sy.clone() } else { &sy - rat_i(1) };
                cells.push(ExCell {
                    label,
                    poly,
                    map: Isometry::translation(pt(tx, ty)),
                });
            }
        }
        Exchange {
            alphabet,
            domain: vec![unit_square()],
            cells,
            topology: Topology::Torus,
            gluings: vec![pt(rat_i(1), rat_i(0)), pt(rat_i(0), rat_i(1))],
        }
    }

    pub fn unit_square() -> ConvexPolygon {
        ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(0), rat_i(1)),
        ])
        .unwrap()
    }

    /// Identity map on the unit square as a disk-topology exchange: one cell,
    /// no interior discontinuities, the boundary is the entire singular set.
    pub fn identity_square() -> Exchange {
        Exchange {
            alphabet: vec!["a".into()],
            domain: vec![unit_square()],
            cells: vec![ExCell {
                label: 0,
                poly: unit_square(),
                map: Isometry::identity(),
            }],
            topology: Topology::Disk,
            gluings: vec![],
        }
    }

    /// A segment helper for tests.
    pub fn hseg(x0: i64, x1: i64, y: i64) -> crate::geom::Segment2 {
        seg(pt(rat_i(x0), rat_i(y)), pt(rat_i(x1), rat_i(y)))
    }
}
