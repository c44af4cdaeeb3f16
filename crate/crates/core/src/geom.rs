//! Exact planar geometry over the rationals.
//!
//! Every predicate here (orientation, containment, intersection) is decided
//! exactly, so downstream counting arguments can treat "the segment hits a
//! vertex" as a detectable event instead of a numerical accident. Polygons are
//! kept in a canonical form: strictly convex, counterclockwise, no collinear
//! triples, lexicographically smallest vertex first. Canonical form makes
//! structural equality meaningful and is relied on by the refinement engine
//! for deduplication.

use crate::error::{PexError, Result};
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Integer, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point2 {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn pt(x: Rat, y: Rat) -> Point2 {
    Point2 { x, y }
}

impl Point2 {
    pub fn add(&self, v: &Point2) -> Point2 {
        pt(&self.x + &v.x, &self.y + &v.y)
    }

    pub fn sub(&self, v: &Point2) -> Point2 {
        pt(&self.x - &v.x, &self.y - &v.y)
    }

    pub fn scale(&self, t: &Rat) -> Point2 {
        pt(&self.x * t, &self.y * t)
    }

    pub fn neg(&self) -> Point2 {
        pt(-self.x.clone(), -self.y.clone())
    }

    pub fn dot(&self, o: &Point2) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    /// 2D cross product (z component of the wedge).
    pub fn cross(&self, o: &Point2) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

/// Orientation of the triple (o, a, b): positive means counterclockwise.
pub fn orient(o: &Point2, a: &Point2, b: &Point2) -> Rat {
    a.sub(o).cross(&b.sub(o))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl fmt::Debug for Segment2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} -> {:?}]", self.a, self.b)
    }
}

pub fn seg(a: Point2, b: Point2) -> Segment2 {
    Segment2 { a, b }
}

impl Segment2 {
    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn direction(&self) -> Point2 {
        self.b.sub(&self.a)
    }

    pub fn at(&self, t: &Rat) -> Point2 {
        self.a.add(&self.direction().scale(t))
    }

    pub fn midpoint(&self) -> Point2 {
        self.at(&crate::rat::rat(1, 2))
    }

    /// Parameter of `p` along the segment's line, assuming `p` lies on it.
    /// Returns None if the point is off the line or the segment is a point.
    pub fn param_of(&self, p: &Point2) -> Option<Rat> {
        let d = self.direction();
        if d.is_zero() {
            return None;
        }
        let r = p.sub(&self.a);
        if d.cross(&r) != Rat::zero() {
            return None;
        }
        // Project on the coordinate where d is nonzero.
        if !d.x.is_zero() {
            Some(&r.x / &d.x)
        } else {
            Some(&r.y / &d.y)
        }
    }

    pub fn contains_point(&self, p: &Point2) -> bool {
        match self.param_of(p) {
            Some(t) => !t.is_negative() && t <= Rat::from_integer(BigInt::from(1)),
            None => self.is_degenerate() && *p == self.a,
        }
    }

    /// Canonical key of the supporting line, for grouping collinear segments.
    pub fn line_key(&self) -> Option<LineKey> {
        if self.is_degenerate() {
            None
        } else {
            Some(LineKey::through(&self.a, &self.b))
        }
    }

    pub fn translate(&self, v: &Point2) -> Segment2 {
        seg(self.a.add(v), self.b.add(v))
    }

    /// Endpoint-order-insensitive canonical form.
    pub fn canonical(&self) -> Segment2 {
        if self.a <= self.b {
            self.clone()
        } else {
            seg(self.b.clone(), self.a.clone())
        }
    }
}

/// Canonical integer line key: the line a*x + b*y = c with gcd(a,b,c) = 1 and
/// (a,b) lexicographically positive. Two segments are collinear iff their keys
/// are equal, which lets hash maps group edges of a discontinuity set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LineKey {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl LineKey {
    /// Line through two distinct points.
    pub fn through(p: &Point2, q: &Point2) -> LineKey {
        assert!(p != q, "line through coincident points");
        let d = q.sub(p);
        // Normal (a, b) = (dy, -dx); c = a*px + b*py.
        let a = d.y.clone();
        let b = -d.x.clone();
        let c = &a * &p.x + &b * &p.y;
        Self::normalize(a, b, c)
    }

    /// From rational coefficients of a*x + b*y = c, (a, b) != (0, 0).
    pub fn from_coeffs(a: &Rat, b: &Rat, c: &Rat) -> LineKey {
        assert!(!(a.is_zero() && b.is_zero()), "degenerate line coefficients");
        Self::normalize(a.clone(), b.clone(), c.clone())
    }

    fn normalize(a: Rat, b: Rat, c: Rat) -> LineKey {
        // Clear denominators.
        let l = a.denom().lcm(b.denom()).lcm(c.denom());
        let ai = (a * Rat::from_integer(l.clone())).to_integer();
        let bi = (b * Rat::from_integer(l.clone())).to_integer();
        let ci = (c * Rat::from_integer(l)).to_integer();
        // Divide by gcd.
        let g = ai.gcd(&bi).gcd(&ci);
        let (mut ai, mut bi, mut ci) = (ai / &g, bi / &g, ci / &g);
        // Sign convention: first nonzero of (a, b) positive.
        let flip = if !ai.is_zero() {
            ai.is_negative()
        } else {
            bi.is_negative()
        };
        if flip {
            ai = -ai;
            bi = -bi;
            ci = -ci;
        }
        LineKey { a: ai, b: bi, c: ci }
    }

    pub fn contains(&self, p: &Point2) -> bool {
        Rat::from_integer(self.a.clone()) * &p.x + Rat::from_integer(self.b.clone()) * &p.y
            == Rat::from_integer(self.c.clone())
    }

    /// A unit step along the line in a canonical direction (-b, a), used to
    /// parametrize all collinear segments consistently.
    pub fn direction(&self) -> Point2 {
        pt(
            Rat::from_integer(-self.b.clone()),
            Rat::from_integer(self.a.clone()),
        )
    }

    /// Coordinate of a point of the line along `direction()`, with a fixed
    /// origin choice per line. Collinear geometry reduces to 1D intervals in
    /// this coordinate.
    pub fn coord_of(&self, p: &Point2) -> Rat {
        debug_assert!(self.contains(p));
        let d = self.direction();
        d.dot(&pt(p.x.clone(), p.y.clone()))
    }
}

/// Closed half-plane a*x + b*y <= c.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HalfPlane {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl HalfPlane {
    pub fn new(a: Rat, b: Rat, c: Rat) -> HalfPlane {
        assert!(!(a.is_zero() && b.is_zero()), "degenerate half-plane");
        HalfPlane { a, b, c }
    }

    /// Half-plane to the left of the directed edge u -> v (interior side for
    /// counterclockwise polygons).
    pub fn left_of(u: &Point2, v: &Point2) -> HalfPlane {
        // contains(p) iff orient(u, v, p) >= 0, rewritten as a*x + b*y <= c.
        let a = &v.y - &u.y;
        let b = &u.x - &v.x;
        let c = &a * &u.x + &b * &u.y;
        HalfPlane::new(a, b, c)
    }

    /// Signed evaluation: negative strictly inside, zero on the boundary.
    pub fn eval(&self, p: &Point2) -> Rat {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }

    pub fn contains(&self, p: &Point2) -> bool {
        !self.eval(p).is_positive()
    }

    pub fn boundary_key(&self) -> LineKey {
        LineKey::from_coeffs(&self.a, &self.b, &self.c)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Strictly convex polygon in canonical form. Construct via `from_ccw_loop`;
/// the fields are private so every instance in the system is canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConvexPolygon {
    verts: Vec<Point2>,
}

impl fmt::Debug for ConvexPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.verts)
    }
}

impl ConvexPolygon {
    /// Canonicalize a vertex loop: drop consecutive duplicates, enforce
    /// positive area, strip collinear vertices, verify strict convexity,
    /// rotate the lexicographic minimum to the front. Input may be given in
    /// either orientation. Degenerate input (area zero, self-intersecting,
    /// reflex) is an error.
    pub fn from_ccw_loop(input: Vec<Point2>) -> Result<ConvexPolygon> {
        let mut v: Vec<Point2> = Vec::with_capacity(input.len());
        for p in input {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() >= 2 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 {
            return Err(PexError::Degenerate(format!(
                "polygon needs 3 distinct vertices, got {}",
                v.len()
            )));
        }
        let area2 = signed_area2(&v);
        if area2.is_zero() {
            return Err(PexError::Degenerate("polygon has zero area".into()));
        }
        if area2.is_negative() {
            v.reverse();
        }
        // Strip collinear vertices; anything still non-convex after that is a
        // genuine reflex corner or a self-intersection.
        loop {
            let n = v.len();
            if n < 3 {
                return Err(PexError::Degenerate("polygon collapsed while canonicalizing".into()));
            }
            let mut removed = false;
            let mut keep: Vec<Point2> = Vec::with_capacity(n);
            for i in 0..n {
                let prev = &v[(i + n - 1) % n];
                let next = &v[(i + 1) % n];
                let o = orient(prev, &v[i], next);
                if o.is_zero() {
                    removed = true;
                } else {
                    keep.push(v[i].clone());
                }
            }
            v = keep;
            if !removed {
                break;
            }
        }
        if v.len() < 3 {
            return Err(PexError::Degenerate("polygon collapsed while canonicalizing".into()));
        }
        let n = v.len();
        for i in 0..n {
            let o = orient(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]);
            if !o.is_positive() {
                return Err(PexError::Degenerate("polygon is not convex".into()));
            }
        }
        let min_idx = (0..n).min_by(|&i, &j| v[i].cmp(&v[j])).unwrap();
        v.rotate_left(min_idx);
        // All-left-turns loops with 5+ vertices can still wind twice
        // (pentagram); those must match their convex hull to be convex.
        // With 4 or fewer strict left turns the total turning forces a
        // simple loop.
        if v.len() >= 5 && convex_hull(&v) != v {
            return Err(PexError::Degenerate("polygon is not convex".into()));
        }
        Ok(ConvexPolygon { verts: v })
    }

    pub fn verts(&self) -> &[Point2] {
        &self.verts
    }

    pub fn num_verts(&self) -> usize {
        self.verts.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment2> + '_ {
        let n = self.verts.len();
        (0..n).map(move |i| seg(self.verts[i].clone(), self.verts[(i + 1) % n].clone()))
    }

    pub fn halfplanes(&self) -> impl Iterator<Item = HalfPlane> + '_ {
        let n = self.verts.len();
        (0..n).map(move |i| HalfPlane::left_of(&self.verts[i], &self.verts[(i + 1) % n]))
    }

    pub fn area2(&self) -> Rat {
        signed_area2(&self.verts)
    }

    pub fn area(&self) -> Rat {
        self.area2() / Rat::from_integer(BigInt::from(2))
    }

    pub fn translate(&self, v: &Point2) -> ConvexPolygon {
        // Translation preserves canonical form.
        ConvexPolygon {
            verts: self.verts.iter().map(|p| p.add(v)).collect(),
        }
    }

    pub fn locate(&self, p: &Point2) -> Location {
        let mut on_boundary = false;
        let n = self.verts.len();
        for i in 0..n {
            let o = orient(&self.verts[i], &self.verts[(i + 1) % n], p);
            if o.is_negative() {
                return Location::Outside;
            }
            if o.is_zero() {
                on_boundary = true;
            }
        }
        // All orientations nonnegative; a zero can still be outside the edge
        // segment (on the extension of an edge line) only if some other
        // orientation is negative, which we already excluded.
        if on_boundary {
            Location::Boundary
        } else {
            Location::Inside
        }
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.locate(p) != Location::Outside
    }

    pub fn contains_interior(&self, p: &Point2) -> bool {
        self.locate(p) == Location::Inside
    }

    pub fn bbox(&self) -> Bbox {
        let mut xmin = self.verts[0].x.clone();
        let mut xmax = xmin.clone();
        let mut ymin = self.verts[0].y.clone();
        let mut ymax = ymin.clone();
        for p in &self.verts[1..] {
            if p.x < xmin {
                xmin = p.x.clone();
            }
            if p.x > xmax {
                xmax = p.x.clone();
            }
            if p.y < ymin {
                ymin = p.y.clone();
            }
            if p.y > ymax {
                ymax = p.y.clone();
            }
        }
        Bbox { xmin, xmax, ymin, ymax }
    }

    /// An interior point (vertex average; convexity makes it interior).
    pub fn interior_point(&self) -> Point2 {
        let n = Rat::from_integer(BigInt::from(self.verts.len() as i64));
        let mut sx = Rat::zero();
        let mut sy = Rat::zero();
        for p in &self.verts {
            sx += &p.x;
            sy += &p.y;
        }
        pt(sx / &n, sy / &n)
    }
}

/// Strict convex hull (collinear boundary points dropped), counterclockwise,
/// starting at the lexicographically smallest point. Andrew's monotone chain.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn signed_area2(v: &[Point2]) -> Rat {
    let n = v.len();
    let mut s = Rat::zero();
    for i in 0..n {
        s += v[i].cross(&v[(i + 1) % n]);
    }
    s
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bbox {
    pub xmin: Rat,
    pub xmax: Rat,
    pub ymin: Rat,
    pub ymax: Rat,
}

impl Bbox {
    pub fn intersects(&self, o: &Bbox) -> bool {
        self.xmin <= o.xmax && o.xmin <= self.xmax && self.ymin <= o.ymax && o.ymin <= self.ymax
    }

    pub fn translate(&self, v: &Point2) -> Bbox {
        Bbox {
            xmin: &self.xmin + &v.x,
            xmax: &self.xmax + &v.x,
            ymin: &self.ymin + &v.y,
            ymax: &self.ymax + &v.y,
        }
    }

    pub fn of_segment(s: &Segment2) -> Bbox {
        Bbox {
            xmin: s.a.x.clone().min(s.b.x.clone()),
            xmax: s.a.x.clone().max(s.b.x.clone()),
            ymin: s.a.y.clone().min(s.b.y.clone()),
            ymax: s.a.y.clone().max(s.b.y.clone()),
        }
    }
}

/// Clip a polygon by a closed half-plane. `None` means the intersection has
/// empty interior (it may still be a segment or point; those are dropped by
/// design, since the refinement machinery only tracks positive-area pieces).
pub fn clip_polygon(poly: &ConvexPolygon, h: &HalfPlane) -> Option<ConvexPolygon> {
    let verts = poly.verts();
    let n = verts.len();
    let evals: Vec<Rat> = verts.iter().map(|p| h.eval(p)).collect();
    if evals.iter().all(|e| !e.is_positive()) {
        return Some(poly.clone());
    }
    if evals.iter().all(|e| !e.is_negative()) {
        // Nothing strictly inside; at best a boundary segment.
        return None;
    }
    let mut out: Vec<Point2> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (sp, sq) = (&evals[i], &evals[j]);
        if !sp.is_positive() {
            out.push(verts[i].clone());
        }
        if (sp.is_negative() && sq.is_positive()) || (sp.is_positive() && sq.is_negative()) {
            // Edge crosses the boundary strictly; affine interpolation.
            let t = sp / (sp - sq);
            out.push(seg(verts[i].clone(), verts[j].clone()).at(&t));
        }
    }
    ConvexPolygon::from_ccw_loop(out).ok()
}

/// Intersection of two convex polygons, `None` when the interior is empty.
pub fn intersect_polygons(p: &ConvexPolygon, q: &ConvexPolygon) -> Option<ConvexPolygon> {
    if !p.bbox().intersects(&q.bbox()) {
        return None;
    }
    let mut cur = p.clone();
    for h in q.halfplanes() {
        cur = clip_polygon(&cur, &h)?;
    }
    Some(cur)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SegSeg {
    Empty,
    /// Transverse or touching intersection in a single point.
    Point(Point2),
    /// Collinear overlap with positive length.
    Overlap(Segment2),
}

/// Exact segment intersection with full classification. Degenerate (point)
/// segments are handled: a point on the other segment reports `Point`.
pub fn segment_intersection(s1: &Segment2, s2: &Segment2) -> SegSeg {
    if !Bbox::of_segment(s1).intersects(&Bbox::of_segment(s2)) {
        return SegSeg::Empty;
    }
    let d1 = s1.direction();
    let d2 = s2.direction();
    if s1.is_degenerate() {
        return if s2.contains_point(&s1.a) {
            SegSeg::Point(s1.a.clone())
        } else {
            SegSeg::Empty
        };
    }
    if s2.is_degenerate() {
        return if s1.contains_point(&s2.a) {
            SegSeg::Point(s2.a.clone())
        } else {
            SegSeg::Empty
        };
    }
    let denom = d1.cross(&d2);
    let r = s2.a.sub(&s1.a);
    if denom.is_zero() {
        if d1.cross(&r) != Rat::zero() {
            return SegSeg::Empty; // parallel, distinct lines
        }
        // Collinear: compare 1D parameters along s1.
        let t_a = s1.param_of(&s2.a).unwrap();
        let t_b = s1.param_of(&s2.b).unwrap();
        let (lo, hi) = if t_a <= t_b { (t_a, t_b) } else { (t_b, t_a) };
        let zero = Rat::zero();
        let one = Rat::from_integer(BigInt::from(1));
        let lo = lo.max(zero.clone());
        let hi = hi.min(one);
        if lo > hi {
            return SegSeg::Empty;
        }
        if lo == hi {
            return SegSeg::Point(s1.at(&lo));
        }
        return SegSeg::Overlap(seg(s1.at(&lo), s1.at(&hi)));
    }
    // t along s1, u along s2.
    let t = r.cross(&d2) / &denom;
    let u = r.cross(&d1) / &denom;
    let zero = Rat::zero();
    let one = Rat::from_integer(BigInt::from(1));
    if t < zero || t > one || u < zero || u > one {
        return SegSeg::Empty;
    }
    SegSeg::Point(s1.at(&t))
}

/// Portion of the segment inside the closed polygon, as a parameter interval
/// [t0, t1] (possibly a single point, t0 == t1). `None` if disjoint.
pub fn clip_segment_params(s: &Segment2, poly: &ConvexPolygon) -> Option<(Rat, Rat)> {
    let mut t0 = Rat::zero();
    let mut t1 = Rat::from_integer(BigInt::from(1));
    if s.is_degenerate() {
        return if poly.contains(&s.a) {
            Some((t0, t1))
        } else {
            None
        };
    }
    for h in poly.halfplanes() {
        let ea = h.eval(&s.a);
        let eb = h.eval(&s.b);
        let de = &eb - &ea; // eval along the segment: ea + t * de <= 0
        if de.is_zero() {
            if ea.is_positive() {
                return None;
            }
            continue;
        }
        let t_cross = -&ea / &de;
        if de.is_positive() {
            // Inside for t <= t_cross.
            if t_cross < t1 {
                t1 = t_cross;
            }
        } else {
            // Inside for t >= t_cross.
            if t_cross > t0 {
                t0 = t_cross;
            }
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};
    use proptest::prelude::*;

    pub(crate) fn unit_square() -> ConvexPolygon {
        ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(0), rat_i(1)),
        ])
        .unwrap()
    }

    #[test]
    fn canonical_form_rotation_and_orientation_invariant() {
        let sq = unit_square();
        let cw = ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(1)),
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(0), rat_i(0)),
        ])
        .unwrap();
        assert_eq!(sq, cw);
        let rotated = ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(0), rat_i(1)),
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
        ])
        .unwrap();
        assert_eq!(sq, rotated);
        assert_eq!(sq.verts()[0], pt(rat_i(0), rat_i(0)));
    }

    #[test]
    fn collinear_vertices_are_stripped() {
        let p = ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat(1, 2), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(0), rat_i(1)),
        ])
        .unwrap();
        assert_eq!(p, unit_square());
    }

    #[test]
    fn degenerate_polygons_rejected() {
        assert!(ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(2), rat_i(0)),
        ])
        .is_err());
        assert!(ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(1), rat_i(1)),
        ])
        .is_err());
        // Reflex quadrilateral.
        assert!(ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(4), rat_i(0)),
            pt(rat_i(1), rat_i(1)),
            pt(rat_i(0), rat_i(4)),
        ])
        .is_err());
        // Doubly winding loop: every turn is a left turn, yet not convex.
        assert!(ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat_i(0), rat_i(1)),
            pt(rat_i(-1), rat_i(0)),
            pt(rat_i(1), rat_i(0)),
            pt(rat_i(-1), rat_i(1)),
        ])
        .is_err());
    }

    #[test]
    fn hull_of_grid_points() {
        let pts: Vec<Point2> = (0..3)
            .flat_map(|x| (0..3).map(move |y| pt(rat_i(x), rat_i(y))))
            .collect();
        let hull = convex_hull(&pts);
        assert_eq!(
            hull,
            vec![
                pt(rat_i(0), rat_i(0)),
                pt(rat_i(2), rat_i(0)),
                pt(rat_i(2), rat_i(2)),
                pt(rat_i(0), rat_i(2)),
            ]
        );
    }

    #[test]
    fn clip_square_at_half() {
        let sq = unit_square();
        let h = HalfPlane::new(rat_i(1), rat_i(0), rat(1, 2)); // x <= 1/2
        let clipped = clip_polygon(&sq, &h).unwrap();
        let expect = ConvexPolygon::from_ccw_loop(vec![
            pt(rat_i(0), rat_i(0)),
            pt(rat(1, 2), rat_i(0)),
            pt(rat(1, 2), rat_i(1)),
            pt(rat_i(0), rat_i(1)),
        ])
        .unwrap();
        assert_eq!(clipped, expect);
        assert_eq!(clipped.area(), rat(1, 2));
    }

    #[test]
    fn clip_square_untouched() {
        let sq = unit_square();
        let h = HalfPlane::new(rat_i(1), rat_i(0), rat_i(2)); // x <= 2
        assert_eq!(clip_polygon(&sq, &h).unwrap(), sq);
    }

    #[test]
    fn clip_square_to_empty() {
        let sq = unit_square();
        let h = HalfPlane::new(rat_i(1), rat_i(0), rat_i(0)); // x <= 0: only the left edge
        assert!(clip_polygon(&sq, &h).is_none());
        let h2 = HalfPlane::new(rat_i(1), rat_i(0), rat_i(-1)); // x <= -1
        assert!(clip_polygon(&sq, &h2).is_none());
    }

    #[test]
    fn intersect_identical_and_disjoint() {
        let sq = unit_square();
        assert_eq!(intersect_polygons(&sq, &sq).unwrap(), sq);
        let shifted = sq.translate(&pt(rat_i(1), rat_i(0)));
        // Shares only an edge: empty interior.
        assert!(intersect_polygons(&sq, &shifted).is_none());
        let far = sq.translate(&pt(rat_i(3), rat_i(0)));
        assert!(intersect_polygons(&sq, &far).is_none());
    }

    #[test]
    fn intersect_quarter_overlap() {
        let sq = unit_square();
        let shifted = sq.translate(&pt(rat(1, 2), rat(1, 2)));
        let inter = intersect_polygons(&sq, &shifted).unwrap();
        assert_eq!(inter.area(), rat(1, 4));
        let expect = ConvexPolygon::from_ccw_loop(vec![
            pt(rat(1, 2), rat(1, 2)),
            pt(rat_i(1), rat(1, 2)),
            pt(rat_i(1), rat_i(1)),
            pt(rat(1, 2), rat_i(1)),
        ])
        .unwrap();
        assert_eq!(inter, expect);
    }

    #[test]
    fn segment_crossing_diagonals() {
        let d1 = seg(pt(rat_i(0), rat_i(0)), pt(rat_i(1), rat_i(1)));
        let d2 = seg(pt(rat_i(0), rat_i(1)), pt(rat_i(1), rat_i(0)));
        assert_eq!(
            segment_intersection(&d1, &d2),
            SegSeg::Point(pt(rat(1, 2), rat(1, 2)))
        );
    }

    #[test]
    fn segment_collinear_overlap() {
        let s1 = seg(pt(rat_i(0), rat_i(0)), pt(rat_i(2), rat_i(0)));
        let s2 = seg(pt(rat_i(1), rat_i(0)), pt(rat_i(3), rat_i(0)));
        assert_eq!(
            segment_intersection(&s1, &s2),
            SegSeg::Overlap(seg(pt(rat_i(1), rat_i(0)), pt(rat_i(2), rat_i(0))))
        );
        // Touching endpoints only.
        let s3 = seg(pt(rat_i(2), rat_i(0)), pt(rat_i(3), rat_i(0)));
        assert_eq!(
            segment_intersection(&s1, &s3),
            SegSeg::Point(pt(rat_i(2), rat_i(0)))
        );
        let s4 = seg(pt(rat_i(5), rat_i(0)), pt(rat_i(6), rat_i(0)));
        assert_eq!(segment_intersection(&s1, &s4), SegSeg::Empty);
        // Parallel distinct lines.
        let s5 = seg(pt(rat_i(0), rat_i(1)), pt(rat_i(2), rat_i(1)));
        assert_eq!(segment_intersection(&s1, &s5), SegSeg::Empty);
    }

    #[test]
    fn segment_touching_transverse_endpoint() {
        let s1 = seg(pt(rat_i(0), rat_i(0)), pt(rat_i(2), rat_i(0)));
        let s2 = seg(pt(rat_i(1), rat_i(0)), pt(rat_i(1), rat_i(5)));
        assert_eq!(
            segment_intersection(&s1, &s2),
            SegSeg::Point(pt(rat_i(1), rat_i(0)))
        );
    }

    #[test]
    fn line_key_groups_collinear() {
        let s1 = seg(pt(rat_i(0), rat_i(0)), pt(rat_i(2), rat_i(2)));
        let s2 = seg(pt(rat_i(5), rat_i(5)), pt(rat_i(3), rat_i(3)));
        let s3 = seg(pt(rat_i(0), rat_i(1)), pt(rat_i(2), rat_i(3)));
        assert_eq!(s1.line_key(), s2.line_key());
        assert_ne!(s1.line_key(), s3.line_key());
        let k = s1.line_key().unwrap();
        assert!(k.contains(&pt(rat(7, 3), rat(7, 3))));
        assert!(!k.contains(&pt(rat_i(1), rat_i(2))));
    }

    #[test]
    fn line_key_normalization() {
        // Same line from fractional and scaled inputs.
        let k1 = LineKey::from_coeffs(&rat(1, 2), &rat(1, 3), &rat(1, 6));
        let k2 = LineKey::from_coeffs(&rat_i(3), &rat_i(2), &rat_i(1));
        assert_eq!(k1, k2);
        let k3 = LineKey::from_coeffs(&rat_i(-3), &rat_i(-2), &rat_i(-1));
        assert_eq!(k1, k3);
    }

    #[test]
    fn locate_points() {
        let sq = unit_square();
        assert_eq!(sq.locate(&pt(rat(1, 2), rat(1, 2))), Location::Inside);
        assert_eq!(sq.locate(&pt(rat_i(0), rat(1, 2))), Location::Boundary);
        assert_eq!(sq.locate(&pt(rat_i(0), rat_i(0))), Location::Boundary);
        assert_eq!(sq.locate(&pt(rat_i(2), rat(1, 2))), Location::Outside);
        assert_eq!(sq.locate(&pt(rat(-1, 100), rat(1, 2))), Location::Outside);
    }

    #[test]
    fn clip_segment_param_interval() {
        let sq = unit_square();
        let s = seg(pt(rat_i(-1), rat(1, 2)), pt(rat_i(2), rat(1, 2)));
        let (t0, t1) = clip_segment_params(&s, &sq).unwrap();
        assert_eq!(t0, rat(1, 3));
        assert_eq!(t1, rat(2, 3));
        let outside = seg(pt(rat_i(-1), rat_i(5)), pt(rat_i(2), rat_i(5)));
        assert!(clip_segment_params(&outside, &sq).is_none());
        // Segment touching a corner only.
        let corner = seg(pt(rat_i(-1), rat_i(1)), pt(rat_i(1), rat_i(-1)));
        let (u0, u1) = clip_segment_params(&corner, &sq).unwrap();
        assert_eq!(u0, u1);
        assert_eq!(corner.at(&u0), pt(rat_i(0), rat_i(0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_clip_stays_inside(coords in proptest::collection::vec((-8i64..8, -8i64..8), 3..7),
                                  a in -4i64..5, b in -4i64..5, c in -6i64..7) {
            prop_assume!(a != 0 || b != 0);
            let loop_pts: Vec<Point2> =
                coords.iter().map(|&(x, y)| pt(rat_i(x), rat_i(y))).collect();
            if let Ok(poly) = ConvexPolygon::from_ccw_loop(loop_pts) {
                let h = HalfPlane::new(rat_i(a), rat_i(b), rat_i(c));
                if let Some(clipped) = clip_polygon(&poly, &h) {
                    for v in clipped.verts() {
                        prop_assert!(h.contains(v));
                        prop_assert!(poly.contains(v));
                    }
                    prop_assert!(clipped.area2() <= poly.area2());
                    prop_assert!(clipped.area2().is_positive());
                }
            }
        }

        #[test]
        fn prop_intersection_commutes(ax in -4i64..5, ay in -4i64..5, w in 1i64..5, h in 1i64..5,
                                      bx in -4i64..5, by in -4i64..5, w2 in 1i64..5, h2 in 1i64..5) {
            let r1 = ConvexPolygon::from_ccw_loop(vec![
                pt(rat_i(ax), rat_i(ay)), pt(rat_i(ax + w), rat_i(ay)),
                pt(rat_i(ax + w), rat_i(ay + h)), pt(rat_i(ax), rat_i(ay + h)),
            ]).unwrap();
            let r2 = ConvexPolygon::from_ccw_loop(vec![
                pt(rat_i(bx), rat_i(by)), pt(rat_i(bx + w2), rat_i(by)),
                pt(rat_i(bx + w2), rat_i(by + h2)), pt(rat_i(bx), rat_i(by + h2)),
            ]).unwrap();
            let i12 = intersect_polygons(&r1, &r2);
            let i21 = intersect_polygons(&r2, &r1);
            prop_assert_eq!(&i12, &i21);
            if let Some(i) = i12 {
                prop_assert!(i.area2() <= r1.area2());
                prop_assert!(i.area2() <= r2.area2());
                // Rectangle intersection has a closed form to check against.
                let xlo = ax.max(bx); let xhi = (ax + w).min(bx + w2);
                let ylo = ay.max(by); let yhi = (ay + h).min(by + h2);
                prop_assert!(xlo < xhi && ylo < yhi);
                prop_assert_eq!(i.area(), rat_i((xhi - xlo) * (yhi - ylo)));
            }
        }

        #[test]
        fn prop_segment_intersection_symmetric(pts in proptest::collection::vec((-6i64..7, -6i64..7), 4)) {
            let s1 = seg(pt(rat_i(pts[0].0), rat_i(pts[0].1)), pt(rat_i(pts[1].0), rat_i(pts[1].1)));
            let s2 = seg(pt(rat_i(pts[2].0), rat_i(pts[2].1)), pt(rat_i(pts[3].0), rat_i(pts[3].1)));
            let r12 = segment_intersection(&s1, &s2);
            let r21 = segment_intersection(&s2, &s1);
            match (&r12, &r21) {
                (SegSeg::Empty, SegSeg::Empty) => {},
                (SegSeg::Point(p), SegSeg::Point(q)) => prop_assert_eq!(p, q),
                (SegSeg::Overlap(o1), SegSeg::Overlap(o2)) =>
                    prop_assert_eq!(o1.canonical(), o2.canonical()),
                _ => prop_assert!(false, "asymmetric classification: {:?} vs {:?}", r12, r21),
            }
            // Any reported point must lie on both segments.
            if let SegSeg::Point(p) = &r12 {
                prop_assert!(s1.contains_point(p));
                prop_assert!(s2.contains_point(p));
            }
        }
    }
}
