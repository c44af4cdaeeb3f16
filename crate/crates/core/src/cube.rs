//! Billiards in the unit cube, one direction at a time.
//!
//! Unfolding reflections turns a billiard trajectory of direction `omega`
//! into a straight line, and the flow descends to the 3-torus. We take the
//! section over the three faces through the origin and flatten it by
//! projecting along `omega` onto the plane of one face: the image is the
//! hexagonal shadow of the cube, a unit square plus two sheared unit
//! parallelograms meeting at the projected origin. The first return map is an
//! exchange of at most seven convex cells moved by three translations (the
//! projected unit steps), and the natural coding records which face the orbit
//! sits on. `build_cube_section_exchange` produces that exchange;
//! `cube_complexity` runs the coding language and the diagonal census and
//! compares `p(n)` against `n^2 + n + 1`.
//!
//! All of it is conditional on the direction avoiding a short list of exact
//! coincidences: sightlines parallel to an edge, lines meeting three edges,
//! and integer relations among the reciprocals `1/omega_i`.
//! `certify_generic` excludes each kind exhaustively up to a horizon and
//! reports a witness when one exists. Lines through three edges genuinely
//! occur for some directions; `verify_triple_edge_witness` checks a concrete
//! instance with coordinates in Q adjoined pi, exactly, so the failure is a
//! theorem about that direction and not a rounding artifact.

use crate::error::{PexError, Result};
use crate::exchange::{language, ExCell, Exchange, Isometry, Topology, Word};
use crate::geom::{clip_polygon, pt, ConvexPolygon, HalfPlane, Point2};
use crate::pirat::PiRat;
use crate::rat::{format_rat, rat_abs, rat_floor, rat_fract, rat_i, Rat};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// A billiard direction folded into the open positive octant.
///
/// Reflecting in a face flips one component's sign, so every direction with
/// all components nonzero is equivalent to one with all components positive;
/// the constructor folds and rejects zero components (those never leave a
/// face plane). Nothing downstream normalizes: every check is invariant
/// under scaling the whole vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction3 {
    omega: [Rat; 3],
}

impl Direction3 {
    pub fn new(a: Rat, b: Rat, c: Rat) -> Result<Direction3> {
        let omega = [rat_abs(&a), rat_abs(&b), rat_abs(&c)];
        if omega.iter().any(|w| w.is_zero()) {
            return Err(PexError::Degenerate(
                "direction with a zero component stays parallel to a face".into(),
            ));
        }
        Ok(Direction3 { omega })
    }

    pub fn omega(&self) -> &[Rat; 3] {
        &self.omega
    }

    /// 1/omega_k for each axis: the full crossing time of a unit cube along
    /// axis k, and the constant return time to face k in the section.
    pub fn reciprocals(&self) -> [Rat; 3] {
        [
            self.omega[0].recip(),
            self.omega[1].recip(),
            self.omega[2].recip(),
        ]
    }
}

/// Verdict of one coincidence search: clean up to the horizon, or the first
/// witness found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail { witness: String },
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

/// Exhaustive exclusion of the three coincidence kinds up to `horizon` links.
///
/// Monotone by construction: every search ranges over an integer box that
/// only grows with the horizon, so passing at H implies passing below H.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityCertificate {
    pub horizon: usize,
    /// No two edges within reach see each other along `omega`: the ratio
    /// omega_i/omega_j is never a quotient of integers up to horizon + 1.
    pub parallel_edge_check: Check,
    /// No line of direction `omega` meets three lattice edges within reach.
    pub triple_edge_check: Check,
    /// No integer relation k1/omega_1 + k2/omega_2 + k3/omega_3 = 0 with
    /// 0 < max |k_i| <= 2 * horizon.
    pub b_relation_check: Check,
}

impl GenericityCertificate {
    pub fn is_certified(&self) -> bool {
        self.parallel_edge_check.passed()
            && self.triple_edge_check.passed()
            && self.b_relation_check.passed()
    }

    /// One-line failure summary, empty when certified.
    pub fn failure_summary(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (name, check) in [
            ("parallel-edge", &self.parallel_edge_check),
            ("triple-edge", &self.triple_edge_check),
            ("reciprocal-relation", &self.b_relation_check),
        ] {
            if let Check::Fail { witness } = check {
                parts.push(format!("{name}: {witness}"));
            }
        }
        parts.join("; ")
    }
}

pub fn certify_generic(dir: &Direction3, horizon: usize) -> GenericityCertificate {
    GenericityCertificate {
        horizon,
        parallel_edge_check: parallel_edge_check(dir, horizon),
        triple_edge_check: triple_edge_check(dir, horizon),
        b_relation_check: b_relation_check(dir, horizon),
    }
}

/// m_i omega_j = m_j omega_i with 1 <= m <= horizon + 1 exists iff the
/// reduced fraction omega_i/omega_j has both parts that small.
fn parallel_edge_check(dir: &Direction3, horizon: usize) -> Check {
    let w = dir.omega();
    let bound = BigInt::from(horizon as u64 + 1);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let ratio = &w[i] / &w[j];
        let (p, q) = (ratio.numer(), ratio.denom());
        if *p <= bound && *q <= bound {
            return Check::Fail {
                witness: format!("{} w{} = {} w{}", q, i + 1, p, j + 1),
            };
        }
    }
    Check::Pass
}

/// Search for a line of direction `omega` through three edges of pairwise
/// different axes. Anchoring the line at a point s e_{d1} on an edge along
/// axis d1, the two other edge visits pin everything: the visit to an edge
/// along d2 happens at time t2 with t2 omega_{d3} integral, the visit along
/// d3 at time t3 with t3 omega_{d2} integral, and s is forced by the d1
/// coordinate of the first visit. The line exists iff the d1 coordinate of
/// the second visit is also integral. Steps within horizon + 1 cover every
/// configuration of at most horizon + 1 links per leg.
fn triple_edge_check(dir: &Direction3, horizon: usize) -> Check {
    let w = dir.omega();
    let r = horizon as i64 + 1;
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for [d1, d2, d3] in perms {
        for m3 in -r..=r {
            if m3 == 0 {
                continue;
            }
            let t2 = rat_i(m3) / &w[d3];
            let a = &t2 * &w[d1];
            if a.is_integer() {
                // The first visit would be a vertex; vertex sightlines are
                // the parallel-edge family's business.
                continue;
            }
            let s = Rat::from_integer(rat_floor(&a) + BigInt::one()) - &a;
            for k2 in -r..=r {
                if k2 == 0 {
                    continue;
                }
                let t3 = rat_i(k2) / &w[d2];
                if t2 == t3 {
                    continue;
                }
                let h = &s + &t3 * &w[d1];
                if h.is_integer() {
                    return Check::Fail {
                        witness: format!(
                            "edges along e{}, e{}, e{} met at times 0, {}, {} from offset {} on axis {}",
                            d1 + 1,
                            d2 + 1,
                            d3 + 1,
                            format_rat(&t2),
                            format_rat(&t3),
                            format_rat(&s),
                            d1 + 1
                        ),
                    };
                }
            }
        }
    }
    Check::Pass
}

fn b_relation_check(dir: &Direction3, horizon: usize) -> Check {
    let rec = dir.reciprocals();
    let w = dir.omega();
    let k_max = 2 * horizon as i64;
    let bound = BigInt::from(2 * horizon as u64);
    for k1 in -k_max..=k_max {
        for k2 in -k_max..=k_max {
            let partial = rat_i(k1) * &rec[0] + rat_i(k2) * &rec[1];
            let k3 = -(&partial * &w[2]);
            if !k3.is_integer() {
                continue;
            }
            let k3i = k3.to_integer();
            if k3i.abs() > bound || (k1 == 0 && k2 == 0 && k3i.is_zero()) {
                continue;
            }
            return Check::Fail {
                witness: format!("{k1}/w1 + {k2}/w2 + {k3i}/w3 = 0"),
            };
        }
    }
    Check::Pass
}

/// Projection along `omega` onto the plane of face 2, sending the unit steps
/// to (1,0), (0,1) and w = (-w0/w2, -w1/w2).
fn shadow_steps(dir: &Direction3) -> [Point2; 3] {
    let w = dir.omega();
    [
        pt(rat_i(1), rat_i(0)),
        pt(rat_i(0), rat_i(1)),
        pt(-(&w[0] / &w[2]), -(&w[1] / &w[2])),
    ]
}

fn other_axes(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => unreachable!("axis out of range"),
    }
}

/// Chart of face k: a unit parallelogram spanned by the projected steps of
/// the two other axes. All three loops below are counterclockwise because
/// both components of the sheared step are negative.
fn chart_poly(steps: &[Point2; 3], k: usize) -> ConvexPolygon {
    let o = Point2::origin();
    let verts = match k {
        0 => vec![
            o,
            steps[1].clone(),
            steps[1].add(&steps[2]),
            steps[2].clone(),
        ],
        1 => vec![
            o,
            steps[2].clone(),
            steps[2].add(&steps[0]),
            steps[0].clone(),
        ],
        2 => vec![
            o,
            steps[0].clone(),
            steps[0].add(&steps[1]),
            steps[1].clone(),
        ],
        _ => unreachable!("axis out of range"),
    };
    ConvexPolygon::from_ccw_loop(verts).expect("unit parallelogram chart")
}

/// t(x, y) = c[0] x + c[1] y + c[2].
type Aff = [Rat; 3];

/// Time until the lift of a chart point next hits the plane x_j = 1, as an
/// affine function of the planar coordinates. On chart k the lift has
/// x_k = 0 and the other two coordinates are the parallelogram parameters;
/// solving the shadow for those parameters gives the tables below.
fn chart_times(dir: &Direction3, k: usize) -> [Aff; 3] {
    let [r0, r1, r2] = dir.reciprocals();
    let z = Rat::zero();
    match k {
        0 => [
            [z.clone(), z.clone(), r0.clone()],
            [r0.clone(), -r1.clone(), r1.clone()],
            [r0.clone(), z, r2],
        ],
        1 => [
            [-r0.clone(), r1.clone(), r0.clone()],
            [z.clone(), z.clone(), r1.clone()],
            [z, r1, r2],
        ],
        2 => [
            [-r0.clone(), z.clone(), r0.clone()],
            [z.clone(), -r1.clone(), r1.clone()],
            [z.clone(), z, r2],
        ],
        _ => unreachable!("axis out of range"),
    }
}

/// First-return exchange of the three-face section, drawn in the shadow
/// plane. Cells of chart k carry label k and are moved by minus the
/// projected step of their winning axis; at most one chart (the one whose
/// axis has the strictly largest component) contains a cell returning to
/// itself, giving seven cells for a generic direction.
pub fn build_cube_section_exchange(dir: &Direction3) -> Result<Exchange> {
    let w = dir.omega();
    for i in 0..3 {
        for j in i + 1..3 {
            if w[i] == w[j] {
                return Err(PexError::Degenerate(format!(
                    "direction components {} and {} are equal: the vertex sightline re-enters a vertex after one link",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let steps = shadow_steps(dir);
    let charts = [
        chart_poly(&steps, 0),
        chart_poly(&steps, 1),
        chart_poly(&steps, 2),
    ];
    let mut cells: Vec<ExCell> = Vec::new();
    for k in 0..3 {
        let times = chart_times(dir, k);
        for j in 0..3 {
            // Winner region of axis j: t_j <= t_i for both other axes. Each
            // chart has exactly one constant time, so no difference below
            // degenerates to a constant.
            let mut poly = Some(charts[k].clone());
            for i in 0..3 {
                if i == j {
                    continue;
                }
                let h = HalfPlane::new(
                    &times[j][0] - &times[i][0],
                    &times[j][1] - &times[i][1],
                    &times[i][2] - &times[j][2],
                );
                poly = poly.and_then(|p| clip_polygon(&p, &h));
            }
            if let Some(p) = poly {
                cells.push(ExCell {
                    label: k as u16,
                    poly: p,
                    map: Isometry::translation(steps[j].neg()),
                });
            }
        }
    }
    let ex = Exchange {
        alphabet: vec!["1".into(), "2".into(), "3".into()],
        domain: charts.to_vec(),
        cells,
        topology: Topology::Disk,
        gluings: vec![],
    };
    ex.validated()?;
    Ok(ex)
}

/// A vertex-free straight segment between two lattice edges, by canonical
/// start data: the earlier endpoint (in flow order) folds to
/// `start_offset * e_{start_axis}` with offset in (0,1), the segment runs
/// for `time` along `omega`, and `links` counts the unit cubes it meets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeDiagonal {
    pub links: usize,
    pub start_axis: usize,
    pub end_axis: usize,
    pub start_offset: Rat,
    pub time: Rat,
}

/// Every edge-to-edge segment of direction `omega` with at most `max_links`
/// links, one entry per geometric segment, sorted.
///
/// The enumeration is forced: a segment from an edge along axis a to an edge
/// along axis b != a must have integral coordinates at the third axis c and
/// at a on arrival, so the flight time is m_c/omega_c and the start offset
/// is the fractional complement of time * omega_a. Interior coincidences
/// (an edge or vertex on the open segment, or an end edge parallel to the
/// start edge, which forces a one-parameter family) abort with `Degenerate`:
/// those directions have no clean count at this horizon.
pub fn lattice_diagonals(dir: &Direction3, max_links: usize) -> Result<Vec<LatticeDiagonal>> {
    let w = dir.omega();
    let reach = max_links + 1;
    let reach_big = BigInt::from(reach as u64);
    let mut out: Vec<LatticeDiagonal> = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                // Parallel ends force time * omega_u and time * omega_v both
                // integral for the other two axes: exactly a small reduced
                // ratio, and a continuum of segments (the offset is free).
                let (u, v) = other_axes(a);
                let ratio = &w[u] / &w[v];
                if *ratio.numer() <= reach_big && *ratio.denom() <= reach_big {
                    return Err(PexError::Degenerate(format!(
                        "one-parameter family of segments between edges along e{} (w{} / w{} = {})",
                        a + 1,
                        u + 1,
                        v + 1,
                        format_rat(&ratio)
                    )));
                }
                continue;
            }
            let c = 3 - a - b;
            for mc in 1..=reach {
                let t = rat_i(mc as i64) / &w[c];
                let ta = &t * &w[a];
                if ta.is_integer() {
                    return Err(PexError::Degenerate(format!(
                        "vertex sightline meets an edge along e{} after {} crossings of axis {}",
                        b + 1,
                        mc,
                        c + 1
                    )));
                }
                let ma = rat_floor(&ta) + BigInt::one();
                let s = Rat::from_integer(ma.clone()) - &ta;
                let tb = &t * &w[b];
                if tb.is_integer() {
                    return Err(PexError::Degenerate(format!(
                        "segment from an edge along e{} ends in a vertex after {} crossings of axis {}",
                        a + 1,
                        mc,
                        c + 1
                    )));
                }
                // links = 1 + interior lattice-plane crossings; count with
                // floors before materializing crossing times.
                let cross_a = &ma - BigInt::one();
                let cross_b = rat_floor(&tb);
                let cross_c = BigInt::from(mc as u64 - 1);
                let total = &cross_a + &cross_b + &cross_c;
                if total >= BigInt::from(max_links as u64) {
                    continue;
                }
                let links = 1 + total.to_usize().expect("bounded by max_links");
                // Edge hits on the open segment: two crossing times equal.
                let mut params: Vec<Rat> = Vec::new();
                for axis in 0..3 {
                    let p0 = if axis == a { s.clone() } else { Rat::zero() };
                    let hi = &p0 + &t * &w[axis];
                    let mut k = rat_floor(&p0) + BigInt::one();
                    loop {
                        let kr = Rat::from_integer(k.clone());
                        if kr >= hi {
                            break;
                        }
                        params.push((kr - &p0) / &w[axis]);
                        k += BigInt::one();
                    }
                }
                params.sort();
                if params.windows(2).any(|p| p[0] == p[1]) {
                    return Err(PexError::Degenerate(
                        "segment crosses a lattice edge in its interior".into(),
                    ));
                }
                debug_assert_eq!(params.len() + 1, links);
                out.push(LatticeDiagonal {
                    links,
                    start_axis: a,
                    end_axis: b,
                    start_offset: s,
                    time: t,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// counts[n - 1] = number of edge-to-edge segments with exactly n links.
pub fn lattice_diagonal_counts(dir: &Direction3, max_links: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; max_links];
    for d in lattice_diagonals(dir, max_links)? {
        counts[d.links - 1] += 1;
    }
    Ok(counts)
}

/// A vertex-free billiard segment between two cube edges, in unfolded
/// coordinates. `end - start = time * omega` with `time > 0`, and the two
/// edge axes differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeDiagonal {
    pub start: [Rat; 3],
    pub end: [Rat; 3],
    pub time: Rat,
    pub links: usize,
    pub start_edge_axis: usize,
    pub end_edge_axis: usize,
}

impl CubeDiagonal {
    /// Fold the start onto its canonical edge representative.
    pub fn canonical(&self) -> LatticeDiagonal {
        let u = self.start_edge_axis;
        let shift: [Rat; 3] = [
            Rat::from_integer(rat_floor(&self.start[0])),
            Rat::from_integer(rat_floor(&self.start[1])),
            Rat::from_integer(rat_floor(&self.start[2])),
        ];
        LatticeDiagonal {
            links: self.links,
            start_axis: u,
            end_axis: self.end_edge_axis,
            start_offset: &self.start[u] - &shift[u],
            time: self.time.clone(),
        }
    }
}

/// Two segments with exactly n links, built by sliding the vertex sightline.
///
/// The ray from the origin vertex crosses its n-th lattice plane at time t_n
/// across axis d_n. For each other axis u, pulling the ray back by the
/// fractional part of its u-coordinate at that moment lands both ends on
/// edges: the start on an edge along u just behind the origin, the end on an
/// edge along the remaining axis. Certification up to n guarantees the two
/// pulled-back segments are vertex-free with exactly n links and that no
/// third edge interferes.
pub fn construct_two_diagonals(dir: &Direction3, n: usize) -> Result<(CubeDiagonal, CubeDiagonal)> {
    if n == 0 {
        return Err(PexError::Unsupported(
            "a segment between edges meets at least one cube".into(),
        ));
    }
    let cert = certify_generic(dir, n);
    if !cert.is_certified() {
        return Err(PexError::Certification(format!(
            "direction fails genericity up to horizon {}: {}",
            n,
            cert.failure_summary()
        )));
    }
    let w = dir.omega();
    let mut next = [1i64, 1, 1];
    let mut dn = 0usize;
    let mut tn = Rat::zero();
    for _ in 0..n {
        let mut best: Option<(Rat, usize)> = None;
        for axis in 0..3 {
            let t = rat_i(next[axis]) / &w[axis];
            match &best {
                Some((bt, _)) if *bt < t => {}
                Some((bt, _)) if *bt == t => {
                    // Two planes at once on the vertex ray is a small
                    // integer ratio, excluded by certification.
                    return Err(PexError::Degenerate(
                        "vertex sightline crosses a lattice edge".into(),
                    ));
                }
                _ => best = Some((t, axis)),
            }
        }
        let (t, axis) = best.expect("three candidates");
        dn = axis;
        tn = t;
        next[axis] += 1;
    }
    let m: [Rat; 3] = [&tn * &w[0], &tn * &w[1], &tn * &w[2]];
    let mut diagonals: Vec<CubeDiagonal> = Vec::new();
    for u in 0..3 {
        if u == dn {
            continue;
        }
        let v = 3 - dn - u;
        let f = rat_fract(&m[u]);
        if f.is_zero() {
            return Err(PexError::Degenerate(
                "vertex sightline crosses a lattice edge".into(),
            ));
        }
        let mut start = [Rat::zero(), Rat::zero(), Rat::zero()];
        start[u] = -f.clone();
        let mut end = m.clone();
        end[u] = &end[u] - &f;
        // Recount the links of the pulled-back segment directly.
        let mut crossings = BigInt::from(0u32);
        for axis in 0..3 {
            let hi_floor = if end[axis].is_integer() {
                end[axis].to_integer() - BigInt::one()
            } else {
                rat_floor(&end[axis])
            };
            let lo_floor = rat_floor(&start[axis]);
            let c = hi_floor - lo_floor;
            if c.is_positive() {
                crossings += c;
            }
        }
        if crossings != BigInt::from(n as u64 - 1) {
            return Err(PexError::Degenerate(format!(
                "pulled-back segment has {} interior crossings, expected {}",
                crossings,
                n - 1
            )));
        }
        diagonals.push(CubeDiagonal {
            start,
            end,
            time: tn.clone(),
            links: n,
            start_edge_axis: u,
            end_edge_axis: v,
        });
    }
    let mut it = diagonals.into_iter();
    let first = it.next().expect("two axes other than d_n");
    let second = it.next().expect("two axes other than d_n");
    Ok((first, second))
}

/// Exact itinerary of the section flow, marched in the torus coordinates.
///
/// `start` must lie on the section: every coordinate in [0,1) with exactly
/// one zero. Returns the face labels of `start` and the next `depth - 1`
/// section hits. Ties between candidate faces are edge hits and abort.
pub fn march_codes(dir: &Direction3, start: [Rat; 3], depth: usize) -> Result<Word> {
    let w = dir.omega();
    let one = Rat::one();
    for x in &start {
        if x.is_negative() || *x >= one {
            return Err(PexError::Unsupported(
                "section point must have coordinates in [0,1)".into(),
            ));
        }
    }
    let mut u = start;
    let mut word: Word = Vec::with_capacity(depth);
    for _ in 0..depth {
        let zeros: Vec<usize> = (0..3).filter(|&i| u[i].is_zero()).collect();
        let face = match zeros.as_slice() {
            [f] => *f,
            [] => return Err(PexError::Unsupported("point is not on the section".into())),
            _ => {
                return Err(PexError::Degenerate(
                    "orbit hit an edge of the cube".into(),
                ))
            }
        };
        word.push(face as u16);
        let mut best: Option<(Rat, usize)> = None;
        for axis in 0..3 {
            let t = (&one - &u[axis]) / &w[axis];
            match &best {
                Some((bt, _)) if *bt < t => {}
                Some((bt, _)) if *bt == t => {
                    return Err(PexError::Degenerate(
                        "orbit hit an edge of the cube".into(),
                    ))
                }
                _ => best = Some((t, axis)),
            }
        }
        let (t, axis) = best.expect("three candidates");
        for i in 0..3 {
            u[i] = &u[i] + &t * &w[i];
        }
        u[axis] = Rat::zero();
    }
    Ok(word)
}

/// Shadow-plane position of the section point on face `face` with in-face
/// coordinates (a, b) along the two other axes in ascending order.
pub fn planar_of_face_point(dir: &Direction3, face: usize, a: &Rat, b: &Rat) -> Point2 {
    let steps = shadow_steps(dir);
    let (i, j) = other_axes(face);
    steps[i].scale(a).add(&steps[j].scale(b))
}

/// Everything the cube pipeline produces for one direction: the certificate,
/// the coding complexity p(1..=horizon), the diagonal counts N(1..=horizon)
/// from the lattice census (empty when that census degenerates on a forced
/// run), and whether p(n) = n^2 + n + 1 held throughout.
#[derive(Clone, Debug)]
pub struct CubeReport {
    pub omega: [Rat; 3],
    pub horizon: usize,
    pub certificate: GenericityCertificate,
    pub p: Vec<u64>,
    pub diagonals: Vec<u64>,
    pub theorem_ok: bool,
}

impl CubeReport {
    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "omega": self.omega.iter().map(format_rat).collect::<Vec<_>>(),
            "horizon": self.horizon,
            "certificate": &self.certificate,
            "p": self.p,
            "N": self.diagonals,
            "theorem_ok": self.theorem_ok,
        });
        serde_json::to_string_pretty(&value).expect("report serializes")
    }
}

fn complexity_run(dir: &Direction3, nmax: usize, forced: bool) -> Result<CubeReport> {
    let cert = certify_generic(dir, nmax);
    if !forced && !cert.is_certified() {
        return Err(PexError::Certification(format!(
            "direction fails genericity up to horizon {}: {}",
            nmax,
            cert.failure_summary()
        )));
    }
    let ex = build_cube_section_exchange(dir)?;
    let lang = language(&ex, nmax)?;
    let p: Vec<u64> = (1..=nmax).map(|n| lang.complexity(n) as u64).collect();
    let diagonals = match lattice_diagonal_counts(dir, nmax) {
        Ok(counts) => counts,
        Err(_) if forced => Vec::new(),
        Err(e) => return Err(e),
    };
    let theorem_ok = (1..=nmax).all(|n| p[n - 1] == (n * n + n + 1) as u64);
    Ok(CubeReport {
        omega: dir.omega().clone(),
        horizon: nmax,
        certificate: cert,
        p,
        diagonals,
        theorem_ok,
    })
}

/// Run the full pipeline for a certified direction; refuses uncertified ones.
pub fn cube_complexity(dir: &Direction3, nmax: usize) -> Result<CubeReport> {
    complexity_run(dir, nmax, false)
}

/// Run the pipeline without the certification gate, recording the failed
/// certificate in the report. This is how resonant directions demonstrate
/// complexity below the quadratic.
pub fn cube_complexity_forced(dir: &Direction3, nmax: usize) -> Result<CubeReport> {
    complexity_run(dir, nmax, true)
}

/// Three points meant to witness one line of direction `omega` through the
/// interiors of three pairwise non-parallel lattice edges, with coordinates
/// in Q adjoined pi so every check is exact.
#[derive(Clone, Debug)]
pub struct TripleEdgeWitness {
    pub omega: [PiRat; 3],
    pub points: [[PiRat; 3]; 3],
}

#[derive(Clone, Debug)]
pub struct TripleEdgeVerdict {
    /// Both displacement vectors are exact multiples of omega, with three
    /// distinct parameters along the line.
    pub collinear: bool,
    /// Free (non-integer) axis per point when exactly two coordinates are
    /// integers; a point in the interior of a lattice edge has exactly one.
    pub edge_axes: [Option<usize>; 3],
    /// All three points sit on edges and the edge axes are pairwise
    /// distinct.
    pub distinct_edge_types: bool,
    pub ok: bool,
}

/// Decide the witness exactly. Integrality of a coordinate is decided by
/// whether pi cancels from it (a transcendence argument, not an epsilon),
/// and a non-integral coordinate automatically lies strictly inside a unit
/// edge.
pub fn verify_triple_edge_witness(wit: &TripleEdgeWitness) -> Result<TripleEdgeVerdict> {
    let pivot = (0..3)
        .find(|&i| !wit.omega[i].is_zero())
        .ok_or_else(|| PexError::Unsupported("zero direction".into()))?;
    let base = &wit.points[0];
    let mut collinear = true;
    let mut times: Vec<PiRat> = vec![PiRat::zero()];
    for p in &wit.points[1..] {
        let t = p[pivot].sub(&base[pivot]).div(&wit.omega[pivot])?;
        for j in 0..3 {
            let expect = t.mul(&wit.omega[j]);
            if !p[j].sub(&base[j]).sub(&expect).is_zero() {
                collinear = false;
            }
        }
        times.push(t);
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if times[i].sub(&times[j]).is_zero() {
                collinear = false;
            }
        }
    }
    let mut edge_axes: [Option<usize>; 3] = [None; 3];
    for (idx, p) in wit.points.iter().enumerate() {
        let free: Vec<usize> = (0..3)
            .filter(|&j| !p[j].as_rat().is_some_and(|r| r.is_integer()))
            .collect();
        if let [axis] = free.as_slice() {
            edge_axes[idx] = Some(*axis);
        }
    }
    let distinct_edge_types = match edge_axes {
        [Some(a), Some(b), Some(c)] => a != b && b != c && a != c,
        _ => false,
    };
    let ok = collinear && distinct_edge_types;
    Ok(TripleEdgeVerdict {
        collinear,
        edge_axes,
        distinct_edge_types,
        ok,
    })
}

/// A direction whose flow really does carry one line through three edges:
/// omega = (1 - pi/6, 1, (6-pi)/(12-pi)). The three points below are
/// collinear along it with parameters 0, 1 and (12-pi)/(6-pi), and each has
/// exactly two integer coordinates, in three different patterns. No amount
/// of horizon search certifies this direction.
pub fn pi_triple_edge_example() -> TripleEdgeWitness {
    let pi = PiRat::pi();
    let one = PiRat::one();
    let six = PiRat::from_int(6);
    let twelve = PiRat::from_int(12);
    let two = PiRat::from_int(2);
    let pi_sixth = pi.div(&six).expect("six is nonzero");
    let w0 = one.sub(&pi_sixth);
    let six_less = six.sub(&pi);
    let twelve_less = twelve.sub(&pi);
    let w2 = six_less.div(&twelve_less).expect("12 - pi is nonzero");
    let t3 = twelve_less.div(&six_less).expect("6 - pi is nonzero");
    TripleEdgeWitness {
        omega: [w0, PiRat::one(), w2.clone()],
        points: [
            [pi_sixth, PiRat::zero(), PiRat::zero()],
            [PiRat::one(), PiRat::one(), w2],
            [two, t3, PiRat::one()],
        ],
    }
}

/// Deterministic Miller-Rabin; the witness set below decides primality for
/// every u64.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| -> u64 { ((a as u128 * b as u128) % n as u128) as u64 };
    let pow = |mut base: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Direction with three distinct random 64-bit prime components. Distinct
/// large primes admit no small integer ratios or reciprocal relations, so
/// these certify at any reasonable horizon.
pub fn random_prime_direction<R: rand::Rng>(rng: &mut R) -> Direction3 {
    let mut picks: Vec<u64> = Vec::new();
    while picks.len() < 3 {
        let candidate = rng.gen::<u64>() | (1 << 63) | 1;
        if is_prime_u64(candidate) && !picks.contains(&candidate) {
            picks.push(candidate);
        }
    }
    Direction3::new(
        Rat::from_integer(BigInt::from(picks[0])),
        Rat::from_integer(BigInt::from(picks[1])),
        Rat::from_integer(BigInt::from(picks[2])),
    )
    .expect("positive integers")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::generalized_diagonals;
    use crate::exchange::prop1_complexity;
    use crate::rat::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example_direction() -> Direction3 {
        Direction3::new(
            rat(104_729, 1_000_003),
            rat(224_737, 1_000_003),
            rat(350_377, 1_000_003),
        )
        .unwrap()
    }

    fn resonant_direction() -> Direction3 {
        Direction3::new(rat(1, 2), rat(1, 3), rat(1, 6)).unwrap()
    }

    #[test]
    fn direction_folds_signs_and_rejects_zeroes() {
        assert!(Direction3::new(rat(0, 1), rat(1, 2), rat(1, 3)).is_err());
        let folded = Direction3::new(rat(-1, 2), rat(1, 3), rat(-1, 6)).unwrap();
        assert_eq!(folded, resonant_direction());
    }

    #[test]
    fn build_rejects_equal_components() {
        for (a, b, c) in [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1)] {
            let dir = Direction3::new(rat_i(a), rat_i(b), rat_i(c)).unwrap();
            assert!(matches!(
                build_cube_section_exchange(&dir),
                Err(PexError::Degenerate(_))
            ));
        }
    }

    #[test]
    fn section_has_seven_cells() {
        let ex = build_cube_section_exchange(&example_direction()).unwrap();
        assert_eq!(ex.cells.len(), 7);
        let mut by_label = [0usize; 3];
        for c in &ex.cells {
            by_label[c.label as usize] += 1;
        }
        // Only the largest component's chart returns to itself.
        assert_eq!(by_label, [2, 2, 3]);
    }

    #[test]
    fn certificate_examples() {
        let cert = certify_generic(&example_direction(), 30);
        assert!(cert.is_certified(), "{}", cert.failure_summary());

        let ones = Direction3::new(rat_i(1), rat_i(1), rat_i(1)).unwrap();
        let cert = certify_generic(&ones, 1);
        assert!(!cert.parallel_edge_check.passed());

        let pair = Direction3::new(rat(1, 3), rat(1, 3), rat(1, 2)).unwrap();
        assert!(!certify_generic(&pair, 1).parallel_edge_check.passed());

        let cert = certify_generic(&resonant_direction(), 5);
        assert!(!cert.parallel_edge_check.passed());
        assert!(!cert.b_relation_check.passed());
        assert!(!cert.is_certified());
    }

    #[test]
    fn certificate_is_monotone() {
        let dir = resonant_direction();
        let failed: Vec<bool> = (0..8)
            .map(|h| !certify_generic(&dir, h).is_certified())
            .collect();
        let mut sorted = failed.clone();
        sorted.sort();
        assert_eq!(failed, sorted, "a pass above a failure: {failed:?}");
        for h in [1, 5, 10, 30] {
            assert!(certify_generic(&example_direction(), h).is_certified());
        }
    }

    #[test]
    fn complexity_matches_quadratic() {
        let report = cube_complexity(&example_direction(), 10).unwrap();
        assert_eq!(report.p, vec![3, 7, 13, 21, 31, 43, 57, 73, 91, 111]);
        assert_eq!(report.diagonals, vec![2; 10]);
        assert!(report.theorem_ok);
        let json = report.to_json();
        assert!(json.contains("\"theorem_ok\": true"));
        assert!(json.contains("\"N\""));
    }

    #[test]
    fn closed_form_matches_quadratic() {
        let diag = vec![2u64; 10];
        for n in 3..=12usize {
            let p = prop1_complexity(3, 7, &diag, n).unwrap();
            assert_eq!(p, (n * n + n + 1) as u64);
        }
    }

    #[test]
    fn engine_counts_diagonals_uniformly() {
        let ex = build_cube_section_exchange(&example_direction()).unwrap();
        let table = generalized_diagonals(&ex, 8).unwrap();
        // A segment of L links shows up with L - 2 clean section points
        // between its endpoint hits, so slot n counts the (n + 2)-link
        // segments; two per length, uniformly.
        for n in 0..=8 {
            assert_eq!(table.count(n), 2, "slot {n}: {:?}", table.counts);
        }
    }

    #[test]
    fn oracle_counts_and_degenerate_directions() {
        assert_eq!(
            lattice_diagonal_counts(&example_direction(), 8).unwrap(),
            vec![2; 8]
        );
        let diags = lattice_diagonals(&example_direction(), 5).unwrap();
        assert_eq!(diags.len(), 10);
        assert!(diags.windows(2).all(|d| d[0] <= d[1]));
        assert!(matches!(
            lattice_diagonal_counts(&resonant_direction(), 6),
            Err(PexError::Degenerate(_))
        ));
    }

    #[test]
    fn forced_run_flags_resonant_direction() {
        let report = cube_complexity_forced(&resonant_direction(), 6).unwrap();
        assert!(!report.certificate.is_certified());
        assert!(report.diagonals.is_empty());
        assert!(!report.theorem_ok);
        assert!(
            (1..=6).any(|n| report.p[n - 1] < (n * n + n + 1) as u64),
            "complexity stays quadratic: {:?}",
            report.p
        );
        assert!(matches!(
            cube_complexity(&resonant_direction(), 6),
            Err(PexError::Certification(_))
        ));
    }

    #[test]
    fn octant_folding_gives_identical_sections() {
        let mirrored = Direction3::new(
            rat(-104_729, 1_000_003),
            rat(224_737, 1_000_003),
            rat(-350_377, 1_000_003),
        )
        .unwrap();
        let a = build_cube_section_exchange(&example_direction()).unwrap();
        let b = build_cube_section_exchange(&mirrored).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn marcher_agrees_with_planar_coding() {
        let dir = example_direction();
        let ex = build_cube_section_exchange(&dir).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let den = 1_000_003i64;
        let mut clean = 0;
        for _ in 0..100 {
            let face = (rng.gen::<u32>() % 3) as usize;
            let a = rat(1 + (rng.gen::<u32>() as i64 % (den - 1)), den);
            let b = rat(1 + (rng.gen::<u32>() as i64 % (den - 1)), den);
            let mut start = [Rat::zero(), Rat::zero(), Rat::zero()];
            let (i, j) = other_axes(face);
            start[i] = a.clone();
            start[j] = b.clone();
            let marched = match march_codes(&dir, start, 50) {
                Ok(w) => w,
                Err(PexError::Degenerate(_)) => continue,
                Err(e) => panic!("marcher failed: {e}"),
            };
            let planar = planar_of_face_point(&dir, face, &a, &b);
            match ex.code_orbit(&planar, 50).unwrap() {
                crate::exchange::Coding::Regular(word) => {
                    assert_eq!(word, marched);
                    clean += 1;
                }
                crate::exchange::Coding::Singular { .. } => continue,
            }
        }
        assert!(clean >= 90, "only {clean} clean samples");
    }

    #[test]
    fn pi_witness_is_exactly_collinear_on_three_edge_types() {
        let wit = pi_triple_edge_example();
        let verdict = verify_triple_edge_witness(&wit).unwrap();
        assert!(verdict.collinear);
        assert_eq!(verdict.edge_axes, [Some(0), Some(2), Some(1)]);
        assert!(verdict.distinct_edge_types);
        assert!(verdict.ok);

        let mut bent = wit.clone();
        bent.points[2][2] = PiRat::from_rat(rat(9, 10));
        let verdict = verify_triple_edge_witness(&bent).unwrap();
        assert!(!verdict.collinear);
        assert!(!verdict.ok);
    }

    #[test]
    fn constructed_diagonals_match_oracle() {
        let dir = example_direction();
        for n in 1..=12usize {
            let (d1, d2) = construct_two_diagonals(&dir, n).unwrap();
            for d in [&d1, &d2] {
                assert_eq!(d.links, n);
                assert_ne!(d.start_edge_axis, d.end_edge_axis);
                assert!(d.time.is_positive());
                for axis in 0..3 {
                    assert_eq!(&d.end[axis] - &d.start[axis], &d.time * &dir.omega()[axis]);
                }
            }
            let mut built = vec![d1.canonical(), d2.canonical()];
            built.sort();
            let mut expected: Vec<LatticeDiagonal> = lattice_diagonals(&dir, n)
                .unwrap()
                .into_iter()
                .filter(|d| d.links == n)
                .collect();
            expected.sort();
            assert_eq!(built, expected, "n = {n}");
        }
        for n in [20usize, 30] {
            let (d1, d2) = construct_two_diagonals(&dir, n).unwrap();
            assert_eq!(d1.links, n);
            assert_eq!(d2.links, n);
        }
    }

    #[test]
    fn random_prime_directions_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..3 {
            let dir = random_prime_direction(&mut rng);
            let cert = certify_generic(&dir, 30);
            assert!(cert.is_certified(), "{}", cert.failure_summary());
        }
        assert!(is_prime_u64(104_729));
        assert!(!is_prime_u64(104_730));
        assert!(is_prime_u64((1 << 61) - 1));
    }
}
