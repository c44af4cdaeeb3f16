//! Edge atlas of an exchange: every maximal piece of shared cell boundary,
//! classified exactly.
//!
//! A wall fragment records which two cells meet along it (possibly through a
//! torus gluing translation) and whether the coding or the map jumps across.
//! Fragments where nothing jumps are seam artifacts of the stored partition;
//! fragments where the label or the map changes form the discontinuity set.
//! Uncovered boundary is the singular frontier of a disk-type domain and
//! counts as discontinuity too.

use super::{Exchange, Isometry, Topology};
use crate::error::{PexError, Result};
use crate::geom::{seg, LineKey, Point2, SegSeg, Segment2};
use crate::rat::{rat_i, Rat};
use num::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct WallFragment {
    /// Geometry on the side of `cell_i` (a sub-segment of one of its edges).
    pub seg: Segment2,
    pub cell_i: usize,
    /// None marks unglued domain boundary (disk topology only).
    pub cell_j: Option<usize>,
    /// Glue translation: x on the i-side corresponds to x + tau on the
    /// j-side. Zero for interior walls.
    pub tau: Point2,
    /// Label or map jumps across: this wall is part of the discontinuity set.
    pub is_disc: bool,
    /// The map is continuous across (label may still jump). Continuous walls
    /// push to the same curve from both sides.
    pub map_continuous: bool,
}

/// A maximal straight piece of the discontinuity set inside the domain.
#[derive(Clone, Debug)]
pub struct DiscRun {
    pub seg: Segment2,
    pub key: LineKey,
    /// Logical component id after chaining runs across gluings.
    pub comp: usize,
    /// Points on this run that no pushed image may hit: transverse meetings
    /// with other runs, endpoints of other runs, and this run's own genuine
    /// endpoints.
    pub junctions: Vec<Point2>,
    /// Endpoints that are real ends of the discontinuity component (not
    /// absorbed by a glued continuation).
    pub genuine_ends: [bool; 2],
}

#[derive(Clone, Debug)]
pub struct DiscComponent {
    pub runs: Vec<usize>,
    /// Genuine endpoint positions of the whole component.
    pub endpoints: Vec<Point2>,
}

#[derive(Clone, Debug)]
pub struct DiscSet {
    pub runs: Vec<DiscRun>,
    pub components: Vec<DiscComponent>,
}

#[derive(Clone, Debug)]
pub struct WallAtlas {
    /// Canonical fragments, one per unordered wall (the i-side is the
    /// canonical side).
    pub fragments: Vec<WallFragment>,
    /// All geometric wall positions used to chop pushed segments: fragment
    /// segments plus their j-side translates when glued.
    pub positions: Vec<WallPosition>,
    pub disc: DiscSet,
}

#[derive(Clone, Debug)]
pub struct WallPosition {
    pub seg: Segment2,
    pub fragment: usize,
}

/// Canonical representative of a glued point: the lexicographically smallest
/// translate that still lies in the closed domain.
pub fn canonical_point(ex: &Exchange, p: &Point2, candidates: &[Point2]) -> Point2 {
    let mut best: Option<Point2> = None;
    for c in candidates {
        let q = p.add(c);
        let in_dom = ex
            .domain
            .iter()
            .any(|d| d.locate(&q) != crate::geom::Location::Outside);
        if in_dom {
            match &best {
                Some(b) if *b <= q => {}
                _ => best = Some(q),
            }
        }
    }
    best.unwrap_or_else(|| p.clone())
}

fn collinear_overlap(e: &Segment2, f: &Segment2) -> Option<Segment2> {
    match crate::geom::segment_intersection(e, f) {
        SegSeg::Overlap(s) => Some(s),
        _ => None,
    }
}

impl WallAtlas {
    pub fn build(ex: &Exchange) -> Result<WallAtlas> {
        let cands = ex.glue_candidates();
        let n = ex.cells.len();
        let mut fragments: Vec<WallFragment> = Vec::new();
        // Per (cell, edge index): covered sub-intervals by parameter, to
        // detect unglued boundary afterwards.
        let mut covered: BTreeMap<(usize, usize), Vec<(Rat, Rat)>> = BTreeMap::new();

        for i in 0..n {
            let edges_i: Vec<Segment2> = ex.cells[i].poly.edges().collect();
            for (ei, e) in edges_i.iter().enumerate() {
                for j in 0..n {
                    let edges_j: Vec<Segment2> = ex.cells[j].poly.edges().collect();
                    for f in &edges_j {
                        for tau in &cands {
                            if i == j && tau.is_zero() {
                                continue;
                            }
                            // Only register from the canonical side to avoid
                            // duplicates: (i, e-side) vs (j, f-side at -tau).
                            let f_moved = seg(f.a.sub(tau), f.b.sub(tau));
                            let Some(ov) = collinear_overlap(e, &f_moved) else {
                                continue;
                            };
                            if ov.is_degenerate() {
                                continue;
                            }
                            let canonical_side = (i, &ov.a.add(&ov.b)) <= (j, &ov.a.add(&ov.b).add(tau).add(tau));
                            // Record coverage regardless of side.
                            let (t0, t1) = param_span(e, &ov);
                            covered.entry((i, ei)).or_default().push((t0, t1));
                            if !canonical_side {
                                continue;
                            }
                            let (is_disc, map_continuous) =
                                classify(ex, i, j, tau);
                            fragments.push(WallFragment {
                                seg: ov,
                                cell_i: i,
                                cell_j: Some(j),
                                tau: tau.clone(),
                                is_disc,
                                map_continuous,
                            });
                        }
                    }
                }
            }
        }

        // Uncovered boundary pieces.
        for i in 0..n {
            let edges_i: Vec<Segment2> = ex.cells[i].poly.edges().collect();
            for (ei, e) in edges_i.iter().enumerate() {
                let mut ivs = covered.remove(&(i, ei)).unwrap_or_default();
                ivs.sort();
                let mut t = rat_i(0);
                let mut gaps: Vec<(Rat, Rat)> = Vec::new();
                for (a, b) in ivs {
                    if a > t {
                        gaps.push((t.clone(), a.clone()));
                    }
                    if b > t {
                        t = b;
                    }
                }
                if t < rat_i(1) {
                    gaps.push((t, rat_i(1)));
                }
                for (a, b) in gaps {
                    if a == b {
                        continue;
                    }
                    if ex.topology == Topology::Torus {
                        return Err(PexError::InvalidExchange(format!(
                            "torus cell {i} has unglued boundary on edge {ei}"
                        )));
                    }
                    fragments.push(WallFragment {
                        seg: seg(e.at(&a), e.at(&b)),
                        cell_i: i,
                        cell_j: None,
                        tau: Point2::origin(),
                        is_disc: true,
                        map_continuous: false,
                    });
                }
            }
        }

        let mut positions = Vec::new();
        for (fi, f) in fragments.iter().enumerate() {
            positions.push(WallPosition {
                seg: f.seg.clone(),
                fragment: fi,
            });
            if !f.tau.is_zero() {
                positions.push(WallPosition {
                    seg: seg(f.seg.a.add(&f.tau), f.seg.b.add(&f.tau)),
                    fragment: fi,
                });
            }
        }

        let disc = build_disc_set(ex, &fragments, &cands)?;
        Ok(WallAtlas {
            fragments,
            positions,
            disc,
        })
    }
}

fn param_span(e: &Segment2, sub: &Segment2) -> (Rat, Rat) {
    let t0 = e.param_of(&sub.a).expect("overlap endpoint on edge");
    let t1 = e.param_of(&sub.b).expect("overlap endpoint on edge");
    if t0 <= t1 {
        (t0, t1)
    } else {
        (t1, t0)
    }
}

/// Is the coding or the map discontinuous across the wall (i -> j at tau)?
fn classify(ex: &Exchange, i: usize, j: usize, tau: &Point2) -> (bool, bool) {
    let label_jump = ex.cells[i].label != ex.cells[j].label;
    let gi = &ex.cells[i].map;
    let gj = &ex.cells[j].map;
    let map_continuous = maps_agree_across(ex, gi, gj, tau);
    (label_jump || !map_continuous, map_continuous)
}

/// g_j(x + tau) == g_i(x) + lambda for some gluing lattice vector lambda,
/// identically in x. Forces equal linear parts.
fn maps_agree_across(ex: &Exchange, gi: &Isometry, gj: &Isometry, tau: &Point2) -> bool {
    if gi.m != gj.m {
        return false;
    }
    // Difference g_j(x+tau) - g_i(x) = M tau + t_j - t_i, constant.
    let lin = Isometry::new(gj.m.clone(), Point2::origin());
    let diff = lin.apply(tau).add(&gj.t).sub(&gi.t);
    ex.in_glue_lattice(&diff)
}

fn build_disc_set(
    ex: &Exchange,
    fragments: &[WallFragment],
    cands: &[Point2],
) -> Result<DiscSet> {
    // Collect all geometric positions of discontinuity walls.
    let mut segs: Vec<Segment2> = Vec::new();
    for f in fragments {
        if !f.is_disc {
            continue;
        }
        segs.push(f.seg.clone());
        if !f.tau.is_zero() {
            segs.push(seg(f.seg.a.add(&f.tau), f.seg.b.add(&f.tau)));
        }
    }
    // Merge collinear touching/overlapping pieces into maximal runs, grouped
    // by line.
    let mut by_line: BTreeMap<LineKey, Vec<Segment2>> = BTreeMap::new();
    for s in segs {
        let key = s
            .line_key()
            .ok_or_else(|| PexError::Degenerate("degenerate wall segment".into()))?;
        by_line.entry(key).or_default().push(s);
    }
    let mut runs: Vec<DiscRun> = Vec::new();
    for (key, group) in by_line {
        let mut ivs: Vec<(Rat, Rat, Point2, Point2)> = group
            .iter()
            .map(|s| {
                let ca = key.coord_of(&s.a);
                let cb = key.coord_of(&s.b);
                if ca <= cb {
                    (ca, cb, s.a.clone(), s.b.clone())
                } else {
                    (cb, ca, s.b.clone(), s.a.clone())
                }
            })
            .collect();
        ivs.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        let mut cur: Option<(Rat, Rat, Point2, Point2)> = None;
        let flush = |c: &mut Option<(Rat, Rat, Point2, Point2)>, runs: &mut Vec<DiscRun>| {
            if let Some((_, _, a, b)) = c.take() {
                runs.push(DiscRun {
                    seg: seg(a, b),
                    key: key.clone(),
                    comp: 0,
                    junctions: Vec::new(),
                    genuine_ends: [true, true],
                });
            }
        };
        for (a, b, pa, pb) in ivs {
            match &mut cur {
                None => cur = Some((a, b, pa, pb)),
                Some((_, cb, _, cpb)) => {
                    if a <= *cb {
                        if b > *cb {
                            *cb = b;
                            *cpb = pb;
                        }
                    } else {
                        flush(&mut cur, &mut runs);
                        cur = Some((a, b, pa, pb));
                    }
                }
            }
        }
        flush(&mut cur, &mut runs);
    }

    // Chain runs across gluings: endpoint of one run glue-coincident with an
    // endpoint of a collinear-compatible run joins components and absorbs
    // both endpoints; an endpoint glue-interior to another run is absorbed
    // into that run's component as well.
    let mut uf: Vec<usize> = (0..runs.len()).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let endpoints: Vec<[Point2; 2]> =
        runs.iter().map(|r| [r.seg.a.clone(), r.seg.b.clone()]).collect();
    for ri in 0..runs.len() {
        for end in 0..2 {
            let p = &endpoints[ri][end];
            for tau in cands {
                if tau.is_zero() {
                    continue;
                }
                let q = p.add(tau);
                for rj in 0..runs.len() {
                    // Continuation requires matching line direction through
                    // the glued point.
                    let shifted_key = LineKey::through(
                        &runs[ri].seg.a.add(tau),
                        &runs[ri].seg.b.add(tau),
                    );
                    if shifted_key != runs[rj].key {
                        continue;
                    }
                    if let Some(t) = runs[rj].seg.param_of(&q) {
                        if t >= rat_i(0) && t <= rat_i(1) {
                            let a = find(&mut uf, ri);
                            let b = find(&mut uf, rj);
                            uf[a] = b;
                            runs[ri].genuine_ends[end] = false;
                            if t.is_zero() {
                                runs[rj].genuine_ends[0] = false;
                            } else if t == rat_i(1) {
                                runs[rj].genuine_ends[1] = false;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut comp_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for ri in 0..runs.len() {
        let root = find(&mut uf, ri);
        let next = comp_ids.len();
        let id = *comp_ids.entry(root).or_insert(next);
        runs[ri].comp = id;
    }
    let mut components: Vec<DiscComponent> = (0..comp_ids.len())
        .map(|_| DiscComponent {
            runs: Vec::new(),
            endpoints: Vec::new(),
        })
        .collect();
    for (ri, r) in runs.iter().enumerate() {
        components[r.comp].runs.push(ri);
    }

    // Junction points: run-run transverse meetings, absorbed or not, plus
    // genuine endpoints. A pushed image through any of these is a degenerate
    // coincidence.
    let n = runs.len();
    for ri in 0..n {
        let mut pts: Vec<Point2> = Vec::new();
        for rj in 0..n {
            if ri == rj {
                continue;
            }
            match crate::geom::segment_intersection(&runs[ri].seg, &runs[rj].seg) {
                SegSeg::Point(p) => pts.push(p),
                SegSeg::Overlap(_) => {
                    return Err(PexError::Degenerate(
                        "overlapping discontinuity runs after merging".into(),
                    ))
                }
                SegSeg::Empty => {}
            }
        }
        for end in 0..2 {
            if runs[ri].genuine_ends[end] {
                pts.push(endpoints[ri][end].clone());
            }
        }
        pts.sort();
        pts.dedup();
        runs[ri].junctions = pts;
    }
    for r in &runs {
        for end in 0..2 {
            if r.genuine_ends[end] {
                let p = canonical_point(ex, &[&r.seg.a, &r.seg.b][end], cands);
                let c = &mut components[r.comp].endpoints;
                if !c.contains(&p) {
                    c.push(p);
                }
            }
        }
    }
    for c in &mut components {
        c.endpoints.sort();
    }
    Ok(DiscSet { runs, components })
}

impl DiscSet {
    /// Locate a point on the discontinuity set: which run, and is it clean
    /// (away from junctions and genuine endpoints)?
    pub fn locate(&self, p: &Point2) -> Option<DiscHit> {
        for (ri, r) in self.runs.iter().enumerate() {
            if let Some(t) = r.seg.param_of(p) {
                if t < rat_i(0) || t > rat_i(1) {
                    continue;
                }
                let clean = !r.junctions.contains(p);
                return Some(DiscHit { run: ri, clean });
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DiscHit {
    pub run: usize,
    pub clean: bool,
}

impl Point2 {
    pub fn origin() -> Point2 {
        crate::geom::pt(rat_i(0), rat_i(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::fixtures;
    use crate::geom::pt;
    use crate::rat::rat;

    #[test]
    fn torus_translation_atlas() {
        // Cut at x=1/2, shift (2/5, 1/7): discontinuities are the two label
        // circles x=0 and x=1/2; horizontal seams and the wrap cuts at
        // x=3/5, y=6/7 are artifacts.
        let ex = fixtures::torus_translation(&pt(rat(2, 5), rat(1, 7)), &[rat(1, 2)], &[]);
        let atlas = WallAtlas::build(&ex).unwrap();
        let disc_lines: std::collections::BTreeSet<_> = atlas
            .fragments
            .iter()
            .filter(|f| f.is_disc)
            .map(|f| f.seg.line_key().unwrap())
            .collect();
        assert_eq!(disc_lines.len(), 2, "{disc_lines:?}");
        // Runs merge into two full vertical circles; gluing erases every
        // genuine endpoint.
        assert_eq!(atlas.disc.components.len(), 2);
        for c in &atlas.disc.components {
            assert!(c.endpoints.is_empty(), "circle component has no ends");
        }
        // Three geometric runs: x=1/2, plus the glued circle represented at
        // both seam positions x=0 and x=1.
        assert_eq!(atlas.disc.runs.len(), 3);
        let total_len: Rat = atlas
            .disc
            .runs
            .iter()
            .map(|r| {
                let d = r.seg.b.sub(&r.seg.a);
                // All runs here are vertical.
                assert!(d.x.is_zero());
                if d.y < rat_i(0) {
                    -d.y
                } else {
                    d.y
                }
            })
            .sum();
        assert_eq!(total_len, rat_i(3));
        // Every label-circle wall is map-continuous (pure translation).
        for f in atlas.fragments.iter().filter(|f| f.is_disc) {
            assert!(f.map_continuous);
        }
    }

    #[test]
    fn identity_square_atlas() {
        let ex = fixtures::identity_square();
        let atlas = WallAtlas::build(&ex).unwrap();
        // All four boundary edges are unglued singular frontier.
        assert_eq!(atlas.fragments.len(), 4);
        assert!(atlas.fragments.iter().all(|f| f.is_disc && f.cell_j.is_none()));
        assert_eq!(atlas.disc.runs.len(), 4);
        // Four separate components, each a segment with two genuine ends.
        assert_eq!(atlas.disc.components.len(), 4);
        for c in &atlas.disc.components {
            assert_eq!(c.endpoints.len(), 2);
        }
        // Corners are junctions.
        let r0 = &atlas.disc.runs[0];
        assert!(!r0.junctions.is_empty());
    }

    #[test]
    fn canonical_point_reduces_seam() {
        let ex = fixtures::torus_translation(&pt(rat(2, 5), rat(1, 7)), &[rat(1, 2)], &[]);
        let cands = ex.glue_candidates();
        let p = pt(rat_i(1), rat(1, 3));
        let q = pt(rat_i(0), rat(1, 3));
        assert_eq!(canonical_point(&ex, &p, &cands), q);
        assert_eq!(canonical_point(&ex, &q, &cands), q);
        let interior = pt(rat(1, 3), rat(1, 3));
        assert_eq!(canonical_point(&ex, &interior, &cands), interior);
    }

    #[test]
    fn quadrant_fixture_atlas() {
        let ex = fixtures::torus_translation(
            &pt(rat(314159, 1000003), rat(271829, 1000003)),
            &[rat(1, 2)],
            &[rat(1, 2)],
        );
        assert!(ex.validate().is_ok());
        let atlas = WallAtlas::build(&ex).unwrap();
        // Four label circles: x=0, x=1/2, y=0, y=1/2.
        assert_eq!(atlas.disc.components.len(), 4);
        for c in &atlas.disc.components {
            assert!(c.endpoints.is_empty());
        }
    }
}
