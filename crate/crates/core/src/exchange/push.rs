//! Forward propagation of the discontinuity set and the diagonal count.
//!
//! A generalized diagonal of word length n is an orbit segment that leaves a
//! discontinuity, stays clean for n steps, and lands on a discontinuity:
//! a point q on a one-step image of the discontinuity set whose orbit
//! q, Tq, ..., T^{n-1}q avoids it and with T^n q back on it. The pusher
//! carries images of the discontinuity runs step by step, splitting at every
//! wall; a transverse meeting with a run while chopping the step-j images is
//! exactly an event with n = j - 1.
//!
//! Every exact coincidence that would make the count ambiguous (an image
//! through a junction of runs, an endpoint orbit landing in the interior of
//! a run) aborts with a diagnostic instead of guessing. Touches at run
//! extremities and at fragment boundaries over junctions are chart-cut
//! artifacts of closed discontinuity curves and are skipped, not counted.

use super::atlas::{canonical_point, DiscSet, WallAtlas};
use super::{Exchange, Word};
use crate::error::{PexError, Result};
use crate::geom::{seg, LineKey, Point2, SegSeg, Segment2};
use crate::rat::{rat, Rat};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum EndKind {
    /// Image of a genuine endpoint of a discontinuity component.
    Genuine,
    /// Split at a seam or wall with nothing singular about it.
    Seam,
    /// Split where the orbit hit the discontinuity set at an earlier step.
    Cut,
}

#[derive(Clone, Debug)]
pub(super) struct PushPiece {
    pub seg: Segment2,
    pub comp: usize,
    pub src_run: usize,
    pub src_a: Point2,
    pub src_b: Point2,
    pub word: Word,
    pub side: u8,
    pub ends: [EndKind; 2],
}

impl PushPiece {
    pub(super) fn src_at(&self, t: &Rat) -> Point2 {
        let d = self.src_b.sub(&self.src_a);
        self.src_a.add(&d.scale(t))
    }
}

#[derive(Clone, Debug)]
pub(super) struct RawEvent {
    pub n: usize,
    pub src: Point2,
    pub end: Point2,
    pub side: u8,
    pub word: Word,
    pub comp_start: usize,
    pub comp_end: usize,
}

pub(super) enum StepMode {
    /// Count diagonal events; images that ride along the discontinuity set
    /// are terminated (their continuations have singular interiors).
    Diag,
    /// Carry full set-images; riding along the discontinuity set is a
    /// positive-length overlap and is reported instead of terminated.
    Family,
}

pub(super) struct StepOutput {
    pub advanced: Vec<PushPiece>,
    pub events: Vec<RawEvent>,
    /// (component of the pushed piece, component of the run it rides on,
    /// overlap segment). Family mode only.
    pub overlap: Option<(usize, usize, Segment2)>,
}

fn find_run(disc: &DiscSet, s: &Segment2) -> Result<usize> {
    let key = s
        .line_key()
        .ok_or_else(|| PexError::Degenerate("degenerate seed fragment".into()))?;
    for (ri, r) in disc.runs.iter().enumerate() {
        if r.key != key {
            continue;
        }
        let ta = r.seg.param_of(&s.a);
        let tb = r.seg.param_of(&s.b);
        if let (Some(ta), Some(tb)) = (ta, tb) {
            let lo = Rat::zero();
            let hi = Rat::one();
            if ta >= lo && ta <= hi && tb >= lo && tb <= hi {
                return Ok(ri);
            }
        }
    }
    Err(PexError::Degenerate(
        "seed fragment not contained in any discontinuity run".into(),
    ))
}

fn seed_end_kind(disc: &DiscSet, run: usize, p: &Point2) -> EndKind {
    let r = &disc.runs[run];
    if (r.genuine_ends[0] && *p == r.seg.a) || (r.genuine_ends[1] && *p == r.seg.b) {
        EndKind::Genuine
    } else {
        EndKind::Seam
    }
}

/// One-step images of every discontinuity run, seeded per wall side. Walls
/// where the map is continuous push to the same curve from both sides and
/// are seeded once; walls where the map jumps are seeded from both sides.
pub(super) fn seeds(ex: &Exchange, atlas: &WallAtlas) -> Result<Vec<PushPiece>> {
    let mut out = Vec::new();
    for f in &atlas.fragments {
        if !f.is_disc {
            continue;
        }
        let run_i = find_run(&atlas.disc, &f.seg)?;
        let cell = &ex.cells[f.cell_i];
        out.push(PushPiece {
            seg: cell.map.apply_seg(&f.seg),
            comp: atlas.disc.runs[run_i].comp,
            src_run: run_i,
            src_a: f.seg.a.clone(),
            src_b: f.seg.b.clone(),
            word: vec![cell.label],
            side: 0,
            ends: [
                seed_end_kind(&atlas.disc, run_i, &f.seg.a),
                seed_end_kind(&atlas.disc, run_i, &f.seg.b),
            ],
        });
        if let Some(cj) = f.cell_j {
            if !f.map_continuous {
                let sj = seg(f.seg.a.add(&f.tau), f.seg.b.add(&f.tau));
                let run_j = find_run(&atlas.disc, &sj)?;
                let cell_j = &ex.cells[cj];
                out.push(PushPiece {
                    seg: cell_j.map.apply_seg(&sj),
                    comp: atlas.disc.runs[run_j].comp,
                    src_run: run_j,
                    src_a: sj.a.clone(),
                    src_b: sj.b.clone(),
                    word: vec![cell_j.label],
                    side: 1,
                    ends: [
                        seed_end_kind(&atlas.disc, run_j, &sj.a),
                        seed_end_kind(&atlas.disc, run_j, &sj.b),
                    ],
                });
            }
        }
    }
    Ok(out)
}

/// Chop the step-j pieces at every wall of `chop_ex`, record events against
/// the forward discontinuity runs, and apply the cell maps of `chop_ex` to
/// the surviving sub-pieces. `check_riding` is off only while seeding a
/// family from pieces that legitimately sit on the runs themselves.
pub(super) fn advance(
    chop_ex: &Exchange,
    chop_atlas: &WallAtlas,
    disc: &DiscSet,
    runs_by_key: &BTreeMap<LineKey, Vec<usize>>,
    pieces: &[PushPiece],
    step: usize,
    mode: StepMode,
    want_advance: bool,
    check_riding: bool,
) -> Result<StepOutput> {
    let mut advanced = Vec::new();
    let mut events = Vec::new();
    let mut family_seen: BTreeSet<(Point2, Point2, Point2, Point2, usize, u8)> = BTreeSet::new();
    for piece in pieces {
        let Some(piece_key) = piece.seg.line_key() else {
            continue;
        };

        // Riding: collinear overlap with a discontinuity run.
        let mut dead: Vec<(Rat, Rat)> = Vec::new();
        if check_riding {
            if let Some(cands) = runs_by_key.get(&piece_key) {
                for &ri in cands {
                    if let SegSeg::Overlap(ov) =
                        crate::geom::segment_intersection(&piece.seg, &disc.runs[ri].seg)
                    {
                        if let StepMode::Family = mode {
                            return Ok(StepOutput {
                                advanced,
                                events,
                                overlap: Some((piece.comp, disc.runs[ri].comp, ov)),
                            });
                        }
                        let ta = piece.seg.param_of(&ov.a).expect("overlap on piece");
                        let tb = piece.seg.param_of(&ov.b).expect("overlap on piece");
                        dead.push(if ta <= tb { (ta, tb) } else { (tb, ta) });
                    }
                }
            }
        }

        // Events: transverse meetings with runs.
        let mut event_params: BTreeSet<Rat> = BTreeSet::new();
        if let StepMode::Diag = mode {
            for run in disc.runs.iter() {
                let SegSeg::Point(z) = crate::geom::segment_intersection(&piece.seg, &run.seg)
                else {
                    continue;
                };
                let t = piece.seg.param_of(&z).expect("crossing on piece");
                // Meetings on a riding stretch are not orbit events: the
                // piece sits on the discontinuity set there and terminates.
                if dead.iter().any(|(a, b)| *a <= t && t <= *b) {
                    continue;
                }
                let at_end = if t.is_zero() {
                    Some(0)
                } else if t.is_one() {
                    Some(1)
                } else {
                    None
                };
                if let Some(e) = at_end {
                    match piece.ends[e] {
                        EndKind::Genuine => {
                            // Touching a run exactly at one of its
                            // extremities is a tangency of chart-cut
                            // artifacts (several runs may share a corner
                            // there); the endpoint orbit hops past it.
                            // Landing in a run interior is a real singular
                            // coincidence.
                            if z == run.seg.a || z == run.seg.b {
                                continue;
                            }
                            return Err(PexError::Degenerate(format!(
                                "orbit of a discontinuity endpoint lands on a discontinuity at {z:?} (step {step})"
                            )));
                        }
                        // The orbit through this piece endpoint already hit
                        // the discontinuity set at an earlier step: not a
                        // diagonal of this length. Its continuation is
                        // accounted for by the target component's own push.
                        EndKind::Cut => continue,
                        EndKind::Seam => {
                            // A fragment boundary sitting on a junction
                            // carries the shortest diagonals through that
                            // static point, one copy per adjacent fragment:
                            // not a one-parameter event of this piece.
                            if disc.runs[piece.src_run]
                                .junctions
                                .contains(&piece.src_at(&t))
                            {
                                continue;
                            }
                        }
                    }
                } else {
                    event_params.insert(t.clone());
                }
                if run.junctions.contains(&z) {
                    return Err(PexError::Degenerate(format!(
                        "image of a discontinuity passes through a junction at {z:?} (step {step})"
                    )));
                }
                let s = piece.src_at(&t);
                if disc.runs[piece.src_run].junctions.contains(&s) {
                    return Err(PexError::Degenerate(format!(
                        "diagonal would start at a discontinuity junction {s:?} (step {step})"
                    )));
                }
                events.push(RawEvent {
                    n: step - 1,
                    src: s,
                    end: z,
                    side: piece.side,
                    word: piece.word.clone(),
                    comp_start: disc.runs[piece.src_run].comp,
                    comp_end: run.comp,
                });
            }
        }

        if !want_advance {
            continue;
        }

        // Breakpoints at every wall position of the chopping exchange.
        let mut breaks: BTreeSet<Rat> = event_params;
        for pos in &chop_atlas.positions {
            if let SegSeg::Point(z) = crate::geom::segment_intersection(&piece.seg, &pos.seg) {
                let t = piece.seg.param_of(&z).expect("crossing on piece");
                if !t.is_zero() && !t.is_one() {
                    breaks.insert(t);
                }
            }
        }
        dead.sort_by(|x, y| x.0.cmp(&y.0));
        // Params where the orbit touches the discontinuity set.
        let cut_params: BTreeSet<Rat> = breaks
            .iter()
            .filter(|t| {
                let p = piece.seg.at(t);
                disc.runs.iter().any(|r| r.seg.contains_point(&p))
            })
            .cloned()
            .collect();
        for (a, b) in &dead {
            breaks.insert(a.clone());
            breaks.insert(b.clone());
        }

        // Active sub-intervals of [0,1]: split at breaks, minus dead parts.
        let mut cuts: Vec<Rat> = Vec::with_capacity(breaks.len() + 2);
        cuts.push(Rat::zero());
        for b in breaks {
            if b > Rat::zero() && b < Rat::one() {
                cuts.push(b);
            }
        }
        cuts.push(Rat::one());
        for w in 0..cuts.len() - 1 {
            let (t0, t1) = (&cuts[w], &cuts[w + 1]);
            if t0 >= t1 {
                continue;
            }
            let mid = (t0 + t1) / rat(2, 1);
            if dead.iter().any(|(a, b)| *a <= mid && mid <= *b) {
                continue;
            }
            let sub = seg(piece.seg.at(t0), piece.seg.at(t1));
            let m = sub.midpoint();
            let mut interior = None;
            let mut boundary: Vec<usize> = Vec::new();
            for (ci, c) in chop_ex.cells.iter().enumerate() {
                match c.poly.locate(&m) {
                    crate::geom::Location::Inside => {
                        interior = Some(ci);
                        break;
                    }
                    crate::geom::Location::Boundary => {
                        if c.poly.locate(&sub.a) != crate::geom::Location::Outside
                            && c.poly.locate(&sub.b) != crate::geom::Location::Outside
                        {
                            boundary.push(ci);
                        }
                    }
                    crate::geom::Location::Outside => {}
                }
            }
            // A sub-piece along a wall: a continuous map continues the same
            // way from every adjacent cell (up to gluing), so one side
            // suffices in diagonal mode; a set-valued family follows every
            // side. Interior sub-pieces have exactly one cell.
            let targets: Vec<usize> = match (interior, &mode) {
                (Some(ci), _) => vec![ci],
                (None, StepMode::Diag) => boundary.into_iter().take(1).collect(),
                (None, StepMode::Family) => boundary,
            };
            if targets.is_empty() {
                return Err(PexError::Degenerate(format!(
                    "pushed image left the domain near {m:?} (step {step})"
                )));
            }
            let end_kind = |t: &Rat, orig: usize| -> EndKind {
                if (orig == 0 && t.is_zero()) || (orig == 1 && t.is_one()) {
                    piece.ends[orig]
                } else if cut_params.contains(t) || dead.iter().any(|(a, b)| a == t || b == t) {
                    EndKind::Cut
                } else {
                    EndKind::Seam
                }
            };
            for ci in targets {
                let cell = &chop_ex.cells[ci];
                let next = PushPiece {
                    seg: cell.map.apply_seg(&sub),
                    comp: piece.comp,
                    src_run: piece.src_run,
                    src_a: piece.src_at(t0),
                    src_b: piece.src_at(t1),
                    word: {
                        let mut w = piece.word.clone();
                        w.push(cell.label);
                        w
                    },
                    side: piece.side,
                    ends: [end_kind(t0, 0), end_kind(t1, 1)],
                };
                if let StepMode::Family = mode {
                    let key = (
                        next.seg.a.clone(),
                        next.seg.b.clone(),
                        next.src_a.clone(),
                        next.src_b.clone(),
                        next.src_run,
                        next.side,
                    );
                    if !family_seen.insert(key) {
                        continue;
                    }
                }
                advanced.push(next);
            }
        }
    }
    Ok(StepOutput {
        advanced,
        events,
        overlap: None,
    })
}

pub(super) fn runs_by_key(disc: &DiscSet) -> BTreeMap<LineKey, Vec<usize>> {
    let mut m: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    for (ri, r) in disc.runs.iter().enumerate() {
        m.entry(r.key.clone()).or_default().push(ri);
    }
    m
}

/// A certified generalized diagonal: start and end on the discontinuity set,
/// clean interior orbit, word of length n between the hits.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DiagWitness {
    pub n: usize,
    pub start: Point2,
    pub end: Point2,
    pub word: Word,
    pub side: u8,
    pub comp_start: usize,
    pub comp_end: usize,
}

#[derive(Clone, Debug)]
pub struct DiagonalTable {
    pub nmax: usize,
    /// counts[n] for 0 <= n <= nmax.
    pub counts: Vec<u64>,
    pub witnesses: Vec<DiagWitness>,
}

impl DiagonalTable {
    pub fn count(&self, n: usize) -> u64 {
        self.counts[n]
    }
}

/// Count generalized diagonals for every word length up to nmax.
pub fn generalized_diagonals(ex: &Exchange, nmax: usize) -> Result<DiagonalTable> {
    ex.validated()?;
    let atlas = WallAtlas::build(ex)?;
    let cands = ex.glue_candidates();
    let by_key = runs_by_key(&atlas.disc);
    let mut pieces = seeds(ex, &atlas)?;
    let mut dedup: BTreeSet<(usize, Point2, Point2, u8, Word)> = BTreeSet::new();
    let mut witnesses: Vec<DiagWitness> = Vec::new();
    for step in 1..=(nmax + 1) {
        let out = advance(
            ex,
            &atlas,
            &atlas.disc,
            &by_key,
            &pieces,
            step,
            StepMode::Diag,
            step <= nmax,
            true,
        )?;
        for ev in out.events {
            let src = canonical_point(ex, &ev.src, &cands);
            let end = canonical_point(ex, &ev.end, &cands);
            let wit_word: Word = ev.word[1..].to_vec();
            let key = (ev.n, src.clone(), end.clone(), ev.side, wit_word.clone());
            if dedup.insert(key) {
                witnesses.push(DiagWitness {
                    n: ev.n,
                    start: src,
                    end,
                    word: wit_word,
                    side: ev.side,
                    comp_start: ev.comp_start,
                    comp_end: ev.comp_end,
                });
            }
        }
        pieces = out.advanced;
    }
    // Two image curves through the same event point would make the count
    // ambiguous (and break the crossing-count identity): reject.
    {
        let mut seen: BTreeMap<(usize, &Point2), &DiagWitness> = BTreeMap::new();
        for w in &witnesses {
            if let Some(prev) = seen.insert((w.n, &w.end), w) {
                return Err(PexError::Degenerate(format!(
                    "two diagonals of length {} share the endpoint {:?} (other start {:?})",
                    w.n, w.end, prev.start
                )));
            }
        }
    }
    let mut counts = vec![0u64; nmax + 1];
    for w in &witnesses {
        counts[w.n] += 1;
    }
    witnesses.sort();
    Ok(DiagonalTable {
        nmax,
        counts,
        witnesses,
    })
}
