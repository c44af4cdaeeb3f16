//! Extension statistics of words and the bispecial form of the second
//! difference of complexity.
//!
//! For a word v: m_l counts letters a with av in the language, m_r counts
//! letters b with vb in the language, m_b counts pairs (a, b) with avb in
//! the language. Summing m_b - m_l - m_r + 1 over a full level telescopes
//! to the second difference of complexity; words that extend uniquely on
//! either side contribute zero, so the sum over bispecial words alone
//! (m_l >= 2 and m_r >= 2) is already exact.
//!
//! The geometric counterpart: inside the cell of v, the one-step image of
//! the discontinuity set and its n-step pullback cross in finitely many
//! points, and the crossing count is the same quantity word by word for a
//! coding with one label per cell.

use super::atlas::{canonical_point, WallAtlas};
use super::push::{seeds, EndKind, PushPiece};
use super::refine::LanguageTable;
use super::{Exchange, Word};
use crate::error::{PexError, Result};
use crate::geom::{clip_segment_params, seg, Location, Point2, SegSeg, Segment2};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BispecialStats {
    pub word: Word,
    pub m_l: u32,
    pub m_r: u32,
    pub m_b: u32,
    /// m_b - m_l - m_r + 1.
    pub weight: i64,
    pub bispecial: bool,
    /// Transverse crossings of the image of the discontinuity set with its
    /// pullback inside the cell of the word.
    pub crossings: u64,
}

/// Distinct words of length n; the empty word for n = 0.
fn words_of(lang: &LanguageTable, n: usize) -> BTreeSet<Word> {
    if n == 0 {
        BTreeSet::from([Vec::new()])
    } else {
        lang.words[n - 1].clone()
    }
}

fn extension_maps(
    lang: &LanguageTable,
    n: usize,
) -> Result<BTreeMap<Word, (BTreeSet<u16>, BTreeSet<u16>, u32)>> {
    if n + 2 > lang.nmax() {
        return Err(PexError::Unsupported(format!(
            "extension counts at length {n} need the language to depth {}, have {}",
            n + 2,
            lang.nmax()
        )));
    }
    let mut m: BTreeMap<Word, (BTreeSet<u16>, BTreeSet<u16>, u32)> = words_of(lang, n)
        .into_iter()
        .map(|v| (v, Default::default()))
        .collect();
    for u in &lang.words[n] {
        let left_of = u[1..].to_vec();
        m.get_mut(&left_of)
            .expect("language is factorial")
            .0
            .insert(u[0]);
        let right_of = u[..n].to_vec();
        m.get_mut(&right_of)
            .expect("language is factorial")
            .1
            .insert(u[n]);
    }
    for w in &lang.words[n + 1] {
        let v = w[1..n + 1].to_vec();
        m.get_mut(&v).expect("language is factorial").2 += 1;
    }
    Ok(m)
}

/// Sum of m_b - m_l - m_r + 1 over the bispecial words of length n. Equals
/// the second difference p(n+2) - 2 p(n+1) + p(n) whenever every word
/// extends on both sides, which holds for the coding of an invertible
/// exchange.
pub fn cassaigne_delta(lang: &LanguageTable, n: usize) -> Result<i64> {
    let maps = extension_maps(lang, n)?;
    let mut total = 0i64;
    for (_, (lefts, rights, both)) in maps {
        if lefts.len() >= 2 && rights.len() >= 2 {
            total += both as i64 - lefts.len() as i64 - rights.len() as i64 + 1;
        }
    }
    Ok(total)
}

/// Extension counts plus the geometric crossing count for one word.
pub fn bispecial_stats(ex: &Exchange, lang: &LanguageTable, v: &[u16]) -> Result<BispecialStats> {
    let n = v.len();
    let maps = extension_maps(lang, n)?;
    let (lefts, rights, both) = maps.get(v).ok_or_else(|| {
        PexError::Unsupported(format!("word {v:?} is not in the computed language"))
    })?;
    let m_l = lefts.len() as u32;
    let m_r = rights.len() as u32;
    let m_b = *both;
    let weight = m_b as i64 - m_l as i64 - m_r as i64 + 1;
    let crossings = crossing_count(ex, lang, v)?;
    Ok(BispecialStats {
        word: v.to_vec(),
        m_l,
        m_r,
        m_b,
        weight,
        bispecial: m_l >= 2 && m_r >= 2,
        crossings,
    })
}

struct CellPatch {
    poly: crate::geom::ConvexPolygon,
    fwd: super::Isometry,
}

fn word_patches(ex: &Exchange, lang: &LanguageTable, v: &[u16]) -> Result<Vec<CellPatch>> {
    if v.is_empty() {
        return Ok(ex
            .domain
            .iter()
            .map(|p| CellPatch {
                poly: p.clone(),
                fwd: super::Isometry::identity(),
            })
            .collect());
    }
    let n = v.len();
    if n > lang.nmax() {
        return Err(PexError::Unsupported(format!(
            "word length {n} exceeds computed language depth {}",
            lang.nmax()
        )));
    }
    let patches: Vec<CellPatch> = lang
        .pieces_at(n)
        .iter()
        .filter(|p| p.word(ex) == v)
        .map(|p| CellPatch {
            poly: p.poly.clone(),
            fwd: p.fwd.clone(),
        })
        .collect();
    if patches.is_empty() {
        return Err(PexError::Unsupported(format!(
            "word {v:?} is not in the computed language"
        )));
    }
    Ok(patches)
}

/// Crossings of the one-step image of the discontinuity set with its n-step
/// pullback inside the cell of v, counted as exact points up to gluing.
/// Every configuration that would make the count ambiguous aborts.
fn crossing_count(ex: &Exchange, lang: &LanguageTable, v: &[u16]) -> Result<u64> {
    let atlas = WallAtlas::build(ex)?;
    let cands = ex.glue_candidates();
    let forward: Vec<PushPiece> = seeds(ex, &atlas)?;
    let patches = word_patches(ex, lang, v)?;

    let mut points: BTreeSet<Point2> = BTreeSet::new();
    let mut sources: BTreeMap<Point2, Point2> = BTreeMap::new();
    for patch in &patches {
        let img = patch.fwd.apply_poly(&patch.poly);
        let back = patch.fwd.inverse();
        for (ri, run) in atlas.disc.runs.iter().enumerate() {
            let Some((t0, t1)) = clip_segment_params(&run.seg, &img) else {
                continue;
            };
            if t0 >= t1 {
                continue;
            }
            let sub = seg(run.seg.at(&t0), run.seg.at(&t1));
            let genuine = [
                (run.genuine_ends[0] && sub.a == run.seg.a)
                    || (run.genuine_ends[1] && sub.a == run.seg.b),
                (run.genuine_ends[0] && sub.b == run.seg.a)
                    || (run.genuine_ends[1] && sub.b == run.seg.b),
            ];
            let b_curve = back.apply_seg(&sub);
            for a_piece in &forward {
                match crate::geom::segment_intersection(&a_piece.seg, &b_curve) {
                    SegSeg::Empty => {}
                    SegSeg::Overlap(_) => {
                        return Err(PexError::Degenerate(format!(
                            "image of the discontinuity set rides along a pullback in cell {v:?}"
                        )));
                    }
                    SegSeg::Point(z) => {
                        count_crossing(
                            ex, lang, &atlas, &cands, v, a_piece, &b_curve, &genuine, ri, patch,
                            &z, &mut points, &mut sources,
                        )?;
                    }
                }
            }
        }
    }
    Ok(points.len() as u64)
}

#[allow(clippy::too_many_arguments)]
fn count_crossing(
    ex: &Exchange,
    lang: &LanguageTable,
    atlas: &WallAtlas,
    cands: &[Point2],
    v: &[u16],
    a_piece: &PushPiece,
    b_curve: &Segment2,
    b_genuine: &[bool; 2],
    run_idx: usize,
    patch: &CellPatch,
    z: &Point2,
    points: &mut BTreeSet<Point2>,
    sources: &mut BTreeMap<Point2, Point2>,
) -> Result<()> {
    let n = v.len();
    // Image of a genuine endpoint of the discontinuity set on a pullback,
    // or a pullback of one on an image curve: structurally ambiguous.
    if (*z == a_piece.seg.a && a_piece.ends[0] == EndKind::Genuine)
        || (*z == a_piece.seg.b && a_piece.ends[1] == EndKind::Genuine)
    {
        return Err(PexError::Degenerate(format!(
            "endpoint of the pushed discontinuity set meets a pullback at {z:?}"
        )));
    }
    if (*z == b_curve.a && b_genuine[0]) || (*z == b_curve.b && b_genuine[1]) {
        return Err(PexError::Degenerate(format!(
            "pullback of a discontinuity endpoint meets an image curve at {z:?}"
        )));
    }
    // Forward end of the crossing orbit must be a clean point of its run.
    let z_fwd = patch.fwd.apply(z);
    if atlas.disc.runs[run_idx].junctions.contains(&z_fwd) {
        return Err(PexError::Degenerate(format!(
            "crossing orbit ends at a discontinuity junction {z_fwd:?}"
        )));
    }
    // Backward end likewise.
    let t = a_piece
        .seg
        .param_of(z)
        .expect("crossing lies on the image curve");
    let x = a_piece.src_at(&t);
    if atlas.disc.runs[a_piece.src_run].junctions.contains(&x) {
        return Err(PexError::Degenerate(format!(
            "crossing orbit starts at a discontinuity junction {x:?}"
        )));
    }
    // Locate the crossing relative to the open cell of v. A crossing on a
    // wall of the refinement with a different word on the far side sits on
    // the coding boundary: its orbit touches the discontinuity set early
    // and it belongs to a shorter count, not to this one. A crossing on a
    // pure seam (same word across, or a glued representative) is interior
    // to the logical cell and counts once.
    match patch.poly.locate(z) {
        Location::Outside => return Ok(()),
        Location::Inside => {}
        Location::Boundary if n == 0 => {}
        Location::Boundary => {
            for cand in cands {
                let rep = z.add(cand);
                if ex.domain.iter().all(|d| d.locate(&rep) == Location::Outside) {
                    continue;
                }
                for piece in lang.pieces_at(n) {
                    if piece.poly.locate(&rep) != Location::Outside && piece.word(ex) != v {
                        return Ok(());
                    }
                }
            }
        }
    }
    let zc = canonical_point(ex, z, cands);
    let xc = canonical_point(ex, &x, cands);
    if let Some(prev) = sources.get(&zc) {
        if *prev != xc {
            return Err(PexError::Degenerate(format!(
                "two image curves cross a pullback at the same point {zc:?} in cell {v:?}"
            )));
        }
    } else {
        sources.insert(zc.clone(), xc);
    }
    points.insert(zc);
    Ok(())
}
