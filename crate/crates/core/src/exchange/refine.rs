//! Language of the natural coding by exact refinement.
//!
//! A piece is a convex region on which the first n steps of the orbit stay in
//! fixed stored cells. Advancing a piece intersects its forward image with
//! every cell and pulls the result back. Words are label sequences; distinct
//! pieces may carry the same word (seam-split cells, coarse codings), so the
//! complexity counts distinct words, not pieces.

use super::{Exchange, Isometry};
use crate::error::Result;
use crate::geom::{intersect_polygons, ConvexPolygon};
use rayon::prelude::*;
use std::collections::BTreeSet;

pub type Word = Vec<u16>;

#[derive(Clone, Debug)]
pub struct RefinePiece {
    pub poly: ConvexPolygon,
    /// Stored-cell itinerary (indices into ex.cells), length = depth.
    pub cells: Vec<u32>,
    /// T^depth restricted to this piece.
    pub fwd: Isometry,
}

impl RefinePiece {
    pub fn word(&self, ex: &Exchange) -> Word {
        self.cells.iter().map(|&c| ex.cells[c as usize].label).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LanguageTable {
    pub alphabet: Vec<String>,
    /// words[d] = distinct words of length d+1.
    pub words: Vec<BTreeSet<Word>>,
    /// levels[d] = refinement pieces of depth d+1, for geometric queries.
    pub levels: Vec<Vec<RefinePiece>>,
}

impl LanguageTable {
    pub fn nmax(&self) -> usize {
        self.words.len()
    }

    pub fn pieces_at(&self, n: usize) -> &[RefinePiece] {
        &self.levels[n - 1]
    }

    /// p(n): number of distinct words of length n; p(0) = 1.
    pub fn complexity(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.words[n - 1].len()
        }
    }

    /// s(n) = p(n+1) - p(n).
    pub fn first_difference(&self, n: usize) -> i64 {
        self.complexity(n + 1) as i64 - self.complexity(n) as i64
    }

    /// s(n+1) - s(n) = p(n+2) - 2 p(n+1) + p(n).
    pub fn second_difference(&self, n: usize) -> i64 {
        self.complexity(n + 2) as i64 - 2 * self.complexity(n + 1) as i64
            + self.complexity(n) as i64
    }

    pub fn contains(&self, w: &[u16]) -> bool {
        if w.is_empty() {
            return true;
        }
        w.len() <= self.words.len() && self.words[w.len() - 1].contains(w)
    }
}

/// Refine to depth nmax and collect the language.
pub fn language(ex: &Exchange, nmax: usize) -> Result<LanguageTable> {
    ex.validated()?;
    let mut words: Vec<BTreeSet<Word>> = Vec::with_capacity(nmax);
    let mut levels: Vec<Vec<RefinePiece>> = Vec::with_capacity(nmax);
    if nmax == 0 {
        return Ok(LanguageTable {
            alphabet: ex.alphabet.clone(),
            words,
            levels,
        });
    }
    let pieces: Vec<RefinePiece> = ex
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| RefinePiece {
            poly: c.poly.clone(),
            cells: vec![i as u32],
            fwd: c.map.clone(),
        })
        .collect();
    words.push(pieces.iter().map(|p| p.word(ex)).collect());
    levels.push(pieces);
    for _depth in 1..nmax {
        let next: Vec<RefinePiece> = levels
            .last()
            .unwrap()
            .par_iter()
            .flat_map_iter(|piece| {
                let image = piece.fwd.apply_poly(&piece.poly);
                let inv = piece.fwd.inverse();
                let mut out = Vec::new();
                for (ci, cell) in ex.cells.iter().enumerate() {
                    if let Some(inter) = intersect_polygons(&image, &cell.poly) {
                        let back = inv.apply_poly(&inter);
                        let mut cells = piece.cells.clone();
                        cells.push(ci as u32);
                        out.push(RefinePiece {
                            poly: back,
                            cells,
                            fwd: cell.map.compose(&piece.fwd),
                        });
                    }
                }
                out
            })
            .collect();
        words.push(next.iter().map(|p| p.word(ex)).collect());
        levels.push(next);
    }
    Ok(LanguageTable {
        alphabet: ex.alphabet.clone(),
        words,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::fixtures;
    use crate::exchange::Coding;
    use crate::geom::pt;
    use crate::rat::{rat, rat_i, Rat};
    use num::Zero;

    fn two_cell() -> Exchange {
        fixtures::torus_translation(&pt(rat(2, 5), rat(1, 7)), &[rat(1, 2)], &[])
    }

    #[test]
    fn depth_one_matches_labels() {
        let ex = two_cell();
        let lang = language(&ex, 1).unwrap();
        assert_eq!(lang.complexity(0), 1);
        assert_eq!(lang.complexity(1), ex.labels_in_use().len());
    }

    #[test]
    fn partition_area_is_exact_at_depth() {
        let ex = two_cell();
        let lang = language(&ex, 12).unwrap();
        for n in 1..=12 {
            let total: Rat = lang.pieces_at(n).iter().map(|p| p.poly.area()).sum();
            assert_eq!(total, rat_i(1), "depth {n}");
        }
        // Forward images of the deepest pieces also tile exactly.
        let imaged: Rat = lang
            .pieces_at(12)
            .iter()
            .map(|p| p.fwd.apply_poly(&p.poly).area())
            .sum();
        assert_eq!(imaged, rat_i(1));
    }

    #[test]
    fn language_is_factorial_and_extendable() {
        let ex = two_cell();
        let lang = language(&ex, 8).unwrap();
        for n in 2..=8usize {
            for w in &lang.words[n - 1] {
                assert!(lang.words[n - 2].contains(&w[..n - 1].to_vec()));
                assert!(lang.words[n - 2].contains(&w[1..].to_vec()));
            }
            // Every shorter word extends to a longer one on both sides.
            for w in &lang.words[n - 2] {
                assert!(
                    lang.words[n - 1].iter().any(|l| &l[..n - 1] == &w[..]),
                    "no right extension of {w:?}"
                );
                assert!(
                    lang.words[n - 1].iter().any(|l| &l[1..] == &w[..]),
                    "no left extension of {w:?}"
                );
            }
        }
    }

    #[test]
    fn complexity_nondecreasing() {
        let ex = two_cell();
        let lang = language(&ex, 10).unwrap();
        for n in 0..9 {
            assert!(lang.complexity(n + 1) >= lang.complexity(n));
        }
    }

    /// The (2/5, 1/7) translation has period 35, and every coding boundary
    /// line sits on the coarse grid x in (1/10)Z, y in (1/7)Z. Midpoint
    /// starts of that grid therefore hit every refinement cell of every
    /// depth: coding those 70 starts enumerates the full language exactly.
    #[test]
    fn periodic_language_matches_grid_oracle() {
        let ex = two_cell();
        let nmax = 12;
        let lang = language(&ex, nmax).unwrap();
        let mut oracle: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); nmax];
        for i in 0..10u32 {
            for j in 0..7u32 {
                let x = pt(
                    rat(i as i64, 10) + rat(1, 20),
                    rat(j as i64, 7) + rat(1, 14),
                );
                match ex.code_orbit(&x, nmax).unwrap() {
                    Coding::Regular(w) => {
                        for n in 1..=nmax {
                            oracle[n - 1].insert(w[..n].to_vec());
                        }
                    }
                    Coding::Singular { .. } => panic!("grid start hit a boundary"),
                }
            }
        }
        for n in 1..=nmax {
            assert_eq!(lang.words[n - 1], oracle[n - 1], "length {n}");
        }
        // Periodicity caps the complexity: p is eventually constant.
        assert_eq!(lang.complexity(11), lang.complexity(12));
        assert!(lang.complexity(12) <= 70);
    }

    #[test]
    fn quadrant_translation_complexity_is_quadratic() {
        // Generic translation with the four-label quadrant coding: the
        // depth-n refinement is a (2n x 2n)-line torus grid, so p(n) = 4n^2.
        let ex = fixtures::torus_translation(
            &pt(rat(314159, 1000003), rat(271829, 1000003)),
            &[rat(1, 2)],
            &[rat(1, 2)],
        );
        let lang = language(&ex, 6).unwrap();
        for n in 1..=6usize {
            assert_eq!(lang.complexity(n), 4 * n * n, "p({n})");
        }
    }

    #[test]
    fn pieces_stay_inside_their_cells() {
        let ex = two_cell();
        let lang = language(&ex, 6).unwrap();
        for p in lang.pieces_at(6) {
            let cell = &ex.cells[p.cells[0] as usize];
            let inter = crate::geom::intersect_polygons(&p.poly, &cell.poly).unwrap();
            assert_eq!(inter.area(), p.poly.area());
            assert!(!p.poly.area().is_zero());
        }
    }
}
