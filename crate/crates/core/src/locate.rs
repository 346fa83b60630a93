//! Point location over the pieces a labeling run reported.

use crate::geometry::{Point, Rect};
use crate::index::RectIndex;
use crate::regions::UnionFind;
use crate::sink::{LabelId, Piece};

/// Geometry a piece can have.
pub trait PieceGeom {
    fn bbox(&self) -> Rect;
    /// Half-open membership; pieces of one run tile without overlap.
    fn holds(&self, p: Point) -> bool;
    fn x_range(&self) -> (f64, f64);
    /// Vertical extent on the line at `x`, for `x` within [`x_range`].
    fn y_range_at(&self, x: f64) -> (f64, f64);

    /// Links pieces of equal set stacked on a shared horizontal edge.
    /// Only grid cells need this; sweep pieces never meet that way.
    fn link_along_y(_geoms: Vec<&Self>, _sets: &[u32], _uf: &mut UnionFind, _tol: f64)
    where
        Self: Sized,
    {
    }
}

impl PieceGeom for Rect {
    fn bbox(&self) -> Rect {
        *self
    }

    fn holds(&self, p: Point) -> bool {
        self.contains_half_open(p)
    }

    fn x_range(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    fn y_range_at(&self, _x: f64) -> (f64, f64) {
        (self.y_lo, self.y_hi)
    }

    fn link_along_y(geoms: Vec<&Self>, sets: &[u32], uf: &mut UnionFind, tol: f64) {
        Rect::link_rows(&geoms, sets, uf, tol);
    }
}

/// Finds the piece containing a point, in the working frame.
#[derive(Debug, Clone)]
pub struct Locator<G> {
    index: RectIndex,
    pieces: Vec<Piece<G>>,
}

impl<G: PieceGeom + Clone> Locator<G> {
    pub fn new(pieces: &[Piece<G>]) -> Self {
        let boxes: Vec<Rect> = pieces.iter().map(|p| p.geom.bbox()).collect();
        Locator {
            index: RectIndex::new(&boxes),
            pieces: pieces.to_vec(),
        }
    }

    /// Index of the piece holding `p`, if any.
    pub fn piece_at(&self, p: Point) -> Option<usize> {
        let mut cand = Vec::new();
        self.index.candidates(p, &mut cand);
        cand.sort_unstable();
        cand.into_iter()
            .find(|&i| self.pieces[i as usize].geom.holds(p))
            .map(|i| i as usize)
    }

    pub fn label_at(&self, p: Point) -> Option<LabelId> {
        self.piece_at(p).map(|i| self.pieces[i].label)
    }

    /// Every piece holding `p`; more than one means the pieces overlap.
    pub fn all_at(&self, p: Point) -> Vec<usize> {
        let mut cand = Vec::new();
        self.index.candidates(p, &mut cand);
        cand.sort_unstable();
        cand.into_iter()
            .filter(|&i| self.pieces[i as usize].geom.holds(p))
            .map(|i| i as usize)
            .collect()
    }

    pub fn pieces(&self) -> &[Piece<G>] {
        &self.pieces
    }
}
