//! Grid labeling: extend every square side across the plane and label each
//! resulting cell with a point-enclosure query at its centroid.

use crate::geometry::{Metric, Rect};
use crate::index::RectIndex;
use crate::nn::Arrangement;
use crate::sink::{LabelError, LabelSink, SweepStats};
use crate::sweep::Boxes;

/// Grid lines of the side-extension grid, padded by one extra line on each
/// side so the unbounded face gets cells too.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    pub fn new(bx: &Boxes) -> Option<Self> {
        let bounds = bx.bounds()?;
        let pad = bounds.width().max(bounds.height()).max(1.0) * 0.5;
        let line = |vals: Vec<f64>, lo: f64, hi: f64| {
            let mut v = vals;
            v.sort_unstable_by(f64::total_cmp);
            v.dedup();
            v.insert(0, lo - pad);
            v.push(hi + pad);
            v
        };
        Some(Grid {
            xs: line(
                bx.rects.iter().flat_map(|r| [r.x_lo, r.x_hi]).collect(),
                bounds.x_lo,
                bounds.x_hi,
            ),
            ys: line(
                bx.rects.iter().flat_map(|r| [r.y_lo, r.y_hi]).collect(),
                bounds.y_lo,
                bounds.y_hi,
            ),
        })
    }

    pub fn cells(&self) -> u64 {
        (self.xs.len() as u64 - 1) * (self.ys.len() as u64 - 1)
    }

    pub fn cell(&self, row: usize, col: usize) -> Rect {
        Rect::new(self.xs[col], self.xs[col + 1], self.ys[row], self.ys[row + 1])
    }
}

/// Labels every grid cell, row by row from the bottom, left to right.
/// Cells are reported both as labels and as pieces.
pub fn baseline<S: LabelSink<Rect>>(arr: &Arrangement, sink: &mut S) -> Result<SweepStats, LabelError> {
    if arr.frame_metric() == Metric::L2 {
        return Err(LabelError::UnsupportedMetric(Metric::L2));
    }
    let bx = Boxes::new(arr);
    let Some(grid) = Grid::new(&bx) else {
        return Ok(SweepStats::default());
    };
    let index = RectIndex::new(&bx.rects);
    let mut stats = SweepStats::default();
    let mut hits = Vec::new();
    let mut set = Vec::new();
    for row in 0..grid.ys.len() - 1 {
        if sink.cancelled() {
            return Err(LabelError::Cancelled);
        }
        for col in 0..grid.xs.len() - 1 {
            let cell = grid.cell(row, col);
            // Every side lies on a grid line, so the centroid is never on a
            // boundary.
            index.stab(cell.centroid(), &mut hits);
            set.clear();
            set.extend(hits.iter().map(|&i| bx.owner[i as usize]));
            stats.labels += 1;
            stats.lambda = stats.lambda.max(set.len() as u64);
            let id = sink.label(&cell, &set);
            sink.piece(cell, id);
            stats.pieces += 1;
        }
    }
    Ok(stats)
}
