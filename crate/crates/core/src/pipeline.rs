//! One labeling run kept for queries: algorithm dispatch, point location
//! and region grouping, in the input frame.

use std::fmt;
use std::str::FromStr;

use crate::baseline::baseline;
use crate::geometry::{Metric, Point, Rect};
use crate::influence::{InfluenceContext, InfluenceError, Measure};
use crate::l2::{crest_a_l2, crest_l2, ArcCell};
use crate::locate::Locator;
use crate::nn::Arrangement;
use crate::regions::{group_regions, RegionGroup};
use crate::sink::{LabelError, LabelId, Labeling, SweepStats};
use crate::sweep::{crest, crest_a};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Crest,
    CrestA,
    Baseline,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Crest => "crest",
            Algo::CrestA => "crest-a",
            Algo::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "crest" => Ok(Algo::Crest),
            "crest-a" => Ok(Algo::CrestA),
            "baseline" => Ok(Algo::Baseline),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Runs `algo` on `arr` into `sink`. L2 arrangements accept CREST and
/// CREST-A only.
pub fn run_squares<S: crate::sink::LabelSink<Rect>>(
    arr: &Arrangement,
    algo: Algo,
    sink: &mut S,
) -> Result<SweepStats, LabelError> {
    match algo {
        Algo::Crest => crest(arr, sink),
        Algo::CrestA => crest_a(arr, sink),
        Algo::Baseline => baseline(arr, sink),
    }
}

pub fn run_circles<S: crate::sink::LabelSink<ArcCell>>(
    arr: &Arrangement,
    algo: Algo,
    sink: &mut S,
) -> Result<SweepStats, LabelError> {
    match algo {
        Algo::Crest => crest_l2(arr, sink),
        Algo::CrestA => crest_a_l2(arr, sink),
        Algo::Baseline => Err(LabelError::UnsupportedMetric(Metric::L2)),
    }
}

#[derive(Debug, Clone)]
enum Cells {
    Squares(Labeling<Rect>, Locator<Rect>),
    Circles(Labeling<ArcCell>, Locator<ArcCell>),
}

/// Geometry of one region in the input frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `[x_lo, x_hi, y_lo, y_hi]`
    Rect([f64; 4]),
    /// Closed ring, first vertex not repeated.
    Polygon(Vec<Point>),
}

#[derive(Debug, Clone)]
pub struct LabeledArrangement {
    pub arr: Arrangement,
    pub algo: Algo,
    pub stats: SweepStats,
    cells: Cells,
    regions: Vec<RegionGroup>,
    /// Region index of every piece.
    piece_region: Vec<u32>,
}

/// Samples per arc when L2 regions are turned into polygons.
pub const ARC_SAMPLES: usize = 8;

impl LabeledArrangement {
    pub fn build(arr: Arrangement, algo: Algo) -> Result<Self, LabelError> {
        let tol = arr.eps * 1e-3;
        let (stats, cells, regions) = if arr.frame_metric() == Metric::L2 {
            let mut lab = Labeling::default();
            let stats = run_circles(&arr, algo, &mut lab)?;
            let regions = group_regions(&lab, tol);
            let loc = Locator::new(&lab.pieces);
            (stats, Cells::Circles(lab, loc), regions)
        } else {
            let mut lab = Labeling::default();
            let stats = run_squares(&arr, algo, &mut lab)?;
            let regions = group_regions(&lab, 0.0);
            let loc = Locator::new(&lab.pieces);
            (stats, Cells::Squares(lab, loc), regions)
        };
        let pieces = match &cells {
            Cells::Squares(l, _) => l.pieces.len(),
            Cells::Circles(l, _) => l.pieces.len(),
        };
        let mut piece_region = vec![0u32; pieces];
        for (g, r) in regions.iter().enumerate() {
            for &p in &r.pieces {
                piece_region[p] = g as u32;
            }
        }
        Ok(LabeledArrangement {
            arr,
            algo,
            stats,
            cells,
            regions,
            piece_region,
        })
    }

    pub fn metric(&self) -> Metric {
        self.arr.metric
    }

    /// Labels reported by the run (k, or m for the baseline).
    pub fn k(&self) -> usize {
        match &self.cells {
            Cells::Squares(l, _) => l.k(),
            Cells::Circles(l, _) => l.k(),
        }
    }

    pub fn label_rnn(&self, id: LabelId) -> &[u32] {
        match &self.cells {
            Cells::Squares(l, _) => l.rnn(id),
            Cells::Circles(l, _) => l.rnn(id),
        }
    }

    /// Label of the piece holding `p` (input frame); `None` outside every
    /// piece, where the RNN set is empty.
    pub fn label_at(&self, p: Point) -> Option<LabelId> {
        let f = self.arr.to_frame(p);
        match &self.cells {
            Cells::Squares(_, loc) => loc.label_at(f),
            Cells::Circles(_, loc) => loc.label_at(f),
        }
    }

    /// Index into [`Self::regions`] of the region holding `p`.
    pub fn region_at(&self, p: Point) -> Option<usize> {
        let f = self.arr.to_frame(p);
        let piece = match &self.cells {
            Cells::Squares(_, loc) => loc.piece_at(f),
            Cells::Circles(_, loc) => loc.piece_at(f),
        };
        piece.map(|i| self.piece_region[i] as usize)
    }

    /// Sorted client indices whose circles contain `p`.
    pub fn rnn_at(&self, p: Point) -> &[u32] {
        self.label_at(p).map_or(&[], |l| self.label_rnn(l))
    }

    /// Regions with their pieces, in order of first label.
    pub fn regions(&self) -> &[RegionGroup] {
        &self.regions
    }

    /// Pieces of `g` as shapes in the input frame.
    pub fn shapes(&self, g: &RegionGroup) -> Vec<Shape> {
        self.shapes_with(g, ARC_SAMPLES)
    }

    /// As [`Self::shapes`], with `arc_samples` points per arc of an L2
    /// piece.
    pub fn shapes_with(&self, g: &RegionGroup, arc_samples: usize) -> Vec<Shape> {
        match &self.cells {
            Cells::Squares(lab, _) => g
                .pieces
                .iter()
                .map(|&i| {
                    let r = lab.pieces[i].geom;
                    match self.arr.metric {
                        Metric::L1 => Shape::Polygon(
                            [
                                Point::new(r.x_lo, r.y_lo),
                                Point::new(r.x_hi, r.y_lo),
                                Point::new(r.x_hi, r.y_hi),
                                Point::new(r.x_lo, r.y_hi),
                            ]
                            .map(|p| self.arr.from_frame(p))
                            .to_vec(),
                        ),
                        _ => Shape::Rect([r.x_lo, r.x_hi, r.y_lo, r.y_hi]),
                    }
                })
                .collect(),
            Cells::Circles(lab, _) => g
                .pieces
                .iter()
                .map(|&i| Shape::Polygon(lab.pieces[i].geom.outline(arc_samples)))
                .collect(),
        }
    }

    /// Influence of every label under `m`, indexed by label id.
    pub fn label_influences(&self, ctx: &InfluenceContext, m: Measure) -> Result<Vec<f64>, InfluenceError> {
        (0..self.k() as LabelId)
            .map(|l| ctx.evaluate(m, self.label_rnn(l)))
            .collect()
    }

    /// Input-frame bounding box of all circles, or `None` when empty.
    pub fn circle_bounds(&self) -> Option<Rect> {
        let pad = |c: &crate::geometry::NnCircle| match self.arr.metric {
            // Rotated squares: the input-frame diamond spans r·√2 each way.
            Metric::L1 => {
                let ctr = self.arr.from_frame(c.center);
                let r = c.radius * std::f64::consts::SQRT_2;
                Rect::new(ctr.x - r, ctr.x + r, ctr.y - r, ctr.y + r)
            }
            _ => c.bounds(),
        };
        self.arr.circles.iter().map(pad).reduce(|a, b| a.union(&b))
    }
}
