//! An immutable labeled arrangement plus lazily computed influences.

use std::sync::{Arc, OnceLock};

use rnnheat_core::dataset::{ClientId, Dataset, Mode};
use rnnheat_core::export::{build_document, influences, meta_of, region_shapes, Filter, RegionDoc, RegionShape};
use rnnheat_core::geometry::{Metric, Point, Rect};
use rnnheat_core::index::RectIndex;
use rnnheat_core::influence::{InfluenceContext, InfluenceError, Measure};
use rnnheat_core::oracle::is_off_boundary;
use rnnheat_core::nn::Arrangement;
use rnnheat_core::pipeline::{Algo, LabeledArrangement, Shape};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("measure `{0}` is not available in this session")]
    Unavailable(Measure),
    #[error(transparent)]
    Influence(#[from] InfluenceError),
    #[error("cannot build session: {0}")]
    Build(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionMeta {
    pub metric: String,
    pub mode: Option<String>,
    pub n: usize,
    pub k: u64,
    pub events: u64,
    pub lambda: u64,
    /// `[x_lo, x_hi, y_lo, y_hi]`
    pub bbox: [f64; 4],
    pub measures_available: Vec<Measure>,
}

/// Answer of a point lookup. Ids are external client ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionInfo {
    pub rnn: Vec<ClientId>,
    pub influence: f64,
}

type Cache = OnceLock<Result<Arc<Vec<f64>>, InfluenceError>>;

struct Computed {
    lab: LabeledArrangement,
    ctx: InfluenceContext,
    client_ids: Vec<ClientId>,
    regions: Vec<RegionShape>,
    caches: [Cache; 4],
}

struct Loaded {
    doc: RegionDoc,
    measure: Measure,
    index: RectIndex,
    /// Region of each indexed shape, with the shape.
    shapes: Vec<(usize, Shape)>,
}

enum Source {
    Computed(Box<Computed>),
    Loaded(Loaded),
}

pub struct Session {
    meta: SessionMeta,
    default_measure: Measure,
    source: Source,
    /// Points closer than this to a boundary are ambiguous.
    eps: f64,
}

fn cache_slot(m: Measure) -> usize {
    Measure::ALL.iter().position(|&x| x == m).expect("listed")
}

fn bbox_array(r: Rect) -> [f64; 4] {
    [r.x_lo, r.x_hi, r.y_lo, r.y_hi]
}

/// Bounding box of the dataset's points, padded by the largest circle
/// radius.
pub fn data_bbox(ds: &Dataset, lab: &LabeledArrangement) -> Option<Rect> {
    let pts = ds.clients.iter().map(|c| c.pos).chain(ds.facilities.iter().map(|f| f.pos));
    let b = pts
        .map(|p| Rect::new(p.x, p.x, p.y, p.y))
        .reduce(|a, b| a.union(&b))?;
    let r = lab.arr.circles.iter().map(|c| c.radius).fold(0.0, f64::max);
    // L1 radii shrink by √2 in the working frame.
    let r = if lab.metric() == Metric::L1 {
        r * std::f64::consts::SQRT_2
    } else {
        r
    };
    Some(b.padded(r))
}

impl Session {
    /// Session over a labeling run. `bbox` defaults to the circles' bounds.
    pub fn from_labeling(
        lab: LabeledArrangement,
        ctx: InfluenceContext,
        client_ids: Vec<ClientId>,
        mode: Option<Mode>,
        bbox: Option<Rect>,
        default_measure: Measure,
    ) -> Result<Self, SessionError> {
        if !ctx.supports(default_measure) {
            return Err(SessionError::Unavailable(default_measure));
        }
        let bbox = bbox.or_else(|| lab.circle_bounds()).unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0));
        let base = meta_of(&lab, default_measure);
        let meta = SessionMeta {
            metric: base.metric,
            mode: mode.map(|m| m.name().to_string()),
            n: base.n,
            k: base.k,
            events: base.events,
            lambda: base.lambda,
            bbox: bbox_array(bbox),
            measures_available: ctx.available(),
        };
        let eps = lab.arr.eps;
        let regions = region_shapes(&lab);
        Ok(Session {
            meta,
            default_measure,
            source: Source::Computed(Box::new(Computed {
                lab,
                ctx,
                client_ids,
                regions,
                caches: Default::default(),
            })),
            eps,
        })
    }

    /// Labels `ds` with `algo` and wraps the result.
    pub fn from_dataset(
        ds: &Dataset,
        metric: Metric,
        algo: Algo,
        ctx: InfluenceContext,
        default_measure: Measure,
    ) -> Result<Self, SessionError> {
        let arr = Arrangement::from_dataset(ds, metric).map_err(|e| SessionError::Build(e.to_string()))?;
        let lab = LabeledArrangement::build(arr, algo).map_err(|e| SessionError::Build(e.to_string()))?;
        let bbox = data_bbox(ds, &lab);
        let ids = ds.clients.iter().map(|c| c.id).collect();
        Session::from_labeling(lab, ctx, ids, Some(ds.mode), bbox, default_measure)
    }

    /// Session over a region document written by the CLI. Only the
    /// document's own measure is available; lookups use its shapes.
    pub fn from_document(doc: RegionDoc) -> Result<Self, String> {
        let measure: Measure = doc.meta.measure.parse()?;
        let mut shapes = Vec::new();
        for (i, r) in doc.regions.iter().enumerate() {
            for q in r.rects.iter().flatten() {
                shapes.push((i, Shape::Rect(*q)));
            }
            for line in r.polylines.iter().flatten() {
                shapes.push((i, Shape::Polygon(line.iter().map(|p| Point::new(p[0], p[1])).collect())));
            }
        }
        let boxes: Vec<Rect> = shapes.iter().map(|(_, s)| shape_bbox(s)).collect();
        let bbox = boxes.iter().copied().reduce(|a, b| a.union(&b)).unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0));
        let scale = bbox_array(bbox).iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let meta = SessionMeta {
            metric: doc.meta.metric.clone(),
            mode: None,
            n: doc.meta.n,
            k: doc.meta.k,
            events: doc.meta.events,
            lambda: doc.meta.lambda,
            bbox: bbox_array(bbox),
            measures_available: vec![measure],
        };
        Ok(Session {
            meta,
            default_measure: measure,
            source: Source::Loaded(Loaded {
                index: RectIndex::new(&boxes),
                doc,
                measure,
                shapes,
            }),
            eps: 1e-9 * scale,
        })
    }

    pub fn meta(&self) -> &SessionMeta {
        &self.meta
    }

    pub fn default_measure(&self) -> Measure {
        self.default_measure
    }

    /// Influence of every non-empty region, computed once per measure.
    fn region_influences(&self, c: &Computed, m: Measure) -> Result<Arc<Vec<f64>>, SessionError> {
        if !c.ctx.supports(m) {
            return Err(SessionError::Unavailable(m));
        }
        c.caches[cache_slot(m)]
            .get_or_init(|| influences(&c.regions, &c.ctx, m).map(Arc::new))
            .clone()
            .map_err(SessionError::from)
    }

    /// Regions filtered and sorted by influence under `m`.
    pub fn heatmap(&self, m: Option<Measure>, filter: Filter) -> Result<RegionDoc, SessionError> {
        let m = m.unwrap_or(self.default_measure);
        match &self.source {
            Source::Computed(c) => {
                let inf = self.region_influences(c, m)?;
                Ok(build_document(meta_of(&c.lab, m), &c.regions, &inf, filter, &c.client_ids))
            }
            Source::Loaded(l) => {
                if m != l.measure {
                    return Err(SessionError::Unavailable(m));
                }
                let inf: Vec<f64> = l.doc.regions.iter().map(|r| r.influence).collect();
                let keep = rnnheat_core::export::select(&inf, filter.threshold, filter.top_k);
                Ok(RegionDoc {
                    meta: l.doc.meta.clone(),
                    regions: keep.into_iter().map(|i| l.doc.regions[i].clone()).collect(),
                })
            }
        }
    }

    /// RNN set and influence at `p`; `None` within `eps` of a boundary.
    /// Points outside every region have the empty set.
    pub fn region(&self, p: Point, m: Option<Measure>) -> Result<Option<RegionInfo>, SessionError> {
        let m = m.unwrap_or(self.default_measure);
        match &self.source {
            Source::Computed(c) => {
                if !c.ctx.supports(m) {
                    return Err(SessionError::Unavailable(m));
                }
                let arr = &c.lab.arr;
                if !is_off_boundary(arr.to_frame(p), &arr.circles, arr.frame_metric(), self.eps) {
                    return Ok(None);
                }
                let dense = c.lab.rnn_at(p);
                let mut rnn: Vec<ClientId> = dense.iter().map(|&i| c.client_ids[i as usize]).collect();
                rnn.sort_unstable();
                Ok(Some(RegionInfo {
                    rnn,
                    influence: c.ctx.evaluate(m, dense)?,
                }))
            }
            Source::Loaded(l) => {
                if m != l.measure {
                    return Err(SessionError::Unavailable(m));
                }
                let here = l.region_at(p);
                let d = self.eps;
                let probes = [(d, 0.0), (-d, 0.0), (0.0, d), (0.0, -d)];
                if probes.iter().any(|&(dx, dy)| l.region_at(Point::new(p.x + dx, p.y + dy)) != here) {
                    return Ok(None);
                }
                Ok(Some(match here {
                    Some(i) => RegionInfo {
                        rnn: l.doc.regions[i].rnn.clone(),
                        influence: l.doc.regions[i].influence,
                    },
                    None => RegionInfo {
                        rnn: Vec::new(),
                        influence: 0.0,
                    },
                }))
            }
        }
    }
}

impl Loaded {
    fn region_at(&self, p: Point) -> Option<usize> {
        let mut hits = Vec::new();
        self.index.candidates(p, &mut hits);
        hits.sort_unstable();
        hits.into_iter()
            .map(|h| &self.shapes[h as usize])
            .find(|(_, s)| shape_holds(s, p))
            .map(|(i, _)| *i)
    }
}

fn shape_bbox(s: &Shape) -> Rect {
    match s {
        Shape::Rect(q) => Rect::new(q[0], q[1], q[2], q[3]),
        Shape::Polygon(pts) => pts
            .iter()
            .map(|p| Rect::new(p.x, p.x, p.y, p.y))
            .reduce(|a, b| a.union(&b))
            .unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0)),
    }
}

fn shape_holds(s: &Shape, p: Point) -> bool {
    match s {
        Shape::Rect(q) => Rect::new(q[0], q[1], q[2], q[3]).contains_half_open(p),
        Shape::Polygon(pts) => point_in_polygon(pts, p),
    }
}

/// Even-odd ray casting.
pub fn point_in_polygon(pts: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}
