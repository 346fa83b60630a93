//! Region documents: the JSON form of a labeled arrangement.
//!
//! Floats are rounded to 9 significant digits and keys keep a fixed
//! order, so equal inputs give byte-identical output.

use serde::{Deserialize, Serialize};

use crate::dataset::ClientId;
use crate::geometry::Point;
use crate::influence::{InfluenceContext, InfluenceError, Measure};
use crate::pipeline::{LabeledArrangement, Shape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub metric: String,
    pub measure: String,
    pub n: usize,
    pub events: u64,
    pub k: u64,
    pub lambda: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rects: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polylines: Option<Vec<Vec<[f64; 2]>>>,
    /// External client ids, ascending.
    pub rnn: Vec<ClientId>,
    pub influence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub meta: Meta,
    pub regions: Vec<RegionEntry>,
}

impl RegionDoc {
    /// Canonical compact JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.rounded()).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn rounded(&self) -> RegionDoc {
        let mut d = self.clone();
        for r in &mut d.regions {
            r.influence = round9(r.influence);
            for q in r.rects.iter_mut().flatten() {
                q.iter_mut().for_each(|v| *v = round9(*v));
            }
            for line in r.polylines.iter_mut().flatten() {
                for p in line {
                    p.iter_mut().for_each(|v| *v = round9(*v));
                }
            }
        }
        d
    }
}

/// Rounds to 9 significant digits; negative zero becomes zero.
pub fn round9(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    let r: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A region without its influence: shapes plus RNN set.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionShape {
    /// Index into the arrangement's regions.
    pub group: usize,
    pub shapes: Vec<Shape>,
    /// Dense client indices, ascending.
    pub rnn: Vec<u32>,
}

/// Regions with a non-empty RNN set, in order of first label. The empty
/// set's regions are the background and are not listed.
pub fn region_shapes(lab: &LabeledArrangement) -> Vec<RegionShape> {
    region_shapes_with(lab, crate::pipeline::ARC_SAMPLES)
}

pub fn region_shapes_with(lab: &LabeledArrangement, arc_samples: usize) -> Vec<RegionShape> {
    lab.regions()
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.rnn.is_empty())
        .map(|(i, g)| RegionShape {
            group: i,
            shapes: lab.shapes_with(g, arc_samples),
            rnn: g.rnn.clone(),
        })
        .collect()
}

pub fn influences(regions: &[RegionShape], ctx: &InfluenceContext, m: Measure) -> Result<Vec<f64>, InfluenceError> {
    regions.iter().map(|r| ctx.evaluate(m, &r.rnn)).collect()
}

/// Indices by influence descending (ties keep input order), keeping
/// values ≥ `threshold` and then at most `top_k` of them.
pub fn select(influence: &[f64], threshold: Option<f64>, top_k: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..influence.len())
        .filter(|&i| threshold.is_none_or(|t| influence[i] >= t))
        .collect();
    idx.sort_by(|&a, &b| influence[b].total_cmp(&influence[a]));
    if let Some(k) = top_k {
        idx.truncate(k);
    }
    idx
}

fn entry(r: &RegionShape, influence: f64, client_ids: &[ClientId]) -> RegionEntry {
    let mut rects = Vec::new();
    let mut polys = Vec::new();
    for s in &r.shapes {
        match s {
            Shape::Rect(q) => rects.push(*q),
            Shape::Polygon(pts) => polys.push(pts.iter().map(|p: &Point| [p.x, p.y]).collect()),
        }
    }
    let mut rnn: Vec<ClientId> = r.rnn.iter().map(|&i| client_ids[i as usize]).collect();
    rnn.sort_unstable();
    RegionEntry {
        rects: (!rects.is_empty()).then_some(rects),
        polylines: (!polys.is_empty()).then_some(polys),
        rnn,
        influence,
    }
}

/// Output filters applied in order: threshold, then top-k.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Filter {
    pub threshold: Option<f64>,
    pub top_k: Option<usize>,
}

pub fn build_document(
    meta: Meta,
    regions: &[RegionShape],
    influence: &[f64],
    filter: Filter,
    client_ids: &[ClientId],
) -> RegionDoc {
    let regions = select(influence, filter.threshold, filter.top_k)
        .into_iter()
        .map(|i| entry(&regions[i], influence[i], client_ids))
        .collect();
    RegionDoc { meta, regions }
}

pub fn meta_of(lab: &LabeledArrangement, m: Measure) -> Meta {
    Meta {
        metric: lab.metric().name().to_string(),
        measure: m.name().to_string(),
        n: lab.arr.clients,
        events: lab.stats.events,
        k: lab.stats.labels,
        lambda: lab.stats.lambda,
    }
}
