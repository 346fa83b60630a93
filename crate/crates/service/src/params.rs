//! Query-string parsing for the HTTP endpoints.

use rnnheat_core::influence::Measure;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("malformed query string: {0}")]
    Malformed(String),
    #[error("parameter `{name}` has invalid value `{value}`")]
    Invalid { name: &'static str, value: String },
    #[error("missing parameter `{0}`")]
    Missing(&'static str),
}

#[derive(Debug, Default, Deserialize)]
struct RawHeatmap {
    threshold: Option<String>,
    topk: Option<String>,
    measure: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
struct RawRegion {
    x: Option<String>,
    y: Option<String>,
    measure: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeatmapQuery {
    pub threshold: Option<f64>,
    pub top_k: Option<usize>,
    pub measure: Option<Measure>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuery {
    pub x: f64,
    pub y: f64,
    pub measure: Option<Measure>,
}

fn finite(name: &'static str, v: &str) -> Result<f64, ParamError> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|f| f.is_finite())
        .ok_or_else(|| ParamError::Invalid {
            name,
            value: v.to_string(),
        })
}

fn measure(v: Option<String>) -> Result<Option<Measure>, ParamError> {
    v.map(|s| {
        s.parse().map_err(|_| ParamError::Invalid {
            name: "measure",
            value: s,
        })
    })
    .transpose()
}

fn decode<'a, T: Deserialize<'a> + Default>(query: Option<&'a str>) -> Result<T, ParamError> {
    match query {
        None | Some("") => Ok(T::default()),
        Some(q) => serde_urlencoded::from_str(q).map_err(|e| ParamError::Malformed(e.to_string())),
    }
}

/// `threshold=T&topk=K&measure=M`, all optional.
pub fn parse_heatmap_query(query: Option<&str>) -> Result<HeatmapQuery, ParamError> {
    let raw: RawHeatmap = decode(query)?;
    Ok(HeatmapQuery {
        threshold: raw.threshold.as_deref().map(|v| finite("threshold", v)).transpose()?,
        top_k: raw
            .topk
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| ParamError::Invalid {
                    name: "topk",
                    value: v,
                })
            })
            .transpose()?,
        measure: measure(raw.measure)?,
    })
}

/// `x=X&y=Y`, both required, plus an optional `measure`.
pub fn parse_region_query(query: Option<&str>) -> Result<RegionQuery, ParamError> {
    let raw: RawRegion = decode(query)?;
    let x = raw.x.ok_or(ParamError::Missing("x"))?;
    let y = raw.y.ok_or(ParamError::Missing("y"))?;
    Ok(RegionQuery {
        x: finite("x", &x)?,
        y: finite("y", &y)?,
        measure: measure(raw.measure)?,
    })
}
