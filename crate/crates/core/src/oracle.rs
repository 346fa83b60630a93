//! Brute-force RNN oracles used to check every labeling algorithm.

use thiserror::Error;

use crate::dataset::{Dataset, Mode};
use crate::geometry::{distance, Metric, NnCircle, Point, EPSILON};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum OracleError {
    #[error("point ({x}, {y}) lies on the boundary of the circle of client {owner}")]
    BoundaryPoint { x: f64, y: f64, owner: u32 },
}

fn near_boundary(c: &NnCircle, q: Point, m: Metric, eps: f64) -> bool {
    (distance(c.center, q, m) - c.radius).abs() < eps * c.radius.max(1.0)
}

/// Owners of the circles containing `q`, sorted. Zero-radius circles are
/// ignored. `circles` must be in the frame where `m` applies.
pub fn rnn_of_point(q: Point, circles: &[NnCircle], m: Metric) -> Result<Vec<u32>, OracleError> {
    rnn_of_point_eps(q, circles, m, EPSILON)
}

pub fn rnn_of_point_eps(
    q: Point,
    circles: &[NnCircle],
    m: Metric,
    eps: f64,
) -> Result<Vec<u32>, OracleError> {
    let mut out = Vec::new();
    for c in circles.iter().filter(|c| !c.is_degenerate()) {
        if near_boundary(c, q, m, eps) {
            return Err(OracleError::BoundaryPoint {
                x: q.x,
                y: q.y,
                owner: c.owner,
            });
        }
        if distance(c.center, q, m) <= c.radius {
            out.push(c.owner);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// True when `q` is at least `eps` (relative) away from every circle
/// boundary, so its RNN set is unambiguous.
pub fn is_off_boundary(q: Point, circles: &[NnCircle], m: Metric, eps: f64) -> bool {
    circles
        .iter()
        .filter(|c| !c.is_degenerate())
        .all(|c| !near_boundary(c, q, m, eps))
}

/// Recomputes R(q) from the raw dataset: client `o` is captured when `q`
/// is at least as close as every candidate site of `o`. Shares no code
/// with the NN search or the circle construction.
pub fn rnn_by_site_scan(q: Point, ds: &Dataset, m: Metric) -> Vec<u32> {
    let sites: Vec<Point> = match ds.mode {
        Mode::Bichromatic => ds.facilities.iter().map(|f| f.pos).collect(),
        Mode::Monochromatic => ds.clients.iter().map(|c| c.pos).collect(),
    };
    let mut out = Vec::new();
    for (i, c) in ds.clients.iter().enumerate() {
        let dq = distance(c.pos, q, m);
        let captured = sites
            .iter()
            .enumerate()
            .filter(|&(j, _)| !(ds.mode == Mode::Monochromatic && j == i))
            .all(|(_, &s)| dq <= distance(c.pos, s, m));
        // A client sitting on its site has a zero-radius circle and belongs
        // to no region.
        let nn = sites
            .iter()
            .enumerate()
            .filter(|&(j, _)| !(ds.mode == Mode::Monochromatic && j == i))
            .map(|(_, &s)| distance(c.pos, s, m))
            .fold(f64::INFINITY, f64::min);
        if captured && nn > 0.0 {
            out.push(i as u32);
        }
    }
    out
}
