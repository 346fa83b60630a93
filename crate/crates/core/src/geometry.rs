//! Plane primitives shared by every labeling algorithm.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Default tolerance for coordinate equality in event and status ordering.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Linf,
    L1,
    L2,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Linf => "linf",
            Metric::L1 => "l1",
            Metric::L2 => "l2",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linf" | "l-inf" | "chebyshev" => Ok(Metric::Linf),
            "l1" | "manhattan" => Ok(Metric::L1),
            "l2" | "euclidean" => Ok(Metric::L2),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

pub fn distance(p: Point, q: Point, m: Metric) -> f64 {
    let dx = (p.x - q.x).abs();
    let dy = (p.y - q.y).abs();
    match m {
        Metric::Linf => dx.max(dy),
        Metric::L1 => dx + dy,
        Metric::L2 => dx.hypot(dy),
    }
}

/// Rotates counter-clockwise by π/4 about the origin.
///
/// L1 distances before the rotation equal √2 times L∞ distances after it,
/// so L1 diamonds become axis-aligned squares. The √2 factor is kept in the
/// radii rather than folded into the coordinates.
pub fn rotate_pi4(p: Point) -> Point {
    let (s, c) = std::f64::consts::FRAC_PI_4.sin_cos();
    Point::new(p.x * c - p.y * s, p.x * s + p.y * c)
}

/// Inverse of [`rotate_pi4`].
pub fn rotate_neg_pi4(p: Point) -> Point {
    let (s, c) = std::f64::consts::FRAC_PI_4.sin_cos();
    Point::new(p.x * c + p.y * s, -p.x * s + p.y * c)
}

/// Nearest-neighbor ball of one client: every point at distance at most
/// `radius` from `center` would capture the client if it became a facility.
///
/// `owner` is the dense client index the circle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnCircle {
    pub owner: u32,
    pub center: Point,
    pub radius: f64,
}

impl NnCircle {
    pub fn new(owner: u32, center: Point, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        NnCircle { owner, center, radius }
    }

    pub fn x_lo(&self) -> f64 {
        self.center.x - self.radius
    }

    pub fn x_hi(&self) -> f64 {
        self.center.x + self.radius
    }

    pub fn y_lo(&self) -> f64 {
        self.center.y - self.radius
    }

    pub fn y_hi(&self) -> f64 {
        self.center.y + self.radius
    }

    /// A zero-radius circle bounds no area and is left out of arrangements.
    pub fn is_degenerate(&self) -> bool {
        self.radius <= 0.0
    }

    /// Axis-aligned bounding box; for L∞ this is the circle itself.
    pub fn bounds(&self) -> Rect {
        Rect {
            x_lo: self.x_lo(),
            x_hi: self.x_hi(),
            y_lo: self.y_lo(),
            y_hi: self.y_hi(),
        }
    }
}

pub fn circle_contains(c: &NnCircle, p: Point, m: Metric, closed: bool) -> bool {
    let d = distance(c.center, p, m);
    if closed {
        d <= c.radius
    } else {
        d < c.radius
    }
}

/// Axis-aligned rectangle `[x_lo, x_hi] × [y_lo, y_hi]`.
///
/// Membership is open: a point is inside only when it lies strictly between
/// both coordinate pairs, so a rectangle with `y_lo == y_hi` holds nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub const fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Rect { x_lo, x_hi, y_lo, y_hi }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.x_lo < p.x && p.x < self.x_hi && self.y_lo < p.y && p.y < self.y_hi
    }

    /// Half-open membership `[x_lo, x_hi) × [y_lo, y_hi)`; used where
    /// rectangles tile a region and every point needs exactly one owner.
    pub fn contains_half_open(&self, p: Point) -> bool {
        self.x_lo <= p.x && p.x < self.x_hi && self.y_lo <= p.y && p.y < self.y_hi
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.x_lo < self.x_hi && self.y_lo < self.y_hi)
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn centroid(&self) -> Point {
        Point::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            x_lo: self.x_lo.min(other.x_lo),
            x_hi: self.x_hi.max(other.x_hi),
            y_lo: self.y_lo.min(other.y_lo),
            y_hi: self.y_hi.max(other.y_hi),
        }
    }

    pub fn padded(&self, pad: f64) -> Rect {
        Rect {
            x_lo: self.x_lo - pad,
            x_hi: self.x_hi + pad,
            y_lo: self.y_lo - pad,
            y_hi: self.y_hi + pad,
        }
    }
}

/// Total order on `f64` keys; callers keep NaN out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OrdF64(pub f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Collapses values that lie within `eps` of their sorted predecessor onto
/// the first value of the run. Returns the snapped value for each input, in
/// input order.
pub(crate) fn snap_values(values: &[f64], eps: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut rep = f64::NAN;
    let mut last = f64::NAN;
    for &i in &order {
        let v = values[i];
        if rep.is_nan() || v - last > eps {
            rep = if v == 0.0 { 0.0 } else { v };
        }
        last = v;
        out[i] = rep;
    }
    out
}
