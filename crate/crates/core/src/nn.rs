//! Nearest-facility search, NN-circles and per-facility RNN sets.

use thiserror::Error;

use crate::dataset::{Dataset, Mode};
use crate::geometry::{distance, rotate_neg_pi4, rotate_pi4, Metric, NnCircle, Point, EPSILON};

#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum NnError {
    #[error("the facility set is empty")]
    EmptyFacilitySet,
    #[error("monochromatic mode needs at least two clients")]
    MonochromaticSingleton,
}

/// Below this many candidate sites the search is a plain scan.
const GRID_THRESHOLD: usize = 64;

/// Nearest site of every client. `site` indexes [`Dataset::candidate_sites`].
#[derive(Debug, Clone, PartialEq)]
pub struct NnAssignment {
    pub site: Vec<u32>,
    pub site_id: Vec<u64>,
    pub dist: Vec<f64>,
}

/// Uniform bucket grid over the candidate sites.
struct SiteGrid<'a> {
    sites: &'a [(u64, Point)],
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> SiteGrid<'a> {
    fn new(sites: &'a [(u64, Point)]) -> Self {
        let (mut lo, mut hi) = (sites[0].1, sites[0].1);
        for &(_, p) in sites {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let w = hi.x - lo.x;
        let h = hi.y - lo.y;
        let extent = w.max(h);
        // Aim for about one site per cell.
        let area = (w.max(extent * 1e-3)) * (h.max(extent * 1e-3));
        let mut cell = (area / sites.len() as f64).sqrt();
        if !(cell.is_finite() && cell > 0.0) {
            cell = 1.0;
        }
        let cols = ((w / cell).floor() as usize + 1).clamp(1, 1 << 12);
        let rows = ((h / cell).floor() as usize + 1).clamp(1, 1 << 12);
        let cell = cell.max(w / cols as f64).max(h / rows as f64);
        let mut buckets = vec![Vec::new(); cols * rows];
        let mut grid = SiteGrid {
            sites,
            origin: lo,
            cell,
            cols,
            rows,
            buckets: Vec::new(),
        };
        for (i, &(_, p)) in sites.iter().enumerate() {
            let (c, r) = grid.cell_of(p);
            buckets[r * cols + c].push(i as u32);
        }
        grid.buckets = buckets;
        grid
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let c = ((p.x - self.origin.x) / self.cell).floor();
        let r = ((p.y - self.origin.y) / self.cell).floor();
        let c = c.clamp(0.0, (self.cols - 1) as f64) as usize;
        let r = r.clamp(0.0, (self.rows - 1) as f64) as usize;
        (c, r)
    }

    fn nearest(&self, q: Point, skip: Option<u32>, m: Metric) -> (u32, f64) {
        let (qc, qr) = self.cell_of(q);
        let mut best: Option<(u32, f64)> = None;
        let max_ring = self.cols.max(self.rows);
        for ring in 0..=max_ring {
            if let Some((_, d)) = best {
                // Sites in this ring lie at least (ring - 1) cells away.
                if (ring as f64 - 1.0) * self.cell > d {
                    break;
                }
            }
            let r = ring as isize;
            let c_lo = qc as isize - r;
            let c_hi = qc as isize + r;
            let r_lo = qr as isize - r;
            let r_hi = qr as isize + r;
            for row in r_lo..=r_hi {
                if row < 0 || row >= self.rows as isize {
                    continue;
                }
                let on_edge_row = row == r_lo || row == r_hi;
                let step = if on_edge_row { 1 } else { (c_hi - c_lo).max(1) };
                let mut col = c_lo;
                while col <= c_hi {
                    if col >= 0 && col < self.cols as isize {
                        for &s in &self.buckets[row as usize * self.cols + col as usize] {
                            if Some(s) == skip {
                                continue;
                            }
                            let d = distance(q, self.sites[s as usize].1, m);
                            best = Some(pick(best, (s, d), self.sites));
                        }
                    }
                    col += step;
                }
            }
        }
        best.expect("grid holds at least one eligible site")
    }
}

fn pick(best: Option<(u32, f64)>, cand: (u32, f64), sites: &[(u64, Point)]) -> (u32, f64) {
    match best {
        None => cand,
        Some(b) => {
            if cand.1 < b.1 || (cand.1 == b.1 && sites[cand.0 as usize].0 < sites[b.0 as usize].0) {
                cand
            } else {
                b
            }
        }
    }
}

fn scan_nearest(q: Point, skip: Option<u32>, sites: &[(u64, Point)], m: Metric) -> (u32, f64) {
    let mut best = None;
    for (i, &(_, p)) in sites.iter().enumerate() {
        if Some(i as u32) == skip {
            continue;
        }
        best = Some(pick(best, (i as u32, distance(q, p, m)), sites));
    }
    best.expect("at least one eligible site")
}

/// Exact nearest site for every client; ties go to the smallest site id.
pub fn compute_nn(ds: &Dataset, m: Metric) -> Result<NnAssignment, NnError> {
    let sites = ds.candidate_sites();
    let mono = ds.mode == Mode::Monochromatic;
    if mono {
        if ds.clients.len() < 2 {
            return Err(NnError::MonochromaticSingleton);
        }
    } else if sites.is_empty() {
        return Err(NnError::EmptyFacilitySet);
    }
    let grid = (sites.len() >= GRID_THRESHOLD).then(|| SiteGrid::new(&sites));
    let n = ds.clients.len();
    let mut out = NnAssignment {
        site: Vec::with_capacity(n),
        site_id: Vec::with_capacity(n),
        dist: Vec::with_capacity(n),
    };
    for (i, c) in ds.clients.iter().enumerate() {
        let skip = mono.then_some(i as u32);
        let (s, d) = match &grid {
            Some(g) => g.nearest(c.pos, skip, m),
            None => scan_nearest(c.pos, skip, &sites, m),
        };
        out.site.push(s);
        out.site_id.push(sites[s as usize].0);
        out.dist.push(d);
    }
    Ok(out)
}

/// One circle per client, in client order. Zero-radius circles are kept
/// here (see [`NnCircle::is_degenerate`]) and dropped by [`Arrangement`].
pub fn compute_nn_circles(ds: &Dataset, m: Metric) -> Result<Vec<NnCircle>, NnError> {
    let nn = compute_nn(ds, m)?;
    Ok(circles_from_assignment(ds, &nn))
}

pub fn circles_from_assignment(ds: &Dataset, nn: &NnAssignment) -> Vec<NnCircle> {
    ds.clients
        .iter()
        .enumerate()
        .map(|(i, c)| NnCircle::new(i as u32, c.pos, nn.dist[i]))
        .collect()
}

/// Clients grouped by their (tie-broken) nearest site; indexed like
/// [`Dataset::candidate_sites`], members are dense client indices.
pub fn facility_rnn_sets(ds: &Dataset, nn: &NnAssignment) -> Vec<Vec<u32>> {
    let mut sets = vec![Vec::new(); ds.candidate_sites().len()];
    for (i, &s) in nn.site.iter().enumerate() {
        sets[s as usize].push(i as u32);
    }
    sets
}

/// The circles a labeling algorithm sweeps, expressed in its working frame.
///
/// L1 diamonds are rotated by π/4 into L∞ squares with radius `r / √2`;
/// the other metrics use the input frame unchanged. Degenerate circles are
/// dropped, so `circles[i].owner` need not equal `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    pub metric: Metric,
    pub circles: Vec<NnCircle>,
    /// Number of clients the owners index into.
    pub clients: usize,
    /// Coordinates closer than this are treated as equal.
    pub eps: f64,
}

impl Arrangement {
    pub fn new(metric: Metric, circles: &[NnCircle], clients: usize) -> Self {
        let circles = circles
            .iter()
            .filter(|c| !c.is_degenerate())
            .map(|c| match metric {
                Metric::L1 => NnCircle::new(
                    c.owner,
                    rotate_pi4(c.center),
                    c.radius / std::f64::consts::SQRT_2,
                ),
                _ => *c,
            })
            .collect();
        Arrangement {
            metric,
            circles,
            clients,
            eps: EPSILON,
        }
    }

    /// Circles already in the working frame (e.g. synthetic L∞ squares).
    pub fn from_frame_circles(metric: Metric, circles: Vec<NnCircle>, clients: usize) -> Self {
        Arrangement {
            metric,
            circles: circles.into_iter().filter(|c| !c.is_degenerate()).collect(),
            clients,
            eps: EPSILON,
        }
    }

    pub fn from_dataset(ds: &Dataset, m: Metric) -> Result<Self, NnError> {
        let circles = compute_nn_circles(ds, m)?;
        Ok(Arrangement::new(m, &circles, ds.clients.len()))
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Metric the sweep sees: L1 runs as L∞ in the rotated frame.
    pub fn frame_metric(&self) -> Metric {
        match self.metric {
            Metric::L1 => Metric::Linf,
            m => m,
        }
    }

    pub fn to_frame(&self, p: Point) -> Point {
        match self.metric {
            Metric::L1 => rotate_pi4(p),
            _ => p,
        }
    }

    pub fn from_frame(&self, p: Point) -> Point {
        match self.metric {
            Metric::L1 => rotate_neg_pi4(p),
            _ => p,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }
}
