#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnnheat_core::dataset::Dataset;
use rnnheat_core::geometry::{Metric, NnCircle, Point, Rect};
use rnnheat_core::oracle::{is_off_boundary, rnn_of_point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
}

/// Skewed points: squaring a uniform coordinate piles mass near zero.
pub fn skewed_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.random(), rng.random());
            Point::new(a * a, b * b * b)
        })
        .collect()
}

pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, nf: usize, skewed: bool) -> Dataset {
    if skewed {
        let c = skewed_points(rng, n);
        let f = skewed_points(rng, nf);
        Dataset::from_points(&c, &f)
    } else {
        let c = points(rng, n);
        let f = points(rng, nf);
        Dataset::from_points(&c, &f)
    }
}

pub fn circle_bounds(circles: &[NnCircle]) -> Rect {
    circles
        .iter()
        .map(|c| c.bounds())
        .reduce(|a, b| a.union(&b))
        .unwrap_or(Rect::new(0.0, 1.0, 0.0, 1.0))
}

/// Samples `count` points of the padded bounding box that sit clear of
/// every circle boundary, with their oracle RNN sets.
pub fn samples(
    rng: &mut ChaCha8Rng,
    circles: &[NnCircle],
    m: Metric,
    count: usize,
) -> Vec<(Point, Vec<u32>)> {
    let b = circle_bounds(circles).padded(0.05);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = Point::new(rng.random_range(b.x_lo..b.x_hi), rng.random_range(b.y_lo..b.y_hi));
        if !is_off_boundary(q, circles, m, 1e-7) {
            continue;
        }
        out.push((q, rnn_of_point(q, circles, m).unwrap()));
    }
    out
}

/// Points on a coarse integer lattice: shared facilities, coincident
/// circles and tangencies are common.
pub fn lattice_dataset(rng: &mut ChaCha8Rng, n: usize, nf: usize) -> Dataset {
    let mut g = |k: usize| -> Vec<Point> {
        (0..k)
            .map(|_| Point::new(rng.random_range(0..6) as f64, rng.random_range(0..6) as f64))
            .collect()
    };
    let c = g(n);
    let f = g(nf);
    Dataset::from_points(&c, &f)
}
