//! Synthetic datasets and circle arrangements.

use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;
use rnnheat_core::geometry::{NnCircle, Point};

/// Cells per axis for the Zipf generator.
pub const ZIPF_BINS: usize = 64;

/// Skew used by the experiment protocol.
pub const DEFAULT_SKEW: f64 = 0.2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points uniform in the open unit square.
pub fn gen_uniform(n: usize, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let x: f64 = Open01.sample(&mut r);
            let y: f64 = Open01.sample(&mut r);
            Point::new(x, y)
        })
        .collect()
}

/// Zipf-ranked bins along one axis: `rank_to_bin[k]` is the bin holding
/// rank `k + 1`.
#[derive(Debug, Clone)]
pub struct ZipfAxis {
    pub rank_to_bin: Vec<usize>,
    dist: Zipf<f64>,
}

impl ZipfAxis {
    pub fn new(skew: f64, r: &mut ChaCha8Rng) -> Self {
        assert!(skew >= 0.0 && skew.is_finite(), "skew must be finite and ≥ 0");
        let mut rank_to_bin: Vec<usize> = (0..ZIPF_BINS).collect();
        rank_to_bin.shuffle(r);
        ZipfAxis {
            rank_to_bin,
            dist: Zipf::new(ZIPF_BINS as f64, skew).expect("bins ≥ 1 and skew ≥ 0"),
        }
    }

    pub fn sample(&self, r: &mut ChaCha8Rng) -> f64 {
        let rank = self.dist.sample(r) as usize;
        let bin = self.rank_to_bin[rank.clamp(1, ZIPF_BINS) - 1];
        let u: f64 = Open01.sample(r);
        (bin as f64 + u) / ZIPF_BINS as f64
    }
}

/// `n` points whose coordinates each fall in a Zipf-ranked bin with
/// exponent `skew`, jittered uniformly inside the bin. `skew = 0` is
/// uniform.
pub fn gen_zipf(n: usize, skew: f64, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    let ax = ZipfAxis::new(skew, &mut r);
    let ay = ZipfAxis::new(skew, &mut r);
    (0..n)
        .map(|_| {
            let x = ax.sample(&mut r);
            let y = ay.sample(&mut r);
            Point::new(x, y)
        })
        .collect()
}

/// L∞ squares of side `n`, the i-th centered at (i, i): n² − n + 2 regions
/// and depth n.
pub fn gen_worst_case(n: usize) -> Vec<NnCircle> {
    (1..=n)
        .map(|i| NnCircle::new(i as u32 - 1, Point::new(i as f64, i as f64), n as f64 / 2.0))
        .collect()
}

/// `n` pairwise disjoint unit circles on a line: n + 1 regions.
pub fn gen_disjoint(n: usize) -> Vec<NnCircle> {
    (0..n)
        .map(|i| NnCircle::new(i as u32, Point::new(3.0 * i as f64, 0.0), 1.0))
        .collect()
}

/// For values a₁..aₙ, the squares with opposite corners (a₁, a₁) and
/// (aᵢ, aᵢ) for i ≥ 2. Owners are `i - 2`, so there are `n - 1` clients.
pub fn gen_distinctness(values: &[f64]) -> Vec<NnCircle> {
    assert!(values.len() >= 2, "need at least two values");
    let a1 = values[0];
    values[1..]
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let c = (a1 + a) / 2.0;
            NnCircle::new(i as u32, Point::new(c, c), (a - a1).abs() / 2.0)
        })
        .collect()
}
