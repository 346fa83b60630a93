//! Timing harness: runs the labeling algorithms over a grid of dataset
//! sizes and client/facility ratios and reports one CSV row per run.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rnnheat_core::dataset::Dataset;
use rnnheat_core::geometry::{Metric, NnCircle};
use rnnheat_core::l2::count_regions_l2;
use rnnheat_core::nn::{compute_nn_circles, Arrangement, NnError};
use rnnheat_core::pipeline::{run_circles, run_squares, Algo};
use rnnheat_core::regions::count_regions;
use rnnheat_core::sink::{CountingSink, LabelError};
use serde::Serialize;

use crate::generators::{gen_uniform, gen_zipf, DEFAULT_SKEW};

pub const CSV_HEADER: &str = "algo,metric,n,ratio,rep,wall_ms,labels,regions,lambda";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform,
    Zipf(f64),
}

impl std::str::FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Distribution::Uniform),
            "zipf" => Ok(Distribution::Zipf(DEFAULT_SKEW)),
            other => Err(format!("unknown distribution `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Client counts |O|.
    pub sizes: Vec<usize>,
    /// |O| / |F| values; the facility count is `max(1, n / ratio)`.
    pub ratios: Vec<usize>,
    pub metric: Metric,
    pub algorithms: Vec<Algo>,
    pub distribution: Distribution,
    pub seed: u64,
    pub repetitions: usize,
    /// Per-run limit; slower runs are reported as timeouts.
    pub timeout: Duration,
    /// Region counts are computed only up to this many clients.
    pub max_region_n: usize,
    /// Runs executed concurrently. Each run is single-threaded.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![1 << 10],
            ratios: vec![1 << 4],
            metric: Metric::Linf,
            algorithms: vec![Algo::Crest, Algo::CrestA, Algo::Baseline],
            distribution: Distribution::Uniform,
            seed: 1,
            repetitions: 1,
            timeout: Duration::from_secs(300),
            max_region_n: 4096,
            workers: 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("sizes and ratios must be ≥ 1")]
    BadSize,
    #[error("repetitions and workers must be ≥ 1")]
    BadCount,
    #[error("the baseline does not support the l2 metric")]
    BaselineL2,
    #[error(transparent)]
    Nn(#[from] NnError),
}

/// Outcome of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Done {
        wall: Duration,
        labels: u64,
        lambda: u64,
    },
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub algo: Algo,
    pub metric: Metric,
    pub n: usize,
    pub ratio: usize,
    pub rep: usize,
    pub outcome: Outcome,
    /// True region count, when measured.
    pub regions: Option<u64>,
}

impl Row {
    pub fn wall_ms(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Done { wall, .. } => Some(wall.as_secs_f64() * 1e3),
            Outcome::Timeout => None,
        }
    }

    pub fn labels(&self) -> Option<u64> {
        match self.outcome {
            Outcome::Done { labels, .. } => Some(labels),
            Outcome::Timeout => None,
        }
    }

    pub fn lambda(&self) -> Option<u64> {
        match self.outcome {
            Outcome::Done { lambda, .. } => Some(lambda),
            Outcome::Timeout => None,
        }
    }
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    algo: &'a str,
    metric: &'a str,
    n: usize,
    ratio: usize,
    rep: String,
    wall_ms: String,
    labels: Option<u64>,
    regions: Option<u64>,
    lambda: Option<u64>,
}

/// Dataset seed of one (size, ratio, repetition) cell. Shared by every
/// algorithm so they label the same circles.
pub fn cell_seed(seed: u64, n: usize, ratio: usize, rep: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [n as u64, ratio as u64, rep as u64] {
        h = (h ^ v).wrapping_mul(0x0100_0000_01b3).rotate_left(23);
    }
    h
}

pub fn dataset(cfg: &BenchConfig, n: usize, ratio: usize, rep: usize) -> Dataset {
    let s = cell_seed(cfg.seed, n, ratio, rep);
    let f = (n / ratio).max(1);
    let (clients, facilities) = match cfg.distribution {
        Distribution::Uniform => (gen_uniform(n, s), gen_uniform(f, s ^ 1)),
        Distribution::Zipf(k) => (gen_zipf(n, k, s), gen_zipf(f, k, s ^ 1)),
    };
    Dataset::from_points(&clients, &facilities)
}

/// Times `algo` from circle arrangement to the last label. NN circles are
/// an input and are not timed.
pub fn time_run(algo: Algo, metric: Metric, circles: &[NnCircle], clients: usize, timeout: Duration) -> Outcome {
    let start = Instant::now();
    let mut sink = CountingSink::new(Some(start + timeout));
    let arr = Arrangement::new(metric, circles, clients);
    let res = if arr.frame_metric() == Metric::L2 {
        run_circles(&arr, algo, &mut sink)
    } else {
        run_squares(&arr, algo, &mut sink)
    };
    let wall = start.elapsed();
    match res {
        Ok(stats) => Outcome::Done {
            wall,
            labels: stats.labels,
            lambda: stats.lambda,
        },
        Err(LabelError::Cancelled) => Outcome::Timeout,
        Err(LabelError::UnsupportedMetric(_)) => unreachable!("checked by run_suite"),
    }
}

pub fn region_count(metric: Metric, circles: &[NnCircle], clients: usize) -> u64 {
    let arr = Arrangement::new(metric, circles, clients);
    if arr.frame_metric() == Metric::L2 {
        count_regions_l2(&arr)
    } else {
        count_regions(&arr)
    }
}

struct Cell {
    n: usize,
    ratio: usize,
    rep: usize,
}

/// Runs every (size, ratio, repetition, algorithm) combination. Rows come
/// back in that nesting order whatever the worker count.
pub fn run_suite(cfg: &BenchConfig) -> Result<Vec<Row>, BenchError> {
    if cfg.sizes.contains(&0) || cfg.ratios.contains(&0) {
        return Err(BenchError::BadSize);
    }
    if cfg.repetitions == 0 || cfg.workers == 0 {
        return Err(BenchError::BadCount);
    }
    if cfg.metric == Metric::L2 && cfg.algorithms.contains(&Algo::Baseline) {
        return Err(BenchError::BaselineL2);
    }
    if cfg.algorithms.is_empty() {
        return Ok(Vec::new());
    }
    let mut cells = Vec::new();
    for &n in &cfg.sizes {
        for &ratio in &cfg.ratios {
            for rep in 0..cfg.repetitions {
                cells.push(Cell { n, ratio, rep });
            }
        }
    }
    let results: Mutex<Vec<Option<Result<Vec<Row>, NnError>>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..cfg.workers.min(cells.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(c) = cells.get(i) else { break };
                let rows = run_cell(cfg, c);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(rows);
            });
        }
    });
    let mut out = Vec::new();
    for r in results.into_inner().expect("workers joined") {
        out.extend(r.expect("every cell ran")?);
    }
    Ok(out)
}

fn run_cell(cfg: &BenchConfig, c: &Cell) -> Result<Vec<Row>, NnError> {
    let ds = dataset(cfg, c.n, c.ratio, c.rep);
    let circles = compute_nn_circles(&ds, cfg.metric)?;
    let regions = (c.n <= cfg.max_region_n).then(|| region_count(cfg.metric, &circles, c.n));
    Ok(cfg
        .algorithms
        .iter()
        .map(|&algo| Row {
            algo,
            metric: cfg.metric,
            n: c.n,
            ratio: c.ratio,
            rep: c.rep,
            outcome: time_run(algo, cfg.metric, &circles, c.n, cfg.timeout),
            regions,
        })
        .collect())
}

/// Median wall time per (algo, n, ratio) group with at least one finished
/// run, in first-appearance order.
pub fn medians(rows: &[Row]) -> Vec<(Algo, usize, usize, f64)> {
    let mut groups: Vec<((Algo, usize, usize), Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.algo, r.n, r.ratio);
        let pos = match groups.iter().position(|(k, _)| *k == key) {
            Some(p) => p,
            None => {
                groups.push((key, Vec::new()));
                groups.len() - 1
            }
        };
        if let Some(ms) = r.wall_ms() {
            groups[pos].1.push(ms);
        }
    }
    groups
        .into_iter()
        .filter_map(|((a, n, ratio), mut v)| {
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            let med = if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 };
            Some((a, n, ratio, med))
        })
        .collect()
}

/// CSV with header. With more than one repetition, each group is followed
/// by a row whose `rep` is `median`; timeouts show `timeout` as wall time.
pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let meds = medians(rows);
    let multi = rows.iter().any(|r| r.rep > 0);
    for (i, r) in rows.iter().enumerate() {
        w.serialize(CsvRecord {
            algo: r.algo.name(),
            metric: r.metric.name(),
            n: r.n,
            ratio: r.ratio,
            rep: r.rep.to_string(),
            wall_ms: r.wall_ms().map_or_else(|| "timeout".to_string(), |ms| format!("{ms:.3}")),
            labels: r.labels(),
            regions: r.regions,
            lambda: r.lambda(),
        })
        .expect("in-memory write");
        let last_of_group = rows.get(i + 1).is_none_or(|nx| (nx.n, nx.ratio) != (r.n, r.ratio));
        if multi && last_of_group {
            // Medians for every algorithm of this (n, ratio) group.
            for &(a, n, ratio, med) in meds.iter().filter(|m| (m.1, m.2) == (r.n, r.ratio)) {
                w.serialize(CsvRecord {
                    algo: a.name(),
                    metric: r.metric.name(),
                    n,
                    ratio,
                    rep: "median".to_string(),
                    wall_ms: format!("{med:.3}"),
                    labels: None,
                    regions: None,
                    lambda: None,
                })
                .expect("in-memory write");
            }
        }
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii");
    format!("{CSV_HEADER}\n{body}")
}
