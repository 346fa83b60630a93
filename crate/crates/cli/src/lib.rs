//! Command-line front end: heat maps, verification against the oracle,
//! benchmarks and the HTTP service.

pub mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnnheat_bench::suite::Distribution;
use rnnheat_bench::{run_suite, to_csv, BenchConfig};
use rnnheat_core::export::{build_document, influences, meta_of, region_shapes_with, select, Filter};
use rnnheat_core::geometry::{Metric, Point, Rect};
use rnnheat_core::l2::count_regions_l2;
use rnnheat_core::oracle::{is_off_boundary, rnn_of_point};
use rnnheat_core::pipeline::{Algo, ARC_SAMPLES};
use rnnheat_core::regions::count_regions;
use rnnheat_core::render::{rasterize, write_image, Colormap, ImageFormat, Scale};
use rnnheat_service::{AppState, Cors, Session};

use input::{InputArgs, Loaded};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "rnnheat", version, about = "Reverse-nearest-neighbor heat maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label every region and write an image and/or a region document.
    Heatmap(HeatmapArgs),
    /// Compare region labels with the brute-force oracle at sampled points.
    Verify(VerifyArgs),
    /// Time the labeling algorithms over generated datasets; CSV to stdout.
    Bench(BenchArgs),
    /// Serve /heatmap, /region and /meta over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Image path; `.png` writes PNG, anything else PPM.
    #[arg(long, value_name = "IMG")]
    pub out: Option<PathBuf>,
    /// Region document path; printed to stdout when neither output is set.
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value = "linear", value_parser = |s: &str| s.parse::<Scale>())]
    pub scale: Scale,
    /// Keep regions with influence ≥ T.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Keep the K most influential regions, after the threshold.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Points per arc in L2 region outlines.
    #[arg(long, default_value_t = ARC_SAMPLES)]
    pub arc_samples: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1024")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub ratios: Vec<usize>,
    /// `crest_l2` is CREST under `--metric l2`.
    #[arg(long, value_delimiter = ',', default_value = "crest,crest-a,baseline", value_parser = parse_bench_algo)]
    pub algos: Vec<BenchAlgo>,
    #[arg(long, default_value = "linf", value_parser = |s: &str| s.parse::<Metric>())]
    pub metric: Metric,
    #[arg(long, default_value = "uniform", value_parser = |s: &str| s.parse::<Distribution>())]
    pub distribution: Distribution,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 300.0)]
    pub timeout_s: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Largest client count whose region count is measured.
    #[arg(long, default_value_t = 4096)]
    pub max_region_n: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Serve a region document written by `heatmap --json`.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["clients", "synthetic"])]
    pub session_from_json: Option<PathBuf>,
    /// Browser origin allowed by CORS; any origin when unset.
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Dataset flags; without them and without a document the server
    /// starts with no session.
    #[command(flatten)]
    pub input: Option<InputArgs>,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let res = match cli.command {
        Command::Heatmap(a) => cmd_heatmap(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Serve(a) => cmd_serve(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn region_count(l: &Loaded) -> u64 {
    if l.lab.arr.frame_metric() == Metric::L2 {
        count_regions_l2(&l.lab.arr)
    } else {
        count_regions(&l.lab.arr)
    }
}

/// Area to draw or sample: the data bounds, or the circles' bounds padded
/// by 5%.
fn view_box(l: &Loaded) -> Rect {
    let b = l.bbox.or_else(|| {
        l.lab.circle_bounds().map(|b| {
            let pad = b.width().max(b.height()) * 0.05;
            b.padded(pad)
        })
    });
    match b {
        Some(b) if b.width() > 0.0 && b.height() > 0.0 => b,
        Some(b) => b.padded(1.0),
        None => Rect::new(0.0, 1.0, 0.0, 1.0),
    }
}

pub fn cmd_heatmap(a: &HeatmapArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.width == 0 || a.height == 0 {
        return Err(CliError::Usage("--width and --height must be at least 1".into()));
    }
    if a.threshold.is_some_and(|t| !t.is_finite()) {
        return Err(CliError::Usage("--threshold must be finite".into()));
    }
    let l = a.input.load()?;
    let m = a.input.measure;
    let shapes = region_shapes_with(&l.lab, a.arc_samples.max(1));
    let inf = influences(&shapes, &l.ctx, m).map_err(|e| CliError::Input(e.to_string()))?;
    let filter = Filter {
        threshold: a.threshold,
        top_k: a.top_k,
    };
    if let Some(path) = &a.out {
        // Influence per region index, for selected regions only.
        let mut heat = vec![0.0; l.lab.regions().len()];
        for i in select(&inf, filter.threshold, filter.top_k) {
            heat[shapes[i].group] = inf[i];
        }
        let raster = rasterize(a.width, a.height, view_box(&l), a.scale, |p| {
            l.lab.region_at(p).map_or(0.0, |g| heat[g])
        })
        .map_err(|e| CliError::Input(e.to_string()))?;
        write_image(&raster, &Colormap::default(), path, ImageFormat::from_path(path))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let doc = build_document(meta_of(&l.lab, m), &shapes, &inf, filter, &l.client_ids);
    let text = doc.to_json();
    match &a.json {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None if a.out.is_none() => out.write_all(text.as_bytes())?,
        None => {}
    }
    Ok(EXIT_OK)
}

/// Outcome of an oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyReport {
    pub samples: usize,
    pub mismatches: usize,
    pub k: u64,
    pub regions: u64,
    pub lambda: u64,
    pub events: u64,
}

/// Compares labels with the oracle at `samples` points at least 1e-7
/// (relative) away from every boundary.
pub fn verify(l: &Loaded, samples: usize, seed: u64) -> VerifyReport {
    let metric = l.lab.metric();
    let b = view_box(l);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut taken = 0;
    let mut tries = 0usize;
    while taken < samples && tries < samples.saturating_mul(100).max(1000) {
        tries += 1;
        let q = Point::new(r.random_range(b.x_lo..b.x_hi), r.random_range(b.y_lo..b.y_hi));
        if !is_off_boundary(q, &l.circles, metric, 1e-7) {
            continue;
        }
        taken += 1;
        let want = rnn_of_point(q, &l.circles, metric).expect("finite sample");
        if l.lab.rnn_at(q) != want.as_slice() {
            mismatches += 1;
        }
    }
    VerifyReport {
        samples: taken,
        mismatches,
        k: l.lab.stats.labels,
        regions: region_count(l),
        lambda: l.lab.stats.lambda,
        events: l.lab.stats.events,
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = a.input.load()?;
    let rep = verify(&l, a.samples, a.input.seed);
    writeln!(out, "algo: {}", l.lab.algo)?;
    writeln!(out, "metric: {}", l.lab.metric())?;
    writeln!(out, "samples: {}", rep.samples)?;
    writeln!(out, "mismatches: {}", rep.mismatches)?;
    writeln!(out, "k: {}", rep.k)?;
    writeln!(out, "r: {}", rep.regions)?;
    writeln!(out, "lambda: {}", rep.lambda)?;
    writeln!(out, "events: {}", rep.events)?;
    Ok(if rep.mismatches == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAlgo {
    Plain(Algo),
    CrestL2,
}

fn parse_bench_algo(s: &str) -> Result<BenchAlgo, String> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "crest-l2" => Ok(BenchAlgo::CrestL2),
        _ => input::parse_algo(s).map(BenchAlgo::Plain),
    }
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.timeout_s.is_finite() && a.timeout_s >= 0.0) {
        return Err(CliError::Usage("--timeout-s must be a non-negative number".into()));
    }
    let mut algorithms = Vec::new();
    for &b in &a.algos {
        let algo = match b {
            BenchAlgo::Plain(x) => x,
            BenchAlgo::CrestL2 if a.metric == Metric::L2 => Algo::Crest,
            BenchAlgo::CrestL2 => return Err(CliError::Usage("crest_l2 requires --metric l2".into())),
        };
        if !algorithms.contains(&algo) {
            algorithms.push(algo);
        }
    }
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        ratios: a.ratios.clone(),
        metric: a.metric,
        algorithms,
        distribution: a.distribution,
        seed: a.seed,
        repetitions: a.reps,
        timeout: Duration::from_secs_f64(a.timeout_s),
        max_region_n: a.max_region_n,
        workers: a.workers,
    };
    let rows = run_suite(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    out.write_all(to_csv(&rows).as_bytes())?;
    Ok(EXIT_OK)
}

pub fn cmd_serve(a: &ServeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let session = match (&a.session_from_json, &a.input) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let doc = rnnheat_core::export::RegionDoc::from_json(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Some(Session::from_document(doc).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?)
        }
        (None, Some(inp)) => {
            let l = inp.load()?;
            Some(
                Session::from_labeling(l.lab, l.ctx, l.client_ids, l.mode, l.bbox, inp.measure)
                    .map_err(|e| CliError::Input(e.to_string()))?,
            )
        }
        (None, None) => None,
    };
    let cors = match &a.cors_origin {
        Some(o) => Cors::Origin(o.parse().map_err(|_| CliError::Usage(format!("invalid origin `{o}`")))?),
        None => Cors::Any,
    };
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await?;
        writeln!(out, "listening on http://{}", listener.local_addr()?)?;
        out.flush()?;
        rnnheat_service::serve(listener, AppState::new(session), cors).await
    })?;
    Ok(EXIT_OK)
}
