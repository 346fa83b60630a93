//! Loading datasets or synthetic arrangements into a labeled run.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rnnheat_bench::generators::{gen_disjoint, gen_uniform, gen_worst_case, gen_zipf, DEFAULT_SKEW};
use rnnheat_core::dataset::{parse_capacities, parse_clients, parse_edges, parse_facilities, ClientId, Dataset, Mode};
use rnnheat_core::geometry::{Metric, NnCircle, Rect, EPSILON};
use rnnheat_core::influence::{InfluenceContext, Measure};
use rnnheat_core::nn::{circles_from_assignment, compute_nn, Arrangement};
use rnnheat_core::pipeline::{Algo, LabeledArrangement};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Synthetic {
    /// Clients and facilities uniform in the unit square.
    Uniform,
    /// Clients and facilities with Zipf-skewed coordinates.
    Zipf,
    /// n squares of side n centered at (i, i).
    WorstCase,
    /// n disjoint unit circles.
    Disjoint,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long, value_name = "FILE")]
    pub clients: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub facilities: Option<PathBuf>,
    /// Generate the input instead of reading files.
    #[arg(long, value_enum, conflicts_with_all = ["clients", "facilities"])]
    pub synthetic: Option<Synthetic>,
    /// Client count for --synthetic.
    #[arg(long, default_value_t = 64, requires = "synthetic")]
    pub n: usize,
    /// Client/facility ratio for --synthetic uniform|zipf.
    #[arg(long, default_value_t = 8, requires = "synthetic")]
    pub ratio: usize,
    #[arg(long, default_value = "linf", value_parser = parse_metric)]
    pub metric: Metric,
    #[arg(long, default_value = "bi", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, default_value = "size", value_parser = parse_measure)]
    pub measure: Measure,
    #[arg(long, value_name = "FILE")]
    pub edges: Option<PathBuf>,
    /// `id,capacity` lines overriding facility capacities.
    #[arg(long, value_name = "FILE")]
    pub capacity_file: Option<PathBuf>,
    /// Capacity of the candidate facility; defaults to unlimited.
    #[arg(long)]
    pub candidate_capacity: Option<u64>,
    #[arg(long, default_value = "crest", value_parser = parse_algo)]
    pub algo: Algo,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Coordinates closer than this are treated as equal.
    #[arg(long, default_value_t = EPSILON)]
    pub epsilon: f64,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}
fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}
fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse()
}
pub(crate) fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse()
}

/// A labeled run with everything needed to evaluate and export it.
pub struct Loaded {
    pub lab: LabeledArrangement,
    pub ctx: InfluenceContext,
    pub client_ids: Vec<ClientId>,
    pub mode: Option<Mode>,
    /// Data bounds padded by the largest radius, when there is a dataset.
    pub bbox: Option<Rect>,
    /// Circles in the input frame, for the oracle.
    pub circles: Vec<NnCircle>,
    pub dataset: Option<Dataset>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

impl InputArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.algo == Algo::Baseline && self.metric == Metric::L2 {
            return Err(CliError::Usage("the baseline algorithm does not support --metric l2".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Usage("--epsilon must be positive".into()));
        }
        if self.synthetic.is_some() && (self.n == 0 || self.ratio == 0) {
            return Err(CliError::Usage("--n and --ratio must be at least 1".into()));
        }
        if self.synthetic.is_none() && self.clients.is_none() {
            return Err(CliError::Usage("--clients or --synthetic is required".into()));
        }
        if self.synthetic.is_none() && self.mode == Mode::Bichromatic && self.facilities.is_none() {
            return Err(CliError::Usage("--facilities is required with --mode bi".into()));
        }
        if self.synthetic.is_some() && (self.edges.is_some() || self.capacity_file.is_some()) {
            return Err(CliError::Usage("--edges and --capacity-file need a file dataset".into()));
        }
        Ok(())
    }

    fn dataset(&self) -> Result<Option<Dataset>, CliError> {
        let mode = self.mode;
        let ds = match (self.synthetic, &self.clients) {
            (Some(Synthetic::Uniform), _) | (Some(Synthetic::Zipf), _) => {
                let f = (self.n / self.ratio).max(1);
                let gen = |n: usize, seed: u64| match self.synthetic {
                    Some(Synthetic::Zipf) => gen_zipf(n, DEFAULT_SKEW, seed),
                    _ => gen_uniform(n, seed),
                };
                let clients = gen(self.n, self.seed);
                match mode {
                    Mode::Bichromatic => Dataset::from_points(&clients, &gen(f, self.seed ^ 1)),
                    Mode::Monochromatic => Dataset::monochromatic(&clients),
                }
            }
            (Some(_), _) => return Ok(None),
            (None, Some(cpath)) => {
                let clients = parse_clients(&read(cpath)?).map_err(|e| parse_err(cpath, e))?;
                let facilities = match (&self.facilities, mode) {
                    (Some(fpath), Mode::Bichromatic) => {
                        parse_facilities(&read(fpath)?).map_err(|e| parse_err(fpath, e))?
                    }
                    _ => Vec::new(),
                };
                if clients.is_empty() {
                    return Err(CliError::Input(format!("{}: no clients", cpath.display())));
                }
                Dataset::new(clients, facilities, mode).map_err(|e| CliError::Input(e.to_string()))?
            }
            (None, None) => unreachable!("checked by validate"),
        };
        Ok(Some(ds))
    }

    pub fn load(&self) -> Result<Loaded, CliError> {
        self.validate()?;
        let Some(ds) = self.dataset()? else {
            return self.load_synthetic_circles();
        };
        let nn = compute_nn(&ds, self.metric).map_err(|e| CliError::Input(e.to_string()))?;
        let circles = circles_from_assignment(&ds, &nn);
        let mut ctx = InfluenceContext::new(&ds);
        if let Some(p) = &self.edges {
            let edges = parse_edges(&read(p)?).map_err(|e| parse_err(p, e))?;
            ctx = ctx.with_edges(&ds, &edges).map_err(|e| CliError::Input(e.to_string()))?;
        }
        let overrides = match &self.capacity_file {
            Some(p) => parse_capacities(&read(p)?).map_err(|e| parse_err(p, e))?,
            None => Vec::new(),
        };
        let candidate = self.candidate_capacity.unwrap_or(ds.clients.len() as u64);
        match ctx.clone().with_capacities(&ds, &nn, &overrides, candidate) {
            Ok(c) => ctx = c,
            // Only an error when the capacity measure was asked for.
            Err(e) if self.measure == Measure::Capacity => return Err(CliError::Input(e.to_string())),
            Err(_) => {}
        }
        self.require_measure(&ctx)?;
        let arr = Arrangement::new(self.metric, &circles, ds.clients.len()).with_eps(self.epsilon);
        let lab = LabeledArrangement::build(arr, self.algo).map_err(|e| CliError::Usage(e.to_string()))?;
        let bbox = rnnheat_service::session::data_bbox(&ds, &lab);
        Ok(Loaded {
            client_ids: ds.clients.iter().map(|c| c.id).collect(),
            mode: Some(ds.mode),
            bbox,
            lab,
            ctx,
            circles,
            dataset: Some(ds),
        })
    }

    fn load_synthetic_circles(&self) -> Result<Loaded, CliError> {
        let circles = match self.synthetic {
            Some(Synthetic::WorstCase) => gen_worst_case(self.n),
            _ => gen_disjoint(self.n),
        };
        let ctx = InfluenceContext::uniform(self.n);
        self.require_measure(&ctx)?;
        let arr = Arrangement::new(self.metric, &circles, self.n).with_eps(self.epsilon);
        let lab = LabeledArrangement::build(arr, self.algo).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Loaded {
            lab,
            ctx,
            client_ids: (0..self.n as u64).collect(),
            mode: None,
            bbox: None,
            circles,
            dataset: None,
        })
    }

    fn require_measure(&self, ctx: &InfluenceContext) -> Result<(), CliError> {
        if ctx.supports(self.measure) {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "measure `{}` needs {}",
                self.measure,
                match self.measure {
                    Measure::Edges => "--edges",
                    _ => "facility capacities or --capacity-file",
                }
            )))
        }
    }
}
