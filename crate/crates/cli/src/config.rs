use std::fmt;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use divcurve::analysis::{DEFAULT_PERMUTATIONS, DEFAULT_TOLERANCE};
use divcurve::diversity::auto_scales;
use divcurve::{CoarseningConfig, HodgeParams, Metric, PerturbationKind, ScorerKind};

use crate::error::CliError;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Coarsening repeats averaged per curve.
    #[arg(long, global = true, default_value_t = 3)]
    pub repeats: usize,

    #[arg(long, global = true, value_enum, default_value_t = MetricArg::ShortestPath)]
    pub metric: MetricArg,

    #[arg(long, global = true, value_enum, default_value_t = ScorerArg::Random)]
    pub scorer: ScorerArg,

    /// `min:max[:step]` or `auto` (1 to the largest graph size).
    #[arg(long, global = true, default_value = "auto")]
    pub scales: ScaleSpec,

    /// Time for spectral metrics [default: 1, or 20 for hodge].
    #[arg(long, global = true)]
    pub time: Option<f64>,

    /// Simplex dimension for the hodge metric.
    #[arg(long, global = true, default_value_t = 2)]
    pub hodge_k: usize,

    /// Order of the curve distance (`inf` for the maximum).
    #[arg(long, global = true, default_value_t = 2.0)]
    pub p_norm: f64,

    /// Tolerance for telling spreads apart.
    #[arg(long = "tol", global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Permutations for the two-sample test.
    #[arg(long, global = true, default_value_t = DEFAULT_PERMUTATIONS)]
    pub perms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MetricArg {
    ShortestPath,
    Feature,
    Diffusion,
    HeatKernel,
    Hodge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ScorerArg {
    Random,
    SpreadExact,
    SpreadApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
#[allow(clippy::enum_variant_names)]
pub enum KindArg {
    AddEdge,
    RemoveEdge,
    RewireEdge,
    SwapEdge,
}

impl From<KindArg> for PerturbationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::AddEdge => PerturbationKind::AddEdge,
            KindArg::RemoveEdge => PerturbationKind::RemoveEdge,
            KindArg::RewireEdge => PerturbationKind::RewireEdge,
            KindArg::SwapEdge => PerturbationKind::SwapEdge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleSpec {
    Auto,
    Range { min: usize, max: usize, step: usize },
}

impl FromStr for ScaleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(ScaleSpec::Auto);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected min:max[:step] or auto, got {s:?}"));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad number {t:?} in scales: {e}"))
        };
        let (min, max) = (num(parts[0])?, num(parts[1])?);
        let step = parts.get(2).map_or(Ok(1), |t| num(t))?;
        if min == 0 || max < min || step == 0 {
            return Err(format!("scales need 1 <= min <= max and step >= 1, got {s:?}"));
        }
        Ok(ScaleSpec::Range { min, max, step })
    }
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleSpec::Auto => f.write_str("auto"),
            ScaleSpec::Range { min, max, step } => write!(f, "{min}:{max}:{step}"),
        }
    }
}

impl ScaleSpec {
    pub fn resolve(&self, max_nodes: usize) -> Vec<usize> {
        match *self {
            ScaleSpec::Auto => auto_scales(max_nodes),
            ScaleSpec::Range { min, max, step } => (min..=max).step_by(step).collect(),
        }
    }
}

impl RunConfig {
    pub fn time(&self) -> f64 {
        self.time
            .unwrap_or(if self.metric == MetricArg::Hodge { 20.0 } else { 1.0 })
    }

    pub fn hodge(&self) -> Option<HodgeParams> {
        (self.metric == MetricArg::Hodge).then(|| HodgeParams {
            k: self.hodge_k,
            time: self.time(),
        })
    }

    /// The node metric; `hodge` has none, and the coarsening config then
    /// carries the default only as a placeholder.
    pub fn graph_metric(&self) -> Option<Metric> {
        let t = self.time();
        match self.metric {
            MetricArg::ShortestPath => Some(Metric::ShortestPath),
            MetricArg::Feature => Some(Metric::Feature),
            MetricArg::Diffusion => Some(Metric::Diffusion { t }),
            MetricArg::HeatKernel => Some(Metric::HeatKernel { t }),
            MetricArg::Hodge => None,
        }
    }

    pub fn require_graph_metric(&self) -> Result<Metric, CliError> {
        self.graph_metric()
            .ok_or_else(|| CliError::Usage("the hodge metric applies to triangulations only".into()))
    }

    pub fn coarsening(&self) -> CoarseningConfig {
        CoarseningConfig {
            metric: self.graph_metric().unwrap_or_default(),
            scorer: match self.scorer {
                ScorerArg::Random => ScorerKind::Random,
                ScorerArg::SpreadExact => ScorerKind::SpreadExact,
                ScorerArg::SpreadApprox => ScorerKind::SpreadApprox,
            },
            repeats: self.repeats,
            seed: self.seed,
        }
    }

    /// Digest of the settings that shape a curve.
    pub fn digest(&self) -> String {
        match self.hodge() {
            Some(h) => h.digest(self.seed),
            None => self.coarsening().digest(),
        }
    }
}

/// `auto`, or a positive thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("threads must be a positive integer or auto, got {s:?}")),
            Ok(n) => Ok(Threads::Count(n)),
        }
    }
}

/// Comma-separated reals.
pub fn parse_degrees(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad degree {t:?}: {e}")))
        })
        .collect()
}
