//! Spread of a finite metric space and diversity curves built from it.
//!
//! `spread(d) = Σ_x 1 / Σ_y exp(-d(x, y))`, with `exp(-∞) = 0`. A diversity
//! curve evaluates the spread of a graph coarsened (or upsampled) to each
//! cardinality of an ascending scale set, averaged over seeded repeats.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coarsen::{coarsen_sequence, one_edge_contractions, upsample_node_sequence, EdgeScorer, ScorerKind};
use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::metrics::{DistanceMatrix, Metric, PairTable};
use crate::simplicial::Triangulation;

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Spread of an `n x n` table given by `entry`.
pub(crate) fn spread_with(n: usize, entry: impl Fn(usize, usize) -> f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Empty("spread of an empty table".into()));
    }
    let mut terms = Vec::with_capacity(n);
    for x in 0..n {
        let denom = compensated_sum((0..n).map(|y| (-entry(x, y)).exp()));
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(Error::Numeric(format!(
                "row {x} has non-positive or non-finite denominator {denom}"
            )));
        }
        terms.push(1.0 / denom);
    }
    Ok(compensated_sum(terms))
}

pub fn spread<T: PairTable + ?Sized>(table: &T) -> Result<f64> {
    spread_with(table.size(), |i, j| table.entry(i, j))
}

/// Spread of a graph under `metric`.
pub fn graph_spread(g: &Graph, metric: &Metric) -> Result<f64> {
    if g.n() == 0 {
        return Err(Error::Empty("spread of a graph with no nodes".into()));
    }
    spread(&metric.pairwise(g)?)
}

/// Spread of `t · d` for each `t`.
pub fn spread_function(d: &DistanceMatrix, ts: &[f64]) -> Result<Vec<f64>> {
    if ts.is_empty() {
        return Err(Error::Empty("no scale factors given".into()));
    }
    ts.iter()
        .map(|&t| {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Range(format!("scale factor must be positive, got {t}")));
            }
            if t == 1.0 {
                spread(d)
            } else {
                spread(&d.scaled(t))
            }
        })
        .collect()
}

/// 20 evenly spaced factors on `[1, 5]`.
pub fn default_spread_grid() -> Vec<f64> {
    (0..20).map(|i| 1.0 + 4.0 * i as f64 / 19.0).collect()
}

/// Coarsening and evaluation settings for diversity curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseningConfig {
    pub metric: Metric,
    pub scorer: ScorerKind,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CoarseningConfig {
    fn default() -> Self {
        Self {
            metric: Metric::ShortestPath,
            scorer: ScorerKind::Random,
            repeats: 3,
            seed: 0,
        }
    }
}

impl CoarseningConfig {
    pub fn edge_scorer(&self) -> Result<EdgeScorer> {
        if self.scorer == ScorerKind::Random {
            self.metric.validate()?;
            return Ok(EdgeScorer {
                metric: self.metric,
                ..EdgeScorer::random()
            });
        }
        EdgeScorer::new(self.scorer, self.metric)
    }

    /// Short hex digest of `(metric, scorer, seed)`.
    pub fn digest(&self) -> String {
        short_digest(&format!(
            "metric={};scorer={};seed={}",
            self.metric, self.scorer, self.seed
        ))
    }
}

/// First 8 bytes of the SHA-256 of `text`, as 16 hex characters.
pub fn short_digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Up,
    Down,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream for `(graph, repeat, phase)`:
/// `h = splitmix64(base); h = splitmix64(h ^ graph); h = splitmix64(h ^ repeat); h = splitmix64(h ^ tag)`
/// with tag 1 for upsampling and 2 for coarsening.
pub fn derive_seed(base: u64, graph: u64, repeat: u64, phase: Phase) -> u64 {
    let tag = match phase {
        Phase::Up => 1,
        Phase::Down => 2,
    };
    let h = splitmix64(base);
    let h = splitmix64(h ^ graph);
    let h = splitmix64(h ^ repeat);
    splitmix64(h ^ tag)
}

/// Generic two-level seed derivation for other per-task streams.
pub fn derive_task_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ a) ^ b)
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityCurve {
    pub scales: Vec<usize>,
    pub values: Vec<f64>,
    pub repeats: usize,
    pub config_digest: String,
}

impl DiversityCurve {
    pub fn value_at(&self, scale: usize) -> Option<f64> {
        self.scales.binary_search(&scale).ok().map(|i| self.values[i])
    }

    pub fn l2_norm(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v * v)).sqrt()
    }
}

/// Scales must be strictly ascending and start at 1 or above.
pub fn validate_scales(scales: &[usize]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::Empty("no evaluation scales".into()));
    }
    if scales[0] == 0 {
        return Err(Error::Range("scales must be >= 1".into()));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("scales must be strictly ascending".into()));
    }
    Ok(())
}

/// `1..=max_nodes`.
pub fn auto_scales(max_nodes: usize) -> Vec<usize> {
    (1..=max_nodes.max(1)).collect()
}

fn check_metric_applicable(g: &Graph, metric: &Metric) -> Result<()> {
    if *metric == Metric::Feature && g.features().is_none() {
        return Err(Error::Config("feature metric on a graph without features".into()));
    }
    metric.validate()
}

fn level_spread(g: &Graph, metric: &Metric) -> Result<f64> {
    if g.n() == 1 {
        return Ok(1.0);
    }
    graph_spread(g, metric)
}

/// One repeat of the curve computation: upsample through the scales above
/// `n`, coarsen through the scales at or below `n`, and fill scales below
/// the number of components by linear interpolation between `(1, 1)` and
/// the lowest cardinality reached.
pub fn single_repeat_curve(
    g: &Graph,
    scales: &[usize],
    config: &CoarseningConfig,
    graph_index: u64,
    repeat: u64,
) -> Result<DiversityCurve> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Empty("diversity curve of a graph with no nodes".into()));
    }
    validate_scales(scales)?;
    check_metric_applicable(g, &config.metric)?;
    let scorer = config.edge_scorer()?;

    let mut values = vec![f64::NAN; scales.len()];
    let split = scales.partition_point(|&s| s <= n);

    let up: Vec<usize> = scales[split..].to_vec();
    if !up.is_empty() {
        let mut rng = stream(derive_seed(config.seed, graph_index, repeat, Phase::Up));
        let levels = upsample_node_sequence(g, &up, &mut rng)?;
        for (k, (target, graph)) in levels.into_iter().enumerate() {
            if graph.n() != target {
                return Err(Error::Numeric(format!(
                    "upsampling produced {} nodes for scale {target}",
                    graph.n()
                )));
            }
            values[split + k] = level_spread(&graph, &config.metric)?;
        }
    }

    let down: Vec<usize> = scales[..split].to_vec();
    if !down.is_empty() {
        let mut rng = stream(derive_seed(config.seed, graph_index, repeat, Phase::Down));
        let levels = coarsen_sequence(g, &down, &scorer, &mut rng)?;
        let mut floor: Option<(usize, f64)> = None;
        let mut unreached = Vec::new();
        for level in &levels {
            let pos = scales.binary_search(&level.target).expect("scale present");
            if level.reached {
                values[pos] = level_spread(&level.graph, &config.metric)?;
            } else {
                if floor.is_none() {
                    floor = Some((level.graph.n(), level_spread(&level.graph, &config.metric)?));
                }
                unreached.push(pos);
            }
        }
        if let Some((i_min, v_min)) = floor {
            for pos in unreached {
                let i = scales[pos] as f64;
                values[pos] = 1.0 + (v_min - 1.0) * (i - 1.0) / (i_min as f64 - 1.0);
            }
        }
    }

    if scales[0] == 1 {
        values[0] = 1.0;
    }
    Ok(DiversityCurve {
        scales: scales.to_vec(),
        values,
        repeats: 1,
        config_digest: config.digest(),
    })
}

/// Diversity curve averaged over `config.repeats` seeded repeats.
pub fn diversity_curve(
    g: &Graph,
    scales: &[usize],
    config: &CoarseningConfig,
    graph_index: u64,
) -> Result<DiversityCurve> {
    if config.repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    let runs = (0..config.repeats as u64)
        .map(|r| single_repeat_curve(g, scales, config, graph_index, r))
        .collect::<Result<Vec<_>>>()?;
    average_curves(&runs)
}

/// Pointwise mean of curves sharing the same scales.
pub fn average_curves(curves: &[DiversityCurve]) -> Result<DiversityCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Empty("no curves to average".into()))?;
    if let Some(c) = curves.iter().find(|c| c.scales != first.scales) {
        return Err(Error::Validation(format!(
            "scale mismatch: {:?} vs {:?}",
            first.scales, c.scales
        )));
    }
    let k = curves.len() as f64;
    let values = (0..first.scales.len())
        .map(|i| compensated_sum(curves.iter().map(|c| c.values[i])) / k)
        .collect();
    let digest = if curves.iter().all(|c| c.config_digest == first.config_digest) {
        first.config_digest.clone()
    } else {
        String::from("mixed")
    };
    Ok(DiversityCurve {
        scales: first.scales.clone(),
        values,
        repeats: curves.iter().map(|c| c.repeats).sum(),
        config_digest: digest,
    })
}

/// Largest graph for exhaustive one-edge enumeration.
pub const EXHAUSTIVE_SIZE_LIMIT: usize = 12;

/// Spreads of every one-edge contraction of `g`, in edge order.
pub fn exhaustive_one_edge_spreads(g: &Graph, metric: &Metric) -> Result<Vec<f64>> {
    if g.n() > EXHAUSTIVE_SIZE_LIMIT {
        return Err(Error::Size(format!(
            "exhaustive enumeration limited to n <= {EXHAUSTIVE_SIZE_LIMIT}, got {}",
            g.n()
        )));
    }
    check_metric_applicable(g, metric)?;
    one_edge_contractions(g)?
        .iter()
        .map(|h| level_spread(h, metric))
        .collect()
}

/// Curve at scales drawn from `{1, n - 1, n}` where the value at `n - 1` is
/// the mean spread over all one-edge contractions.
pub fn exhaustive_one_edge_curve(g: &Graph, scales: &[usize], metric: &Metric) -> Result<DiversityCurve> {
    validate_scales(scales)?;
    let n = g.n();
    if n == 0 {
        return Err(Error::Empty("diversity curve of a graph with no nodes".into()));
    }
    let mut values = Vec::with_capacity(scales.len());
    let mut one_edge_mean = None;
    for &s in scales {
        let v = if s == 1 {
            1.0
        } else if s == n {
            level_spread(g, metric)?
        } else if s + 1 == n {
            if one_edge_mean.is_none() {
                let spreads = exhaustive_one_edge_spreads(g, metric)?;
                if spreads.is_empty() {
                    return Err(Error::Validation("graph has no edge to contract".into()));
                }
                one_edge_mean = Some(compensated_sum(spreads.iter().copied()) / spreads.len() as f64);
            }
            one_edge_mean.expect("computed")
        } else {
            return Err(Error::Validation(format!(
                "exhaustive mode covers scales 1, n-1 and n only (n = {n}, got {s})"
            )));
        };
        values.push(v);
    }
    Ok(DiversityCurve {
        scales: scales.to_vec(),
        values,
        repeats: 1,
        config_digest: format!("exhaustive:{metric}"),
    })
}

/// Hodge heat table parameters for curves over triangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HodgeParams {
    pub k: usize,
    pub time: f64,
}

impl HodgeParams {
    pub fn digest(&self, seed: u64) -> String {
        short_digest(&format!("metric=hodge(k={},t={:?});seed={seed}", self.k, self.time))
    }
}

impl Default for HodgeParams {
    fn default() -> Self {
        Self { k: 2, time: 20.0 }
    }
}

/// Curve of a triangulation. Scales above `n` are reached by triangular
/// upsampling; scales at or below `n` by contracting edges of the 1-skeleton.
/// With `hodge` set, spread is taken over the Hodge heat table between
/// `k`-simplices, which needs a complex at every scale, so scales below `n`
/// are rejected; otherwise the configured graph metric is applied to the
/// 1-skeleton.
pub fn triangulation_curve(
    t: &Triangulation,
    scales: &[usize],
    config: &CoarseningConfig,
    hodge: Option<HodgeParams>,
    graph_index: u64,
) -> Result<DiversityCurve> {
    validate_scales(scales)?;
    if config.repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    let n = t.n();
    if n == 0 {
        return Err(Error::Empty("triangulation with no vertices".into()));
    }
    let eval = |c: &Triangulation| -> Result<f64> {
        match hodge {
            Some(h) => spread(&c.hodge_heat_table(h.k, h.time)?),
            None => level_spread(&c.one_skeleton(), &config.metric),
        }
    };
    let split = scales.partition_point(|&s| s <= n);
    if hodge.is_some() && split > 0 && scales[0] < n {
        return Err(Error::Range(format!(
            "Hodge curves need scales >= the vertex count {n}, got {}",
            scales[0]
        )));
    }
    let skeleton = t.one_skeleton();
    let runs = (0..config.repeats as u64)
        .map(|r| {
            let mut values = if split == 0 {
                Vec::new()
            } else if hodge.is_some() {
                vec![eval(t)?]
            } else {
                single_repeat_curve(&skeleton, &scales[..split], config, graph_index, r)?.values
            };
            if split < scales.len() {
                let mut rng = stream(derive_seed(config.seed, graph_index, r, Phase::Up));
                for c in t.triangular_upsample_sequence(&scales[split..], &mut rng)? {
                    values.push(eval(&c)?);
                }
            }
            Ok(DiversityCurve {
                scales: scales.to_vec(),
                values,
                repeats: 1,
                config_digest: config.digest(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curve = average_curves(&runs)?;
    if let Some(h) = hodge {
        curve.config_digest = h.digest(config.seed);
    }
    Ok(curve)
}

/// Curves for a whole dataset, aligned with it and sharing one scale set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub curves: Vec<DiversityCurve>,
}

impl CurveSet {
    pub fn new(curves: Vec<DiversityCurve>) -> Result<Self> {
        if let Some(first) = curves.first() {
            if curves.iter().any(|c| c.scales != first.scales) {
                return Err(Error::Validation("curves in a set must share scales".into()));
            }
        }
        Ok(Self { curves })
    }

    pub fn scales(&self) -> &[usize] {
        self.curves.first().map_or(&[], |c| &c.scales)
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Curve of graph `i` uses index `i` for its seed streams, so results do
    /// not depend on scheduling.
    pub fn compute(dataset: &Dataset, scales: &[usize], config: &CoarseningConfig) -> Result<Self> {
        let curves = dataset
            .graphs
            .par_iter()
            .enumerate()
            .map(|(i, g)| diversity_curve(g, scales, config, i as u64))
            .collect::<Result<Vec<_>>>()?;
        Self::new(curves)
    }

    /// CSV with header `graph_id,scale,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph_id,scale,value\n");
        for (i, c) in self.curves.iter().enumerate() {
            for (s, v) in c.scales.iter().zip(&c.values) {
                out.push_str(&format!("{i},{s},{}\n", crate::metrics::fmt_real(*v)));
            }
        }
        out
    }

    /// One JSON object per curve.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for c in &self.curves {
            out.push_str(&serde_json::to_string(c)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let curves = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|(i, l)| {
                serde_json::from_str::<DiversityCurve>(l).map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for c in &curves {
            validate_scales(&c.scales)?;
            if c.values.len() != c.scales.len() {
                return Err(Error::Validation("curve has mismatched scales and values".into()));
            }
        }
        Self::new(curves)
    }

    /// Inverse of [`CurveSet::to_csv`]; lines starting with `#` are skipped.
    pub fn from_csv(text: &str, config_digest: &str) -> Result<Self> {
        let mut rows: Vec<(usize, usize, f64)> = Vec::new();
        let mut header_seen = false;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                if line != "graph_id,scale,value" {
                    return Err(Error::Parse {
                        line: ln + 1,
                        msg: format!("expected header graph_id,scale,value, got {line:?}"),
                    });
                }
                header_seen = true;
                continue;
            }
            let toks: Vec<&str> = line.split(',').collect();
            let bad = |msg: String| Error::Parse { line: ln + 1, msg };
            if toks.len() != 3 {
                return Err(bad(format!("expected 3 columns, got {line:?}")));
            }
            let g = toks[0].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let s = toks[1].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let v = toks[2].parse::<f64>().map_err(|e| bad(e.to_string()))?;
            rows.push((g, s, v));
        }
        let count = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
        let mut curves: Vec<DiversityCurve> = (0..count)
            .map(|_| DiversityCurve {
                scales: Vec::new(),
                values: Vec::new(),
                repeats: 0,
                config_digest: config_digest.to_string(),
            })
            .collect();
        for (g, s, v) in rows {
            curves[g].scales.push(s);
            curves[g].values.push(v);
        }
        for c in &curves {
            validate_scales(&c.scales)?;
        }
        Self::new(curves)
    }
}
