//! Random graph generators and edge perturbations.

use log::warn;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::spearman;
use crate::diversity::{compensated_sum, derive_task_seed, diversity_curve, short_digest, stream, CoarseningConfig};
use crate::error::{Error, Result};
use crate::graph::{component_count, Dataset, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum GraphModel {
    /// Each pair independently with probability `p`.
    Er { p: f64 },
    /// Near-equal communities with intra/inter probabilities.
    Rp {
        #[serde(default = "three")]
        communities: usize,
        p_in: f64,
        p_out: f64,
    },
    /// Uniform points in the unit square joined when within distance `r`.
    Rg {
        r: f64,
        #[serde(default)]
        keep_positions: bool,
    },
    Sbm {
        #[serde(default = "four")]
        communities: usize,
        p_in: f64,
        p_out: f64,
    },
}

fn three() -> usize {
    3
}

fn four() -> usize {
    4
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Validation(format!("params.{name} must be in [0, 1], got {p}")))
    }
}

impl GraphModel {
    pub fn er_default() -> Self {
        GraphModel::Er { p: 0.75 }
    }

    pub fn rp_default() -> Self {
        GraphModel::Rp {
            communities: 3,
            p_in: 0.9,
            p_out: 0.1,
        }
    }

    pub fn rg_default() -> Self {
        GraphModel::Rg {
            r: 0.25,
            keep_positions: false,
        }
    }

    pub fn sbm_default() -> Self {
        GraphModel::Sbm {
            communities: 4,
            p_in: 0.8,
            p_out: 0.05,
        }
    }

    /// Default class id of the model family.
    pub fn class_id(&self) -> i64 {
        match self {
            GraphModel::Er { .. } => 0,
            GraphModel::Rp { .. } => 1,
            GraphModel::Rg { .. } => 2,
            GraphModel::Sbm { .. } => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphModel::Er { p } => check_probability("p", p),
            GraphModel::Rp {
                communities,
                p_in,
                p_out,
            }
            | GraphModel::Sbm {
                communities,
                p_in,
                p_out,
            } => {
                check_probability("p_in", p_in)?;
                check_probability("p_out", p_out)?;
                if communities == 0 {
                    return Err(Error::Validation("params.communities must be >= 1".into()));
                }
                Ok(())
            }
            GraphModel::Rg { r, .. } => {
                if r > 0.0 && r.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("params.r must be positive, got {r}")))
                }
            }
        }
    }
}

/// Sizes of `k` near-equal blocks of `n`; the first `n mod k` get one extra.
pub fn near_equal_partition(n: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::Validation(format!(
            "cannot split {n} nodes into {k} communities"
        )));
    }
    Ok((0..k).map(|i| n / k + usize::from(i < n % k)).collect())
}

fn block_graph<R: Rng + ?Sized>(n: usize, sizes: &[usize], p_in: f64, p_out: f64, rng: &mut R) -> Result<Graph> {
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Draw one graph. Pairs are visited in lexicographic order with one uniform
/// draw each; geometric graphs first draw all `n` points as `(x, y)`.
pub fn generate_graph<R: Rng + ?Sized>(model: &GraphModel, n: usize, rng: &mut R) -> Result<Graph> {
    model.validate()?;
    if n == 0 {
        return Err(Error::Validation("graphs need at least one node".into()));
    }
    let g = match *model {
        GraphModel::Er { p } => block_graph(n, &[n], p, p, rng)?,
        GraphModel::Rp {
            communities,
            p_in,
            p_out,
        }
        | GraphModel::Sbm {
            communities,
            p_in,
            p_out,
        } => block_graph(n, &near_equal_partition(n, communities)?, p_in, p_out, rng)?,
        GraphModel::Rg { r, keep_positions } => {
            let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let (dx, dy) = (pts[u][0] - pts[v][0], pts[u][1] - pts[v][1]);
                    if (dx * dx + dy * dy).sqrt() <= r {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges)?;
            if keep_positions {
                g.with_features(pts.iter().map(|p| p.to_vec()).collect())?
            } else {
                g
            }
        }
    };
    Ok(g.with_label(Some(model.class_id())))
}

/// Dataset recipe: `per_size` graphs for every size in `n_range`
/// (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(flatten)]
    pub model: GraphModel,
    pub n_range: [usize; 2],
    pub per_size: usize,
    pub seed: u64,
    /// Overrides the model's class id.
    #[serde(default)]
    pub label: Option<i64>,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let [lo, hi] = self.n_range;
        if lo == 0 || lo > hi {
            return Err(Error::Validation(format!(
                "n_range must satisfy 1 <= min <= max, got [{lo}, {hi}]"
            )));
        }
        if self.per_size == 0 {
            return Err(Error::Validation("per_size must be >= 1".into()));
        }
        if let GraphModel::Rp { communities, .. } | GraphModel::Sbm { communities, .. } = self.model {
            near_equal_partition(lo, communities)?;
        }
        Ok(())
    }

    /// Short digest of the canonical JSON form.
    pub fn digest(&self) -> Result<String> {
        Ok(short_digest(&serde_json::to_string(self)?))
    }

    /// Graph `j` of size `n` draws from the stream `(seed, n, j)`.
    pub fn generate(&self, name: &str) -> Result<Dataset> {
        self.validate()?;
        let cells: Vec<(usize, usize)> = (self.n_range[0]..=self.n_range[1])
            .flat_map(|n| (0..self.per_size).map(move |j| (n, j)))
            .collect();
        let graphs = cells
            .par_iter()
            .map(|&(n, j)| {
                let mut rng = stream(derive_task_seed(self.seed, n as u64, j as u64));
                let g = generate_graph(&self.model, n, &mut rng)?;
                Ok(match self.label {
                    Some(l) => g.with_label(Some(l)),
                    None => g,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(name, graphs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    AddEdge,
    RemoveEdge,
    RewireEdge,
    SwapEdge,
}

impl std::fmt::Display for PerturbationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PerturbationKind::AddEdge => "add_edge",
            PerturbationKind::RemoveEdge => "remove_edge",
            PerturbationKind::RewireEdge => "rewire_edge",
            PerturbationKind::SwapEdge => "swap_edge",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationScenario {
    pub kind: PerturbationKind,
    pub degree: f64,
}

/// Retries per swap before it is skipped.
pub const SWAP_RETRIES: usize = 100;

/// Bridges of `g` as `(u, v)` with `u < v`, sorted.
pub fn bridges(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = Vec::new();
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (node, parent, next neighbour position)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (u, parent, ref mut pos)) = stack.last_mut() {
            if let Some(&w) = g.neighbors(u).get(*pos) {
                *pos += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, u, 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        out.push((parent.min(u), parent.max(u)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn non_bridges(g: &Graph) -> Vec<(usize, usize)> {
    let b = bridges(g);
    g.edges().filter(|e| b.binary_search(e).is_err()).collect()
}

fn non_edges(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect()
}

fn edit_count(degree: f64, pool: usize) -> usize {
    (degree * pool as f64).floor() as usize
}

/// Apply a perturbation scenario; edits are sequential, each seeing the
/// result of the previous one. Edit counts are `⌊p · pool⌋` where the pool
/// is the non-edges (add), the cycle rank `m - n + c` (remove), the edges
/// (rewire) and half the edges (swap).
pub fn perturb<R: Rng + ?Sized>(g: &Graph, scenario: &PerturbationScenario, rng: &mut R) -> Result<Graph> {
    let p = scenario.degree;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range(format!("perturbation degree must be in [0, 1], got {p}")));
    }
    let mut out = g.clone();
    match scenario.kind {
        PerturbationKind::AddEdge => {
            let pool = non_edges(g);
            let k = edit_count(p, pool.len());
            for i in index::sample(rng, pool.len(), k) {
                let (u, v) = pool[i];
                out.insert_edge(u, v);
            }
        }
        PerturbationKind::RemoveEdge => {
            // Each removal of a non-bridge lowers the cycle rank by one, so
            // the cycle rank is the number of removals that keep components.
            let removable = g.m() + component_count(g) - g.n();
            if removable == 0 && p > 0.0 {
                warn!("remove_edge: graph is a forest, nothing to remove");
            }
            for _ in 0..edit_count(p, removable) {
                let pool = non_bridges(&out);
                let (u, v) = pool[rng.gen_range(0..pool.len())];
                out.delete_edge(u, v);
            }
        }
        PerturbationKind::RewireEdge => {
            let edges = g.edge_vec();
            let k = edit_count(p, edges.len());
            for i in index::sample(rng, edges.len(), k) {
                let (a, b) = edges[i];
                let (keep, drop) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
                let targets: Vec<usize> = (0..out.n()).filter(|&w| w != keep && !out.has_edge(keep, w)).collect();
                if targets.is_empty() {
                    warn!("rewire_edge: vertex {keep} is adjacent to every other vertex, edge kept");
                    continue;
                }
                let w = targets[rng.gen_range(0..targets.len())];
                out.delete_edge(keep, drop);
                out.insert_edge(keep, w);
            }
        }
        PerturbationKind::SwapEdge => {
            let k = edit_count(p / 2.0, g.m());
            for _ in 0..k {
                let edges = out.edge_vec();
                let mut done = false;
                for _ in 0..SWAP_RETRIES {
                    if edges.len() < 2 {
                        break;
                    }
                    let pick = index::sample(rng, edges.len(), 2);
                    let (e1, e2) = (edges[pick.index(0)], edges[pick.index(1)]);
                    let (v0, v1) = if rng.gen::<bool>() { e1 } else { (e1.1, e1.0) };
                    let (v2, v3) = if rng.gen::<bool>() { e2 } else { (e2.1, e2.0) };
                    let distinct = v0 != v2 && v0 != v3 && v1 != v2 && v1 != v3;
                    if distinct && !out.has_edge(v0, v2) && !out.has_edge(v1, v3) {
                        out.delete_edge(v0, v1);
                        out.delete_edge(v2, v3);
                        out.insert_edge(v0, v2);
                        out.insert_edge(v1, v3);
                        done = true;
                        break;
                    }
                }
                if !done {
                    warn!("swap_edge: no valid swap after {SWAP_RETRIES} attempts, skipped");
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: PerturbationKind,
    pub degrees: Vec<f64>,
    pub mean_norms: Vec<f64>,
    pub rho: f64,
}

impl SweepResult {
    /// CSV with header `scenario,degree,mean_norm`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scenario,degree,mean_norm\n");
        for (d, m) in self.degrees.iter().zip(&self.mean_norms) {
            s.push_str(&format!("{},{d:?},{m:?}\n", self.scenario));
        }
        s
    }
}

/// For each degree, perturb every graph, compute its curve and record the
/// mean L2 norm; report the Spearman correlation of degree against norm.
/// Graph `i` uses the same perturbation stream at every degree.
pub fn perturbation_sweep(
    dataset: &Dataset,
    kind: PerturbationKind,
    degrees: &[f64],
    config: &CoarseningConfig,
    scales: &[usize],
    seed: u64,
) -> Result<SweepResult> {
    if degrees.is_empty() {
        return Err(Error::Empty("no perturbation degrees".into()));
    }
    if degrees.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation("degrees must be ascending".into()));
    }
    if dataset.is_empty() {
        return Err(Error::Empty("empty dataset".into()));
    }
    let mut mean_norms = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let scenario = PerturbationScenario { kind, degree };
        let norms = dataset
            .graphs
            .par_iter()
            .enumerate()
            .map(|(i, g)| {
                let mut rng = stream(derive_task_seed(seed, i as u64, 0x5eed));
                let h = perturb(g, &scenario, &mut rng)?;
                Ok(diversity_curve(&h, scales, config, i as u64)?.l2_norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        mean_norms.push(compensated_sum(norms.iter().copied()) / norms.len() as f64);
    }
    let rho = spearman(degrees, &mean_norms)?;
    Ok(SweepResult {
        scenario: kind,
        degrees: degrees.to_vec(),
        mean_norms,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn er_extremes() {
        let g = generate_graph(&GraphModel::Er { p: 0.0 }, 7, &mut rng(0)).unwrap();
        assert_eq!(g.m(), 0);
        let g = generate_graph(&GraphModel::Er { p: 1.0 }, 7, &mut rng(0)).unwrap();
        assert_eq!(g.m(), 21);
        assert_eq!(g.label(), Some(0));
    }

    #[test]
    fn er_edge_count_moments() {
        let mut r = rng(11);
        let trials = 200;
        let counts: Vec<f64> = (0..trials)
            .map(|_| generate_graph(&GraphModel::er_default(), 20, &mut r).unwrap().m() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let pairs = 190.0;
        let sigma = (pairs * 0.75 * 0.25 / trials as f64).sqrt();
        assert!((mean - 0.75 * pairs).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn generators_deterministic_and_labelled() {
        for (c, m) in [
            GraphModel::er_default(),
            GraphModel::rp_default(),
            GraphModel::rg_default(),
            GraphModel::sbm_default(),
        ]
        .iter()
        .enumerate()
        {
            let a = generate_graph(m, 15, &mut rng(5)).unwrap();
            let b = generate_graph(m, 15, &mut rng(5)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.label(), Some(c as i64));
        }
    }

    #[test]
    fn block_structure_shows() {
        // p_out = 0: no edges across communities
        let m = GraphModel::Sbm {
            communities: 4,
            p_in: 1.0,
            p_out: 0.0,
        };
        let g = generate_graph(&m, 10, &mut rng(0)).unwrap();
        assert_eq!(component_count(&g), 4);
        assert_eq!(g.m(), 3 + 3 + 1 + 1);
        assert_eq!(near_equal_partition(10, 4).unwrap(), vec![3, 3, 2, 2]);
        assert!(generate_graph(&m, 3, &mut rng(0)).is_err());
    }

    #[test]
    fn rg_positions_kept_on_request() {
        let m = GraphModel::Rg {
            r: 2.0,
            keep_positions: true,
        };
        let g = generate_graph(&m, 5, &mut rng(1)).unwrap();
        assert_eq!(g.m(), 10);
        assert_eq!(g.feature_dim(), Some(2));
        assert!(generate_graph(
            &GraphModel::Rg {
                r: 0.0,
                keep_positions: false
            },
            5,
            &mut rng(1)
        )
        .is_err());
    }

    #[test]
    fn invalid_probability_names_field() {
        let err = generate_graph(&GraphModel::Er { p: 1.5 }, 5, &mut rng(0)).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("params.p")));
    }

    #[test]
    fn manifest_json_shape() {
        let text = r#"{"model":"er","params":{"p":0.75},"n_range":[10,29],"per_size":3,"seed":7}"#;
        let m: Manifest = serde_json::from_str(text).unwrap();
        let ds = m.generate("er").unwrap();
        assert_eq!(ds.len(), 60);
        assert_eq!(ds, m.generate("er").unwrap());
        let rp: Manifest = serde_json::from_str(
            r#"{"model":"rp","params":{"p_in":0.9,"p_out":0.1},"n_range":[10,10],"per_size":1,"seed":0}"#,
        )
        .unwrap();
        assert_eq!(rp.model, GraphModel::rp_default());
    }

    #[test]
    fn bridges_examples() {
        assert_eq!(bridges(&named::path(4)), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(bridges(&named::cycle(5)).is_empty());
        // triangle with a pendant
        let g = Graph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert_eq!(bridges(&g), vec![(2, 3)]);
        assert_eq!(bridges(&named::two_triangles()), vec![]);
    }

    #[test]
    fn zero_degree_is_identity() {
        let g = named::hexagon_crossing_chords();
        for kind in [
            PerturbationKind::AddEdge,
            PerturbationKind::RemoveEdge,
            PerturbationKind::RewireEdge,
            PerturbationKind::SwapEdge,
        ] {
            let h = perturb(&g, &PerturbationScenario { kind, degree: 0.0 }, &mut rng(0)).unwrap();
            assert_eq!(h, g);
        }
        let bad = PerturbationScenario {
            kind: PerturbationKind::AddEdge,
            degree: 1.5,
        };
        assert!(matches!(perturb(&g, &bad, &mut rng(0)), Err(Error::Range(_))));
    }

    #[test]
    fn add_edge_counts() {
        let g = named::cycle(7);
        let h = perturb(
            &g,
            &PerturbationScenario {
                kind: PerturbationKind::AddEdge,
                degree: 1.0,
            },
            &mut rng(0),
        )
        .unwrap();
        assert_eq!(h.m(), 21);
        let h = perturb(
            &g,
            &PerturbationScenario {
                kind: PerturbationKind::AddEdge,
                degree: 0.5,
            },
            &mut rng(0),
        )
        .unwrap();
        assert_eq!(h.m(), 7 + 7);
    }

    #[test]
    fn remove_edge_keeps_components() {
        let g = named::complete(6).disjoint_union(&named::cycle(4));
        let h = perturb(
            &g,
            &PerturbationScenario {
                kind: PerturbationKind::RemoveEdge,
                degree: 1.0,
            },
            &mut rng(3),
        )
        .unwrap();
        assert_eq!(component_count(&h), 2);
        // a spanning forest remains
        assert_eq!(h.m(), 10 - 2);
        let k4 = named::complete(4);
        let half = perturb(
            &k4,
            &PerturbationScenario {
                kind: PerturbationKind::RemoveEdge,
                degree: 0.5,
            },
            &mut rng(1),
        )
        .unwrap();
        assert_eq!(half.m(), 5);
        let t = named::star(5);
        let h = perturb(
            &t,
            &PerturbationScenario {
                kind: PerturbationKind::RemoveEdge,
                degree: 1.0,
            },
            &mut rng(3),
        )
        .unwrap();
        assert_eq!(h, t);
    }

    #[test]
    fn rewire_and_swap_preserve_edge_count() {
        let g = generate_graph(&GraphModel::Er { p: 0.3 }, 20, &mut rng(8)).unwrap();
        for kind in [PerturbationKind::RewireEdge, PerturbationKind::SwapEdge] {
            let h = perturb(&g, &PerturbationScenario { kind, degree: 0.6 }, &mut rng(9)).unwrap();
            assert_eq!(h.m(), g.m());
            assert_ne!(h, g);
        }
        // swaps preserve degrees
        let h = perturb(
            &g,
            &PerturbationScenario {
                kind: PerturbationKind::SwapEdge,
                degree: 1.0,
            },
            &mut rng(2),
        )
        .unwrap();
        for u in 0..g.n() {
            assert_eq!(g.degree(u), h.degree(u));
        }
    }

    #[test]
    fn sweep_singleton_degree_is_undefined() {
        let ds = Dataset::new("x", vec![named::cycle(5)]).unwrap();
        let r = perturbation_sweep(
            &ds,
            PerturbationKind::AddEdge,
            &[0.0],
            &CoarseningConfig::default(),
            &[1, 2, 3, 4, 5],
            0,
        );
        assert!(matches!(r, Err(Error::UndefinedCorrelation(_))));
    }
}
