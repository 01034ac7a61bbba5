//! Pairwise node tables that define the metric space a spread is taken over.
//!
//! Graph-structural metrics (shortest path, diffusion) yield a
//! [`DistanceMatrix`]. The heat-kernel table follows its defining sum
//! verbatim, is not guaranteed to be a metric, and is therefore returned as a
//! [`KernelTable`]; spread accepts both through [`PairTable`].

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Square row-major table of reals.
pub trait PairTable {
    fn size(&self) -> usize;
    fn row(&self, i: usize) -> &[f64];

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i)[j]
    }
}

/// Symmetric, zero-diagonal, non-negative table. `f64::INFINITY` marks
/// pairs in different components.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("distance matrix must be square".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let dm = Self { n, data };
        for i in 0..n {
            if dm.get(i, i) != 0.0 {
                return Err(Error::Validation(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let d = dm.get(i, j);
                if d.is_nan() || d < 0.0 {
                    return Err(Error::Validation(format!("invalid distance {d} at ({i}, {j})")));
                }
                if d != dm.get(j, i) {
                    return Err(Error::Validation(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(dm)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Every entry multiplied by `t` (infinities stay infinite).
    pub fn scaled(&self, t: f64) -> DistanceMatrix {
        let data = self.data.iter().map(|&d| if d == 0.0 { 0.0 } else { d * t }).collect();
        Self { n: self.n, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Row-major CSV with the token `inf` for infinite entries.
    pub fn to_csv(&self) -> String {
        table_csv(self)
    }
}

impl PairTable for DistanceMatrix {
    fn size(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Symmetric table of reals without metric guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    n: usize,
    data: Vec<f64>,
}

impl KernelTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn to_csv(&self) -> String {
        table_csv(self)
    }
}

impl PairTable for KernelTable {
    fn size(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

fn table_csv(t: &impl PairTable) -> String {
    let mut out = String::new();
    for i in 0..t.size() {
        let row: Vec<String> = t.row(i).iter().map(|&v| fmt_real(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip decimal form, `inf` for infinity.
pub fn fmt_real(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".to_string()
    } else {
        format!("{v:?}")
    }
}

/// Node metric selector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    #[default]
    ShortestPath,
    Feature,
    Diffusion {
        t: f64,
    },
    HeatKernel {
        t: f64,
    },
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::ShortestPath => write!(f, "shortest_path"),
            Metric::Feature => write!(f, "feature"),
            Metric::Diffusion { t } => write!(f, "diffusion(t={t:?})"),
            Metric::HeatKernel { t } => write!(f, "heat_kernel(t={t:?})"),
        }
    }
}

impl Metric {
    /// Whether the metric is derived from graph structure alone.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Metric::Feature)
    }

    /// Whether the table is a genuine distance matrix (spread then lies in
    /// `[1, n]`).
    pub fn yields_distances(&self) -> bool {
        !matches!(self, Metric::HeatKernel { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::Diffusion { t } | Metric::HeatKernel { t } if !(t > 0.0 && t.is_finite()) => {
                Err(Error::Config(format!("time parameter must be positive, got {t}")))
            }
            _ => Ok(()),
        }
    }

    pub fn pairwise(&self, g: &Graph) -> Result<Pairwise> {
        self.validate()?;
        Ok(match *self {
            Metric::ShortestPath => Pairwise::Distance(shortest_path_matrix(g)?),
            Metric::Feature => Pairwise::Distance(feature_distance_matrix(g)?),
            Metric::Diffusion { t } => Pairwise::Distance(diffusion_distance_matrix(g, t)?),
            Metric::HeatKernel { t } => Pairwise::Kernel(heat_kernel_table(g, t)?),
        })
    }
}

/// Output of [`Metric::pairwise`].
#[derive(Debug, Clone, PartialEq)]
pub enum Pairwise {
    Distance(DistanceMatrix),
    Kernel(KernelTable),
}

impl PairTable for Pairwise {
    fn size(&self) -> usize {
        match self {
            Pairwise::Distance(d) => d.size(),
            Pairwise::Kernel(k) => k.size(),
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        match self {
            Pairwise::Distance(d) => d.row(i),
            Pairwise::Kernel(k) => k.row(i),
        }
    }
}

impl Pairwise {
    pub fn to_csv(&self) -> String {
        table_csv(self)
    }
}

fn bfs_row(g: &Graph, src: usize) -> Vec<f64> {
    let n = g.n();
    let mut row = vec![f64::INFINITY; n];
    let mut queue = VecDeque::with_capacity(n);
    row[src] = 0.0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let next = row[u] + 1.0;
        for &v in g.neighbors(u) {
            if row[v].is_infinite() {
                row[v] = next;
                queue.push_back(v);
            }
        }
    }
    row
}

const PARALLEL_BFS_MIN_NODES: usize = 128;

/// Hop-count distances via one BFS per source node.
pub fn shortest_path_matrix(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Empty("shortest paths of a graph with no nodes".into()));
    }
    let rows: Vec<Vec<f64>> = if n >= PARALLEL_BFS_MIN_NODES {
        (0..n).into_par_iter().map(|s| bfs_row(g, s)).collect()
    } else {
        (0..n).map(|s| bfs_row(g, s)).collect()
    };
    Ok(DistanceMatrix::from_raw(n, rows.concat()))
}

/// Euclidean distances between node feature rows.
pub fn feature_distance_matrix(g: &Graph) -> Result<DistanceMatrix> {
    let feats = g
        .features()
        .ok_or_else(|| Error::Config("feature metric requested on a graph without features".into()))?;
    let n = g.n();
    if n == 0 {
        return Err(Error::Empty("feature distances of a graph with no nodes".into()));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = feats[i]
                .iter()
                .zip(&feats[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_raw(n, data))
}

/// `D^{-1/2} (D - A) D^{-1/2}`, with zero rows and columns for isolated nodes.
pub fn normalized_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|u| match g.degree(u) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut l = DMatrix::zeros(n, n);
    for u in 0..n {
        if g.degree(u) > 0 {
            l[(u, u)] = 1.0;
        }
        for &v in g.neighbors(u) {
            l[(u, v)] = -inv_sqrt[u] * inv_sqrt[v];
        }
    }
    l
}

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending and
/// eigenvector column `l` paired with eigenvalue `l`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 100_000;

pub fn spectral_decomposition(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Validation("matrix must be square".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Validation(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

/// Diffusion distance at time `t`: Euclidean distances between the rows of
/// `(λ_l^t ψ_l(x))_{l = 1..n-1}`, using the descending spectrum of the
/// normalized Laplacian with index 0 dropped.
pub fn diffusion_distance_matrix(g: &Graph, t: f64) -> Result<DistanceMatrix> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Size(format!("diffusion distance needs n >= 2, got {n}")));
    }
    let spec = spectral_decomposition(&normalized_laplacian(g))?;
    let mut coords = vec![0.0; n * (n - 1)];
    for l in 1..n {
        let lambda = spec.eigenvalues[l];
        if lambda < -NEGATIVE_EIGEN_TOL {
            return Err(Error::Numeric(format!("negative Laplacian eigenvalue {lambda}")));
        }
        let scale = lambda.max(0.0).powf(t);
        for x in 0..n {
            coords[x * (n - 1) + (l - 1)] = scale * spec.eigenvectors[(x, l)];
        }
    }
    let dim = n - 1;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = (0..dim)
                .map(|k| {
                    let diff = coords[i * dim + k] - coords[j * dim + k];
                    diff * diff
                })
                .sum::<f64>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_raw(n, data))
}

/// `entry(i, j) = Σ_l exp(-λ_l t ψ_l(i) ψ_l(j))` over a decomposition.
pub(crate) fn spectral_heat_table(spec: &SpectralDecomposition, t: f64) -> KernelTable {
    let n = spec.eigenvalues.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n)
                .map(|l| {
                    let psi = &spec.eigenvectors;
                    (-spec.eigenvalues[l] * t * psi[(i, l)] * psi[(j, l)]).exp()
                })
                .sum();
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    KernelTable { n, data }
}

/// Heat-kernel table on the normalized Laplacian, evaluated exactly as its
/// defining sum (the diagonal is not forced to zero).
pub fn heat_kernel_table(g: &Graph, t: f64) -> Result<KernelTable> {
    if g.n() == 0 {
        return Err(Error::Empty("heat kernel of a graph with no nodes".into()));
    }
    let spec = spectral_decomposition(&normalized_laplacian(g))?;
    Ok(spectral_heat_table(&spec, t))
}
