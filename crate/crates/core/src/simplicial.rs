//! Two-dimensional simplicial complexes given by their triangles: boundary
//! operators, Hodge Laplacians, Hodge heat tables, and subdivision schemes.
//!
//! Simplices are stored with ascending vertex order; boundary signs follow
//! the alternating-sum convention `∂[a,b,c] = [b,c] - [a,c] + [a,b]`.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{spectral_decomposition, spectral_heat_table, KernelTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    n: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
}

fn sorted3(t: [usize; 3]) -> [usize; 3] {
    let mut t = t;
    t.sort_unstable();
    t
}

impl Triangulation {
    pub fn new(n: usize, triangles: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for t in triangles {
            let s = sorted3(t);
            if s[2] >= n {
                return Err(Error::Range(format!("triangle {t:?} has a vertex outside [0, {n})")));
            }
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::Validation(format!("triangle {t:?} repeats a vertex")));
            }
            if !set.insert(s) {
                return Err(Error::Validation(format!("duplicate triangle {t:?}")));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, triangles: Vec<[usize; 3]>) -> Self {
        let edges: BTreeSet<[usize; 2]> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [a, c], [b, c]])
            .collect();
        Self {
            n,
            triangles,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.n as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        match k {
            0 => self.n,
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    /// Signed incidence matrix `B_k` of shape `|C_{k-1}| x |C_k|` for
    /// `k ∈ {1, 2}`; other `k` give the zero map of the right shape.
    pub fn boundary(&self, k: usize) -> DMatrix<i64> {
        match k {
            1 => {
                let mut b = DMatrix::zeros(self.n, self.edges.len());
                for (j, &[a, c]) in self.edges.iter().enumerate() {
                    b[(a, j)] = -1;
                    b[(c, j)] = 1;
                }
                b
            }
            2 => {
                let index: HashMap<[usize; 2], usize> = self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
                let mut b = DMatrix::zeros(self.edges.len(), self.triangles.len());
                for (j, &[a, bb, c]) in self.triangles.iter().enumerate() {
                    b[(index[&[bb, c]], j)] = 1;
                    b[(index[&[a, c]], j)] = -1;
                    b[(index[&[a, bb]], j)] = 1;
                }
                b
            }
            0 => DMatrix::zeros(0, self.n),
            _ => DMatrix::zeros(self.triangles.len(), 0),
        }
    }

    /// Integer Hodge Laplacian `L_k = B_kᵀ B_k + B_{k+1} B_{k+1}ᵀ`.
    pub fn hodge_laplacian_int(&self, k: usize) -> Result<DMatrix<i64>> {
        if k > 2 {
            return Err(Error::Range(format!("dimension {k} outside {{0, 1, 2}}")));
        }
        if self.count(k) == 0 {
            return Err(Error::Size(format!("complex has no {k}-simplices")));
        }
        let down = self.boundary(k);
        let up = self.boundary(k + 1);
        Ok(down.transpose() * &down + &up * up.transpose())
    }

    pub fn hodge_laplacian(&self, k: usize) -> Result<DMatrix<f64>> {
        Ok(self.hodge_laplacian_int(k)?.map(|x| x as f64))
    }

    /// Heat table between k-simplices on the spectrum of `L_k`, evaluated as
    /// `Σ_l exp(-λ_l t ψ_l(c_i) ψ_l(c_j))`.
    pub fn hodge_heat_table(&self, k: usize, time: f64) -> Result<KernelTable> {
        if !(time > 0.0 && time.is_finite()) {
            return Err(Error::Config(format!("time must be positive, got {time}")));
        }
        let spec = spectral_decomposition(&self.hodge_laplacian(k)?)?;
        Ok(spectral_heat_table(&spec, time))
    }

    pub fn one_skeleton(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().map(|&[a, b]| (a, b))).expect("valid skeleton")
    }

    /// Insert a central vertex into triangles until the complex has
    /// `target_nodes` vertices. Triangles are visited in rounds: each round is
    /// a random permutation of the triangles present when it starts, so every
    /// triangle is subdivided once before any triangle is picked again.
    pub fn triangular_upsample<R: Rng + ?Sized>(&self, target_nodes: usize, rng: &mut R) -> Result<Triangulation> {
        Ok(self
            .triangular_upsample_sequence(&[target_nodes], rng)?
            .pop()
            .expect("one target"))
    }

    /// One pass of [`Triangulation::triangular_upsample`] up to the largest
    /// target, snapshotting the complex at every target (ascending).
    pub fn triangular_upsample_sequence<R: Rng + ?Sized>(
        &self,
        targets: &[usize],
        rng: &mut R,
    ) -> Result<Vec<Triangulation>> {
        let mut targets = targets.to_vec();
        targets.sort_unstable();
        targets.dedup();
        let Some(&max) = targets.last() else {
            return Ok(Vec::new());
        };
        if targets[0] < self.n {
            return Err(Error::Range(format!(
                "target {} below current vertex count {}",
                targets[0], self.n
            )));
        }
        if max > self.n && self.triangles.is_empty() {
            return Err(Error::Validation("cannot upsample a complex without triangles".into()));
        }
        let mut n = self.n;
        let mut tris: Vec<[usize; 3]> = self.triangles.clone();
        let mut alive: Vec<bool> = vec![true; tris.len()];
        let mut out = Vec::with_capacity(targets.len());
        let mut pending = targets.into_iter().peekable();
        let snapshot = |n: usize, tris: &[[usize; 3]], alive: &[bool]| {
            let kept: Vec<[usize; 3]> = tris
                .iter()
                .zip(alive)
                .filter_map(|(&t, &a)| a.then_some(sorted3(t)))
                .collect();
            Triangulation::new(n, kept)
        };
        while let Some(&t) = pending.peek() {
            if t == n {
                out.push(snapshot(n, &tris, &alive)?);
                pending.next();
                continue;
            }
            let mut round: Vec<usize> = (0..tris.len()).filter(|&i| alive[i]).collect();
            round.shuffle(rng);
            for idx in round {
                if n == max {
                    break;
                }
                let [a, b, c] = tris[idx];
                let x = n;
                n += 1;
                alive[idx] = false;
                for t in [[a, b, x], [b, c, x], [a, c, x]] {
                    tris.push(t);
                    alive.push(true);
                }
                if pending.peek() == Some(&n) {
                    out.push(snapshot(n, &tris, &alive)?);
                    pending.next();
                }
            }
        }
        Ok(out)
    }

    /// Standard barycentric subdivision: vertices are the originals, then one
    /// midpoint per edge (in edge order), then one centre per triangle.
    pub fn barycentric_subdivision(&self) -> Triangulation {
        let e_off = self.n;
        let t_off = self.n + self.edges.len();
        let index: HashMap<[usize; 2], usize> = self.edges.iter().enumerate().map(|(i, &e)| (e, e_off + i)).collect();
        let mut out = Vec::with_capacity(self.triangles.len() * 6);
        for (j, &[a, b, c]) in self.triangles.iter().enumerate() {
            let x = t_off + j;
            let (mab, mbc, mac) = (index[&[a, b]], index[&[b, c]], index[&[a, c]]);
            for t in [
                [a, mab, x],
                [b, mab, x],
                [b, mbc, x],
                [c, mbc, x],
                [a, mac, x],
                [c, mac, x],
            ] {
                out.push(sorted3(t));
            }
        }
        out.sort_unstable();
        Triangulation::from_sorted(t_off + self.triangles.len(), out)
    }

    /// Relabel vertices: vertex `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Triangulation> {
        if perm.len() != self.n {
            return Err(Error::Validation("permutation length mismatch".into()));
        }
        Triangulation::new(
            self.n,
            self.triangles.iter().map(|&[a, b, c]| [perm[a], perm[b], perm[c]]),
        )
    }
}

/// One line of the JSONL triangulation format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangulationRecord {
    pub n: usize,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<i64>,
}

impl TryFrom<TriangulationRecord> for Triangulation {
    type Error = Error;

    fn try_from(r: TriangulationRecord) -> Result<Self> {
        Triangulation::new(r.n, r.triangles)
    }
}

impl From<&Triangulation> for TriangulationRecord {
    fn from(t: &Triangulation) -> Self {
        Self {
            n: t.n,
            triangles: t.triangles.clone(),
            label: None,
        }
    }
}

/// Seven-vertex triangulation of the torus.
pub fn torus7() -> Triangulation {
    let tris = (0..7).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]);
    Triangulation::new(7, tris).expect("valid torus")
}
