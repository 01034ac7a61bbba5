#![allow(dead_code)]

use divcurve::{Graph, PairTable};
use rand::seq::SliceRandom;
use rand::Rng;

/// Connected graph on `n` nodes: a random recursive tree plus each other
/// pair with probability `p`.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Disjoint union of `c` random connected graphs with at most `max_n`
/// nodes in total, node ids shuffled.
pub fn random_with_components<R: Rng>(c: usize, max_n: usize, rng: &mut R) -> Graph {
    assert!(c >= 1 && c <= max_n);
    let total = rng.gen_range(c..=max_n);
    let mut sizes = vec![1usize; c];
    for _ in c..total {
        let k = rng.gen_range(0..c);
        sizes[k] += 1;
    }
    let p = rng.gen_range(0.0..0.6);
    let mut g = random_connected(sizes[0], p, rng);
    for &s in &sizes[1..] {
        g = g.disjoint_union(&random_connected(s, p, rng));
    }
    let perm = random_permutation(g.n(), rng);
    g.relabeled(&perm).unwrap()
}

/// Any simple graph: each pair with a random density.
pub fn random_graph<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let p = rng.gen_range(0.0..1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Floyd–Warshall all-pairs hop distances.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1.0;
        d[v][u] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Whether `t` relabeled by `perm` equals `s` entrywise within `tol`.
pub fn permuted_equal<T: PairTable, S: PairTable>(t: &T, s: &S, perm: &[usize], tol: f64) -> bool {
    let n = t.size();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let (a, b) = (t.entry(i, j), s.entry(perm[i], perm[j]));
            a == b || (a - b).abs() <= tol
        })
    })
}

/// Smallest gap between consecutive sorted values.
pub fn min_eigen_gap(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}
