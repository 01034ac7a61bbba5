//! Curve comparison, permutation testing, classification and clustering
//! scores, and the pairwise distinguisher.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diversity::{
    compensated_sum, derive_task_seed, exhaustive_one_edge_spreads, graph_spread, stream, CurveSet, DiversityCurve,
    EXHAUSTIVE_SIZE_LIMIT,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{DistanceMatrix, Metric, PairTable};

/// Lp distance between two curves on the same scales; `p = ∞` gives the
/// maximum absolute difference.
pub fn curve_distance(a: &DiversityCurve, b: &DiversityCurve, p: f64) -> Result<f64> {
    if a.scales != b.scales {
        return Err(Error::Validation(format!(
            "scale mismatch: {:?} vs {:?}",
            a.scales, b.scales
        )));
    }
    lp_distance(&a.values, &b.values, p)
}

fn lp_distance(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Range(format!("norm order must be >= 1, got {p}")));
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    Ok(if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else if p == 1.0 {
        compensated_sum(diffs)
    } else if p == 2.0 {
        compensated_sum(diffs.map(|d| d * d)).sqrt()
    } else {
        compensated_sum(diffs.map(|d| d.powf(p))).powf(1.0 / p)
    })
}

/// Pairwise curve distances over a set.
pub fn curve_distance_matrix(set: &CurveSet, p: f64) -> Result<DistanceMatrix> {
    let n = set.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| curve_distance(&set.curves[i], &set.curves[j], p))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            // exact symmetry regardless of summation order
            data.push(if j < i { rows[j][i] } else { v });
        }
    }
    Ok(DistanceMatrix::from_raw(n, data))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
}

pub const DEFAULT_PERMUTATIONS: usize = 1000;

fn mean_curve(values: &[&[f64]], members: &mut [usize]) -> Vec<f64> {
    members.sort_unstable();
    let k = members.len() as f64;
    (0..values[0].len())
        .map(|s| compensated_sum(members.iter().map(|&m| values[m][s])) / k)
        .collect()
}

fn mean_gap(values: &[&[f64]], a: &mut [usize], b: &mut [usize]) -> f64 {
    let ma = mean_curve(values, a);
    let mb = mean_curve(values, b);
    compensated_sum(ma.iter().zip(&mb).map(|(x, y)| (x - y) * (x - y))).sqrt()
}

/// Two-sample permutation test on the L2 distance between group mean
/// curves. Each permutation uses its own stream derived from one draw of
/// `rng`, so the result does not depend on the thread count.
pub fn permutation_test<R: Rng + ?Sized>(
    group_a: &CurveSet,
    group_b: &CurveSet,
    permutations: usize,
    rng: &mut R,
) -> Result<TestResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::Validation("permutation test needs two non-empty groups".into()));
    }
    if group_a.scales() != group_b.scales() {
        return Err(Error::Validation("groups must share scales".into()));
    }
    if permutations == 0 {
        return Err(Error::Validation("at least one permutation is required".into()));
    }
    let values: Vec<&[f64]> = group_a
        .curves
        .iter()
        .chain(&group_b.curves)
        .map(|c| c.values.as_slice())
        .collect();
    let na = group_a.len();
    let total = values.len();
    let mut a: Vec<usize> = (0..na).collect();
    let mut b: Vec<usize> = (na..total).collect();
    let observed = mean_gap(&values, &mut a, &mut b);

    let base: u64 = rng.gen();
    let exceed = (0..permutations)
        .into_par_iter()
        .map(|i| {
            let mut r = stream(derive_task_seed(base, i as u64, 0));
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut r);
            let (pa, pb) = idx.split_at_mut(na);
            usize::from(mean_gap(&values, pa, pb) >= observed)
        })
        .sum::<usize>();
    Ok(TestResult {
        statistic: observed,
        p_value: pseudo_count_p_value(exceed, permutations),
        permutations,
    })
}

/// `(1 + exceedances) / (1 + permutations)`.
pub fn pseudo_count_p_value(exceedances: usize, permutations: usize) -> f64 {
    (1 + exceedances) as f64 / (1 + permutations) as f64
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Validation("NaN in correlation input".into()));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!("{} observation(s)", x.len())));
    }
    pearson(&average_ranks(x), &average_ranks(y)).ok_or_else(|| Error::UndefinedCorrelation("constant input".into()))
}

fn check_table<T: PairTable + ?Sized>(dist: &T, labels: &[i64]) -> Result<()> {
    if dist.size() != labels.len() {
        return Err(Error::Validation(format!(
            "{} labels for a {}x{} table",
            labels.len(),
            dist.size(),
            dist.size()
        )));
    }
    for i in 0..dist.size() {
        for j in 0..i {
            let (a, b) = (dist.entry(i, j), dist.entry(j, i));
            if a.is_nan() || a != b {
                return Err(Error::Validation(format!("table not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Assign items to `folds` folds, keeping each group together and
/// balancing per-class counts. Groups are visited in a random order
/// (largest first) and each goes to the fold where it leaves the per-class
/// counts closest to their targets; ties go to the smallest fold, then the
/// lowest index.
pub fn stratified_group_folds<R: Rng + ?Sized>(
    labels: &[i64],
    groups: Option<&[usize]>,
    folds: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Fold(format!("need at least 2 folds, got {folds}")));
    }
    if let Some(g) = groups {
        if g.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} group ids for {} items",
                g.len(),
                labels.len()
            )));
        }
    }
    let classes: Vec<i64> = {
        let mut c = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    let class_idx = |l: i64| classes.binary_search(&l).expect("known class");
    let mut class_total = vec![0usize; classes.len()];
    for &l in labels {
        class_total[class_idx(l)] += 1;
    }
    if let Some((c, &t)) = class_total.iter().enumerate().find(|(_, &t)| t < folds) {
        return Err(Error::Fold(format!(
            "class {} has {t} member(s), fewer than {folds} folds",
            classes[c]
        )));
    }

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..labels.len() {
        let key = groups.map_or(i, |g| g[i]);
        members.entry(key).or_default().push(i);
    }
    if members.len() < folds {
        return Err(Error::Fold(format!("{} group(s) for {folds} folds", members.len())));
    }
    let mut units: Vec<Vec<usize>> = members.into_values().collect();
    units.shuffle(rng);
    units.sort_by_key(|u| std::cmp::Reverse(u.len()));

    let target: Vec<f64> = class_total.iter().map(|&t| t as f64 / folds as f64).collect();
    let mut counts = vec![vec![0usize; classes.len()]; folds];
    let mut sizes = vec![0usize; folds];
    let mut assignment = vec![usize::MAX; labels.len()];
    for unit in units {
        let mut add = vec![0usize; classes.len()];
        for &i in &unit {
            add[class_idx(labels[i])] += 1;
        }
        let cost = |f: usize| -> f64 {
            (0..classes.len())
                .map(|c| {
                    let over = (counts[f][c] + add[c]) as f64 - target[c];
                    over * over - (counts[f][c] as f64 - target[c]).powi(2)
                })
                .sum()
        };
        let best = (0..folds)
            .min_by(|&x, &y| {
                cost(x)
                    .total_cmp(&cost(y))
                    .then(sizes[x].cmp(&sizes[y]))
                    .then(x.cmp(&y))
            })
            .expect("folds >= 2");
        for c in 0..classes.len() {
            counts[best][c] += add[c];
        }
        sizes[best] += unit.len();
        for i in unit {
            assignment[i] = best;
        }
    }
    if let Some(f) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Fold(format!("fold {f} is empty")));
    }
    Ok(assignment)
}

/// Majority vote over the `k` nearest training items (distance ties by
/// index). Vote ties go to the label with the smallest total distance, then
/// the smallest label.
fn knn_predict<T: PairTable + ?Sized>(dist: &T, labels: &[i64], train: &[usize], query: usize, k: usize) -> i64 {
    let row = dist.row(query);
    let mut cand: Vec<usize> = train.to_vec();
    cand.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    cand.truncate(k);
    let mut votes: BTreeMap<i64, (usize, f64)> = BTreeMap::new();
    for &c in &cand {
        let e = votes.entry(labels[c]).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += row[c];
    }
    votes
        .into_iter()
        .min_by(|(la, (ca, da)), (lb, (cb, db))| cb.cmp(ca).then(da.total_cmp(db)).then(la.cmp(lb)))
        .map(|(l, _)| l)
        .expect("k >= 1 and training set non-empty")
}

/// Cross-validated kNN accuracy: `(mean, population std)` over folds.
pub fn knn_cv_accuracy<T: PairTable + ?Sized, R: Rng + ?Sized>(
    dist: &T,
    labels: &[i64],
    k: usize,
    folds: usize,
    groups: Option<&[usize]>,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_table(dist, labels)?;
    if k == 0 {
        return Err(Error::Validation("k must be >= 1".into()));
    }
    let assignment = stratified_group_folds(labels, groups, folds, rng)?;
    let accs: Vec<f64> = (0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| assignment[i] == f);
            let hits = test
                .iter()
                .filter(|&&q| knn_predict(dist, labels, &train, q, k) == labels[q])
                .count();
            hits as f64 / test.len() as f64
        })
        .collect();
    let mean = compensated_sum(accs.iter().copied()) / folds as f64;
    let var = compensated_sum(accs.iter().map(|a| (a - mean) * (a - mean))) / folds as f64;
    Ok((mean, var.sqrt()))
}

/// Mean silhouette over all points. Members of singleton classes score 0,
/// as do points with `a = b = 0`.
pub fn silhouette_score<T: PairTable + ?Sized>(dist: &T, labels: &[i64]) -> Result<f64> {
    check_table(dist, labels)?;
    let mut classes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    if classes.len() < 2 {
        return Err(Error::Validation(format!(
            "silhouette needs at least 2 classes, got {}",
            classes.len()
        )));
    }
    let scores: Vec<f64> = (0..labels.len())
        .map(|i| {
            let own = &classes[&labels[i]];
            if own.len() == 1 {
                return 0.0;
            }
            let row = dist.row(i);
            let a = compensated_sum(own.iter().filter(|&&j| j != i).map(|&j| row[j])) / (own.len() - 1) as f64;
            let b = classes
                .iter()
                .filter(|(&l, _)| l != labels[i])
                .map(|(_, m)| compensated_sum(m.iter().map(|&j| row[j])) / m.len() as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    Ok(compensated_sum(scores) / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistinguishMode {
    SpreadOnly,
    OneEdgeCurve,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-5;

/// Whether `g` and `h` are told apart at tolerance `tol`. In one-edge mode
/// the spreads at `n` and the mean spreads over all one-edge contractions
/// are compared.
pub fn distinguish_pair(g: &Graph, h: &Graph, mode: DistinguishMode, metric: &Metric, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Range(format!("tolerance must be non-negative, got {tol}")));
    }
    if mode == DistinguishMode::OneEdgeCurve {
        if g.n() != h.n() {
            return Err(Error::Validation(format!("node counts differ: {} vs {}", g.n(), h.n())));
        }
        if g.n() > EXHAUSTIVE_SIZE_LIMIT {
            return Err(Error::Size(format!(
                "one-edge mode limited to n <= {EXHAUSTIVE_SIZE_LIMIT}, got {}",
                g.n()
            )));
        }
    }
    let sg = graph_spread(g, metric)?;
    let sh = graph_spread(h, metric)?;
    if (sg - sh).abs() > tol {
        return Ok(true);
    }
    if mode == DistinguishMode::SpreadOnly {
        return Ok(false);
    }
    let mean =
        |v: Vec<f64>| -> Option<f64> { (!v.is_empty()).then(|| compensated_sum(v.iter().copied()) / v.len() as f64) };
    let mg = mean(exhaustive_one_edge_spreads(g, metric)?);
    let mh = mean(exhaustive_one_edge_spreads(h, metric)?);
    Ok(match (mg, mh) {
        (Some(a), Some(b)) => (a - b).abs() > tol,
        (None, None) => false,
        _ => true,
    })
}
