//! Edge-contraction coarsening and node upsampling.
//!
//! A coarsening proceeds in rounds. Each round orders the current edges by
//! score (ascending, ties broken lexicographically) and greedily keeps edges
//! whose endpoints are untouched in the round, so the round is a matching.
//! Edges are contracted in that order; a new round with fresh scores starts
//! only when the previous one is used up.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diversity::{spread, spread_with};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{Metric, PairTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    Random,
    SpreadExact,
    SpreadApprox,
}

impl std::fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScorerKind::Random => "random",
            ScorerKind::SpreadExact => "spread_exact",
            ScorerKind::SpreadApprox => "spread_approx",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeScorer {
    pub kind: ScorerKind,
    pub metric: Metric,
    /// For [`ScorerKind::Random`], order a round by shuffling the edge list
    /// instead of drawing and sorting uniform scores. Both give a uniformly
    /// random edge order; they consume the RNG differently.
    pub permute_random: bool,
}

impl EdgeScorer {
    pub fn new(kind: ScorerKind, metric: Metric) -> Result<Self> {
        if kind != ScorerKind::Random && !metric.is_structural() {
            return Err(Error::Config(format!(
                "{kind} scoring requires a graph-structural metric, got {metric}"
            )));
        }
        metric.validate()?;
        Ok(Self {
            kind,
            metric,
            permute_random: true,
        })
    }

    pub fn random() -> Self {
        Self {
            kind: ScorerKind::Random,
            metric: Metric::ShortestPath,
            permute_random: true,
        }
    }
}

pub type EdgeScores = BTreeMap<(usize, usize), f64>;

/// Score every edge of `g`. Random scores are i.i.d. uniform on `[0, 1)`
/// drawn in lexicographic edge order; spread scores are `Div(g) - Div(g/e)`.
pub fn score_edges<R: Rng + ?Sized>(g: &Graph, scorer: &EdgeScorer, rng: &mut R) -> Result<EdgeScores> {
    let mut scores = EdgeScores::new();
    match scorer.kind {
        ScorerKind::Random => {
            for e in g.edges() {
                scores.insert(e, rng.gen::<f64>());
            }
        }
        ScorerKind::SpreadExact => {
            if g.m() == 0 {
                return Ok(scores);
            }
            let base = spread(&scorer.metric.pairwise(g)?)?;
            for e in g.edges() {
                let contracted = contract_edge(g, e)?;
                let s = spread(&scorer.metric.pairwise(&contracted)?)?;
                scores.insert(e, base - s);
            }
        }
        ScorerKind::SpreadApprox => {
            if g.m() == 0 {
                return Ok(scores);
            }
            let table = scorer.metric.pairwise(g)?;
            let base = spread(&table)?;
            for (u, v) in g.edges() {
                scores.insert((u, v), base - merged_spread(&table, u, v)?);
            }
        }
    }
    Ok(scores)
}

/// Spread after identifying `u` and `v` in the original table: the merged
/// node keeps the smaller of the two entries towards every other node, all
/// other entries stay as they were.
fn merged_spread(table: &impl PairTable, u: usize, v: usize) -> Result<f64> {
    let n = table.size();
    let idx: Vec<usize> = (0..n).filter(|&x| x != v).collect();
    spread_with(n - 1, |i, j| {
        let (a, b) = (idx[i], idx[j]);
        match (a == u, b == u) {
            (true, true) => table.entry(u, u).min(table.entry(v, v)),
            (true, false) => table.entry(u, b).min(table.entry(v, b)),
            (false, true) => table.entry(a, u).min(table.entry(a, v)),
            (false, false) => table.entry(a, b),
        }
    })
}

fn lex_then_score(scores: &EdgeScores) -> Vec<(usize, usize)> {
    let mut order: Vec<((usize, usize), f64)> = scores.iter().map(|(&e, &s)| (e, s)).collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(e, _)| e).collect()
}

fn greedy_matching(
    ordered: impl IntoIterator<Item = (usize, usize)>,
    touched: &mut BTreeSet<usize>,
) -> Vec<(usize, usize)> {
    let mut round = Vec::new();
    for (u, v) in ordered {
        if touched.contains(&u) || touched.contains(&v) {
            continue;
        }
        touched.insert(u);
        touched.insert(v);
        round.push((u, v));
    }
    round
}

/// Greedy ascending-score selection of pairwise disjoint edges, skipping
/// edges that touch `already_touched`.
pub fn build_contraction_round(
    g: &Graph,
    scores: &EdgeScores,
    already_touched: &BTreeSet<usize>,
) -> Vec<(usize, usize)> {
    debug_assert!(g.edges().all(|e| scores.contains_key(&e)));
    let mut touched = already_touched.clone();
    greedy_matching(lex_then_score(scores), &mut touched)
}

/// Contract `(u, v)`: the smaller endpoint survives, the other is removed and
/// the remaining ids are compacted with their order preserved. Features of
/// the merged node become the mean over all original nodes it represents.
pub fn contract_edge(g: &Graph, e: (usize, usize)) -> Result<Graph> {
    let (u, v) = if e.0 <= e.1 { e } else { (e.1, e.0) };
    if !g.has_edge(u, v) {
        return Err(Error::Validation(format!("({u}, {v}) is not an edge")));
    }
    let n = g.n();
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
    for w in 0..n {
        if w == v {
            continue;
        }
        let list: Vec<usize> = if w == u {
            let mut merged: Vec<usize> = g
                .neighbors(u)
                .iter()
                .chain(g.neighbors(v))
                .copied()
                .filter(|&x| x != u && x != v)
                .map(shift)
                .collect();
            merged.sort_unstable();
            merged.dedup();
            merged
        } else {
            let mut l: Vec<usize> = g
                .neighbors(w)
                .iter()
                .map(|&x| if x == v { u } else { x })
                .map(shift)
                .collect();
            l.sort_unstable();
            l.dedup();
            l
        };
        adj.push(list);
    }
    let mut out = Graph::from_adjacency(adj).with_label(g.label());

    let origin_u = g.origin_of(u);
    let origin_v = g.origin_of(v);
    if let Some(f) = g.features() {
        let (wu, wv) = (origin_u.len() as f64, origin_v.len() as f64);
        let merged: Vec<f64> = f[u]
            .iter()
            .zip(&f[v])
            .map(|(a, b)| (a * wu + b * wv) / (wu + wv))
            .collect();
        let mut nf: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        for (w, row) in f.iter().enumerate() {
            if w == u {
                nf.push(merged.clone());
            } else if w != v {
                nf.push(row.clone());
            }
        }
        out.set_features_unchecked(Some(nf));
    }
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
    for w in 0..n {
        if w == u {
            let mut s: Vec<usize> = origin_u.iter().chain(&origin_v).copied().collect();
            s.sort_unstable();
            sets.push(s);
        } else if w != v {
            sets.push(g.origin_of(w));
        }
    }
    out.set_origin_sets_unchecked(Some(sets));
    Ok(out)
}

/// All graphs obtained by contracting exactly one edge, in edge order.
pub fn one_edge_contractions(g: &Graph) -> Result<Vec<Graph>> {
    g.edges().map(|e| contract_edge(g, e)).collect()
}

/// Ordered edges of the next round on the current graph.
fn next_round<R: Rng + ?Sized>(g: &Graph, scorer: &EdgeScorer, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if scorer.kind == ScorerKind::Random && scorer.permute_random {
        let mut edges = g.edge_vec();
        edges.shuffle(rng);
        return Ok(greedy_matching(edges, &mut BTreeSet::new()));
    }
    let scores = score_edges(g, scorer, rng)?;
    Ok(build_contraction_round(g, &scores, &BTreeSet::new()))
}

/// A graph produced for a requested cardinality.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseLevel {
    pub target: usize,
    pub graph: Graph,
    /// False when contraction ran out of edges above `target`; `graph` is
    /// then the fully collapsed graph (one node per component).
    pub reached: bool,
}

fn sorted_targets(targets: &[usize], descending: bool) -> Vec<usize> {
    let mut t = targets.to_vec();
    t.sort_unstable();
    t.dedup();
    if descending {
        t.reverse();
    }
    t
}

/// Coarsen `g` through the requested cardinalities (visited largest first),
/// snapshotting the graph each time a target size is hit.
pub fn coarsen_sequence<R: Rng + ?Sized>(
    g: &Graph,
    targets: &[usize],
    scorer: &EdgeScorer,
    rng: &mut R,
) -> Result<Vec<CoarseLevel>> {
    let targets = sorted_targets(targets, true);
    if let Some(&max) = targets.first() {
        if max > g.n() {
            return Err(Error::Range(format!(
                "coarsening target {max} exceeds node count {}",
                g.n()
            )));
        }
    }
    if targets.last() == Some(&0) {
        return Err(Error::Range("coarsening target 0".into()));
    }
    let mut cur = g.clone();
    let mut pending: VecDeque<(usize, usize)> = VecDeque::new();
    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        while cur.n() > target {
            if pending.is_empty() {
                if cur.m() == 0 {
                    break;
                }
                pending.extend(next_round(&cur, scorer, rng)?);
            }
            let (u, v) = pending.pop_front().expect("non-empty round");
            cur = contract_edge(&cur, (u, v))?;
            let shift = |x: usize| if x > v { x - 1 } else { x };
            for e in pending.iter_mut() {
                *e = (shift(e.0), shift(e.1));
            }
        }
        out.push(CoarseLevel {
            target,
            reached: cur.n() == target,
            graph: cur.clone(),
        });
    }
    Ok(out)
}

/// Order in which base nodes `0..n` are copied when adding `extra` nodes:
/// `m` full random permutations followed by `r` distinct picks, where
/// `extra = m n + r`. Pick counts differ by at most one.
pub fn upsample_pick_order<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> Vec<usize> {
    let mut picks = Vec::with_capacity(extra);
    if n == 0 {
        return picks;
    }
    let base: Vec<usize> = (0..n).collect();
    for _ in 0..extra / n {
        let mut p = base.clone();
        p.shuffle(rng);
        picks.extend(p);
    }
    let r = extra - picks.len();
    if r > 0 {
        picks.extend(base.choose_multiple(rng, r).copied());
    }
    picks
}

/// Upsample `g` through the requested cardinalities (ascending). The node
/// pick order is `m` full random permutations of the original nodes followed
/// by `r` distinct further picks, where `N - n = m n + r`. Each new node
/// copies the picked node's neighbourhood, is joined to the picked node, and
/// copies its feature row.
pub fn upsample_node_sequence<R: Rng + ?Sized>(
    g: &Graph,
    targets: &[usize],
    rng: &mut R,
) -> Result<Vec<(usize, Graph)>> {
    let targets = sorted_targets(targets, false);
    let n = g.n();
    let Some(&max) = targets.last() else {
        return Ok(Vec::new());
    };
    if targets[0] < n {
        return Err(Error::Range(format!(
            "upsampling target {} below node count {n}",
            targets[0]
        )));
    }
    if n == 0 && max > 0 {
        return Err(Error::Empty("cannot upsample a graph with no nodes".into()));
    }
    let picks = upsample_pick_order(n, max - n, rng);

    let mut cur = g.clone();
    let mut fresh_origin = cur
        .origin_sets()
        .map(|s| s.iter().flatten().copied().max().map_or(0, |m| m + 1));
    let mut out = Vec::with_capacity(targets.len());
    let mut picks = picks.into_iter();
    for target in targets {
        while cur.n() < target {
            let v = picks.next().expect("pick sequence covers the largest target");
            let nbrs: Vec<usize> = cur.neighbors(v).to_vec();
            let u = cur.push_node();
            for x in nbrs.into_iter().chain(std::iter::once(v)) {
                cur.insert_edge(u, x);
            }
            if let Some(f) = cur.features() {
                let mut f = f.to_vec();
                f.push(f[v].clone());
                cur.set_features_unchecked(Some(f));
            }
            if let Some(next) = fresh_origin.as_mut() {
                let mut s = cur.origin_sets().expect("tracked").to_vec();
                s.push(vec![*next]);
                *next += 1;
                cur.set_origin_sets_unchecked(Some(s));
            }
        }
        out.push((target, cur.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{component_count, is_isomorphic_small, named};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn exact() -> EdgeScorer {
        EdgeScorer::new(ScorerKind::SpreadExact, Metric::ShortestPath).unwrap()
    }

    #[test]
    fn scorer_requires_structural_metric() {
        assert!(EdgeScorer::new(ScorerKind::SpreadExact, Metric::Feature).is_err());
        assert!(EdgeScorer::new(ScorerKind::Random, Metric::Feature).is_ok());
    }

    #[test]
    fn triangle_exact_scores_equal() {
        let s = score_edges(&named::complete(3), &exact(), &mut rng(0)).unwrap();
        let vals: Vec<f64> = s.values().copied().collect();
        assert_eq!(vals.len(), 3);
        assert!(vals.iter().all(|&x| (x - vals[0]).abs() < 1e-12));
    }

    #[test]
    fn random_scores_deterministic() {
        let g = named::house();
        let a = score_edges(&g, &EdgeScorer::random(), &mut rng(7)).unwrap();
        let b = score_edges(&g, &EdgeScorer::random(), &mut rng(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.values().all(|&s| (0.0..1.0).contains(&s)));
    }

    #[test]
    fn path3_exact_score_closed_form() {
        let e1 = (-1.0f64).exp();
        let e2 = (-2.0f64).exp();
        let div_p3 = 1.0 / (1.0 + 2.0 * e1) + 2.0 / (1.0 + e1 + e2);
        let div_p2 = 2.0 / (1.0 + e1);
        let s = score_edges(&named::path(3), &exact(), &mut rng(0)).unwrap();
        assert!((s[&(0, 1)] - (div_p3 - div_p2)).abs() < 1e-12);
        assert!((s[&(1, 2)] - (div_p3 - div_p2)).abs() < 1e-12);
    }

    #[test]
    fn approx_scores_match_exact_on_path_ends() {
        // Contracting an end edge of a path leaves shortest paths among
        // surviving nodes unchanged except through the merged node.
        let g = named::path(4);
        let ap = EdgeScorer::new(ScorerKind::SpreadApprox, Metric::ShortestPath).unwrap();
        let a = score_edges(&g, &ap, &mut rng(0)).unwrap();
        let x = score_edges(&g, &exact(), &mut rng(0)).unwrap();
        assert!((a[&(0, 1)] - x[&(0, 1)]).abs() < 1e-12);
        // interior edge: the approximation does not shorten 0-3
        assert!(a[&(1, 2)] < x[&(1, 2)]);
    }

    #[test]
    fn edgeless_scores_empty() {
        assert!(score_edges(&Graph::empty(3), &exact(), &mut rng(0)).unwrap().is_empty());
        assert!(score_edges(&Graph::empty(3), &EdgeScorer::random(), &mut rng(0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn round_examples() {
        let p4 = named::path(4);
        let scores: EdgeScores = [((0, 1), 0.1), ((1, 2), 0.2), ((2, 3), 0.3)].into_iter().collect();
        assert_eq!(
            build_contraction_round(&p4, &scores, &BTreeSet::new()),
            vec![(0, 1), (2, 3)]
        );

        let star = named::star(3);
        let scores: EdgeScores = star.edges().map(|e| (e, 0.5)).collect();
        assert_eq!(build_contraction_round(&star, &scores, &BTreeSet::new()).len(), 1);

        let c4 = named::cycle(4);
        let scores: EdgeScores = c4.edges().map(|e| (e, 1.0)).collect();
        assert_eq!(
            build_contraction_round(&c4, &scores, &BTreeSet::new()),
            vec![(0, 1), (2, 3)]
        );

        let touched: BTreeSet<usize> = [0].into_iter().collect();
        let scores: EdgeScores = [((0, 1), 0.1), ((1, 2), 0.2), ((2, 3), 0.3)].into_iter().collect();
        assert_eq!(build_contraction_round(&p4, &scores, &touched), vec![(1, 2)]);
    }

    #[test]
    fn contraction_examples() {
        let k2 = contract_edge(&named::complete(3), (1, 2)).unwrap();
        assert_eq!((k2.n(), k2.m()), (2, 1));

        let house = named::house();
        for e in [(2, 4), (3, 4)] {
            let c4 = contract_edge(&house, e).unwrap();
            assert!(is_isomorphic_small(&c4, &named::cycle(4)).unwrap());
        }
        for e in named::house_partner().edges() {
            let d = contract_edge(&named::house_partner(), e).unwrap();
            assert!(is_isomorphic_small(&d, &named::diamond()).unwrap());
        }

        let g = named::path(2).with_features(vec![vec![0.0], vec![2.0]]).unwrap();
        let c = contract_edge(&g, (1, 0)).unwrap();
        assert_eq!(c.n(), 1);
        assert_eq!(c.features().unwrap(), &[vec![1.0]]);
        assert_eq!(c.origin_sets().unwrap(), &[vec![0, 1]]);

        assert!(matches!(
            contract_edge(&named::path(3), (0, 2)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn feature_mean_is_over_originals() {
        // Three nodes 0-1-2 with features 0, 3, 6: merge 0 and 1 (mean 1.5),
        // then merge with 2: mean over originals is 3, not (1.5 + 6) / 2.
        let g = named::path(3)
            .with_features(vec![vec![0.0], vec![3.0], vec![6.0]])
            .unwrap();
        let a = contract_edge(&g, (0, 1)).unwrap();
        assert_eq!(a.features().unwrap()[0], vec![1.5]);
        let b = contract_edge(&a, (0, 1)).unwrap();
        assert_eq!(b.features().unwrap()[0], vec![3.0]);
        assert_eq!(b.origin_sets().unwrap()[0], vec![0, 1, 2]);
    }

    #[test]
    fn coarsen_cycle() {
        let levels = coarsen_sequence(&named::cycle(6), &[5, 4, 3], &EdgeScorer::random(), &mut rng(3)).unwrap();
        let sizes: Vec<usize> = levels.iter().map(|l| l.graph.n()).collect();
        assert_eq!(sizes, vec![5, 4, 3]);
        assert!(levels.iter().all(|l| l.reached && component_count(&l.graph) == 1));
    }

    #[test]
    fn coarsen_stops_at_component_count() {
        let levels = coarsen_sequence(&named::two_triangles(), &[1], &EdgeScorer::random(), &mut rng(0)).unwrap();
        assert_eq!(levels.len(), 1);
        assert!(!levels[0].reached);
        assert_eq!((levels[0].graph.n(), levels[0].graph.m()), (2, 0));
    }

    #[test]
    fn coarsen_rejects_oversized_target() {
        let r = coarsen_sequence(&named::path(3), &[4], &EdgeScorer::random(), &mut rng(0));
        assert!(matches!(r, Err(Error::Range(_))));
    }

    #[test]
    fn coarsen_is_seed_deterministic() {
        let g = named::hexagon_crossing_chords();
        for scorer in [
            EdgeScorer::random(),
            exact(),
            EdgeScorer {
                permute_random: false,
                ..EdgeScorer::random()
            },
        ] {
            let a = coarsen_sequence(&g, &[5, 4, 3, 2, 1], &scorer, &mut rng(11)).unwrap();
            let b = coarsen_sequence(&g, &[5, 4, 3, 2, 1], &scorer, &mut rng(11)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rounds_are_matchings() {
        // With the permutation path on a 4-cycle the first round is a perfect
        // matching, so two contractions yield a 2-node graph from disjoint
        // merges: each surviving node represents exactly two originals.
        for seed in 0..20 {
            let levels = coarsen_sequence(&named::cycle(4), &[2], &EdgeScorer::random(), &mut rng(seed)).unwrap();
            let sets = levels[0].graph.origin_sets().unwrap();
            assert!(sets.iter().all(|s| s.len() == 2), "seed {seed}: {sets:?}");
        }
    }

    #[test]
    fn permutation_and_sorted_scores_agree_in_distribution() {
        // First contracted edge of P4 under a uniformly random order: the
        // round keeps the first edge drawn, so each of the 3 edges leads with
        // probability 1/3 under both paths. Compare the shared observable:
        // whether the middle node pair (1, 2) ended up merged.
        let trials = 3000;
        let count = |permute: bool| {
            let scorer = EdgeScorer {
                permute_random: permute,
                ..EdgeScorer::random()
            };
            (0..trials)
                .filter(|&s| {
                    let lv = coarsen_sequence(&named::path(4), &[3], &scorer, &mut rng(s)).unwrap();
                    lv[0].graph.origin_sets().unwrap().contains(&vec![1, 2])
                })
                .count() as f64
                / trials as f64
        };
        let (a, b) = (count(true), count(false));
        let sigma = (1.0 / 3.0 * 2.0 / 3.0 / trials as f64).sqrt();
        assert!((a - 1.0 / 3.0).abs() < 4.0 * sigma, "permutation path {a}");
        assert!((b - 1.0 / 3.0).abs() < 4.0 * sigma, "score path {b}");
    }

    #[test]
    fn upsample_examples() {
        let up = upsample_node_sequence(&Graph::empty(1), &[2], &mut rng(0)).unwrap();
        assert_eq!(up[0].1.edge_vec(), vec![(0, 1)]);

        let p3 = named::path(3);
        // find a seed whose first pick is the middle node
        let seed = (0..100)
            .find(|&s| {
                let g = &upsample_node_sequence(&p3, &[4], &mut rng(s)).unwrap()[0].1;
                g.degree(3) == 3
            })
            .expect("some seed picks the middle node");
        let g = &upsample_node_sequence(&p3, &[4], &mut rng(seed)).unwrap()[0].1;
        assert_eq!(g.edge_vec(), vec![(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]);

        assert!(matches!(
            upsample_node_sequence(&p3, &[2], &mut rng(0)),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn upsample_pick_balance() {
        for seed in 0..20 {
            let picks = upsample_pick_order(3, 7, &mut rng(seed));
            assert_eq!(picks.len(), 7);
            let mut counts = [0usize; 3];
            for p in &picks {
                counts[*p] += 1;
            }
            assert!(counts.iter().all(|&c| c == 2 || c == 3), "{counts:?}");
            // the first six picks are two full permutations
            for chunk in picks[..6].chunks(3) {
                let mut c = chunk.to_vec();
                c.sort_unstable();
                assert_eq!(c, vec![0, 1, 2]);
            }
        }
        let g = named::path(3)
            .with_origin_sets(vec![vec![0], vec![1], vec![2]])
            .unwrap();
        let out = upsample_node_sequence(&g, &[4, 7, 10], &mut rng(1)).unwrap();
        let sizes: Vec<usize> = out.iter().map(|(_, g)| g.n()).collect();
        assert_eq!(sizes, vec![4, 7, 10]);
        assert_eq!(out[2].1.origin_sets().unwrap().len(), 10);
        assert_eq!(component_count(&out[2].1), 1);
    }

    #[test]
    fn upsample_copies_features() {
        let g = named::path(2).with_features(vec![vec![1.0], vec![5.0]]).unwrap();
        let out = upsample_node_sequence(&g, &[4], &mut rng(2)).unwrap();
        let f = out[0].1.features().unwrap();
        assert_eq!(f.len(), 4);
        // picks are one full permutation of {0, 1}: both rows copied once
        let mut copied: Vec<f64> = f[2..].iter().map(|r| r[0]).collect();
        copied.sort_by(f64::total_cmp);
        assert_eq!(copied, vec![1.0, 5.0]);
    }
}
