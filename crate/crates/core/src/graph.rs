//! Undirected simple graphs with optional node features, a class label and
//! per-node origin tracking for merges.
//!
//! Node ids are dense `0..n`. Neighbour lists are kept sorted, so iteration
//! order (and therefore everything seeded downstream) is deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    features: Option<Vec<Vec<f64>>>,
    label: Option<i64>,
    origin_sets: Option<Vec<Vec<usize>>>,
}

impl Graph {
    /// Build a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse; self-loops and out-of-range endpoints are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Range(format!(
                    "edge ({u}, {v}) has an endpoint outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            adj,
            features: None,
            label: None,
            origin_sets: None,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            features: None,
            label: None,
            origin_sets: None,
        }
    }

    pub(crate) fn from_adjacency(adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Self {
            adj,
            features: None,
            label: None,
            origin_sets: None,
        }
    }

    pub fn with_features(mut self, features: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() != self.n() {
            return Err(Error::Validation(format!(
                "{} feature rows for {} nodes",
                features.len(),
                self.n()
            )));
        }
        if let Some(first) = features.first() {
            let dim = first.len();
            if dim == 0 {
                return Err(Error::Validation("feature dimension must be >= 1".into()));
            }
            if let Some(i) = features.iter().position(|r| r.len() != dim) {
                return Err(Error::Validation(format!(
                    "feature row {i} has dimension {} (expected {dim})",
                    features[i].len()
                )));
            }
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_label(mut self, label: Option<i64>) -> Self {
        self.label = label;
        self
    }

    pub fn with_origin_sets(mut self, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != self.n() {
            return Err(Error::Validation(format!(
                "{} origin sets for {} nodes",
                sets.len(),
                self.n()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &sets {
            if s.is_empty() {
                return Err(Error::Validation("empty origin set".into()));
            }
            for &o in s {
                if !seen.insert(o) {
                    return Err(Error::Validation(format!(
                        "original node {o} appears in two origin sets"
                    )));
                }
            }
        }
        self.origin_sets = Some(sets);
        Ok(self)
    }

    pub(crate) fn set_features_unchecked(&mut self, f: Option<Vec<Vec<f64>>>) {
        self.features = f;
    }

    pub(crate) fn set_origin_sets_unchecked(&mut self, s: Option<Vec<Vec<usize>>>) {
        self.origin_sets = s;
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().copied().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.features.as_ref().and_then(|f| f.first().map(Vec::len))
    }

    pub fn label(&self) -> Option<i64> {
        self.label
    }

    pub fn origin_sets(&self) -> Option<&[Vec<usize>]> {
        self.origin_sets.as_deref()
    }

    /// Origin set of `u`, defaulting to `{u}` when no tracking is attached.
    pub fn origin_of(&self, u: usize) -> Vec<usize> {
        match &self.origin_sets {
            Some(s) => s[u].clone(),
            None => vec![u],
        }
    }

    /// Insert an edge; returns false if it was already present.
    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v && u < self.n() && v < self.n());
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub(crate) fn delete_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("symmetric adjacency");
                self.adj[v].remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Append an isolated node and return its id.
    pub(crate) fn push_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Relabel nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::Validation("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Validation("not a permutation".into()));
            }
        }
        let mut g = Graph::new(n, self.edges().map(|(u, v)| (perm[u], perm[v])))?;
        if let Some(f) = &self.features {
            let mut nf = vec![Vec::new(); n];
            for (i, row) in f.iter().enumerate() {
                nf[perm[i]] = row.clone();
            }
            g.features = Some(nf);
        }
        if let Some(s) = &self.origin_sets {
            let mut ns = vec![Vec::new(); n];
            for (i, set) in s.iter().enumerate() {
                ns[perm[i]] = set.clone();
            }
            g.origin_sets = Some(ns);
        }
        g.label = self.label;
        Ok(g)
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|l| l.iter().map(|&v| v + off).collect::<Vec<_>>()));
        Graph::from_adjacency(adj)
    }
}

/// Connected components by BFS; component ids are assigned in order of the
/// smallest node they contain.
pub fn connected_components(g: &Graph) -> (usize, Vec<usize>) {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (count, comp)
}

pub fn component_count(g: &Graph) -> usize {
    connected_components(g).0
}

/// Largest graph accepted by [`is_isomorphic_small`].
pub const ISOMORPHISM_SIZE_LIMIT: usize = 10;

/// Exact isomorphism test by backtracking over bijections, for graphs with at
/// most [`ISOMORPHISM_SIZE_LIMIT`] nodes. Features and labels are ignored.
pub fn is_isomorphic_small(g: &Graph, h: &Graph) -> Result<bool> {
    if g.n() > ISOMORPHISM_SIZE_LIMIT || h.n() > ISOMORPHISM_SIZE_LIMIT {
        return Err(Error::Size(format!(
            "isomorphism search limited to n <= {ISOMORPHISM_SIZE_LIMIT} (got {} and {})",
            g.n(),
            h.n()
        )));
    }
    if g.n() != h.n() || g.m() != h.m() {
        return Ok(false);
    }
    let mut dg: Vec<usize> = (0..g.n()).map(|u| g.degree(u)).collect();
    let mut dh: Vec<usize> = (0..h.n()).map(|u| h.degree(u)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return Ok(false);
    }
    let n = g.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend_mapping(g, h, 0, &mut map, &mut used))
}

fn extend_mapping(g: &Graph, h: &Graph, u: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if u == g.n() {
        return true;
    }
    for cand in 0..h.n() {
        if used[cand] || g.degree(u) != h.degree(cand) {
            continue;
        }
        let consistent = (0..u).all(|w| g.has_edge(u, w) == h.has_edge(cand, map[w]));
        if !consistent {
            continue;
        }
        map[u] = cand;
        used[cand] = true;
        if extend_mapping(g, h, u + 1, map, used) {
            return true;
        }
        used[cand] = false;
        map[u] = usize::MAX;
    }
    false
}

/// An ordered, named collection of graphs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>) -> Result<Self> {
        let mut dim = None;
        for (i, g) in graphs.iter().enumerate() {
            if let Some(d) = g.feature_dim() {
                match dim {
                    None => dim = Some(d),
                    Some(prev) if prev != d => {
                        return Err(Error::Validation(format!(
                            "graph {i} has feature dimension {d}, dataset uses {prev}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            name: name.into(),
            graphs,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn max_nodes(&self) -> usize {
        self.graphs.iter().map(Graph::n).max().unwrap_or(0)
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid clique")
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid star")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).expect("valid bipartite graph")
    }

    /// Square 0-1-3-2 with roof apex 4 over the edge (2, 3).
    pub fn house() -> Graph {
        Graph::new(5, [(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).expect("valid house")
    }

    /// Four-cycle 0-1-2-3 with the chord (0, 2).
    pub fn diamond() -> Graph {
        Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).expect("valid diamond")
    }

    /// Equal-spread partner of the house graph; every one-edge contraction is
    /// a diamond.
    pub fn house_partner() -> Graph {
        complete_bipartite(2, 3)
    }

    /// Six-cycle with chords (1,5) and (2,4) in 1-indexed labels.
    pub fn hexagon_parallel_chords() -> Graph {
        let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.extend([(0, 4), (1, 3)]);
        Graph::new(6, edges).expect("valid graph")
    }

    /// Six-cycle with chords (1,4) and (2,5) in 1-indexed labels.
    pub fn hexagon_crossing_chords() -> Graph {
        let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.extend([(0, 3), (1, 4)]);
        Graph::new(6, edges).expect("valid graph")
    }

    pub fn two_triangles() -> Graph {
        cycle(3).disjoint_union(&cycle(3))
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn construction_dedups_and_rejects_loops() {
        let g = Graph::new(3, [(0, 1), (1, 0), (1, 2), (1, 2)]).unwrap();
        assert_eq!(g.m(), 2);
        assert!(matches!(Graph::new(2, [(1, 1)]), Err(Error::Validation(_))));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(Error::Range(_))));
    }

    #[test]
    fn ragged_features_rejected() {
        let g = path(2);
        assert!(g.clone().with_features(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(g.clone().with_features(vec![vec![], vec![]]).is_err());
        assert!(g.with_features(vec![vec![1.0], vec![2.0]]).is_ok());
    }

    #[test]
    fn overlapping_origin_sets_rejected() {
        let g = path(2);
        assert!(g.clone().with_origin_sets(vec![vec![0, 1], vec![1]]).is_err());
        assert!(g.with_origin_sets(vec![vec![0, 5], vec![1]]).is_ok());
    }

    #[test]
    fn component_counts() {
        assert_eq!(component_count(&complete(3)), 1);
        assert_eq!(component_count(&two_triangles()), 2);
        assert_eq!(component_count(&Graph::empty(5)), 5);
        assert_eq!(component_count(&Graph::empty(0)), 0);
        let (_, comp) = connected_components(&two_triangles());
        assert_eq!(comp, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn isomorphism_fixtures() {
        let c4 = cycle(4);
        let relabeled = c4.relabeled(&[2, 0, 3, 1]).unwrap();
        assert!(is_isomorphic_small(&c4, &relabeled).unwrap());
        assert!(!is_isomorphic_small(&cycle(6), &two_triangles()).unwrap());
        let house = house();
        let mirror = house.relabeled(&[1, 0, 3, 2, 4]).unwrap();
        assert!(is_isomorphic_small(&house, &mirror).unwrap());
        assert!(!is_isomorphic_small(&house, &house_partner()).unwrap());
        assert!(!is_isomorphic_small(&hexagon_parallel_chords(), &hexagon_crossing_chords()).unwrap());
        assert!(matches!(
            is_isomorphic_small(&cycle(11), &cycle(11)),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn isomorphism_is_reflexive_and_symmetric_on_fixtures() {
        let fixtures = [
            house(),
            diamond(),
            house_partner(),
            cycle(4),
            cycle(5),
            path(5),
            star(4),
            complete(4),
            hexagon_parallel_chords(),
            hexagon_crossing_chords(),
        ];
        for a in &fixtures {
            assert!(is_isomorphic_small(a, a).unwrap());
            for b in &fixtures {
                assert_eq!(is_isomorphic_small(a, b).unwrap(), is_isomorphic_small(b, a).unwrap());
            }
        }
    }

    #[test]
    fn edges_are_lexicographic() {
        let g = Graph::new(4, [(3, 2), (1, 0), (2, 0)]).unwrap();
        assert_eq!(g.edge_vec(), vec![(0, 1), (0, 2), (2, 3)]);
    }
}
