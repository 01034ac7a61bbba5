//! Text formats for graphs and datasets: plain edge lists, the TU benchmark
//! collection layout, and one-graph-per-line JSON.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::simplicial::{Triangulation, TriangulationRecord};

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.trim().parse::<usize>().map_err(|e| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, got {tok:?} ({e})"),
    })
}

/// Parse `"n m"` followed by `m` lines `"u v"` (0-indexed).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header line \"n m\"".into(),
        })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header must be \"n m\", got {header:?}"),
        });
    }
    let n = parse_usize(toks[0], hline)?;
    let m = parse_usize(toks[1], hline)?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        if line.trim().is_empty() {
            continue;
        }
        if edges.len() == m {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than the declared {m} edges"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("edge line must be \"u v\", got {line:?}"),
            });
        }
        let u = parse_usize(toks[0], lineno)?;
        let v = parse_usize(toks[1], lineno)?;
        if u >= n || v >= n {
            return Err(Error::Range(format!(
                "line {lineno}: endpoint of ({u}, {v}) outside [0, {n})"
            )));
        }
        if u == v {
            return Err(Error::Validation(format!("line {lineno}: self-loop on node {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line + 1,
            msg: format!("declared {m} edges but found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

/// Inverse of [`parse_edge_list`] (edges in lexicographic order).
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

fn nonempty_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parse the TU benchmark layout (`DS_A`, `DS_graph_indicator`, and the
/// optional `DS_graph_labels` / `DS_node_attributes` files).
pub fn parse_tu_dataset(
    name: &str,
    adjacency: &str,
    graph_indicator: &str,
    labels: Option<&str>,
    node_attributes: Option<&str>,
) -> Result<Dataset> {
    let indicator: Vec<usize> = nonempty_lines(graph_indicator)
        .map(|(ln, l)| parse_usize(l, ln))
        .collect::<Result<_>>()?;
    let num_graphs = indicator.iter().copied().max().unwrap_or(0);
    if indicator.contains(&0) {
        return Err(Error::Integrity("graph ids are 1-indexed; found 0".into()));
    }
    let mut sizes = vec![0usize; num_graphs];
    let mut local = Vec::with_capacity(indicator.len());
    for &gid in &indicator {
        local.push(sizes[gid - 1]);
        sizes[gid - 1] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Integrity(format!(
            "graph ids are not contiguous: graph {} has no nodes",
            empty + 1
        )));
    }

    let mut edge_lists = vec![Vec::new(); num_graphs];
    for (ln, line) in nonempty_lines(adjacency) {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: ln,
                msg: format!("adjacency line must be \"u, v\", got {line:?}"),
            });
        }
        let u = parse_usize(toks[0], ln)?;
        let v = parse_usize(toks[1], ln)?;
        for x in [u, v] {
            if x == 0 || x > indicator.len() {
                return Err(Error::Integrity(format!(
                    "adjacency line {ln} references node {x} absent from the graph indicator"
                )));
            }
        }
        let (gu, gv) = (indicator[u - 1], indicator[v - 1]);
        if gu != gv {
            return Err(Error::Integrity(format!(
                "adjacency line {ln} joins graphs {gu} and {gv}"
            )));
        }
        if u == v {
            return Err(Error::Validation(format!("adjacency line {ln}: self-loop on node {u}")));
        }
        edge_lists[gu - 1].push((local[u - 1], local[v - 1]));
    }

    let graph_labels: Option<Vec<i64>> = match labels {
        Some(text) => {
            let parsed: Vec<i64> = nonempty_lines(text)
                .map(|(ln, l)| {
                    l.parse::<i64>().map_err(|e| Error::Parse {
                        line: ln,
                        msg: format!("bad graph label {l:?} ({e})"),
                    })
                })
                .collect::<Result<_>>()?;
            if parsed.len() != num_graphs {
                return Err(Error::Integrity(format!(
                    "graph indicator names {num_graphs} graphs but {} labels are listed",
                    parsed.len()
                )));
            }
            Some(parsed)
        }
        None => None,
    };

    let attributes: Option<Vec<Vec<f64>>> = match node_attributes {
        Some(text) => {
            let rows: Vec<Vec<f64>> = nonempty_lines(text)
                .map(|(ln, l)| {
                    l.split(',')
                        .map(|t| {
                            t.trim().parse::<f64>().map_err(|e| Error::Parse {
                                line: ln,
                                msg: format!("bad attribute {t:?} ({e})"),
                            })
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            if rows.len() != indicator.len() {
                return Err(Error::Integrity(format!(
                    "{} attribute rows for {} nodes",
                    rows.len(),
                    indicator.len()
                )));
            }
            if let Some(first) = rows.first() {
                if let Some(i) = rows.iter().position(|r| r.len() != first.len()) {
                    return Err(Error::Validation(format!(
                        "attribute row {} has {} columns, expected {}",
                        i + 1,
                        rows[i].len(),
                        first.len()
                    )));
                }
            }
            Some(rows)
        }
        None => None,
    };

    let mut per_graph_features: Vec<Vec<Vec<f64>>> = vec![Vec::new(); num_graphs];
    if let Some(rows) = attributes {
        for (node, row) in rows.into_iter().enumerate() {
            per_graph_features[indicator[node] - 1].push(row);
        }
    }

    let mut graphs = Vec::with_capacity(num_graphs);
    for (gi, edges) in edge_lists.into_iter().enumerate() {
        let mut g = Graph::new(sizes[gi], edges)?;
        if node_attributes.is_some() {
            g = g.with_features(std::mem::take(&mut per_graph_features[gi]))?;
        }
        g = g.with_label(graph_labels.as_ref().map(|l| l[gi]));
        graphs.push(g);
    }
    Dataset::new(name, graphs)
}

/// One line of the JSONL dataset format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<i64>,
}

impl From<&Graph> for GraphRecord {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            features: g.features().map(<[_]>::to_vec),
            label: g.label(),
        }
    }
}

impl TryFrom<GraphRecord> for Graph {
    type Error = Error;

    fn try_from(r: GraphRecord) -> Result<Graph> {
        let mut g = Graph::new(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))?;
        if let Some(f) = r.features {
            g = g.with_features(f)?;
        }
        Ok(g.with_label(r.label))
    }
}

/// Blank lines and lines starting with `#` are skipped.
pub fn read_jsonl_dataset(name: &str, reader: impl BufRead) -> Result<Dataset> {
    let mut graphs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: GraphRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        graphs.push(Graph::try_from(rec)?);
    }
    Dataset::new(name, graphs)
}

/// Triangulations in the [`TriangulationRecord`] line format, with labels.
pub fn read_jsonl_triangulations(reader: impl BufRead) -> Result<Vec<(Triangulation, Option<i64>)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: TriangulationRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        let label = rec.label;
        out.push((Triangulation::try_from(rec)?, label));
    }
    Ok(out)
}

pub fn write_jsonl_dataset(ds: &Dataset, mut w: impl Write) -> Result<()> {
    for g in &ds.graphs {
        serde_json::to_writer(&mut w, &GraphRecord::from(g))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{component_count, is_isomorphic_small, named};

    #[test]
    fn edge_list_examples() {
        let k3 = parse_edge_list("3 3\n0 1\n1 2\n0 2").unwrap();
        assert!(is_isomorphic_small(&k3, &named::complete(3)).unwrap());
        let k1 = parse_edge_list("1 0").unwrap();
        assert_eq!((k1.n(), k1.m()), (1, 0));
        let p4 = parse_edge_list("4 3\n0 1\n1 2\n2 3").unwrap();
        assert_eq!(p4.m(), 3);
        assert_eq!(component_count(&p4), 1);
    }

    #[test]
    fn edge_list_errors() {
        match parse_edge_list("3 2\n0 1\n1 x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_edge_list("3 1\n0 3"), Err(Error::Range(_))));
        assert!(matches!(parse_edge_list("3 1\n1 1"), Err(Error::Validation(_))));
        assert!(matches!(parse_edge_list("3 2\n0 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_edge_list("2 2\n0 1\n1 0").unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn tu_symmetric_duplicates_collapse() {
        let ds = parse_tu_dataset("t", "1, 2\n2, 1\n3, 4\n4, 3", "1\n1\n2\n2", None, None).unwrap();
        assert_eq!(ds.len(), 2);
        for g in &ds.graphs {
            assert_eq!((g.n(), g.m()), (2, 1));
            assert_eq!(g.label(), None);
        }
    }

    #[test]
    fn tu_proteins_shaped_fixture() {
        // graph 1: triangle on nodes 1..3, graph 2: path 4-5-6-7, graph 3: single edge 8-9
        let adjacency = "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5, 6\n6, 5\n6, 7\n7, 6\n8, 9\n9, 8\n";
        let indicator = "1\n1\n1\n2\n2\n2\n2\n3\n3\n";
        let labels = "1\n0\n1\n";
        let attrs = "0.5\n1.0\n1.5\n2.0\n2.5\n3.0\n3.5\n4.0\n4.5\n";
        let ds = parse_tu_dataset("PROTEINS", adjacency, indicator, Some(labels), Some(attrs)).unwrap();

        // parse-by-hand oracle
        let expected = [
            (3, vec![(0, 1), (0, 2), (1, 2)], 1, vec![0.5, 1.0, 1.5]),
            (4, vec![(0, 1), (1, 2), (2, 3)], 0, vec![2.0, 2.5, 3.0, 3.5]),
            (2, vec![(0, 1)], 1, vec![4.0, 4.5]),
        ];
        assert_eq!(ds.len(), 3);
        for (g, (n, edges, label, feats)) in ds.graphs.iter().zip(expected) {
            assert_eq!(g.n(), n);
            assert_eq!(g.edge_vec(), edges);
            assert_eq!(g.label(), Some(label));
            let got: Vec<f64> = g.features().unwrap().iter().map(|r| r[0]).collect();
            assert_eq!(got, feats);
        }
    }

    #[test]
    fn tu_integrity_errors() {
        // indicator names 3 graphs, labels list 2
        let r = parse_tu_dataset("t", "1, 2\n", "1\n1\n2\n3\n", Some("0\n1\n"), None);
        assert!(matches!(r, Err(Error::Integrity(_))));
        // node 5 missing from the indicator
        let r = parse_tu_dataset("t", "1, 5\n", "1\n1\n", None, None);
        assert!(matches!(r, Err(Error::Integrity(_))));
        // non-contiguous graph ids
        let r = parse_tu_dataset("t", "", "1\n3\n", None, None);
        assert!(matches!(r, Err(Error::Integrity(_))));
        // ragged attributes
        let r = parse_tu_dataset("t", "1, 2\n", "1\n1\n", None, Some("1.0, 2.0\n3.0\n"));
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn jsonl_roundtrip() {
        let g = named::house()
            .with_features((0..5).map(|i| vec![i as f64, 0.5]).collect())
            .unwrap()
            .with_label(Some(3));
        let ds = Dataset::new("h", vec![g, named::cycle(4)]).unwrap();
        let mut buf = Vec::new();
        write_jsonl_dataset(&ds, &mut buf).unwrap();
        let back = read_jsonl_dataset("h", buf.as_slice()).unwrap();
        assert_eq!(back, ds);
    }
}
