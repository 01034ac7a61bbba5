use std::path::{Path, PathBuf};

use divcurve::coarsen::coarsen_sequence;
use divcurve::diversity::{derive_seed, derive_task_seed, stream, Phase};
use divcurve::genperturb::Manifest;
use divcurve::io::{write_jsonl_dataset, GraphRecord};
use divcurve::{
    curve_distance_matrix, distinguish_pair, graph_spread, knn_cv_accuracy, permutation_test, perturbation_sweep,
    silhouette_score, spearman, triangulation_curve, CurveSet, Dataset, DistinguishMode, Error,
};
use log::info;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_degrees, KindArg, RunConfig};
use crate::error::{CliError, Result};
use crate::files::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveFormat {
    Csv,
    Jsonl,
}

/// Write the dataset described by `manifest` plus a sidecar
/// `<out>.manifest.json` echoing the resolved manifest.
pub fn generate(manifest: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut m: Manifest = serde_json::from_str(&read_text(manifest)?).map_err(Error::from)?;
    if let Some(s) = seed {
        m.seed = s;
    }
    m.validate()?;
    let name = out
        .file_stem()
        .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    let ds = m.generate(&name)?;
    let digest = m.digest()?;
    info!("generated {} graphs", ds.len());

    let mut buf = header(&digest, m.seed).into_bytes();
    write_jsonl_dataset(&ds, &mut buf)?;
    write_text(Some(out), std::str::from_utf8(&buf).expect("JSON is UTF-8"))?;

    let mut echo = serde_json::to_value(&m).map_err(Error::from)?;
    echo["graphs"] = ds.len().into();
    write_text(
        Some(&out.with_extension("manifest.json")),
        &report(echo, &digest, m.seed),
    )
}

pub struct CurveArgs<'a> {
    pub dataset: Option<&'a Path>,
    pub triangulations: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub format: CurveFormat,
    pub dump_distances: Option<&'a Path>,
    pub dump_coarse: Option<&'a Path>,
}

pub fn curve(cfg: &RunConfig, args: &CurveArgs) -> Result<()> {
    let coarsening = cfg.coarsening();
    let (set, skeletons) = match (args.dataset, args.triangulations) {
        (Some(path), None) => {
            cfg.require_graph_metric()?;
            let ds = load_dataset(path)?;
            let scales = cfg.scales.resolve(ds.max_nodes());
            (CurveSet::compute(&ds, &scales, &coarsening)?, ds)
        }
        (None, Some(path)) => {
            let tris = load_triangulations(path)?;
            let max = tris.iter().map(|(t, _)| t.n()).max().unwrap_or(0);
            let scales = cfg.scales.resolve(max);
            let curves = tris
                .par_iter()
                .enumerate()
                .map(|(i, (t, _))| triangulation_curve(t, &scales, &coarsening, cfg.hodge(), i as u64))
                .collect::<divcurve::Result<Vec<_>>>()?;
            let skeletons = tris.iter().map(|(t, l)| t.one_skeleton().with_label(*l)).collect();
            (CurveSet::new(curves)?, Dataset::new("skeletons", skeletons)?)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --dataset or --triangulations".into(),
            ))
        }
    };
    info!("computed {} curves at {} scales", set.len(), set.scales().len());
    let digest = cfg.digest();
    let body = match args.format {
        CurveFormat::Csv => set.to_csv(),
        CurveFormat::Jsonl => set.to_jsonl()?,
    };
    write_text(args.out, &format!("{}{body}", header(&digest, cfg.seed)))?;

    if let Some(dir) = args.dump_distances {
        dump_distances(cfg, args.triangulations, &skeletons, dir, &digest)?;
    }
    if let Some(path) = args.dump_coarse {
        dump_coarse(cfg, &skeletons, set.scales(), path, &digest)?;
    }
    Ok(())
}

fn dump_distances(cfg: &RunConfig, tris: Option<&Path>, ds: &Dataset, dir: &Path, digest: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let tables: Vec<String> = match (cfg.hodge(), tris) {
        (Some(h), Some(path)) => load_triangulations(path)?
            .iter()
            .map(|(t, _)| Ok(t.hodge_heat_table(h.k, h.time)?.to_csv()))
            .collect::<Result<_>>()?,
        _ => {
            let metric = cfg.require_graph_metric()?;
            ds.graphs
                .iter()
                .map(|g| Ok(metric.pairwise(g)?.to_csv()))
                .collect::<Result<_>>()?
        }
    };
    for (i, t) in tables.iter().enumerate() {
        let path = dir.join(format!("graph_{i}.csv"));
        write_text(Some(&path), &format!("{}{t}", header(digest, cfg.seed)))?;
    }
    Ok(())
}

/// Every coarsened graph used by the curves, one JSON object per level.
fn dump_coarse(cfg: &RunConfig, ds: &Dataset, scales: &[usize], path: &Path, digest: &str) -> Result<()> {
    let coarsening = cfg.coarsening();
    let scorer = coarsening.edge_scorer()?;
    let mut out = header(digest, cfg.seed);
    for (i, g) in ds.graphs.iter().enumerate() {
        let down: Vec<usize> = scales.iter().copied().filter(|&s| s <= g.n()).collect();
        if down.is_empty() {
            continue;
        }
        for r in 0..cfg.repeats as u64 {
            let mut rng = stream(derive_seed(cfg.seed, i as u64, r, Phase::Down));
            for level in coarsen_sequence(g, &down, &scorer, &mut rng)? {
                let rec = GraphRecord::from(&level.graph);
                let line = json!({
                    "graph": i,
                    "repeat": r,
                    "target": level.target,
                    "reached": level.reached,
                    "n": rec.n,
                    "edges": rec.edges,
                });
                out.push_str(&line.to_string());
                out.push('\n');
            }
        }
    }
    write_text(Some(path), &out)
}

pub enum Analysis {
    Dist {
        curves: PathBuf,
    },
    Permtest {
        a: PathBuf,
        b: PathBuf,
    },
    Knn {
        curves: PathBuf,
        dataset: PathBuf,
        k: usize,
        folds: usize,
        group_by_size: bool,
    },
    Silhouette {
        curves: PathBuf,
        dataset: PathBuf,
    },
    Spearman {
        input: PathBuf,
        x: Option<String>,
        y: Option<String>,
    },
    Distinguish {
        g: PathBuf,
        h: PathBuf,
    },
    Sweep {
        dataset: PathBuf,
        kind: KindArg,
        degrees: String,
    },
}

fn labels_of(ds: &Dataset) -> Result<Vec<i64>> {
    ds.graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.label()
                .ok_or_else(|| CliError::Usage(format!("graph {i} of {} has no label", ds.name)))
        })
        .collect()
}

fn labelled_distances(
    cfg: &RunConfig,
    curves: &Path,
    dataset: &Path,
) -> Result<(CurveSet, divcurve::DistanceMatrix, Vec<i64>, Dataset)> {
    let set = load_curves(curves)?;
    let ds = load_dataset(dataset)?;
    if ds.len() != set.len() {
        return Err(CliError::Usage(format!("{} curves for {} graphs", set.len(), ds.len())));
    }
    let labels = labels_of(&ds)?;
    let dist = curve_distance_matrix(&set, cfg.p_norm)?;
    Ok((set, dist, labels, ds))
}

/// Run an analysis; `out` receives the CSV product of `dist` and `sweep`,
/// every other report goes to stdout.
pub fn analyze(cfg: &RunConfig, what: &Analysis, out: Option<&Path>) -> Result<()> {
    let seed = cfg.seed;
    match what {
        Analysis::Dist { curves } => {
            let set = load_curves(curves)?;
            let dist = curve_distance_matrix(&set, cfg.p_norm)?;
            write_text(out, &format!("{}{}", header(&set_digest(&set), seed), dist.to_csv()))
        }
        Analysis::Permtest { a, b } => {
            let (a, b) = (load_curves(a)?, load_curves(b)?);
            let t = permutation_test(&a, &b, cfg.perms, &mut stream(derive_task_seed(seed, 0, 0x7e57)))?;
            let digest = set_digest(&CurveSet {
                curves: a.curves.iter().chain(&b.curves).cloned().collect(),
            });
            let body = json!({
                "test": "permtest",
                "statistic": t.statistic,
                "p_value": t.p_value,
                "permutations": t.permutations,
            });
            write_text(None, &report(body, &digest, seed))
        }
        Analysis::Knn {
            curves,
            dataset,
            k,
            folds,
            group_by_size,
        } => {
            let (set, dist, labels, ds) = labelled_distances(cfg, curves, dataset)?;
            let groups: Option<Vec<usize>> = group_by_size.then(|| ds.graphs.iter().map(|g| g.n()).collect());
            let mut rng = stream(derive_task_seed(seed, 0, 0x6e6e));
            let (acc, std) = knn_cv_accuracy(&dist, &labels, *k, *folds, groups.as_deref(), &mut rng)?;
            let body =
                json!({ "test": "knn", "accuracy": acc, "std": std, "k": k, "folds": folds, "p_norm": cfg.p_norm });
            write_text(None, &report(body, &set_digest(&set), seed))
        }
        Analysis::Silhouette { curves, dataset } => {
            let (set, dist, labels, _) = labelled_distances(cfg, curves, dataset)?;
            let body =
                json!({ "test": "silhouette", "silhouette": silhouette_score(&dist, &labels)?, "p_norm": cfg.p_norm });
            write_text(None, &report(body, &set_digest(&set), seed))
        }
        Analysis::Spearman { input, x, y } => {
            let text = read_text(input)?;
            let (xs, ys, names) = read_columns(&text, x.as_deref(), y.as_deref())?;
            let digest = embedded_digest(&text).unwrap_or_else(|| divcurve::diversity::short_digest(&text));
            let body = json!({ "test": "spearman", "x": names.0, "y": names.1, "rho": spearman(&xs, &ys)? });
            write_text(None, &report(body, &digest, seed))
        }
        Analysis::Distinguish { g, h } => {
            let metric = cfg.require_graph_metric()?;
            let (g, h) = (load_graph(g)?, load_graph(h)?);
            let d = |mode| distinguish_pair(&g, &h, mode, &metric, cfg.tolerance);
            let body = json!({
                "test": "distinguish",
                "spread_only": d(DistinguishMode::SpreadOnly)?,
                "one_edge_curve": d(DistinguishMode::OneEdgeCurve)?,
                "spread_g": graph_spread(&g, &metric)?,
                "spread_h": graph_spread(&h, &metric)?,
                "tolerance": cfg.tolerance,
            });
            write_text(None, &report(body, &cfg.digest(), seed))
        }
        Analysis::Sweep { dataset, kind, degrees } => {
            cfg.require_graph_metric()?;
            let ds = load_dataset(dataset)?;
            let degrees = parse_degrees(degrees)?;
            let scales = cfg.scales.resolve(ds.max_nodes());
            let res = perturbation_sweep(&ds, (*kind).into(), &degrees, &cfg.coarsening(), &scales, seed)?;
            let digest = cfg.digest();
            if let Some(path) = out {
                write_text(Some(path), &format!("{}{}", header(&digest, seed), res.to_csv()))?;
            }
            let body = json!({
                "test": "sweep",
                "scenario": res.scenario.to_string(),
                "degrees": res.degrees,
                "mean_norms": res.mean_norms,
                "rho": res.rho,
            });
            write_text(None, &report(body, &digest, seed))
        }
    }
}

type Columns = (Vec<f64>, Vec<f64>, (String, String));

/// Two numeric columns of a headed CSV, by name or else the last two.
fn read_columns(text: &str, x: Option<&str>, y: Option<&str>) -> Result<Columns> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty table".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    if head.len() < 2 {
        return Err(CliError::Usage("table needs at least two columns".into()));
    }
    let find = |name: Option<&str>, default: usize| -> Result<usize> {
        match name {
            None => Ok(default),
            Some(n) => head
                .iter()
                .position(|h| *h == n)
                .ok_or_else(|| CliError::Usage(format!("no column named {n:?}"))),
        }
    };
    let (ix, iy) = (find(x, head.len() - 2)?, find(y, head.len() - 1)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (ln, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let cell = |i: usize| -> Result<f64> {
            cells
                .get(i)
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage(format!("row {}: column {} is not a number", ln + 1, head[i])))
        };
        xs.push(cell(ix)?);
        ys.push(cell(iy)?);
    }
    Ok((xs, ys, (head[ix].to_string(), head[iy].to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_by_name_and_default() {
        let t = "# digest=x\nscenario,degree,mean_norm\nadd_edge,0.1,5\nadd_edge,0.2,4\n";
        let (x, y, names) = read_columns(t, None, None).unwrap();
        assert_eq!((x, y), (vec![0.1, 0.2], vec![5.0, 4.0]));
        assert_eq!(names, ("degree".to_string(), "mean_norm".to_string()));
        assert!(read_columns(t, Some("scenario"), None).is_err());
        assert!(read_columns(t, Some("nope"), None).is_err());
    }
}
