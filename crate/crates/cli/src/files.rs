use std::io::Write;
use std::path::Path;

use divcurve::diversity::short_digest;
use divcurve::io::{parse_edge_list, read_jsonl_dataset, read_jsonl_triangulations};
use divcurve::{CurveSet, Dataset, Triangulation};
use serde_json::Value;

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Write to `path`, or to stdout when absent.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn header(digest: &str, seed: u64) -> String {
    format!("# digest={digest} seed={seed}\n")
}

/// Pretty JSON with `seed` and `digest` appended to the object.
pub fn report(mut body: Value, digest: &str, seed: u64) -> String {
    let obj = body.as_object_mut().expect("reports are JSON objects");
    obj.insert("seed".into(), seed.into());
    obj.insert("digest".into(), digest.into());
    let mut s = serde_json::to_string_pretty(&body).expect("serializable report");
    s.push('\n');
    s
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
}

fn is_jsonl(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("jsonl" | "json"))
}

/// A JSONL dataset, or a single graph given as an edge list.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = read_text(path)?;
    if is_jsonl(path) {
        Ok(read_jsonl_dataset(&stem(path), text.as_bytes())?)
    } else {
        Ok(Dataset::new(stem(path), vec![parse_edge_list(&text)?])?)
    }
}

pub fn load_graph(path: &Path) -> Result<divcurve::Graph> {
    let mut ds = load_dataset(path)?;
    if ds.len() != 1 {
        return Err(CliError::Usage(format!(
            "{} holds {} graphs, expected one",
            path.display(),
            ds.len()
        )));
    }
    Ok(ds.graphs.remove(0))
}

pub fn load_triangulations(path: &Path) -> Result<Vec<(Triangulation, Option<i64>)>> {
    Ok(read_jsonl_triangulations(read_text(path)?.as_bytes())?)
}

/// Digest recorded in a `# digest=...` line, if any.
pub fn embedded_digest(text: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .flat_map(|l| l[1..].split_whitespace())
        .find_map(|kv| kv.strip_prefix("digest=").map(str::to_string))
}

/// Curves written by `curve`, as CSV or JSONL.
pub fn load_curves(path: &Path) -> Result<CurveSet> {
    let text = read_text(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty() && !l.starts_with('#'));
    if first.is_some_and(|l| l.trim_start().starts_with('{')) {
        Ok(CurveSet::from_jsonl(&text)?)
    } else {
        let digest = embedded_digest(&text).unwrap_or_default();
        Ok(CurveSet::from_csv(&text, &digest)?)
    }
}

/// Common digest of a curve set, or a digest over the distinct ones.
pub fn set_digest(set: &CurveSet) -> String {
    let mut ds: Vec<&str> = set.curves.iter().map(|c| c.config_digest.as_str()).collect();
    ds.sort_unstable();
    ds.dedup();
    match ds.as_slice() {
        [one] => one.to_string(),
        many => short_digest(&many.join(";")),
    }
}
