//! Plain-text edge lists and generator metadata sidecars.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use seedbuf_core::{Graph, GraphError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge list contains no edges")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    /// Field separator; `None` splits on any whitespace.
    pub delimiter: Option<char>,
    /// Smallest valid label; lower values are rejected.
    pub index_base: u64,
    /// Lines starting with this prefix are skipped.
    pub skip_prefix: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { delimiter: None, index_base: 0, skip_prefix: "#".into() }
    }
}

/// A graph together with the file's original node labels.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `labels[v]` is the label node `v` carried in the file.
    pub labels: Vec<u64>,
}

/// Reads one edge per line; tokens after the first two are ignored. Labels
/// are renumbered densely from 0 in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R, opts: &LoadOptions) -> Result<LoadedGraph, LoadError> {
    let mut ids: HashMap<u64, u64> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || (!opts.skip_prefix.is_empty() && trimmed.starts_with(&opts.skip_prefix)) {
            continue;
        }
        let mut tokens: Box<dyn Iterator<Item = &str>> = match opts.delimiter {
            None => Box::new(trimmed.split_whitespace()),
            Some(d) => Box::new(trimmed.split(d).map(str::trim)),
        };
        let mut endpoint = || -> Result<u64, LoadError> {
            let tok = tokens.next().ok_or_else(|| LoadError::Parse {
                line: lineno,
                message: "expected two node ids".into(),
            })?;
            let label: u64 = tok.parse().map_err(|_| LoadError::Parse {
                line: lineno,
                message: format!("invalid node id {tok:?}"),
            })?;
            if label < opts.index_base {
                return Err(LoadError::Parse {
                    line: lineno,
                    message: format!("node id {label} below index base {}", opts.index_base),
                });
            }
            let next = ids.len() as u64;
            Ok(*ids.entry(label).or_insert_with(|| {
                labels.push(label);
                next
            }))
        };
        let u = endpoint()?;
        let v = endpoint()?;
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(LoadError::Empty);
    }
    let graph = Graph::from_edges(edges, Some(labels.len()))?;
    Ok(LoadedGraph { graph, labels })
}

pub fn load_edge_list_path(path: &Path, opts: &LoadOptions) -> Result<LoadedGraph, LoadError> {
    let f = File::open(path)?;
    load_edge_list(BufReader::new(f), opts)
}

/// Writes `u v` per edge, `u < v`, ascending.
pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> io::Result<()> {
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()
}

/// Writes the edge list to `path` and a `key=value` sidecar to `path.meta`.
pub fn save_with_sidecar(path: &Path, g: &Graph, meta: &[(&str, String)]) -> io::Result<()> {
    write_edge_list(BufWriter::new(File::create(path)?), g)?;
    let mut side = BufWriter::new(File::create(sidecar_path(path))?);
    for (k, v) in meta {
        writeln!(side, "{k}={v}")?;
    }
    writeln!(side, "nodes={}", g.node_count())?;
    writeln!(side, "edges={}", g.edge_count())?;
    side.flush()
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    s.into()
}

/// Parses a `key=value` sidecar; blank lines and `#` comments are skipped.
pub fn read_sidecar(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, opts: &LoadOptions) -> Result<LoadedGraph, LoadError> {
        load_edge_list(text.as_bytes(), opts)
    }

    #[test]
    fn minimal_path() {
        let l = load("0 1\n1 2\n", &LoadOptions::default()).unwrap();
        assert_eq!(l.graph.node_count(), 3);
        assert_eq!(l.graph.edge_count(), 2);
    }

    #[test]
    fn comma_one_based_with_comment() {
        let opts = LoadOptions { delimiter: Some(','), index_base: 1, skip_prefix: "#".into() };
        let l = load("# c\n1,2\n2,3\n", &opts).unwrap();
        assert_eq!(l.labels, vec![1, 2, 3]);
        let e: Vec<_> = l.graph.edges().collect();
        assert_eq!(e, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn weight_column_ignored() {
        let l = load("0 1 0.5\n", &LoadOptions::default()).unwrap();
        assert_eq!(l.graph.edge_count(), 1);
    }

    #[test]
    fn first_appearance_order() {
        let l = load("10 7\n7 3\n", &LoadOptions::default()).unwrap();
        assert_eq!(l.labels, vec![10, 7, 3]);
        assert!(l.graph.has_edge(0, 1) && l.graph.has_edge(1, 2));
    }

    #[test]
    fn bad_token_reports_line() {
        let err = load("0 1\n\n1 x\n", &LoadOptions::default()).unwrap_err();
        match err {
            LoadError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("5\n", &LoadOptions::default()), Err(LoadError::Parse { line: 1, .. })));
        assert!(matches!(load("-1 2\n", &LoadOptions::default()), Err(LoadError::Parse { .. })));
    }

    #[test]
    fn below_base_rejected() {
        let opts = LoadOptions { index_base: 1, ..Default::default() };
        assert!(matches!(load("0 1\n", &opts), Err(LoadError::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(load("# nothing\n\n", &LoadOptions::default()), Err(LoadError::Empty)));
    }

    #[test]
    fn sidecar_parse() {
        let kv = read_sidecar("model=ba\n# x\nn = 10\n\n");
        assert_eq!(kv, vec![("model".into(), "ba".into()), ("n".into(), "10".into())]);
    }
}
