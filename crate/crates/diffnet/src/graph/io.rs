//! Edge-list serialization: one "u v" pair per line (0-indexed), plus a
//! companion label file with one "v s(v)" line per node. The loader
//! re-validates every graph invariant.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::graph::{Graph, GraphError};

/// Writes `<path>` as the edge list and `<label_path>` as the labels.
pub fn save_graph(g: &Graph, edge_path: &Path, label_path: &Path) -> Result<(), GraphError> {
    let mut out = String::new();
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    fs::File::create(edge_path)?.write_all(out.as_bytes())?;

    let mut out = String::new();
    for v in 0..g.node_count() {
        out.push_str(&format!("{v} {}\n", g.label(v)));
    }
    fs::File::create(label_path)?.write_all(out.as_bytes())?;
    Ok(())
}

/// Loads and validates a graph written by [`save_graph`].
pub fn load_graph(edge_path: &Path, label_path: &Path) -> Result<Graph, GraphError> {
    let edge_text = fs::read_to_string(edge_path)?;
    let mut edges = Vec::new();
    let mut max_node = 0usize;
    for (i, line) in edge_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let u = parse_node(parts.next(), i)?;
        let v = parse_node(parts.next(), i)?;
        if parts.next().is_some() {
            return Err(GraphError::Parse { line: i + 1, message: "expected 'u v'".into() });
        }
        max_node = max_node.max(u).max(v);
        edges.push((u, v));
    }

    let label_text = fs::read_to_string(label_path)?;
    let mut labels_seen: Vec<Option<u8>> = Vec::new();
    for (i, line) in label_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let v = parse_node(parts.next(), i)?;
        let s = parse_node(parts.next(), i)?;
        if s > 1 {
            return Err(GraphError::Parse { line: i + 1, message: "label must be 0 or 1".into() });
        }
        if v >= labels_seen.len() {
            labels_seen.resize(v + 1, None);
        }
        if labels_seen[v].replace(s as u8).is_some() {
            return Err(GraphError::Parse { line: i + 1, message: format!("duplicate node {v}") });
        }
        max_node = max_node.max(v);
    }
    let node_count = max_node + 1;
    if labels_seen.len() < node_count {
        labels_seen.resize(node_count, None);
    }
    let mut labels = Vec::with_capacity(node_count);
    for (v, s) in labels_seen.iter().enumerate() {
        match s {
            Some(s) => labels.push(*s),
            None => {
                return Err(GraphError::Parse {
                    line: 0,
                    message: format!("missing label for node {v}"),
                })
            }
        }
    }
    Graph::from_edges(node_count, &edges)?.with_labels(labels)
}

fn parse_node(token: Option<&str>, line: usize) -> Result<usize, GraphError> {
    token
        .ok_or(GraphError::Parse { line: line + 1, message: "missing field".into() })?
        .parse()
        .map_err(|e| GraphError::Parse { line: line + 1, message: format!("{e}") })
}
