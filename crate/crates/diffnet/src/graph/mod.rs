//! Undirected simple graphs with binary node labels, synthetic generators
//! with prescribed degree distribution / assortativity / degree-label
//! correlation, and the exact degree statistics every other module consumes.

mod generate;
mod io;
mod labels;
mod rewire;
mod stats;

pub use generate::{generate_configuration_model, generate_erdos_renyi};
pub use io::{load_graph, save_graph};
pub use labels::{assign_labels, LabeledGraph};
pub use rewire::{rewire_to_assortativity, RewiredGraph};
pub use stats::DegreeStats;

use std::collections::HashSet;
use std::fmt;

/// Errors from graph construction, generation, and I/O.
#[derive(Debug)]
pub enum GraphError {
    InvalidParameter(String),
    SelfLoop { node: usize },
    ParallelEdge { u: usize, v: usize },
    IsolatedNode { node: usize },
    NodeOutOfRange { node: usize, node_count: usize },
    GenerationFailed(String),
    Io(std::io::Error),
    Parse { line: usize, message: String },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            GraphError::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            GraphError::ParallelEdge { u, v } => write!(f, "parallel edge {u} -- {v}"),
            GraphError::IsolatedNode { node } => write!(f, "node {node} has degree 0"),
            GraphError::NodeOutOfRange { node, node_count } => {
                write!(f, "node {node} out of range for {node_count} nodes")
            }
            GraphError::GenerationFailed(msg) => write!(f, "generation failed: {msg}"),
            GraphError::Io(e) => write!(f, "io error: {e}"),
            GraphError::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e)
    }
}

/// Immutable simple undirected graph with per-node binary labels.
///
/// Invariants enforced at construction: no self-loops, no parallel edges,
/// symmetric adjacency, and every node has degree at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    /// CSR offsets; `offsets[v]..offsets[v+1]` indexes `neighbors`.
    offsets: Vec<usize>,
    /// Concatenated sorted neighbor lists (length `2|E|`).
    neighbors: Vec<u32>,
    /// Binary node states, 0 = susceptible, 1 = infected.
    labels: Vec<u8>,
    connected: bool,
    bipartite: bool,
}

impl Graph {
    /// Builds a graph from an undirected edge list, validating all invariants.
    /// All labels start at 0.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        if node_count < 1 {
            return Err(GraphError::InvalidParameter("node_count must be >= 1".into()));
        }
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= node_count {
                return Err(GraphError::NodeOutOfRange { node: u, node_count });
            }
            if v >= node_count {
                return Err(GraphError::NodeOutOfRange { node: v, node_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            let key = (u.min(v) as u32, u.max(v) as u32);
            if !seen.insert(key) {
                return Err(GraphError::ParallelEdge { u, v });
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        if let Some(node) = adjacency.iter().position(Vec::is_empty) {
            return Err(GraphError::IsolatedNode { node });
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_unstable();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let (connected, bipartite) = scan_structure(&offsets, &neighbors);
        Ok(Graph { offsets, neighbors, labels: vec![0; node_count], connected, bipartite })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// CSR offsets; `offsets()[v]` is the index of node v's first edge-end.
    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Largest degree D.
    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn label(&self, v: usize) -> u8 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Returns a copy with the given labels (adjacency shared structure).
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Graph, GraphError> {
        if labels.len() != self.node_count() {
            return Err(GraphError::InvalidParameter(format!(
                "labels length {} != node count {}",
                labels.len(),
                self.node_count()
            )));
        }
        if let Some(v) = labels.iter().position(|&s| s > 1) {
            return Err(GraphError::InvalidParameter(format!("label of node {v} is not 0/1")));
        }
        let mut g = self.clone();
        g.labels = labels;
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite
    }

    /// Degree histogram M(k), indexed by degree (index 0 unused).
    pub fn degree_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.max_degree() + 1];
        for v in 0..self.node_count() {
            counts[self.degree(v)] += 1;
        }
        counts
    }

    /// Iterates undirected edges as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(move |&v| (u, v as usize))
                .filter(|&(u, v)| u < v)
        })
    }

    /// Exact degree statistics census.
    pub fn stats(&self) -> DegreeStats<f64> {
        DegreeStats::from_graph(self)
    }

    /// Order-independent hash of the edge set; used to assert that label
    /// operations leave the adjacency untouched.
    pub fn edge_set_hash(&self) -> u64 {
        let mut acc = 0u64;
        for (u, v) in self.edges() {
            let key = ((u as u64) << 32) | v as u64;
            acc = acc.wrapping_add(crate::seed::splitmix64(key));
        }
        acc
    }
}

/// One BFS pass computing connectivity and 2-colorability.
fn scan_structure(offsets: &[usize], neighbors: &[u32]) -> (bool, bool) {
    let n = offsets.len() - 1;
    if n == 0 {
        return (true, true);
    }
    let mut color = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    let mut visited = 0usize;
    let mut bipartite = true;
    let mut connected = true;
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        if visited > 0 {
            connected = false;
        }
        color[start] = 0;
        visited += 1;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &neighbors[offsets[u]..offsets[u + 1]] {
                let v = v as usize;
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    visited += 1;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    bipartite = false;
                }
            }
        }
    }
    (connected, bipartite)
}
