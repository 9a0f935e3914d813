//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use diffnet::graph::{generate_configuration_model, Graph};

/// Star K_{1,n}: node 0 is the hub.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edges(leaves + 1, &edges).unwrap()
}

/// Path 0 - 1 - 2; node 1 is the hub.
pub fn path3() -> Graph {
    Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
}

/// Cycle C_n (2-regular).
pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Circulant graph with chords i±1, i±2: connected, 4-regular,
/// non-bipartite.
pub fn circulant4(n: usize) -> Graph {
    let mut edges = Vec::new();
    for v in 0..n {
        edges.push((v, (v + 1) % n));
        edges.push((v, (v + 2) % n));
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Triangle with a pendant node.
pub fn triangle_with_pendant() -> Graph {
    Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap()
}

/// Two triangles joined by a bridge.
pub fn two_triangles_bridged() -> Graph {
    Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap()
}

/// First connected power-law draw at or after `base_seed`.
pub fn connected_power_law(
    n: usize,
    alpha: f64,
    d_min: usize,
    d_max: usize,
    base_seed: u64,
) -> Graph {
    for seed in base_seed..base_seed + 100 {
        let g = generate_configuration_model(n, alpha, d_min, d_max, seed).unwrap();
        if g.is_connected() {
            return g;
        }
    }
    panic!("no connected power-law draw within 100 seeds");
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
