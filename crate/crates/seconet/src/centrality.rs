//! Node-importance scores used by targeted vaccination: degree,
//! betweenness, closeness, percolation, and eigenvector centrality.
//!
//! All scores are computed on the subgraph of joined persons (never-
//! joined persons are not "in the network" and score 0). Betweenness and
//! percolation use Brandes' dependency accumulation over ordered source
//! pairs; disconnected graphs simply contribute nothing across
//! components while keeping the global normalization constants.

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::growth::ContactNetwork;

/// Which score a [`CentralityScores`] table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityKind {
    Degree,
    Betweenness,
    Closeness,
    Percolation,
    Eigenvector,
}

/// A score per person id (never-joined persons hold 0), tagged with the
/// day it was computed so stale tables cannot silently drive a session.
#[derive(Debug, Clone)]
pub struct CentralityScores {
    pub kind: CentralityKind,
    /// Indexed by person id.
    pub values: Vec<f64>,
    pub computed_at: u32,
}

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const EIGEN_MAX_ITERATIONS: usize = 10_000;

// ---------------------------------------------------------------------
// Pure graph-level computations.
// ---------------------------------------------------------------------

/// Degree of every node.
pub fn degree_values(graph: &SimpleGraph) -> Vec<f64> {
    (0..graph.n()).map(|v| graph.degree(v) as f64).collect()
}

/// Brandes dependency accumulation: adds `source_weight(s) · δ_s(v)` to
/// `out[v]` for every source `s` with positive weight, where δ_s(v) is
/// the sum over targets t of the fraction of shortest s–t paths passing
/// through v.
fn brandes_accumulate(graph: &SimpleGraph, source_weight: impl Fn(usize) -> f64, out: &mut [f64]) {
    let n = graph.n();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();

    for s in 0..n {
        let w_s = source_weight(s);
        if !(w_s > 0.0) {
            continue;
        }
        for v in 0..n {
            dist[v] = usize::MAX;
            sigma[v] = 0.0;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s as u32);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v as usize];
            for &w in graph.neighbors(v as usize) {
                let wu = w as usize;
                if dist[wu] == usize::MAX {
                    dist[wu] = dv + 1;
                    queue.push_back(w);
                }
                if dist[wu] == dv + 1 {
                    sigma[wu] += sigma[v as usize];
                    preds[wu].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            let wu = w as usize;
            let coeff = (1.0 + delta[wu]) / sigma[wu];
            for &v in &preds[wu] {
                delta[v as usize] += sigma[v as usize] * coeff;
            }
            if wu != s {
                out[wu] += w_s * delta[wu];
            }
        }
    }
}

/// Betweenness centrality over ordered within-component pairs,
/// normalized by (n−1)(n−2). Graphs with fewer than 3 nodes score 0
/// everywhere.
pub fn betweenness_values(graph: &SimpleGraph) -> Vec<f64> {
    let n = graph.n();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    brandes_accumulate(graph, |_| 1.0, &mut out);
    let norm = ((n - 1) * (n - 2)) as f64;
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Closeness centrality: 1 / (sum of distances to the rest of the
/// node's component); nodes with no reachable peer score 0.
pub fn closeness_values(graph: &SimpleGraph) -> Vec<f64> {
    let n = graph.n();
    let mut out = vec![0.0; n];
    let mut dist = Vec::new();
    for v in 0..n {
        graph.bfs_distances(v, &mut dist);
        let total: u64 = dist
            .iter()
            .enumerate()
            .filter(|&(w, &d)| w != v && d != usize::MAX)
            .map(|(_, &d)| d as u64)
            .sum();
        if total > 0 {
            out[v] = 1.0 / total as f64;
        }
    }
    out
}

/// Percolation centrality: shortest-path dependency weighted by the
/// source's percolation state χ_s, scaled per node by
/// 1/((n−2)·(Σχ − χ_i)). Nodes whose scaling denominator is 0 score 0;
/// graphs with fewer than 3 nodes score 0 everywhere.
pub fn percolation_values(graph: &SimpleGraph, chi: &[f64]) -> Vec<f64> {
    let n = graph.n();
    assert_eq!(chi.len(), n, "one percolation state per node");
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    brandes_accumulate(graph, |s| chi[s], &mut out);
    let chi_total: f64 = chi.iter().sum();
    for v in 0..n {
        let denom = (n as f64 - 2.0) * (chi_total - chi[v]);
        out[v] = if denom > 0.0 { out[v] / denom } else { 0.0 };
    }
    out
}

/// Eigenvector centrality by shifted power iteration x ← normalize((A+I)x):
/// the +I shift defeats the ±λ spectral symmetry of bipartite graphs.
/// Scores are unit Euclidean length; isolated nodes score 0. An edgeless
/// graph yields all zeros without iterating.
///
/// On disconnected graphs the iteration converges to the leading
/// eigenvector of the dominant component (others decay to 0), which
/// keeps the residual ‖Ax − λx‖ well defined with a single Rayleigh λ.
pub fn eigenvector_values(
    graph: &SimpleGraph,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let n = graph.n();
    let active: Vec<usize> = (0..n).filter(|&v| graph.degree(v) > 0).collect();
    if active.is_empty() {
        log::debug!("eigenvector centrality on an edgeless graph: all scores 0");
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0f64; n];
    let init = 1.0 / (active.len() as f64).sqrt();
    for &v in &active {
        x[v] = init;
    }
    let mut y = vec![0.0f64; n];
    for _ in 0..max_iterations {
        for &v in &active {
            let mut acc = x[v]; // the +I shift
            for &w in graph.neighbors(v) {
                acc += x[w as usize];
            }
            y[v] = acc;
        }
        let norm = active.iter().map(|&v| y[v] * y[v]).sum::<f64>().sqrt();
        let mut diff = 0.0f64;
        for &v in &active {
            let new = y[v] / norm;
            diff = diff.max((new - x[v]).abs());
            x[v] = new;
        }
        if diff < tolerance {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        residual: eigen_residual(graph, &x),
    })
}

/// ‖Ax − λx‖₂ with λ the Rayleigh quotient xᵀAx / xᵀx; the convergence
/// quality measure for eigenvector scores.
pub fn eigen_residual(graph: &SimpleGraph, x: &[f64]) -> f64 {
    let n = graph.n();
    let mut ax = vec![0.0f64; n];
    for v in 0..n {
        for &w in graph.neighbors(v) {
            ax[v] += x[w as usize];
        }
    }
    let xx: f64 = x.iter().map(|v| v * v).sum();
    if xx == 0.0 {
        return 0.0;
    }
    let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>() / xx;
    x.iter()
        .zip(&ax)
        .map(|(&xi, &axi)| (axi - lambda * xi).powi(2))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------
// Network-level wrappers.
// ---------------------------------------------------------------------

fn scatter(network: &ContactNetwork, ids: &[u32], compact: Vec<f64>, kind: CentralityKind) -> CentralityScores {
    let mut values = vec![0.0; network.population()];
    for (idx, &pid) in ids.iter().enumerate() {
        values[pid as usize] = compact[idx];
    }
    CentralityScores {
        kind,
        values,
        computed_at: network.current_day,
    }
}

pub fn degree_centrality(network: &ContactNetwork) -> CentralityScores {
    let (graph, ids) = network.joined_view();
    let compact = degree_values(&graph);
    scatter(network, &ids, compact, CentralityKind::Degree)
}

pub fn betweenness_centrality(network: &ContactNetwork) -> CentralityScores {
    let (graph, ids) = network.joined_view();
    let compact = betweenness_values(&graph);
    scatter(network, &ids, compact, CentralityKind::Betweenness)
}

pub fn closeness_centrality(network: &ContactNetwork) -> CentralityScores {
    let (graph, ids) = network.joined_view();
    let compact = closeness_values(&graph);
    scatter(network, &ids, compact, CentralityKind::Closeness)
}

/// `percolation_states` is indexed by person id (1.0 = percolated /
/// infected, 0.0 otherwise).
pub fn percolation_centrality(network: &ContactNetwork, percolation_states: &[f64]) -> CentralityScores {
    let (graph, ids) = network.joined_view();
    let chi: Vec<f64> = ids.iter().map(|&pid| percolation_states[pid as usize]).collect();
    let compact = percolation_values(&graph, &chi);
    scatter(network, &ids, compact, CentralityKind::Percolation)
}

pub fn eigenvector_centrality(
    network: &ContactNetwork,
    tolerance: f64,
    max_iterations: usize,
) -> Result<CentralityScores> {
    let (graph, ids) = network.joined_view();
    let compact = eigenvector_values(&graph, tolerance, max_iterations)?;
    Ok(scatter(network, &ids, compact, CentralityKind::Eigenvector))
}
