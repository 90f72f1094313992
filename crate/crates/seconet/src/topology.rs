//! Network-level topology metrics: average degree, power-law tail
//! exponent, average shortest path length, and clustering.
//!
//! Because grown contact networks are bipartite, the triangle-based
//! clustering coefficient is identically zero there (it doubles as a
//! bipartiteness audit); the square (four-cycle) coefficient is the one
//! that carries structural signal and is reported as the primary
//! clustering column.

use serde::Serialize;

use crate::graph::SimpleGraph;
use crate::growth::ContactNetwork;

/// The four topology metrics reported per run. `powerlaw_exponent` and
/// `avg_shortest_path` are `None` when the network is too degenerate to
/// estimate them (insufficient degree tail, no component with 2+ nodes).
#[derive(Debug, Clone, Serialize)]
pub struct TopologySummary {
    pub average_degree: f64,
    pub powerlaw_exponent: Option<f64>,
    pub avg_shortest_path: Option<f64>,
    pub clustering_triangle: f64,
    pub clustering_square: f64,
}

/// Mean active degree: 2·links / persons.
pub fn average_degree(network: &ContactNetwork) -> f64 {
    if network.population() == 0 {
        return 0.0;
    }
    2.0 * network.link_count() as f64 / network.population() as f64
}

/// Default lower cutoff for the power-law tail fit.
pub const DEFAULT_POWERLAW_KMIN: u32 = 2;

/// Discrete maximum-likelihood estimate of the power-law exponent over
/// degrees ≥ `k_min`: γ̂ = 1 + n / Σ ln(k_i / (k_min − ½)).
///
/// Returns `None` when fewer than 10 degrees reach the cutoff or the
/// tail is a single repeated value (the estimate would be degenerate).
pub fn powerlaw_exponent(degrees: &[u32], k_min: u32) -> Option<f64> {
    let tail: Vec<u32> = degrees.iter().copied().filter(|&k| k >= k_min).collect();
    if tail.len() < 10 {
        return None;
    }
    let first = tail[0];
    if tail.iter().all(|&k| k == first) {
        return None;
    }
    let offset = k_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64 / offset).ln()).sum();
    Some(1.0 + tail.len() as f64 / log_sum)
}

/// Mean geodesic distance over ordered pairs inside the largest
/// connected component (ties broken toward the component containing the
/// lowest node id). `None` when no component has at least 2 nodes.
pub fn average_shortest_path_length(graph: &SimpleGraph) -> Option<f64> {
    let components = graph.components();
    // components() lists components by lowest contained id, so max_by_key
    // with a strict comparison keeps the earliest (lowest-id) largest one.
    let largest = components.iter().max_by_key(|c| c.len())?;
    if largest.len() < 2 {
        return None;
    }
    let mut dist = Vec::new();
    let mut total: u64 = 0;
    for &src in largest {
        graph.bfs_distances(src as usize, &mut dist);
        for &node in largest {
            let d = dist[node as usize];
            debug_assert_ne!(d, usize::MAX, "component member unreachable");
            total += d as u64;
        }
    }
    let n = largest.len() as u64;
    Some(total as f64 / (n * (n - 1)) as f64)
}

/// Global triangle transitivity (3·triangles / connected triples) and
/// the square (four-cycle) clustering coefficient averaged over nodes
/// with at least two neighbors. Degenerate denominators yield 0.
pub fn clustering(graph: &SimpleGraph) -> (f64, f64) {
    let sorted = graph.sorted_adjacency();
    let is_edge = |a: usize, b: u32| sorted[a].binary_search(&b).is_ok();

    // Triangle transitivity.
    let mut closed_paths: u64 = 0; // ordered pairs of adjacent neighbors
    let mut triples: u64 = 0;
    for v in 0..graph.n() {
        let nbrs = &sorted[v];
        let d = nbrs.len() as u64;
        triples += d.saturating_sub(1) * d / 2;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if is_edge(a as usize, b) {
                    closed_paths += 1;
                }
            }
        }
    }
    let triangle = if triples == 0 {
        0.0
    } else {
        closed_paths as f64 / triples as f64
    };

    // Square clustering: for each node v, the fraction of four-paths
    // u–v–w (u ≠ w) that close into a four-cycle through some common
    // neighbor of u and w other than v, normalized per the standard
    // four-cycle coefficient for two-mode networks.
    let mut sum = 0.0;
    let mut counted = 0usize;
    for v in 0..graph.n() {
        let nbrs = &sorted[v];
        if nbrs.len() < 2 {
            continue;
        }
        counted += 1;
        let mut numerator = 0.0;
        let mut denominator = 0.0;
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                // Common neighbors of u and w excluding v itself.
                let mut squares = 0u64;
                let (small, large) = if sorted[u as usize].len() <= sorted[w as usize].len() {
                    (u as usize, w)
                } else {
                    (w as usize, u)
                };
                for &x in &sorted[small] {
                    if x as usize != v && is_edge(large as usize, x) {
                        squares += 1;
                    }
                }
                let ku = sorted[u as usize].len() as f64;
                let kw = sorted[w as usize].len() as f64;
                let uv_edge = is_edge(u as usize, w);
                numerator += squares as f64;
                // Potential squares: remaining slots at u and w beyond v,
                // the realized squares, and (if u–w are adjacent) each
                // other.
                let adjustment = 1.0 + squares as f64 + if uv_edge { 1.0 } else { 0.0 };
                denominator += (ku - adjustment) + (kw - adjustment) + squares as f64;
            }
        }
        if denominator > 0.0 {
            sum += numerator / denominator;
        }
        // Zero denominator: no potential squares at v; contributes 0.
    }
    let square = if counted == 0 { 0.0 } else { sum / counted as f64 };
    (triangle, square)
}

/// Draws one synthetic power-law degree with tail exponent `gamma` and
/// cutoff `k_min`: a continuous Pareto variate over [k_min − ½, ∞)
/// rounded to the nearest integer, i.e. the binned-continuous model the
/// continuity-corrected estimator assumes. Used by estimator sanity
/// checks.
pub fn sample_powerlaw_degree(k_min: u32, gamma: f64, rng: &mut crate::rng::SimRng) -> u32 {
    use rand::Rng;
    let x_min = k_min as f64 - 0.5;
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    (x_min * u.powf(-1.0 / (gamma - 1.0)))
        .round()
        .min(u32::MAX as f64) as u32
}

/// All four metrics measured on the final network snapshot.
pub fn summarize(network: &ContactNetwork) -> TopologySummary {
    let graph = network.graph_view();
    let degrees: Vec<u32> = (0..network.population() as u32)
        .map(|id| network.degree(id) as u32)
        .collect();
    let (clustering_triangle, clustering_square) = clustering(&graph);
    TopologySummary {
        average_degree: average_degree(network),
        powerlaw_exponent: powerlaw_exponent(&degrees, DEFAULT_POWERLAW_KMIN),
        avg_shortest_path: average_shortest_path_length(&graph),
        clustering_triangle,
        clustering_square,
    }
}
