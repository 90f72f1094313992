//! Minimal undirected simple-graph representation.
//!
//! Topology metrics and centrality scores are pure graph computations, so
//! they operate on this adjacency-list view rather than on the contact
//! network directly. That keeps them testable against hand-built graphs
//! (paths, cycles, stars, complete bipartite graphs) that a contact
//! network could never produce.

/// Undirected simple graph over nodes `0..n`.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; duplicate edges and self-loops
    /// are rejected with a panic since callers construct these directly.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut g = SimpleGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, a: u32, b: u32) {
        assert_ne!(a, b, "self-loops are not allowed");
        assert!(
            !self.adj[a as usize].contains(&b),
            "duplicate edge {a}-{b}"
        );
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Breadth-first distances from `src`; unreachable nodes get
    /// `usize::MAX`.
    pub fn bfs_distances(&self, src: usize, dist: &mut Vec<usize>) {
        dist.clear();
        dist.resize(self.n(), usize::MAX);
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            for &w in &self.adj[v] {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    /// Connected components as sorted node lists, ordered by smallest
    /// contained node id.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = vec![start as u32];
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    let w = w as usize;
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w as u32);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Sorted copies of the adjacency lists, for membership tests.
    pub fn sorted_adjacency(&self) -> Vec<Vec<u32>> {
        self.adj
            .iter()
            .map(|nbrs| {
                let mut v = nbrs.clone();
                v.sort_unstable();
                v
            })
            .collect()
    }
}
