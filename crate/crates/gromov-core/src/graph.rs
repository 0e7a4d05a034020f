//! General weighted graphs, spanning-tree extraction, propagation-delay
//! sampling, Voronoi partitions and graph generators - everything needed to
//! feed bases into the matrix machinery.

use std::collections::{BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use thiserror::Error;

use crate::tree::WeightedTree;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("edge ({u}, {v}) has non-positive weight {w}")]
    NonPositiveWeight { u: String, v: String, w: f64 },
    #[error("self-loop at node {0}")]
    SelfLoop(String),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: String, v: String },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has no edges")]
    Empty,
    #[error("delay map covers {got} edges, expected {expected}")]
    MissingDelays { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("could not generate a connected graph after {0} attempts")]
    GenerationFailed(usize),
    #[error("centers are empty")]
    EmptyCenters,
    #[error("duplicate center: {0}")]
    DuplicateCenter(String),
}

/// Seed plus stream index; the same pair always reproduces the same draws,
/// and distinct streams are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }

    /// Derives an independent stream from a salt (splitmix64 mix), so nested
    /// loops can hand out per-item streams without collisions.
    pub fn derive(&self, salt: u64) -> Self {
        let mut z = self.stream ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self { seed: self.seed, stream: z ^ (z >> 31) }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Distribution of per-edge propagation delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayModel {
    Exponential { rate: f64 },
    /// Gaussian resampled until the draw is strictly positive.
    TruncatedGaussian { mean: f64, variance: f64 },
}

impl DelayModel {
    pub fn exponential(rate: f64) -> Result<Self, GraphError> {
        if rate <= 0.0 || !rate.is_finite() {
            return Err(GraphError::BadParameter(format!("exponential rate {rate}")));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn truncated_gaussian(mean: f64, variance: f64) -> Result<Self, GraphError> {
        if mean <= 0.0 || variance <= 0.0 || !mean.is_finite() || !variance.is_finite() {
            return Err(GraphError::BadParameter(format!(
                "truncated gaussian mean {mean}, variance {variance}"
            )));
        }
        Ok(Self::TruncatedGaussian { mean, variance })
    }
}

/// Neighbor visitation order for BFS trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeighborOrder {
    /// Canonical node order (insertion index ascending).
    Forward,
    /// Reverse of the canonical order.
    Reversed,
    /// Seeded uniform shuffle of each node's neighbor list.
    Random(RngSeed),
}

/// One delay per graph edge, aligned with the graph's canonical edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDelays {
    values: Vec<f64>,
}

impl EdgeDelays {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Assignment of every node to its nearest center.
#[derive(Debug, Clone)]
pub struct VoronoiPartition {
    /// For each node index, the position of its center in the centers list.
    pub assignment: Vec<usize>,
    /// Node indices per center, in canonical order.
    pub parts: Vec<Vec<usize>>,
}

/// Graph families for the simulation drivers. All generated graphs carry
/// unit weights and nodes named by index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    /// Erdos-Renyi with edge probability `avg_degree / (n - 1)`, retried
    /// until connected.
    Er { n: usize, avg_degree: f64 },
    /// Preferential attachment: each new node attaches `m` edges.
    Ba { n: usize, m: usize },
    Grid2d { rows: usize, cols: usize },
    Complete { n: usize },
}

/// Connected undirected graph with positive edge weights. Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl WeightedGraph {
    pub fn from_edges<N: AsRef<str>>(
        edges: impl IntoIterator<Item = (N, N, f64)>,
    ) -> Result<Self, GraphError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut edge_list: Vec<(usize, usize, f64)> = Vec::new();
        let intern = |name: &str,
                      names: &mut Vec<String>,
                      adj: &mut Vec<Vec<(usize, f64)>>,
                      index: &mut HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                adj.push(Vec::new());
                names.len() - 1
            })
        };
        for (u, v, w) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(GraphError::SelfLoop(u.to_string()));
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(GraphError::NonPositiveWeight { u: u.to_string(), v: v.to_string(), w });
            }
            let ui = intern(u, &mut names, &mut adj, &mut index);
            let vi = intern(v, &mut names, &mut adj, &mut index);
            if adj[ui].iter().any(|&(x, _)| x == vi) {
                return Err(GraphError::DuplicateEdge { u: u.to_string(), v: v.to_string() });
            }
            adj[ui].push((vi, w));
            adj[vi].push((ui, w));
            edge_list.push((ui.min(vi), ui.max(vi), w));
        }
        if names.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut edge_index = HashMap::new();
        for (pos, &(u, v, _)) in edge_list.iter().enumerate() {
            edge_index.insert((u, v), pos);
        }
        let g = Self { names, index, adj, edges: edge_list, edge_index };
        if !g.is_connected() {
            return Err(GraphError::NotConnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn idx(&self, name: &str) -> Result<usize, GraphError> {
        self.index.get(name).copied().ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn neighbors(&self, idx: usize) -> &[(usize, f64)] {
        &self.adj[idx]
    }

    /// Edges `(u, v, w)` with `u < v`, in insertion order; the canonical
    /// order for delay sampling.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_position(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Single-source shortest-path distances by edge weight.
    pub fn distances_from(&self, root: usize) -> Vec<f64> {
        self.dijkstra(root, None).0
    }

    /// Earliest-arrival times from `root` with edges costed by `delays`.
    pub fn delay_distances_from(
        &self,
        root: usize,
        delays: &EdgeDelays,
    ) -> Result<Vec<f64>, GraphError> {
        if delays.values.len() != self.edge_count() {
            return Err(GraphError::MissingDelays {
                expected: self.edge_count(),
                got: delays.values.len(),
            });
        }
        Ok(self.dijkstra(root, Some(delays)).0)
    }

    /// Dijkstra with optional per-edge cost override; returns distances and
    /// predecessors. Predecessor ties resolve to the smallest node index so
    /// resulting trees are independent of heap order.
    pub(crate) fn dijkstra(
        &self,
        root: usize,
        costs: Option<&EdgeDelays>,
    ) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.node_count();
        let cost = |u: usize, v: usize, w: f64| -> f64 {
            match costs {
                None => w,
                Some(d) => d.values[self.edge_index[&(u.min(v), u.max(v))]],
            }
        };
        let mut dist = vec![f64::INFINITY; n];
        dist[root] = 0.0;
        let mut heap: BinaryHeap<std::cmp::Reverse<(u64, usize)>> = BinaryHeap::new();
        heap.push(std::cmp::Reverse((0, root)));
        let mut done = vec![false; n];
        while let Some(std::cmp::Reverse((key, u))) = heap.pop() {
            if done[u] || key != dist[u].to_bits() {
                continue;
            }
            done[u] = true;
            for &(v, w) in &self.adj[u] {
                let cand = dist[u] + cost(u, v, w);
                if cand < dist[v] {
                    dist[v] = cand;
                    heap.push(std::cmp::Reverse((cand.to_bits(), v)));
                }
            }
        }
        let mut pred = vec![None; n];
        for v in 0..n {
            if v == root {
                continue;
            }
            for &(u, w) in &self.adj[v] {
                if dist[u] + cost(u, v, w) == dist[v] {
                    pred[v] = match pred[v] {
                        Some(p) if p < u => Some(p),
                        _ => Some(u),
                    };
                }
            }
        }
        (dist, pred)
    }

    /// Breadth-first spanning tree rooted at `root`; neighbor visitation
    /// follows `order` and tree edges keep graph weights.
    pub fn bfs_tree(&self, root: &str, order: &NeighborOrder) -> Result<WeightedTree, GraphError> {
        let r = self.idx(root)?;
        let n = self.node_count();
        let mut rng = match order {
            NeighborOrder::Random(seed) => Some(seed.rng()),
            _ => None,
        };
        let mut visited = vec![false; n];
        visited[r] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(r);
        let mut edges: Vec<(String, String, f64)> = Vec::with_capacity(n - 1);
        while let Some(u) = queue.pop_front() {
            let mut nbrs: Vec<(usize, f64)> = self.adj[u].clone();
            match order {
                NeighborOrder::Forward => nbrs.sort_by_key(|&(v, _)| v),
                NeighborOrder::Reversed => nbrs.sort_by_key(|&(v, _)| std::cmp::Reverse(v)),
                NeighborOrder::Random(_) => {
                    nbrs.sort_by_key(|&(v, _)| v);
                    nbrs.shuffle(rng.as_mut().expect("rng present"));
                }
            }
            for (v, w) in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    edges.push((self.names[u].clone(), self.names[v].clone(), w));
                    queue.push_back(v);
                }
            }
        }
        WeightedTree::from_edges(edges).map_err(|_| GraphError::NotConnected)
    }

    /// Earliest-arrival tree under the given delays: every node joins
    /// through its shortest-path predecessor. Tree edges keep graph weights;
    /// the delays only decide the shape.
    pub fn shortest_path_tree(
        &self,
        root: &str,
        delays: &EdgeDelays,
    ) -> Result<WeightedTree, GraphError> {
        if delays.values.len() != self.edge_count() {
            return Err(GraphError::MissingDelays {
                expected: self.edge_count(),
                got: delays.values.len(),
            });
        }
        let r = self.idx(root)?;
        let (_, pred) = self.dijkstra(r, Some(delays));
        let mut edges = Vec::with_capacity(self.node_count() - 1);
        for v in 0..self.node_count() {
            if v == r {
                continue;
            }
            let u = pred[v].expect("connected graph");
            let w = self.adj[v]
                .iter()
                .find(|&&(x, _)| x == u)
                .map(|&(_, w)| w)
                .expect("predecessor edge");
            edges.push((self.names[u].clone(), self.names[v].clone(), w));
        }
        WeightedTree::from_edges(edges).map_err(|_| GraphError::NotConnected)
    }

    /// One independent delay per edge in canonical edge order.
    pub fn sample_delays(&self, model: &DelayModel, seed: RngSeed) -> EdgeDelays {
        let mut rng = seed.rng();
        let values = match *model {
            DelayModel::Exponential { rate } => {
                let dist = Exp::new(rate).expect("validated rate");
                self.edges.iter().map(|_| dist.sample(&mut rng)).collect()
            }
            DelayModel::TruncatedGaussian { mean, variance } => {
                let dist = Normal::new(mean, variance.sqrt()).expect("validated params");
                self.edges
                    .iter()
                    .map(|_| loop {
                        let x = dist.sample(&mut rng);
                        if x > 0.0 {
                            break x;
                        }
                    })
                    .collect()
            }
        };
        EdgeDelays { values }
    }

    /// Nearest-center assignment by graph distance; ties go to the center
    /// listed first. Every part induces a connected subgraph.
    pub fn voronoi_partition(&self, centers: &[&str]) -> Result<VoronoiPartition, GraphError> {
        if centers.is_empty() {
            return Err(GraphError::EmptyCenters);
        }
        let mut center_idx = Vec::with_capacity(centers.len());
        for c in centers {
            let i = self.idx(c)?;
            if center_idx.contains(&i) {
                return Err(GraphError::DuplicateCenter(c.to_string()));
            }
            center_idx.push(i);
        }
        let dists: Vec<Vec<f64>> = center_idx.iter().map(|&c| self.distances_from(c)).collect();
        let n = self.node_count();
        let mut assignment = vec![0usize; n];
        for v in 0..n {
            let mut best = 0usize;
            for c in 1..center_idx.len() {
                if dists[c][v] < dists[best][v] {
                    best = c;
                }
            }
            assignment[v] = best;
        }
        let mut parts = vec![Vec::new(); center_idx.len()];
        for v in 0..n {
            parts[assignment[v]].push(v);
        }
        Ok(VoronoiPartition { assignment, parts })
    }

    /// Induced subgraph on `nodes`; errors on singletons (no edges) and on
    /// node sets whose induced edges do not connect them.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<WeightedGraph, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::Empty);
        }
        let set: std::collections::HashSet<usize> = nodes.iter().copied().collect();
        let mut edges = Vec::new();
        for &(u, v, w) in &self.edges {
            if set.contains(&u) && set.contains(&v) {
                edges.push((self.names[u].clone(), self.names[v].clone(), w));
            }
        }
        let g = WeightedGraph::from_edges(edges)?;
        if g.node_count() != nodes.len() {
            return Err(GraphError::NotConnected);
        }
        Ok(g)
    }

    /// Minimum spanning tree (Kruskal; ties by endpoint indices) with graph
    /// weights.
    pub fn minimum_spanning_tree(&self) -> WeightedTree {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            self.edges[a]
                .2
                .total_cmp(&self.edges[b].2)
                .then(self.edges[a].0.cmp(&self.edges[b].0))
                .then(self.edges[a].1.cmp(&self.edges[b].1))
        });
        let n = self.node_count();
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while root[r] != r {
                r = root[r];
            }
            let mut cur = x;
            while root[cur] != r {
                let next = root[cur];
                root[cur] = r;
                cur = next;
            }
            r
        }
        let mut picked = Vec::with_capacity(n - 1);
        for e in order {
            let (u, v, w) = self.edges[e];
            let (ru, rv) = (find(&mut root, u), find(&mut root, v));
            if ru != rv {
                root[ru] = rv;
                picked.push((self.names[u].clone(), self.names[v].clone(), w));
            }
        }
        WeightedTree::from_edges(picked).expect("spanning tree of a connected graph")
    }
}

/// Generates a unit-weight graph of the requested family, reproducibly.
pub fn generate_graph(kind: GraphKind, seed: RngSeed) -> Result<WeightedGraph, GraphError> {
    match kind {
        GraphKind::Er { n, avg_degree } => {
            if n < 2 {
                return Err(GraphError::BadParameter(format!("er size {n}")));
            }
            let p = avg_degree / (n as f64 - 1.0);
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::BadParameter(format!("er average degree {avg_degree}")));
            }
            let mut rng = seed.rng();
            const ATTEMPTS: usize = 1000;
            for _ in 0..ATTEMPTS {
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen::<f64>() < p {
                            edges.push((u.to_string(), v.to_string(), 1.0));
                        }
                    }
                }
                match WeightedGraph::from_edges(edges) {
                    Ok(g) if g.node_count() == n => return Ok(g),
                    _ => continue,
                }
            }
            Err(GraphError::GenerationFailed(ATTEMPTS))
        }
        GraphKind::Ba { n, m } => {
            if m == 0 || m >= n {
                return Err(GraphError::BadParameter(format!("ba m {m} with n {n}")));
            }
            let mut rng = seed.rng();
            let mut edges: Vec<(usize, usize)> = Vec::new();
            // Seed path keeps the initial graph connected and simple.
            for i in 1..=m {
                edges.push((i - 1, i));
            }
            let mut endpoints: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            for t in m + 1..n {
                let mut targets: Vec<usize> = Vec::with_capacity(m);
                while targets.len() < m {
                    let pick = endpoints[rng.gen_range(0..endpoints.len())];
                    if !targets.contains(&pick) {
                        targets.push(pick);
                    }
                }
                for &x in &targets {
                    edges.push((t, x));
                    endpoints.push(t);
                    endpoints.push(x);
                }
            }
            WeightedGraph::from_edges(
                edges.into_iter().map(|(u, v)| (u.to_string(), v.to_string(), 1.0)),
            )
        }
        GraphKind::Grid2d { rows, cols } => {
            if rows * cols < 2 {
                return Err(GraphError::BadParameter(format!("grid {rows}x{cols}")));
            }
            let id = |r: usize, c: usize| (r * cols + c).to_string();
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), 1.0));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), 1.0));
                    }
                }
            }
            WeightedGraph::from_edges(edges)
        }
        GraphKind::Complete { n } => {
            if n < 2 {
                return Err(GraphError::BadParameter(format!("complete size {n}")));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u.to_string(), v.to_string(), 1.0));
                }
            }
            WeightedGraph::from_edges(edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> WeightedGraph {
        WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0)]).unwrap()
    }

    #[test]
    fn bfs_tree_of_a_path_is_the_path() {
        let g = path_graph();
        let t = g.bfs_tree("a", &NeighborOrder::Forward).unwrap();
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.distance("a", "d").unwrap(), 3.0);
    }

    #[test]
    fn bfs_tree_on_cycle_depends_on_order() {
        let g = WeightedGraph::from_edges([
            ("a", "b", 1.0),
            ("b", "c", 1.0),
            ("c", "d", 1.0),
            ("d", "a", 1.0),
        ])
        .unwrap();
        // Forward: a expands to b then d, and b claims c.
        let t1 = g.bfs_tree("a", &NeighborOrder::Forward).unwrap();
        assert_eq!(t1.distance("b", "c").unwrap(), 1.0);
        // Reversed: d expands first and claims c.
        let t2 = g.bfs_tree("a", &NeighborOrder::Reversed).unwrap();
        assert_eq!(t2.distance("d", "c").unwrap(), 1.0);
        assert_eq!(t2.distance("b", "c").unwrap(), 3.0);
    }

    #[test]
    fn bfs_tree_of_complete_graph_is_a_star() {
        let g = generate_graph(GraphKind::Complete { n: 4 }, RngSeed::new(1)).unwrap();
        let t = g.bfs_tree("2", &NeighborOrder::Forward).unwrap();
        let r = t.idx("2").unwrap();
        assert_eq!(t.degree(r), 3);
    }

    #[test]
    fn random_bfs_tree_is_reproducible() {
        let g = generate_graph(GraphKind::Er { n: 30, avg_degree: 4.0 }, RngSeed::new(5)).unwrap();
        let a = g.bfs_tree("0", &NeighborOrder::Random(RngSeed::new(9))).unwrap();
        let b = g.bfs_tree("0", &NeighborOrder::Random(RngSeed::new(9))).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = g.bfs_tree("0", &NeighborOrder::Random(RngSeed::new(10))).unwrap();
        // Different seed, almost surely a different tree on 30 nodes.
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn spt_with_uniform_delays_matches_hop_counts() {
        let g = WeightedGraph::from_edges([
            ("a", "b", 1.0),
            ("b", "c", 1.0),
            ("a", "c", 1.0),
            ("c", "d", 1.0),
        ])
        .unwrap();
        let delays = EdgeDelays::new(vec![1.0; g.edge_count()]);
        let t = g.shortest_path_tree("a", &delays).unwrap();
        assert_eq!(t.distance("a", "d").unwrap(), 2.0);
        assert_eq!(t.distance("a", "b").unwrap(), 1.0);

        let short = EdgeDelays::new(vec![1.0]);
        assert!(matches!(
            g.shortest_path_tree("a", &short),
            Err(GraphError::MissingDelays { .. })
        ));
    }

    #[test]
    fn spt_avoids_slow_edges() {
        let g =
            WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]).unwrap();
        // Delay 3 on the direct a-c edge pushes the path through b.
        let ac = g.edge_position(g.idx("a").unwrap(), g.idx("c").unwrap()).unwrap();
        let mut values = vec![1.0; g.edge_count()];
        values[ac] = 3.0;
        let t = g.shortest_path_tree("a", &EdgeDelays::new(values)).unwrap();
        assert_eq!(t.distance("a", "c").unwrap(), 2.0);
    }

    #[test]
    fn spt_matches_brute_force_on_small_graph() {
        let g = WeightedGraph::from_edges([
            ("0", "1", 1.0),
            ("0", "2", 1.0),
            ("1", "2", 1.0),
            ("1", "3", 1.0),
            ("2", "4", 1.0),
            ("3", "4", 1.0),
        ])
        .unwrap();
        let delays = g.sample_delays(&DelayModel::Exponential { rate: 1.0 }, RngSeed::new(3));
        let t = g.shortest_path_tree("0", &delays).unwrap();
        assert_eq!(t.node_count(), g.node_count());

        // Brute force earliest arrival over all simple paths.
        fn walk(
            g: &WeightedGraph,
            delays: &EdgeDelays,
            cur: usize,
            goal: usize,
            seen: &mut Vec<usize>,
            acc: f64,
            best: &mut f64,
        ) {
            if cur == goal {
                *best = best.min(acc);
                return;
            }
            for &(nxt, _) in g.neighbors(cur) {
                if !seen.contains(&nxt) {
                    seen.push(nxt);
                    let d = delays.values()[g.edge_position(cur, nxt).unwrap()];
                    walk(g, delays, nxt, goal, seen, acc + d, best);
                    seen.pop();
                }
            }
        }
        let root = g.idx("0").unwrap();
        let (dist, _) = g.dijkstra(root, Some(&delays));
        for goal in 0..g.node_count() {
            let mut best = f64::INFINITY;
            walk(&g, &delays, root, goal, &mut vec![root], 0.0, &mut best);
            if goal == root {
                best = 0.0;
            }
            assert!((dist[goal] - best).abs() < 1e-12);
        }
    }

    #[test]
    fn delays_are_reproducible_and_positive() {
        let g = generate_graph(GraphKind::Er { n: 40, avg_degree: 4.0 }, RngSeed::new(2)).unwrap();
        let m = DelayModel::Exponential { rate: 1.0 };
        let a = g.sample_delays(&m, RngSeed::new(11));
        let b = g.sample_delays(&m, RngSeed::new(11));
        assert_eq!(a, b);
        let c = g.sample_delays(&m, RngSeed::new(11).with_stream(1));
        assert_ne!(a, c);
        assert!(a.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn truncated_gaussian_mean_is_close() {
        // Mean within 3 sigma / 100 of 10 over 10^4 draws.
        let g = generate_graph(GraphKind::Grid2d { rows: 72, cols: 72 }, RngSeed::new(0)).unwrap();
        assert!(g.edge_count() >= 10_000);
        let d = g.sample_delays(
            &DelayModel::truncated_gaussian(10.0, 1.0).unwrap(),
            RngSeed::new(21),
        );
        let mean: f64 = d.values().iter().sum::<f64>() / d.values().len() as f64;
        assert!((mean - 10.0).abs() < 0.03, "mean {mean}");
        assert!(d.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn delay_model_parameters_validated() {
        assert!(DelayModel::exponential(0.0).is_err());
        assert!(DelayModel::truncated_gaussian(10.0, -1.0).is_err());
        assert!(DelayModel::truncated_gaussian(10.0, 1.0).is_ok());
    }

    #[test]
    fn voronoi_single_center_takes_everything() {
        let g = path_graph();
        let p = g.voronoi_partition(&["b"]).unwrap();
        assert_eq!(p.parts[0].len(), 4);
    }

    #[test]
    fn voronoi_tie_goes_to_earlier_center() {
        let g = WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0)]).unwrap();
        let p = g.voronoi_partition(&["a", "c"]).unwrap();
        let b = g.idx("b").unwrap();
        assert_eq!(p.assignment[b], 0);
        let p = g.voronoi_partition(&["c", "a"]).unwrap();
        assert_eq!(p.assignment[b], 0); // now center 0 is "c"
    }

    #[test]
    fn voronoi_matches_brute_force_on_grid() {
        let g = generate_graph(GraphKind::Grid2d { rows: 5, cols: 5 }, RngSeed::new(0)).unwrap();
        let centers = ["3", "18"];
        let p = g.voronoi_partition(&centers).unwrap();
        let d0 = g.distances_from(g.idx("3").unwrap());
        let d1 = g.distances_from(g.idx("18").unwrap());
        for v in 0..g.node_count() {
            let expect = if d0[v] <= d1[v] { 0 } else { 1 };
            assert_eq!(p.assignment[v], expect);
        }
        assert!(g.voronoi_partition(&[]).is_err());
        assert!(g.voronoi_partition(&["3", "3"]).is_err());
    }

    #[test]
    fn voronoi_parts_induce_connected_subgraphs() {
        let g = generate_graph(GraphKind::Er { n: 60, avg_degree: 4.0 }, RngSeed::new(13)).unwrap();
        let p = g.voronoi_partition(&["0", "17", "40"]).unwrap();
        for part in &p.parts {
            if part.len() >= 2 {
                assert!(g.induced_subgraph(part).is_ok());
            }
        }
    }

    #[test]
    fn grid_2x2_is_a_cycle() {
        let g = generate_graph(GraphKind::Grid2d { rows: 2, cols: 2 }, RngSeed::new(0)).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!((0..4).all(|i| g.neighbors(i).len() == 2));
    }

    #[test]
    fn complete_graph_edge_count() {
        let g = generate_graph(GraphKind::Complete { n: 4 }, RngSeed::new(0)).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn er_generation_is_connected_with_sane_degree() {
        let mut sum = 0.0;
        let runs = 100;
        for s in 0..runs {
            let g =
                generate_graph(GraphKind::Er { n: 100, avg_degree: 4.0 }, RngSeed::new(s)).unwrap();
            assert_eq!(g.node_count(), 100);
            sum += g.average_degree();
        }
        let avg = sum / runs as f64;
        assert!((3.0..5.0).contains(&avg), "average degree {avg}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_graph(GraphKind::Ba { n: 60, m: 2 }, RngSeed::new(4)).unwrap();
        let b = generate_graph(GraphKind::Ba { n: 60, m: 2 }, RngSeed::new(4)).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!((a.average_degree() - 4.0).abs() < 1.0);
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(generate_graph(GraphKind::Ba { n: 4, m: 4 }, RngSeed::new(0)).is_err());
        assert!(generate_graph(GraphKind::Er { n: 10, avg_degree: 20.0 }, RngSeed::new(0)).is_err());
    }

    #[test]
    fn spanning_trees_cover_all_nodes_with_graph_edges() {
        let g = generate_graph(GraphKind::Er { n: 50, avg_degree: 4.0 }, RngSeed::new(8)).unwrap();
        for t in [
            g.bfs_tree("7", &NeighborOrder::Forward).unwrap(),
            g.bfs_tree("7", &NeighborOrder::Reversed).unwrap(),
            g.minimum_spanning_tree(),
        ] {
            assert_eq!(t.node_count(), g.node_count());
            assert_eq!(t.edges().len(), g.node_count() - 1);
            for (u, v, w) in t.edges() {
                let gu = g.idx(t.name(u)).unwrap();
                let gv = g.idx(t.name(v)).unwrap();
                let pos = g.edge_position(gu, gv).expect("tree edge is a graph edge");
                assert_eq!(g.edges()[pos].2, w);
            }
        }
    }

    #[test]
    fn mst_prefers_light_edges() {
        let g = WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 5.0)])
            .unwrap();
        let t = g.minimum_spanning_tree();
        assert_eq!(t.total_weight(), 2.0);
    }
}
