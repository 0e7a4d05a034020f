//! Weighted trees as metric spaces, bases, and the tree-to-matrix direction
//! of the correspondence.

use std::collections::HashMap;

use thiserror::Error;

use crate::matrix::{GromovMatrix, SymmetricMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("edge ({u}, {v}) has non-positive weight {w}")]
    NonPositiveWeight { u: String, v: String, w: f64 },
    #[error("self-loop at node {0}")]
    SelfLoop(String),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: String, v: String },
    #[error("edge set is not a tree: {edges} edges on {nodes} nodes")]
    NotATree { nodes: usize, edges: usize },
    #[error("tree has no edges")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaseError {
    #[error("base vertex {0} appears in the base set")]
    VertexInBaseSet(String),
    #[error("duplicate base set entry: {0}")]
    DuplicateBaseNode(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// An undirected tree with strictly positive edge weights. Immutable after
/// construction; node identifiers are opaque strings interned to indices.
#[derive(Debug, Clone)]
pub struct WeightedTree {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedTree {
    /// Builds a tree from undirected edges `(u, v, w)`. Checks positive
    /// weights, no self-loops or duplicate edges, connectivity and
    /// acyclicity.
    pub fn from_edges<N: AsRef<str>>(
        edges: impl IntoIterator<Item = (N, N, f64)>,
    ) -> Result<Self, TreeError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
        let intern = |name: &str, names: &mut Vec<String>, adj: &mut Vec<Vec<(usize, f64)>>, index: &mut HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                adj.push(Vec::new());
                names.len() - 1
            })
        };
        let mut edge_count = 0usize;
        for (u, v, w) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(TreeError::SelfLoop(u.to_string()));
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(TreeError::NonPositiveWeight { u: u.to_string(), v: v.to_string(), w });
            }
            let ui = intern(u, &mut names, &mut adj, &mut index);
            let vi = intern(v, &mut names, &mut adj, &mut index);
            if adj[ui].iter().any(|&(x, _)| x == vi) {
                return Err(TreeError::DuplicateEdge { u: u.to_string(), v: v.to_string() });
            }
            adj[ui].push((vi, w));
            adj[vi].push((ui, w));
            edge_count += 1;
        }
        if names.is_empty() {
            return Err(TreeError::Empty);
        }
        let tree = Self { names, index, adj };
        if edge_count != tree.node_count() - 1 || !tree.is_connected() {
            return Err(TreeError::NotATree { nodes: tree.node_count(), edges: edge_count });
        }
        Ok(tree)
    }

    fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
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

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn idx(&self, name: &str) -> Result<usize, TreeError> {
        self.index.get(name).copied().ok_or_else(|| TreeError::UnknownNode(name.to_string()))
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    pub fn neighbors(&self, idx: usize) -> &[(usize, f64)] {
        &self.adj[idx]
    }

    /// Undirected edges `(u, v, w)` with `u < v`, in index order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.node_count().saturating_sub(1));
        for u in 0..self.node_count() {
            for &(v, w) in &self.adj[u] {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().iter().map(|&(_, _, w)| w).sum()
    }

    /// Distances from `root` to every node, by index.
    pub fn distances_from(&self, root: usize) -> Vec<f64> {
        let (_, dist) = self.parents_from(root);
        dist
    }

    /// Parent pointers toward `root` and distances from it.
    pub fn parents_from(&self, root: usize) -> (Vec<Option<usize>>, Vec<f64>) {
        let n = self.node_count();
        let mut parent = vec![None; n];
        let mut dist = vec![f64::INFINITY; n];
        dist[root] = 0.0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(v, w) in &self.adj[u] {
                if dist[v].is_infinite() {
                    dist[v] = dist[u] + w;
                    parent[v] = Some(u);
                    stack.push(v);
                }
            }
        }
        (parent, dist)
    }

    /// Node indices along the unique path from `u` to `v`, inclusive.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let (parent, _) = self.parents_from(u);
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Sum of edge weights along the unique path between two nodes.
    pub fn distance(&self, u: &str, v: &str) -> Result<f64, TreeError> {
        let ui = self.idx(u)?;
        let vi = self.idx(v)?;
        Ok(self.distances_from(ui)[vi])
    }

    /// Gromov product `(u, v)_s = (d(u,s) + d(v,s) - d(u,v)) / 2`: the
    /// distance from `s` to the branch point of the paths toward `u` and `v`.
    pub fn gromov_product(&self, s: &str, u: &str, v: &str) -> Result<f64, TreeError> {
        let si = self.idx(s)?;
        let ui = self.idx(u)?;
        let vi = self.idx(v)?;
        let from_s = self.distances_from(si);
        let from_u = self.distances_from(ui);
        Ok(0.5 * (from_s[ui] + from_s[vi] - from_u[vi]))
    }
}

/// A weighted tree together with a base vertex `s` and an ordered base set;
/// the object a Gromov matrix encodes up to isometric equivalence.
#[derive(Debug, Clone)]
pub struct Base {
    tree: WeightedTree,
    base_vertex: String,
    base_set: Vec<String>,
}

impl Base {
    pub fn new(
        tree: WeightedTree,
        base_vertex: impl Into<String>,
        base_set: Vec<String>,
    ) -> Result<Self, BaseError> {
        let base_vertex = base_vertex.into();
        tree.idx(&base_vertex)?;
        let mut seen = HashMap::new();
        for v in &base_set {
            tree.idx(v)?;
            if *v == base_vertex {
                return Err(BaseError::VertexInBaseSet(v.clone()));
            }
            if seen.insert(v.clone(), ()).is_some() {
                return Err(BaseError::DuplicateBaseNode(v.clone()));
            }
        }
        Ok(Self { tree, base_vertex, base_set })
    }

    pub fn tree(&self) -> &WeightedTree {
        &self.tree
    }

    pub fn base_vertex(&self) -> &str {
        &self.base_vertex
    }

    pub fn base_set(&self) -> &[String] {
        &self.base_set
    }

    /// The matrix of pairwise Gromov products of the base set w.r.t. the
    /// base vertex; `M(i, i)` is the distance from `s` to `v_i`.
    pub fn gromov_matrix(&self) -> GromovMatrix {
        let s = self.tree.idx(&self.base_vertex).expect("validated");
        let v: Vec<usize> =
            self.base_set.iter().map(|x| self.tree.idx(x).expect("validated")).collect();
        let from_s = self.tree.distances_from(s);
        let n = v.len();
        let mut sym = SymmetricMatrix::zeros(n);
        for i in 0..n {
            let from_vi = self.tree.distances_from(v[i]);
            for j in i..n {
                sym.set_sym(i, j, 0.5 * (from_s[v[i]] + from_s[v[j]] - from_vi[v[j]]));
            }
        }
        GromovMatrix::from_checked(sym)
    }

    /// True when the tree is exactly the span of the base set plus base
    /// vertex with every contractible node removed: all leaves are in
    /// `V + {s}` and every other internal node branches.
    pub fn is_canonical(&self) -> bool {
        let s = self.tree.idx(&self.base_vertex).expect("validated");
        let mut special = vec![false; self.tree.node_count()];
        special[s] = true;
        for v in &self.base_set {
            special[self.tree.idx(v).expect("validated")] = true;
        }
        (0..self.tree.node_count()).all(|i| special[i] || self.tree.degree(i) >= 3)
    }
}

/// Canonicalizes `(tree, s, V)` into a [`Base`] whose tree is the union of
/// the paths from `s` to each element of `V`, with pass-through nodes
/// outside `V + {s}` contracted (their two edge weights summed). The Gromov
/// matrix is unchanged by this restriction.
pub fn restrict_to_span(
    tree: &WeightedTree,
    base_vertex: &str,
    base_set: &[String],
) -> Result<Base, BaseError> {
    let s = tree.idx(base_vertex)?;
    let v_idx: Vec<usize> =
        base_set.iter().map(|v| tree.idx(v)).collect::<Result<_, _>>()?;
    let (parent, _) = tree.parents_from(s);

    let mut keep = vec![false; tree.node_count()];
    keep[s] = true;
    for &v in &v_idx {
        let mut cur = v;
        while !keep[cur] {
            keep[cur] = true;
            cur = parent[cur].expect("walk reaches the base vertex");
        }
    }

    // Adjacency restricted to kept nodes (every kept node's parent is kept).
    let mut adj: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for (i, &k) in keep.iter().enumerate() {
        if k {
            adj.entry(i).or_default();
        }
    }
    for i in 0..tree.node_count() {
        if !keep[i] {
            continue;
        }
        if let Some(p) = parent[i] {
            let w = tree
                .neighbors(i)
                .iter()
                .find(|&&(x, _)| x == p)
                .map(|&(_, w)| w)
                .expect("parent edge exists");
            adj.get_mut(&i).unwrap().push((p, w));
            adj.get_mut(&p).unwrap().push((i, w));
        }
    }

    let mut protected = vec![false; tree.node_count()];
    protected[s] = true;
    for &v in &v_idx {
        protected[v] = true;
    }
    // Contract pass-through nodes until every unprotected node branches.
    loop {
        let candidate = adj
            .iter()
            .filter(|(&i, nbrs)| !protected[i] && nbrs.len() == 2)
            .map(|(&i, _)| i)
            .min();
        let Some(mid) = candidate else { break };
        let nbrs = adj.remove(&mid).unwrap();
        let (a, wa) = nbrs[0];
        let (b, wb) = nbrs[1];
        let la = adj.get_mut(&a).unwrap();
        la.retain(|&(x, _)| x != mid);
        la.push((b, wa + wb));
        let lb = adj.get_mut(&b).unwrap();
        lb.retain(|&(x, _)| x != mid);
        lb.push((a, wa + wb));
    }

    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let mut keys: Vec<usize> = adj.keys().copied().collect();
    keys.sort_unstable();
    for &i in &keys {
        for &(j, w) in &adj[&i] {
            if i < j {
                edges.push((tree.name(i).to_string(), tree.name(j).to_string(), w));
            }
        }
    }
    let subtree = WeightedTree::from_edges(edges)?;
    Base::new(subtree, base_vertex, base_set.to_vec())
}

/// Isometric equivalence of canonical bases: same base-set size and equal
/// Gromov matrices entrywise within `tol`. Different sizes compare unequal
/// rather than erroring.
pub fn bases_equivalent(a: &Base, b: &Base, tol: f64) -> bool {
    if a.base_set.len() != b.base_set.len() {
        return false;
    }
    let ma = a.gromov_matrix();
    let mb = b.gromov_matrix();
    ma.as_sym().max_abs_diff(mb.as_sym()).map(|d| d <= tol).unwrap_or(false)
}
