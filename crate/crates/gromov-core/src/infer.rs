//! Network-inference applications: each one swaps the single random
//! spanning tree of the classical heuristic for a family of trees
//! synthesized by G-convex combination.

use thiserror::Error;

use crate::combine::{g_convex, simplex_grid, CombinationWeights, CombineError};
use crate::graph::{GraphError, NeighborOrder, RngSeed, WeightedGraph};
use crate::matrix::{on_path_from_base, GromovMatrix, MatrixError, SymmetricMatrix};
use crate::reconstruct::{reconstruct_tree, ReconstructError};
use crate::tree::{restrict_to_span, Base, BaseError, TreeError, WeightedTree};
use crate::DEFAULT_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferError {
    #[error("need at least one sample")]
    NoSamples,
    #[error("sample {index} has base vertex {got}, expected {expected}")]
    BaseVertexMismatch { index: usize, expected: String, got: String },
    #[error("sample {index} spans a different base set")]
    BaseSetMismatch { index: usize },
    #[error("label {0} is not in the common base set")]
    LabelNotInBaseSet(String),
    #[error("estimate and truth lists have lengths {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("infected set is empty")]
    EmptyInfected,
    #[error("duplicate infected node: {0}")]
    DuplicateInfected(String),
    #[error("demand has {got} entries, expected {expected}")]
    DemandLength { expected: usize, got: usize },
    #[error("demand at index {0} is negative")]
    NegativeDemand(usize),
    #[error("no centers given")]
    EmptyCenters,
    #[error("center index {0} out of range")]
    CenterOutOfRange(usize),
    #[error("k = {k} exceeds the {n} graph nodes")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 1")]
    KZero,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// How an inference problem aggregates its cost over tree-and-root pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    Expectation,
    Minimization,
}

/// Cost functions used by the applications in this module.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    /// Indicator of one node lying on the propagation path to another.
    PathIndicator { u: String, v: String },
    /// Negated centroid score, minimized over candidate sources.
    NegCentroid,
    /// Demand-weighted service distance of a center set.
    WeightedServiceDistance,
}

/// Descriptor of an inference problem: which cost is evaluated over
/// spanning trees and how it is aggregated.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorProblem {
    pub cost: CostFunction,
    pub mode: EstimatorMode,
}

impl EstimatorProblem {
    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            EstimatorMode::Expectation => "expectation",
            EstimatorMode::Minimization => "minimization",
        }
    }
}

/// Theta grid for pairwise combinations: `theta = i / steps`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisGrid {
    pub steps: usize,
}

impl Default for SynthesisGrid {
    fn default() -> Self {
        Self { steps: 10 }
    }
}

/// Empirical probability that `u` lies on the propagation path from the
/// common base vertex `s` to `v`, over the sampled trees plus all pairwise
/// G-convex combinations on the theta grid. Works entirely on matrices; the
/// graph topology is never consulted.
pub fn path_probability(
    samples: &[Base],
    s: &str,
    u: &str,
    v: &str,
    grid: &SynthesisGrid,
    tol: f64,
) -> Result<f64, InferError> {
    if samples.is_empty() {
        return Err(InferError::NoSamples);
    }
    let labels: Vec<String> = samples[0].base_set().to_vec();
    let mut sorted_labels = labels.clone();
    sorted_labels.sort();
    for (index, b) in samples.iter().enumerate() {
        if b.base_vertex() != s {
            return Err(InferError::BaseVertexMismatch {
                index,
                expected: s.to_string(),
                got: b.base_vertex().to_string(),
            });
        }
        let mut other = b.base_set().to_vec();
        other.sort();
        if other != sorted_labels {
            return Err(InferError::BaseSetMismatch { index });
        }
    }
    let u_pos = labels
        .iter()
        .position(|l| l == u)
        .ok_or_else(|| InferError::LabelNotInBaseSet(u.to_string()))?;
    let v_pos = labels
        .iter()
        .position(|l| l == v)
        .ok_or_else(|| InferError::LabelNotInBaseSet(v.to_string()))?;
    if u_pos == v_pos {
        return Err(InferError::Matrix(MatrixError::IndicesNotDistinct));
    }

    // Matrices over the shared label order.
    let mats: Vec<GromovMatrix> = samples
        .iter()
        .map(|b| {
            Base::new(b.tree().clone(), s, labels.clone()).map(|rb| rb.gromov_matrix())
        })
        .collect::<Result<_, _>>()?;

    let mut family: Vec<GromovMatrix> = mats.clone();
    for a in 0..mats.len() {
        for b in a + 1..mats.len() {
            for step in 0..=grid.steps {
                let theta = step as f64 / grid.steps as f64;
                let w = CombinationWeights::pair(theta).expect("theta in [0, 1]");
                family.push(g_convex(&[mats[a].clone(), mats[b].clone()], &w)?);
            }
        }
    }
    let hits = family
        .iter()
        .filter(|m| on_path_from_base(m, u_pos, v_pos, tol).expect("indices checked"))
        .count();
    Ok(hits as f64 / family.len() as f64)
}

/// Outcome of comparing estimated path probabilities against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderAccuracy {
    /// Mean of `1 - e` over usable triples; `None` when none were usable.
    pub accuracy: Option<f64>,
    pub used: usize,
    /// Triples dropped because the ground truth was degenerate (0 or 1).
    pub excluded: usize,
}

/// Per-triple error `(|p1 - e1|/p1 + |p2 - e2|/p2) / 2` with `p2 = 1 - p1`,
/// averaged as `1 - e`. Triples whose ground truth is 0 or 1 are excluded
/// rather than dividing by zero.
pub fn order_accuracy(estimates: &[f64], truths: &[f64]) -> Result<OrderAccuracy, InferError> {
    if estimates.len() != truths.len() {
        return Err(InferError::LengthMismatch { a: estimates.len(), b: truths.len() });
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for (&e1, &p1) in estimates.iter().zip(truths) {
        if p1 <= 0.0 || p1 >= 1.0 {
            excluded += 1;
            continue;
        }
        let (p2, e2) = (1.0 - p1, 1.0 - e1);
        let err = ((p1 - e1).abs() / p1 + (p2 - e2).abs() / p2) / 2.0;
        sum += 1.0 - err;
        used += 1;
    }
    Ok(OrderAccuracy {
        accuracy: if used > 0 { Some(sum / used as f64) } else { None },
        used,
        excluded,
    })
}

/// Maximum total edge weight among the components left after deleting `s`
/// (edges incident to `s` are deleted with it).
pub fn centroid_score(tree: &WeightedTree, s: &str) -> Result<f64, TreeError> {
    let si = tree.idx(s)?;
    let n = tree.node_count();
    let mut seen = vec![false; n];
    seen[si] = true;
    let mut best = 0.0f64;
    for &(start, _) in tree.neighbors(si) {
        if seen[start] {
            continue;
        }
        let mut weight = 0.0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &(y, w) in tree.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    weight += w;
                    stack.push(y);
                }
            }
        }
        best = best.max(weight);
    }
    Ok(best)
}

/// Which nodes are scored as candidate sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSet {
    Infected,
    AllNodes,
}

/// Whether higher or lower scores rank first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreDirection {
    Argmax,
    Argmin,
}

#[derive(Debug, Clone)]
pub enum SnapshotMethod {
    /// One random BFS tree per candidate, scored directly.
    BfsHeuristic { seed: RngSeed },
    /// Simplex-grid G-convex family over two BFS trees and a star, scored
    /// by the best member.
    Gromov { grid: usize },
}

#[derive(Debug, Clone)]
pub struct SnapshotOptions {
    pub candidates: CandidateSet,
    pub direction: ScoreDirection,
    pub tol: f64,
}

impl Default for SnapshotOptions {
    fn default() -> Self {
        Self { candidates: CandidateSet::Infected, direction: ScoreDirection::Argmax, tol: DEFAULT_TOL }
    }
}

/// The matrix family one candidate source generates: two BFS spanning trees
/// (forward and reversed neighbor order, restricted to span the infected
/// set) plus the diagonal star of the first, combined over the whole
/// simplex grid.
#[derive(Debug, Clone)]
pub struct CandidateFamily {
    pub pure: [GromovMatrix; 3],
    pub members: Vec<(CombinationWeights, GromovMatrix)>,
}

fn infected_base_names(
    graph: &WeightedGraph,
    infected: &[String],
    s: &str,
) -> Result<Vec<String>, InferError> {
    let mut idx: Vec<usize> = Vec::with_capacity(infected.len());
    for name in infected {
        let i = graph.idx(name)?;
        if idx.contains(&i) {
            return Err(InferError::DuplicateInfected(name.clone()));
        }
        idx.push(i);
    }
    let s_idx = graph.idx(s)?;
    let mut base: Vec<usize> = idx.into_iter().filter(|&i| i != s_idx).collect();
    base.sort_unstable();
    Ok(base.into_iter().map(|i| graph.name(i).to_string()).collect())
}

/// Builds the candidate family for source `s`. Errors with
/// [`InferError::EmptyInfected`] when no base nodes remain after removing
/// `s` (the degenerate single-infected snapshot).
pub fn gromov_candidate_family(
    graph: &WeightedGraph,
    infected: &[String],
    s: &str,
    grid: usize,
) -> Result<CandidateFamily, InferError> {
    let base_names = infected_base_names(graph, infected, s)?;
    if base_names.is_empty() {
        return Err(InferError::EmptyInfected);
    }
    let t1 = graph.bfs_tree(s, &NeighborOrder::Forward)?;
    let t2 = graph.bfs_tree(s, &NeighborOrder::Reversed)?;
    let m1 = restrict_to_span(&t1, s, &base_names)?.gromov_matrix();
    let m2 = restrict_to_span(&t2, s, &base_names)?.gromov_matrix();
    let m3 = m1.diagonal_matrix();
    let mats = [m1.clone(), m2.clone(), m3.clone()];
    let members = simplex_grid(3, grid)
        .into_iter()
        .map(|w| {
            let m = g_convex(&mats, &w)?;
            Ok((w, m))
        })
        .collect::<Result<Vec<_>, InferError>>()?;
    Ok(CandidateFamily { pure: [m1, m2, m3], members })
}

/// Drops base nodes that coincide with an earlier one (equal diagonal and
/// cross product), so degenerate combination matrices can still be rebuilt.
/// The centroid score is unchanged by merging labels on one point.
fn merge_coincident(m: &GromovMatrix, tol: f64) -> GromovMatrix {
    let n = m.dim();
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for j in 0..n {
        let dup = keep.iter().any(|&i| {
            (m.get(i, i) - m.get(j, j)).abs() <= tol && (m.get(i, j) - m.get(i, i)).abs() <= tol
        });
        if !dup {
            keep.push(j);
        }
    }
    if keep.len() == n {
        return m.clone();
    }
    let sym = SymmetricMatrix::from_fn(keep.len(), |a, b| m.get(keep[a], keep[b]));
    GromovMatrix::try_new(sym, tol).expect("principal submatrix of a valid matrix")
}

fn family_score(family: &CandidateFamily, direction: ScoreDirection, tol: f64) -> Result<f64, InferError> {
    let mut agg: Option<f64> = None;
    for (_, m) in &family.members {
        let base = reconstruct_tree(&merge_coincident(m, tol))?;
        let score = centroid_score(base.tree(), base.base_vertex())?;
        agg = Some(match (agg, direction) {
            (None, _) => score,
            (Some(a), ScoreDirection::Argmax) => a.max(score),
            (Some(a), ScoreDirection::Argmin) => a.min(score),
        });
    }
    Ok(agg.expect("grid is non-empty"))
}

/// Scores every candidate source against the infected snapshot and returns
/// `(node, score)` ranked best-first (descending for `Argmax`); ties break
/// toward the smaller canonical node index.
pub fn source_estimate_snapshot(
    graph: &WeightedGraph,
    infected: &[String],
    method: &SnapshotMethod,
    opts: &SnapshotOptions,
) -> Result<Vec<(String, f64)>, InferError> {
    if infected.is_empty() {
        return Err(InferError::EmptyInfected);
    }
    let mut candidate_idx: Vec<usize> = match opts.candidates {
        CandidateSet::Infected => {
            infected.iter().map(|n| graph.idx(n)).collect::<Result<_, _>>()?
        }
        CandidateSet::AllNodes => (0..graph.node_count()).collect(),
    };
    candidate_idx.sort_unstable();
    candidate_idx.dedup();

    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(candidate_idx.len());
    for (ci, &cand) in candidate_idx.iter().enumerate() {
        let cand_name = graph.name(cand).to_string();
        let base_names = infected_base_names(graph, infected, &cand_name)?;
        let score = if base_names.is_empty() {
            0.0
        } else {
            match method {
                SnapshotMethod::BfsHeuristic { seed } => {
                    let t = graph.bfs_tree(
                        &cand_name,
                        &NeighborOrder::Random(seed.derive(ci as u64)),
                    )?;
                    let b = restrict_to_span(&t, &cand_name, &base_names)?;
                    centroid_score(b.tree(), &cand_name)?
                }
                SnapshotMethod::Gromov { grid } => {
                    let family = gromov_candidate_family(graph, infected, &cand_name, *grid)?;
                    family_score(&family, opts.direction, opts.tol)?
                }
            }
        };
        scored.push((cand, score));
    }
    scored.sort_by(|a, b| {
        let ord = a.1.total_cmp(&b.1);
        match opts.direction {
            ScoreDirection::Argmax => ord.reverse().then(a.0.cmp(&b.0)),
            ScoreDirection::Argmin => ord.then(a.0.cmp(&b.0)),
        }
    });
    Ok(scored.into_iter().map(|(i, s)| (graph.name(i).to_string(), s)).collect())
}

fn check_demand(graph: &WeightedGraph, demand: &[f64]) -> Result<(), InferError> {
    if demand.len() != graph.node_count() {
        return Err(InferError::DemandLength { expected: graph.node_count(), got: demand.len() });
    }
    for (i, &w) in demand.iter().enumerate() {
        if w < 0.0 || !w.is_finite() {
            return Err(InferError::NegativeDemand(i));
        }
    }
    Ok(())
}

/// Demand-weighted cost of serving every node from its nearest center:
/// `sum_v w(v) min_{s in centers} d_G(s, v)`.
pub fn placement_cost(
    graph: &WeightedGraph,
    demand: &[f64],
    centers: &[usize],
) -> Result<f64, InferError> {
    check_demand(graph, demand)?;
    if centers.is_empty() {
        return Err(InferError::EmptyCenters);
    }
    let n = graph.node_count();
    let mut rho = vec![f64::INFINITY; n];
    for &c in centers {
        if c >= n {
            return Err(InferError::CenterOutOfRange(c));
        }
        for (v, d) in graph.distances_from(c).into_iter().enumerate() {
            rho[v] = rho[v].min(d);
        }
    }
    Ok(rho.iter().zip(demand).map(|(&d, &w)| w * d).sum())
}

/// Greedy center placement and the cost after each step.
#[derive(Debug, Clone)]
pub struct GreedyPlacement {
    pub centers: Vec<usize>,
    /// Cost after choosing each center; non-increasing.
    pub step_costs: Vec<f64>,
}

/// Adds the single center that most reduces cost, `k` times; ties break to
/// the smaller node index. May be suboptimal.
pub fn place_greedy(
    graph: &WeightedGraph,
    demand: &[f64],
    k: usize,
) -> Result<GreedyPlacement, InferError> {
    check_demand(graph, demand)?;
    let n = graph.node_count();
    if k == 0 {
        return Err(InferError::KZero);
    }
    if k > n {
        return Err(InferError::KTooLarge { k, n });
    }
    let all_dists: Vec<Vec<f64>> = (0..n).map(|v| graph.distances_from(v)).collect();
    let mut rho = vec![f64::INFINITY; n];
    let mut centers = Vec::with_capacity(k);
    let mut step_costs = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for s in 0..n {
            if centers.contains(&s) {
                continue;
            }
            let cost: f64 =
                (0..n).map(|v| demand[v] * rho[v].min(all_dists[s][v])).sum();
            best = match best {
                Some((_, bc)) if bc <= cost => best,
                _ => Some((s, cost)),
            };
        }
        let (s, cost) = best.expect("k <= n leaves a candidate");
        centers.push(s);
        step_costs.push(cost);
        for v in 0..n {
            rho[v] = rho[v].min(all_dists[s][v]);
        }
    }
    Ok(GreedyPlacement { centers, step_costs })
}

/// Result of the iterative family-based placement.
#[derive(Debug, Clone)]
pub struct GromovPlacement {
    pub centers: Vec<usize>,
    /// Final cost, recomputable with [`placement_cost`].
    pub cost: f64,
    pub iterations: usize,
}

/// Center cost within one combined tree, read from matrix entries: the
/// distance between base nodes is `M(i,i) + M(j,j) - 2 M(i,j)` and the
/// distance from the base vertex to node `j` is `M(j,j)`.
fn tree_service_cost(
    m: &GromovMatrix,
    center_demand: f64,
    base_demand: &[f64],
    candidate: Option<usize>,
) -> f64 {
    match candidate {
        None => base_demand.iter().zip(0..m.dim()).map(|(&w, j)| w * m.get(j, j)).sum(),
        Some(i) => {
            let mut total = center_demand * m.get(i, i);
            for (j, &w) in base_demand.iter().enumerate() {
                total += w * m.base_distance(i, j);
            }
            total
        }
    }
}

/// Iterative placement: Voronoi-partition on the current centers, build a
/// minimum spanning tree and a BFS tree per part, blend them across the
/// theta grid, and move each center to the node minimizing the in-tree
/// weighted service distance (evaluated exhaustively over the part's
/// nodes). Stops when no center moves farther than `eta` or after
/// `max_iterations`.
pub fn place_gromov(
    graph: &WeightedGraph,
    demand: &[f64],
    k: usize,
    eta: f64,
    max_iterations: usize,
    seed: RngSeed,
    grid: &SynthesisGrid,
) -> Result<GromovPlacement, InferError> {
    check_demand(graph, demand)?;
    let n = graph.node_count();
    if k == 0 {
        return Err(InferError::KZero);
    }
    if k > n {
        return Err(InferError::KTooLarge { k, n });
    }
    if eta <= 0.0 || !eta.is_finite() {
        return Err(InferError::BadParameter(format!("eta {eta}")));
    }
    if max_iterations == 0 {
        return Err(InferError::BadParameter("max_iterations 0".into()));
    }

    use rand::seq::SliceRandom;
    let mut rng = seed.rng();
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(&mut rng);
    let mut centers: Vec<usize> = pool.into_iter().take(k).collect();

    let mut iterations = 0usize;
    while iterations < max_iterations {
        iterations += 1;
        let center_names: Vec<&str> = centers.iter().map(|&c| graph.name(c)).collect();
        let vor = graph.voronoi_partition(&center_names)?;
        let mut next = Vec::with_capacity(k);
        for (pi, part) in vor.parts.iter().enumerate() {
            let center = centers[pi];
            if part.len() < 2 {
                next.push(center);
                continue;
            }
            let sub = graph.induced_subgraph(part)?;
            let mst = sub.minimum_spanning_tree();
            let bfs = sub.bfs_tree(graph.name(center), &NeighborOrder::Forward)?;
            let mut base_idx: Vec<usize> =
                part.iter().copied().filter(|&v| v != center).collect();
            base_idx.sort_unstable();
            let base_names: Vec<String> =
                base_idx.iter().map(|&v| graph.name(v).to_string()).collect();
            let m_mst =
                Base::new(mst, graph.name(center), base_names.clone())?.gromov_matrix();
            let m_bfs =
                Base::new(bfs, graph.name(center), base_names.clone())?.gromov_matrix();
            let base_demand: Vec<f64> = base_idx.iter().map(|&v| demand[v]).collect();
            let center_demand = demand[center];

            let mut best: Option<(f64, usize)> = None;
            for step in 0..=grid.steps {
                let theta = step as f64 / grid.steps as f64;
                let w = CombinationWeights::pair(theta).expect("theta in [0, 1]");
                let m = g_convex(&[m_mst.clone(), m_bfs.clone()], &w)?;
                let consider = |cost: f64, node: usize, best: &mut Option<(f64, usize)>| {
                    if best.map_or(true, |(bc, _)| cost < bc) {
                        *best = Some((cost, node));
                    }
                };
                consider(
                    tree_service_cost(&m, center_demand, &base_demand, None),
                    center,
                    &mut best,
                );
                for (i, &node) in base_idx.iter().enumerate() {
                    consider(
                        tree_service_cost(&m, center_demand, &base_demand, Some(i)),
                        node,
                        &mut best,
                    );
                }
            }
            next.push(best.expect("part is non-empty").1);
        }
        let moved = centers
            .iter()
            .zip(&next)
            .map(|(&old, &new)| graph.distances_from(old)[new])
            .fold(0.0f64, f64::max);
        centers = next;
        if moved <= eta {
            break;
        }
    }
    let cost = placement_cost(graph, demand, &centers)?;
    Ok(GromovPlacement { centers, cost, iterations })
}

/// Paired outcome of one source-estimation trial.
#[derive(Debug, Clone, Copy)]
pub struct SourceTrial {
    pub dist_baseline: f64,
    pub dist_gromov: f64,
    /// Rank of the true source divided by the number of candidates, in (0, 1].
    pub rank_frac_baseline: f64,
    pub rank_frac_gromov: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceMetrics {
    pub mean_dist_baseline: f64,
    pub mean_dist_gromov: f64,
    /// `(d_B - d_G) / d_B`; undefined when the baseline distance is zero.
    pub error_reduction: Option<f64>,
    /// Fraction of trials with the true source in the top `top_fraction`.
    pub accuracy_baseline: f64,
    pub accuracy_gromov: f64,
    /// `(p_G - p_B) / p_B`; undefined when the baseline accuracy is zero.
    pub detection_improvement: Option<f64>,
}

pub fn eval_source_metrics(
    trials: &[SourceTrial],
    top_fraction: f64,
) -> Result<SourceMetrics, InferError> {
    if trials.is_empty() {
        return Err(InferError::NoSamples);
    }
    let n = trials.len() as f64;
    let mean_b = trials.iter().map(|t| t.dist_baseline).sum::<f64>() / n;
    let mean_g = trials.iter().map(|t| t.dist_gromov).sum::<f64>() / n;
    let acc_b =
        trials.iter().filter(|t| t.rank_frac_baseline <= top_fraction).count() as f64 / n;
    let acc_g = trials.iter().filter(|t| t.rank_frac_gromov <= top_fraction).count() as f64 / n;
    Ok(SourceMetrics {
        mean_dist_baseline: mean_b,
        mean_dist_gromov: mean_g,
        error_reduction: if mean_b > 0.0 { Some((mean_b - mean_g) / mean_b) } else { None },
        accuracy_baseline: acc_b,
        accuracy_gromov: acc_g,
        detection_improvement: if acc_b > 0.0 { Some((acc_g - acc_b) / acc_b) } else { None },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementMetrics {
    /// Mean of `c1 / c2` over trials with a positive denominator.
    pub mean_cost_ratio: Option<f64>,
    pub used: usize,
    pub undefined: usize,
}

pub fn eval_placement_metrics(costs: &[(f64, f64)]) -> PlacementMetrics {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut undefined = 0usize;
    for &(c1, c2) in costs {
        if c2 > 0.0 {
            sum += c1 / c2;
            used += 1;
        } else {
            undefined += 1;
        }
    }
    PlacementMetrics {
        mean_cost_ratio: if used > 0 { Some(sum / used as f64) } else { None },
        used,
        undefined,
    }
}
