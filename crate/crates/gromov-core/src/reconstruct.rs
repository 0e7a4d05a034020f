//! The matrix-to-tree direction of the correspondence: building a canonical
//! base whose Gromov matrix reproduces a validated input.

use thiserror::Error;

use crate::matrix::GromovMatrix;
use crate::tree::{Base, WeightedTree};
use crate::DEFAULT_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError {
    #[error("base nodes {} and {} coincide: the matrix encodes duplicate points", i + 1, j + 1)]
    DegenerateDuplicate { i: usize, j: usize },
}

/// Growing tree with parent pointers toward the base vertex (index 0).
struct Arena {
    names: Vec<String>,
    parent: Vec<usize>,
    parent_w: Vec<f64>,
    dist: Vec<f64>,
}

impl Arena {
    fn new() -> Self {
        Self {
            names: vec!["s".to_string()],
            parent: vec![0],
            parent_w: vec![0.0],
            dist: vec![0.0],
        }
    }

    fn push(&mut self, name: String, parent: usize, w: f64, dist: f64) -> usize {
        self.names.push(name);
        self.parent.push(parent);
        self.parent_w.push(w);
        self.dist.push(dist);
        self.names.len() - 1
    }
}

/// Rebuilds a canonical base from a validated matrix, in `O(n^3)`.
///
/// Nodes are labeled `s`, `v1`..`vn` (base-set order) with generated names
/// for interior branch points. Node `v_k` attaches on the path toward the
/// earlier node `j` maximizing `M(j, k)`; ties pick the smallest `j`, which
/// only affects interior labels, never the metric.
pub fn reconstruct_tree(m: &GromovMatrix) -> Result<Base, ReconstructError> {
    reconstruct_tree_with_tol(m, DEFAULT_TOL)
}

pub fn reconstruct_tree_with_tol(m: &GromovMatrix, tol: f64) -> Result<Base, ReconstructError> {
    let n = m.dim();
    let mut arena = Arena::new();
    let mut v_arena: Vec<usize> = Vec::with_capacity(n);
    let mut interior = 0usize;

    for k in 0..n {
        let attach_point = if k == 0 {
            0
        } else {
            let mut jstar = 0;
            for j in 1..k {
                if m.get(j, k) > m.get(jstar, k) {
                    jstar = j;
                }
            }
            let target = m.get(jstar, k).max(0.0);
            // Walk from v_jstar toward s to the edge straddling `target`.
            let mut cur = v_arena[jstar];
            while cur != 0 && arena.dist[arena.parent[cur]] > target + tol {
                cur = arena.parent[cur];
            }
            if (arena.dist[cur] - target).abs() <= tol {
                cur
            } else if (arena.dist[arena.parent[cur]] - target).abs() <= tol {
                arena.parent[cur]
            } else {
                // Subdivide the edge above `cur` at distance `target`.
                let par = arena.parent[cur];
                interior += 1;
                let q = arena.push(
                    format!("p{interior}"),
                    par,
                    target - arena.dist[par],
                    target,
                );
                arena.parent[cur] = q;
                arena.parent_w[cur] = arena.dist[cur] - target;
                q
            }
        };

        let leaf_w = m.get(k, k) - arena.dist[attach_point];
        if leaf_w > tol {
            let v = arena.push(format!("v{}", k + 1), attach_point, leaf_w, m.get(k, k));
            v_arena.push(v);
        } else {
            // v_k sits exactly at the attach point. A fresh interior node
            // takes the label; an already-labeled point means the matrix
            // encodes two identical base nodes.
            if attach_point == 0 {
                return Err(ReconstructError::DegenerateDuplicate { i: k, j: k });
            }
            if let Some(i) = v_arena.iter().position(|&a| a == attach_point) {
                return Err(ReconstructError::DegenerateDuplicate { i, j: k });
            }
            arena.names[attach_point] = format!("v{}", k + 1);
            v_arena.push(attach_point);
        }
    }

    let edges: Vec<(String, String, f64)> = (1..arena.names.len())
        .map(|i| {
            (
                arena.names[i].clone(),
                arena.names[arena.parent[i]].clone(),
                arena.parent_w[i],
            )
        })
        .collect();
    let tree = WeightedTree::from_edges(edges).expect("arena forms a tree");
    let base_set: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    Ok(Base::new(tree, "s", base_set).expect("labels are distinct"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SymmetricMatrix;
    use crate::DEFAULT_TOL;

    fn gromov(rows: &[&[f64]]) -> GromovMatrix {
        let sym =
            SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        GromovMatrix::try_new(sym, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn one_by_one_is_a_single_edge() {
        let b = reconstruct_tree(&gromov(&[&[2.5]])).unwrap();
        assert_eq!(b.tree().node_count(), 2);
        assert_eq!(b.tree().distance("s", "v1").unwrap(), 2.5);
    }

    #[test]
    fn diagonal_reconstructs_to_star() {
        let b = reconstruct_tree(&gromov(&[
            &[3.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 2.0],
        ]))
        .unwrap();
        assert_eq!(b.tree().node_count(), 4);
        let s = b.tree().idx("s").unwrap();
        assert_eq!(b.tree().degree(s), 3);
        assert_eq!(b.tree().distance("s", "v1").unwrap(), 3.0);
        assert_eq!(b.tree().distance("s", "v3").unwrap(), 2.0);
    }

    #[test]
    fn blended_quad_reconstructs_expected_geometry() {
        // Three nodes branching at distance 2 from s, the fourth hanging at
        // distance 1.5 on the shared stem.
        let m = gromov(&[
            &[4.0, 2.0, 2.0, 1.5],
            &[2.0, 4.0, 2.0, 1.5],
            &[2.0, 2.0, 4.0, 1.5],
            &[1.5, 1.5, 1.5, 4.0],
        ]);
        let b = reconstruct_tree(&m).unwrap();
        let t = b.tree();
        assert_eq!(t.gromov_product("s", "v1", "v2").unwrap(), 2.0);
        assert_eq!(t.gromov_product("s", "v1", "v4").unwrap(), 1.5);
        for i in 1..=4 {
            assert_eq!(t.distance("s", &format!("v{i}")).unwrap(), 4.0);
        }
        assert_eq!(b.gromov_matrix().as_sym().max_abs_diff(m.as_sym()).unwrap(), 0.0);
        assert!(b.is_canonical());
        // s, 4 base nodes, branch points at 1.5 and at 2.
        assert_eq!(t.node_count(), 7);
    }

    #[test]
    fn round_trips_matrix_exactly_on_rational_fixture() {
        let m = gromov(&[
            &[4.0, 1.0, 3.0, 1.0],
            &[1.0, 4.0, 1.0, 1.0],
            &[3.0, 1.0, 4.0, 1.0],
            &[1.0, 1.0, 1.0, 4.0],
        ]);
        let b = reconstruct_tree(&m).unwrap();
        assert_eq!(b.gromov_matrix().as_sym().max_abs_diff(m.as_sym()).unwrap(), 0.0);
        assert!(b.is_canonical());
    }

    #[test]
    fn collinear_base_nodes_land_on_the_stem() {
        // v1 at distance 1 lies on the path to v2 at distance 3.
        let m = gromov(&[&[1.0, 1.0], &[1.0, 3.0]]);
        let b = reconstruct_tree(&m).unwrap();
        assert_eq!(b.tree().node_count(), 3);
        assert_eq!(b.tree().distance("v1", "v2").unwrap(), 2.0);
        assert_eq!(b.tree().degree(b.tree().idx("v1").unwrap()), 2);
    }

    #[test]
    fn tie_break_attaches_to_smallest_index() {
        let m = gromov(&[
            &[4.0, 2.0, 2.0],
            &[2.0, 4.0, 2.0],
            &[2.0, 2.0, 4.0],
        ]);
        let b = reconstruct_tree(&m).unwrap();
        // One shared branch point serves all three nodes.
        assert_eq!(b.tree().node_count(), 5);
        assert!(b.tree().contains("p1"));
        assert_eq!(b.gromov_matrix().as_sym().max_abs_diff(m.as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let m = gromov(&[&[2.0, 2.0], &[2.0, 2.0]]);
        assert_eq!(
            reconstruct_tree(&m).unwrap_err(),
            ReconstructError::DegenerateDuplicate { i: 0, j: 1 }
        );
    }
}
