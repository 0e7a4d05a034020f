//! The stack calculus of build operations that generates every Gromov
//! matrix, its recursive smallest-eigenvalue lower bound, and the
//! decomposition of a canonical base back into operations.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::matrix::{GromovMatrix, SymmetricMatrix};
use crate::tree::Base;

/// One step of the build calculus.
///
/// `Init(a)` pushes the 1x1 matrix `(a)`. `DirectSum` pops two matrices and
/// pushes their block-diagonal sum. `ExtensionI(a)` adds `a` to every entry
/// of the top matrix. `ExtensionII(a, b)` (with `a >= b > 0`) adds `a` to
/// every entry and then appends a row and column filled with `b`, diagonal
/// included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuildOp {
    Init(f64),
    DirectSum,
    ExtensionI(f64),
    ExtensionII(f64, f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProgramError {
    #[error("program has no operations")]
    EmptyProgram,
    #[error("op {index}: stack underflow")]
    StackUnderflow { index: usize },
    #[error("op {index}: parameter must be positive")]
    NonPositiveParameter { index: usize },
    #[error("op {index}: extension requires a >= b")]
    ParameterOrder { index: usize },
    #[error("program leaves {remaining} matrices on the stack, expected 1")]
    UnconsumedStack { remaining: usize },
    #[error("permutation has length {got}, expected {expected}")]
    PermutationLength { expected: usize, got: usize },
    #[error("permutation is not a valid ordering")]
    PermutationInvalid,
}

/// A validated sequence of build operations plus an output ordering.
///
/// Executing the operations yields a matrix in stack order; the final result
/// is that matrix conjugated by the permutation: entry `(i, j)` of the
/// output is entry `(perm[i], perm[j])` of the stack result.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildProgram {
    ops: Vec<BuildOp>,
    permutation: Vec<usize>,
}

impl BuildProgram {
    /// Validates stack well-formedness and the permutation; `None` means the
    /// identity ordering. Errors carry the offending op index.
    pub fn new(ops: Vec<BuildOp>, permutation: Option<Vec<usize>>) -> Result<Self, ProgramError> {
        if ops.is_empty() {
            return Err(ProgramError::EmptyProgram);
        }
        let mut dims: Vec<usize> = Vec::new();
        for (index, op) in ops.iter().enumerate() {
            match *op {
                BuildOp::Init(a) => {
                    if a <= 0.0 || !a.is_finite() {
                        return Err(ProgramError::NonPositiveParameter { index });
                    }
                    dims.push(1);
                }
                BuildOp::DirectSum => {
                    let b = dims.pop().ok_or(ProgramError::StackUnderflow { index })?;
                    let a = dims.pop().ok_or(ProgramError::StackUnderflow { index })?;
                    dims.push(a + b);
                }
                BuildOp::ExtensionI(a) => {
                    if a <= 0.0 || !a.is_finite() {
                        return Err(ProgramError::NonPositiveParameter { index });
                    }
                    if dims.is_empty() {
                        return Err(ProgramError::StackUnderflow { index });
                    }
                }
                BuildOp::ExtensionII(a, b) => {
                    if b <= 0.0 || !b.is_finite() || !a.is_finite() {
                        return Err(ProgramError::NonPositiveParameter { index });
                    }
                    if a < b {
                        return Err(ProgramError::ParameterOrder { index });
                    }
                    let d = dims.pop().ok_or(ProgramError::StackUnderflow { index })?;
                    dims.push(d + 1);
                }
            }
        }
        if dims.len() != 1 {
            return Err(ProgramError::UnconsumedStack { remaining: dims.len() });
        }
        let n = dims[0];
        let permutation = match permutation {
            None => (0..n).collect(),
            Some(p) => {
                if p.len() != n {
                    return Err(ProgramError::PermutationLength { expected: n, got: p.len() });
                }
                let mut seen = vec![false; n];
                for &i in &p {
                    if i >= n || seen[i] {
                        return Err(ProgramError::PermutationInvalid);
                    }
                    seen[i] = true;
                }
                p
            }
        };
        Ok(Self { ops, permutation })
    }

    pub fn ops(&self) -> &[BuildOp] {
        &self.ops
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Dimension of the produced matrix.
    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    /// Runs the stack machine and applies the output permutation. Always
    /// produces a valid Gromov matrix.
    pub fn apply(&self) -> GromovMatrix {
        let mut stack: Vec<SymmetricMatrix> = Vec::new();
        for op in &self.ops {
            match *op {
                BuildOp::Init(a) => {
                    stack.push(SymmetricMatrix::from_fn(1, |_, _| a));
                }
                BuildOp::DirectSum => {
                    let b = stack.pop().expect("validated");
                    let a = stack.pop().expect("validated");
                    let (ka, kb) = (a.dim(), b.dim());
                    let sum = SymmetricMatrix::from_fn(ka + kb, |i, j| {
                        if i < ka && j < ka {
                            a.get(i, j)
                        } else if i >= ka && j >= ka {
                            b.get(i - ka, j - ka)
                        } else {
                            0.0
                        }
                    });
                    stack.push(sum);
                }
                BuildOp::ExtensionI(a) => {
                    let m = stack.pop().expect("validated");
                    let k = m.dim();
                    stack.push(SymmetricMatrix::from_fn(k, |i, j| m.get(i, j) + a));
                }
                BuildOp::ExtensionII(a, b) => {
                    let m = stack.pop().expect("validated");
                    let k = m.dim();
                    let ext = SymmetricMatrix::from_fn(k + 1, |i, j| {
                        if i < k && j < k {
                            m.get(i, j) + a
                        } else {
                            b
                        }
                    });
                    stack.push(ext);
                }
            }
        }
        let raw = stack.pop().expect("validated");
        let out = SymmetricMatrix::from_fn(raw.dim(), |i, j| {
            raw.get(self.permutation[i], self.permutation[j])
        });
        GromovMatrix::from_checked(out)
    }

    /// Recursive lower bound on the smallest eigenvalue of the produced
    /// matrix: `Init(a)` contributes `a`; `DirectSum` takes the minimum;
    /// `ExtensionI` leaves the bound unchanged; `ExtensionII(a, b)` with
    /// `a > b` gives `min(bound, b - b^2/a)` and with `a = b` gives
    /// `bound / (n + 1 + bound/a)` where `n` is the pre-extension dimension.
    pub fn lambda_min_bound(&self) -> f64 {
        let mut stack: Vec<(usize, f64)> = Vec::new();
        for op in &self.ops {
            match *op {
                BuildOp::Init(a) => stack.push((1, a)),
                BuildOp::DirectSum => {
                    let (db, bb) = stack.pop().expect("validated");
                    let (da, ba) = stack.pop().expect("validated");
                    stack.push((da + db, ba.min(bb)));
                }
                BuildOp::ExtensionI(_) => {}
                BuildOp::ExtensionII(a, b) => {
                    let (n, bound) = stack.pop().expect("validated");
                    let next = if a == b {
                        bound / (n as f64 + 1.0 + bound / a)
                    } else {
                        bound.min(b - b * b / a)
                    };
                    stack.push((n + 1, next));
                }
            }
        }
        stack.pop().expect("validated").1
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("base set is empty")]
    EmptyBaseSet,
    #[error("base is not canonical: {0}")]
    NotCanonical(String),
}

type Adj = BTreeMap<usize, Vec<(usize, f64)>>;

fn remove_node(adj: &mut Adj, x: usize) {
    if let Some(nbrs) = adj.remove(&x) {
        for (y, _) in nbrs {
            if let Some(l) = adj.get_mut(&y) {
                l.retain(|&(z, _)| z != x);
            }
        }
    }
}

fn component_from(adj: &Adj, start: usize, avoid: usize) -> Vec<usize> {
    let mut seen = vec![start];
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &(v, _) in &adj[&u] {
            if v != avoid && !seen.contains(&v) {
                seen.push(v);
                stack.push(v);
            }
        }
    }
    seen
}

fn induced(adj: &Adj, nodes: &[usize]) -> Adj {
    let set: std::collections::HashSet<usize> = nodes.iter().copied().collect();
    let mut out: Adj = BTreeMap::new();
    for &u in nodes {
        let nbrs = adj[&u].iter().copied().filter(|&(v, _)| set.contains(&v)).collect();
        out.insert(u, nbrs);
    }
    out
}

/// Decomposes a canonical base into a build program whose application
/// reproduces its Gromov matrix entrywise. The recursion pops a base node
/// whose path to the base vertex is bare (an `ExtensionII`), or splits the
/// tree at the first branch vertex (a `DirectSum`, shifted by an
/// `ExtensionI` when the branch vertex is away from the base vertex).
pub fn decompose(base: &Base) -> Result<BuildProgram, DecomposeError> {
    if base.base_set().is_empty() {
        return Err(DecomposeError::EmptyBaseSet);
    }
    if !base.is_canonical() {
        return Err(DecomposeError::NotCanonical(
            "tree has leaves or pass-through nodes outside the base set".into(),
        ));
    }
    let tree = base.tree();
    let s = tree.idx(base.base_vertex()).expect("validated");
    let mut base_pos: HashMap<usize, usize> = HashMap::new();
    for (pos, v) in base.base_set().iter().enumerate() {
        base_pos.insert(tree.idx(v).expect("validated"), pos);
    }
    let mut adj: Adj = BTreeMap::new();
    for i in 0..tree.node_count() {
        adj.insert(i, tree.neighbors(i).to_vec());
    }
    let names: Vec<String> = tree.node_names().to_vec();
    let (ops, order) = go(adj, s, &base_pos, &names)?;
    let n = order.len();
    let mut perm = vec![0usize; n];
    for (stack_pos, &orig) in order.iter().enumerate() {
        perm[orig] = stack_pos;
    }
    Ok(BuildProgram::new(ops, Some(perm)).expect("decomposition emits well-formed programs"))
}

/// Returns the ops building the subtree rooted at `s` plus, per stack output
/// position, the original base-set position sitting there.
fn go(
    mut adj: Adj,
    s: usize,
    base_pos: &HashMap<usize, usize>,
    names: &[String],
) -> Result<(Vec<BuildOp>, Vec<usize>), DecomposeError> {
    let not_canonical = |what: &str| DecomposeError::NotCanonical(what.to_string());
    // The root may be a base node popped by the caller; it no longer counts.
    let base_here: Vec<usize> =
        adj.keys().copied().filter(|&i| i != s && base_pos.contains_key(&i)).collect();
    if base_here.is_empty() {
        return Err(not_canonical("subtree without base nodes"));
    }
    if base_here.len() == 1 {
        let v = base_here[0];
        let nbrs = &adj[&s];
        if adj.len() != 2 || nbrs.len() != 1 || nbrs[0].0 != v {
            return Err(not_canonical("single-base subtree is not a bare edge"));
        }
        let w = nbrs[0].1;
        return Ok((vec![BuildOp::Init(w)], vec![base_pos[&v]]));
    }

    let deg_s = adj[&s].len();
    if deg_s == 1 {
        let (x, w_sx) = adj[&s][0];
        if let Some(&vpos) = base_pos.get(&x) {
            // Pop x via ExtensionII: the stalk from s runs through x down to
            // the old base vertex.
            let b = w_sx;
            let deg_x = adj[&x].len();
            let (new_root, a) = if deg_x == 2 {
                let &(y, w_xy) = adj[&x].iter().find(|&&(z, _)| z != s).expect("degree 2");
                if base_pos.contains_key(&y) {
                    (x, b)
                } else {
                    remove_node(&mut adj, s);
                    remove_node(&mut adj, x);
                    (y, b + w_xy)
                }
            } else if deg_x >= 3 {
                (x, b)
            } else {
                return Err(not_canonical("base leaf adjacent to base vertex in a multi-base subtree"));
            };
            if new_root == x {
                remove_node(&mut adj, s);
            }
            let (mut ops, mut order) = go(adj, new_root, base_pos, names)?;
            ops.push(BuildOp::ExtensionII(a, b));
            order.push(vpos);
            return Ok((ops, order));
        }
        // Non-base stalk neighbor must branch in canonical form; split there
        // and account for the stalk with an ExtensionI.
        if adj[&x].len() < 3 {
            return Err(not_canonical("pass-through node outside the base set"));
        }
        remove_node(&mut adj, s);
        return split(adj, x, w_sx, base_pos, names);
    }
    split(adj, s, 0.0, base_pos, names)
}

fn split(
    adj: Adj,
    u: usize,
    shift: f64,
    base_pos: &HashMap<usize, usize>,
    names: &[String],
) -> Result<(Vec<BuildOp>, Vec<usize>), DecomposeError> {
    let mut comps: Vec<Vec<usize>> = adj[&u]
        .iter()
        .map(|&(nbr, _)| component_from(&adj, nbr, u))
        .collect();
    // The component holding the lexicographically smallest base node splits
    // off first; order the rest the same way for determinism.
    let min_base_name = |comp: &Vec<usize>| -> Option<String> {
        comp.iter()
            .filter(|i| base_pos.contains_key(i))
            .map(|&i| names[i].clone())
            .min()
    };
    for comp in &comps {
        if min_base_name(comp).is_none() {
            return Err(DecomposeError::NotCanonical("branch without base nodes".into()));
        }
    }
    comps.sort_by_key(|c| min_base_name(c).expect("checked"));

    let mut first = comps.remove(0);
    first.push(u);
    let adj1 = induced(&adj, &first);
    let mut rest: Vec<usize> = comps.into_iter().flatten().collect();
    rest.push(u);
    let adj2 = induced(&adj, &rest);

    let (mut ops, mut order) = go(adj1, u, base_pos, names)?;
    let (ops2, order2) = go(adj2, u, base_pos, names)?;
    ops.extend(ops2);
    order.extend(order2);
    ops.push(BuildOp::DirectSum);
    if shift > 0.0 {
        ops.push(BuildOp::ExtensionI(shift));
    }
    Ok((ops, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate;
    use crate::tree::WeightedTree;
    use crate::DEFAULT_TOL;

    fn prog(ops: Vec<BuildOp>) -> BuildProgram {
        BuildProgram::new(ops, None).unwrap()
    }

    #[test]
    fn apply_branched_pair_example() {
        let p = prog(vec![
            BuildOp::Init(3.0),
            BuildOp::Init(3.0),
            BuildOp::DirectSum,
            BuildOp::ExtensionII(5.0, 2.0),
        ]);
        let m = p.apply();
        let expect = [[8.0, 5.0, 2.0], [5.0, 8.0, 2.0], [2.0, 2.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), expect[i][j]);
            }
        }
        assert!(validate(m.as_sym(), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn apply_init_and_extension_i() {
        let p = prog(vec![BuildOp::Init(2.5)]);
        assert_eq!(p.apply().get(0, 0), 2.5);

        let p = prog(vec![
            BuildOp::Init(1.0),
            BuildOp::Init(2.0),
            BuildOp::DirectSum,
            BuildOp::ExtensionI(3.0),
        ]);
        let m = p.apply();
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 1), 5.0);
        assert_eq!(m.get(0, 1), 3.0);
    }

    #[test]
    fn permutation_reorders_output() {
        let p = BuildProgram::new(
            vec![BuildOp::Init(1.0), BuildOp::Init(2.0), BuildOp::DirectSum],
            Some(vec![1, 0]),
        )
        .unwrap();
        let m = p.apply();
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(1, 1), 1.0);
    }

    #[test]
    fn malformed_programs_report_op_index() {
        assert!(matches!(
            BuildProgram::new(vec![BuildOp::DirectSum], None),
            Err(ProgramError::StackUnderflow { index: 0 })
        ));
        assert!(matches!(
            BuildProgram::new(vec![BuildOp::Init(1.0), BuildOp::Init(1.0)], None),
            Err(ProgramError::UnconsumedStack { remaining: 2 })
        ));
        assert!(matches!(
            BuildProgram::new(vec![BuildOp::Init(-1.0)], None),
            Err(ProgramError::NonPositiveParameter { index: 0 })
        ));
        assert!(matches!(
            BuildProgram::new(vec![BuildOp::Init(1.0), BuildOp::ExtensionII(1.0, 2.0)], None),
            Err(ProgramError::ParameterOrder { index: 1 })
        ));
        assert!(matches!(
            BuildProgram::new(vec![BuildOp::Init(1.0)], Some(vec![0, 1])),
            Err(ProgramError::PermutationLength { expected: 1, got: 2 })
        ));
        assert!(matches!(
            BuildProgram::new(
                vec![BuildOp::Init(1.0), BuildOp::Init(1.0), BuildOp::DirectSum],
                Some(vec![0, 0])
            ),
            Err(ProgramError::PermutationInvalid)
        ));
        assert!(matches!(BuildProgram::new(vec![], None), Err(ProgramError::EmptyProgram)));
    }

    #[test]
    fn bound_examples() {
        let p = prog(vec![
            BuildOp::Init(3.0),
            BuildOp::Init(3.0),
            BuildOp::DirectSum,
            BuildOp::ExtensionII(5.0, 2.0),
        ]);
        assert_eq!(p.lambda_min_bound(), 1.2);

        let p = prog(vec![BuildOp::Init(7.5)]);
        assert_eq!(p.lambda_min_bound(), 7.5);
        assert!((p.apply().lambda_min() - 7.5).abs() < 1e-12);

        // Equal-parameter extension: bound a/(n + 1 + bound/a) with n = 1.
        let p = prog(vec![BuildOp::Init(3.0), BuildOp::ExtensionII(2.0, 2.0)]);
        assert!((p.lambda_min_bound() - 6.0 / 7.0).abs() < 1e-12);
        let exact = p.apply().lambda_min();
        // [[5, 2], [2, 2]] has eigenvalues 1 and 6.
        assert!((exact - 1.0).abs() < 1e-9);
        assert!(p.lambda_min_bound() <= exact + 1e-12);
    }

    fn base(tree: WeightedTree, s: &str, v: &[&str]) -> Base {
        Base::new(tree, s, v.iter().map(|x| x.to_string()).collect()).unwrap()
    }

    #[test]
    fn decompose_single_edge() {
        let b = base(WeightedTree::from_edges([("s", "v", 4.0)]).unwrap(), "s", &["v"]);
        let p = decompose(&b).unwrap();
        assert_eq!(p.ops(), &[BuildOp::Init(4.0)]);
    }

    #[test]
    fn decompose_branched_pair_matches_program() {
        let t = WeightedTree::from_edges([
            ("s", "v3", 2.0),
            ("v3", "u", 3.0),
            ("u", "v1", 3.0),
            ("u", "v2", 3.0),
        ])
        .unwrap();
        let b = base(t, "s", &["v1", "v2", "v3"]);
        let p = decompose(&b).unwrap();
        let m = p.apply();
        assert_eq!(b.gromov_matrix().as_sym().max_abs_diff(m.as_sym()).unwrap(), 0.0);
        assert_eq!(
            p.ops(),
            &[
                BuildOp::Init(3.0),
                BuildOp::Init(3.0),
                BuildOp::DirectSum,
                BuildOp::ExtensionII(5.0, 2.0),
            ]
        );
    }

    #[test]
    fn decompose_star_is_inits_and_direct_sums() {
        let n = 5;
        let edges: Vec<(String, String, f64)> =
            (1..=n).map(|i| ("s".to_string(), format!("v{i}"), 2.0)).collect();
        let t = WeightedTree::from_edges(edges).unwrap();
        let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let b = Base::new(t, "s", vs).unwrap();
        let p = decompose(&b).unwrap();
        let inits = p.ops().iter().filter(|o| matches!(o, BuildOp::Init(_))).count();
        let sums = p.ops().iter().filter(|o| matches!(o, BuildOp::DirectSum)).count();
        let exts = p.ops().iter().filter(|o| matches!(o, BuildOp::ExtensionI(_) | BuildOp::ExtensionII(..))).count();
        assert_eq!(inits, n);
        assert_eq!(sums, n - 1);
        assert_eq!(exts, 0);
        assert_eq!(p.apply().as_sym().max_abs_diff(b.gromov_matrix().as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn decompose_emits_extension_i_for_offset_branch() {
        // Branch vertex at distance 1.5 from the base vertex.
        let t = WeightedTree::from_edges([
            ("s", "p", 1.5),
            ("p", "a", 1.0),
            ("p", "b", 2.0),
        ])
        .unwrap();
        let b = base(t, "s", &["a", "b"]);
        let p = decompose(&b).unwrap();
        assert!(p.ops().iter().any(|o| matches!(o, BuildOp::ExtensionI(a) if *a == 1.5)));
        assert_eq!(p.apply().as_sym().max_abs_diff(b.gromov_matrix().as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn decompose_collinear_base_nodes() {
        // Base nodes sitting on one path: consecutive equal-parameter pops.
        let t = WeightedTree::from_edges([("s", "a", 1.0), ("a", "b", 2.0), ("b", "c", 1.0)]).unwrap();
        let b = base(t, "s", &["a", "b", "c"]);
        let p = decompose(&b).unwrap();
        assert_eq!(p.apply().as_sym().max_abs_diff(b.gromov_matrix().as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn decompose_rejects_empty_and_non_canonical() {
        let t = WeightedTree::from_edges([("s", "v", 1.0)]).unwrap();
        let b = Base::new(t, "s", vec![]).unwrap();
        assert!(matches!(decompose(&b), Err(DecomposeError::EmptyBaseSet)));

        let t = WeightedTree::from_edges([("s", "a", 1.0), ("a", "v", 1.0)]).unwrap();
        let b = Base::new(t, "s", vec!["v".to_string()]).unwrap();
        assert!(matches!(decompose(&b), Err(DecomposeError::NotCanonical(_))));
    }
}
