//! Weighted trees as positive-definite matrices.
//!
//! A weighted tree with a distinguished base vertex `s` and an ordered base
//! set `V = {v_1, ..., v_n}` is encoded by the symmetric matrix of pairwise
//! Gromov products `M(i, j) = (v_i, v_j)_s`. This crate implements both
//! directions of that correspondence (tree -> matrix and matrix -> tree),
//! the matrix-level conditions that characterize valid encodings, a stack
//! calculus of build operations with spectral lower bounds, convex and
//! G-convex combinations of such matrices, and graph utilities plus the
//! inference routines that use matrix families in place of single spanning
//! trees.

pub mod combine;
pub mod graph;
pub mod infer;
pub mod io;
pub mod matrix;
pub mod program;
pub mod reconstruct;
pub mod spectral;
pub mod tree;

/// Absolute tolerance for equality of derived metric quantities.
pub const DEFAULT_TOL: f64 = 1e-9;

pub use matrix::{GromovMatrix, SymmetricMatrix, Violation};
pub use program::{BuildOp, BuildProgram};
pub use tree::{Base, WeightedTree};
