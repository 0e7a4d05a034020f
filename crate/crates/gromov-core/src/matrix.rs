//! Symmetric matrices, the Gromov matrix validity conditions, and the
//! relative-position queries that read tree structure straight off a matrix.

use thiserror::Error;

/// Structural problems with raw matrix input, distinct from condition
/// violations reported by [`validate`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is empty")]
    Empty,
    #[error("input is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("input is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("entry ({i}, {j}) is not finite")]
    NotFinite { i: usize, j: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("indices must be distinct")]
    IndicesNotDistinct,
    #[error("dimension mismatch: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
}

/// Dense symmetric matrix with `f64` entries.
///
/// Symmetry is enforced at construction; all mutating operations write both
/// `(i, j)` and `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from full rows, checking squareness, symmetry and finiteness.
    ///
    /// Symmetry is checked to absolute 1e-12; the strict upper triangle is
    /// then mirrored so the stored matrix is bit-symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare { row: i, len: row.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() {
                    return Err(MatrixError::NotFinite { i, j });
                }
                if j > i && (v - rows[j][i]).abs() > 1e-12 {
                    return Err(MatrixError::NotSymmetric { i, j, a: v, b: rows[j][i] });
                }
            }
        }
        let mut m = Self { n, data: vec![0.0; n * n] };
        for i in 0..n {
            for j in i..n {
                m.set_sym(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    /// Builds from a callback over index pairs; `f` is evaluated on `i <= j`
    /// only, so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self { n, data: vec![0.0; n * n] };
        for i in 0..n {
            for j in i..n {
                m.set_sym(i, j, f(i, j));
            }
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    /// Entries `(i, j)` with `i < j`, row-major.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Largest absolute entry difference; errors on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch { a: self.n, b: other.n });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Failure report for the Gromov matrix conditions. Indices are 0-based in
/// the fields and rendered 1-based in messages.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Condition (a): an entry is negative.
    NegativeEntry { i: usize, j: usize, value: f64 },
    /// Condition (a): a diagonal entry is not strictly positive.
    NonPositiveDiagonal { i: usize, value: f64 },
    /// Condition (b): a diagonal entry is smaller than an off-diagonal in
    /// its row.
    DiagonalDominated { i: usize, j: usize, diag: f64, off: f64 },
    /// Condition (c): the two smallest entries of the triple differ.
    ThreePoint { i: usize, j: usize, k: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NegativeEntry { i, j, value } => write!(
                f,
                "condition (a) fails: entry ({}, {}) = {} is negative",
                i + 1,
                j + 1,
                value
            ),
            Violation::NonPositiveDiagonal { i, value } => write!(
                f,
                "condition (a) fails: diagonal entry ({}, {}) = {} is not positive",
                i + 1,
                i + 1,
                value
            ),
            Violation::DiagonalDominated { i, j, diag, off } => write!(
                f,
                "condition (b) fails at ({}, {}): diagonal {} < off-diagonal {}",
                i + 1,
                j + 1,
                diag,
                off
            ),
            Violation::ThreePoint { i, j, k } => write!(
                f,
                "condition (c) fails: three-point condition violated at triple ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1
            ),
        }
    }
}

impl std::error::Error for Violation {}

impl Violation {
    /// Short name of the failed condition: "a", "b" or "c".
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::NegativeEntry { .. } | Violation::NonPositiveDiagonal { .. } => "a",
            Violation::DiagonalDominated { .. } => "b",
            Violation::ThreePoint { .. } => "c",
        }
    }
}

fn check_conditions_ab(m: &SymmetricMatrix, tol: f64) -> Result<(), Violation> {
    let n = m.dim();
    for i in 0..n {
        let d = m.get(i, i);
        if d <= tol {
            return Err(Violation::NonPositiveDiagonal { i, value: d });
        }
        for j in 0..n {
            let v = m.get(i, j);
            if v < -tol {
                return Err(Violation::NegativeEntry { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        let d = m.get(i, i);
        for j in 0..n {
            if m.get(i, j) > d + tol {
                return Err(Violation::DiagonalDominated { i, j, diag: d, off: m.get(i, j) });
            }
        }
    }
    Ok(())
}

fn three_point_violated(x: f64, y: f64, z: f64, tol: f64) -> bool {
    let mut v = [x, y, z];
    v.sort_by(f64::total_cmp);
    v[1] - v[0] > tol
}

pub(crate) fn validate_ab(m: &SymmetricMatrix, tol: f64) -> Result<(), Violation> {
    check_conditions_ab(m, tol)
}

/// Checks the three conditions that characterize Gromov matrices, reporting
/// the first failure: (a) non-negative entries with positive diagonal,
/// (b) each diagonal entry dominates its row, (c) the three-point condition.
pub fn validate(m: &SymmetricMatrix, tol: f64) -> Result<(), Violation> {
    check_conditions_ab(m, tol)?;
    let n = m.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if three_point_violated(m.get(i, j), m.get(i, k), m.get(j, k), tol) {
                    return Err(Violation::ThreePoint { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// All index triples `i < j < k` whose three mutual entries violate the
/// three-point condition (the two smallest differ by more than `tol`).
pub fn check_three_point(m: &SymmetricMatrix, tol: f64) -> Vec<(usize, usize, usize)> {
    let n = m.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if three_point_violated(m.get(i, j), m.get(i, k), m.get(j, k), tol) {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

/// A symmetric matrix that passed [`validate`], i.e. the Gromov matrix of
/// some weighted tree.
#[derive(Debug, Clone, PartialEq)]
pub struct GromovMatrix {
    sym: SymmetricMatrix,
}

impl GromovMatrix {
    /// Validates `sym` and wraps it; on failure returns the violation report.
    pub fn try_new(sym: SymmetricMatrix, tol: f64) -> Result<Self, Violation> {
        validate(&sym, tol)?;
        Ok(Self { sym })
    }

    /// Wraps a matrix that is Gromov by construction (tree products, build
    /// programs, repaired combinations).
    pub(crate) fn from_checked(sym: SymmetricMatrix) -> Self {
        debug_assert!(
            validate(&sym, 1e-6).is_ok(),
            "constructed matrix fails validation: {:?}",
            validate(&sym, 1e-6)
        );
        Self { sym }
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sym.get(i, j)
    }

    pub fn as_sym(&self) -> &SymmetricMatrix {
        &self.sym
    }

    pub fn into_sym(self) -> SymmetricMatrix {
        self.sym
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.sym.diagonal()
    }

    /// The diagonal part as its own matrix; always a valid Gromov matrix
    /// (the star with spoke lengths `M(i, i)`).
    pub fn diagonal_matrix(&self) -> GromovMatrix {
        let n = self.dim();
        let sym = SymmetricMatrix::from_fn(n, |i, j| if i == j { self.get(i, i) } else { 0.0 });
        GromovMatrix { sym }
    }

    /// Tree distance between base nodes `i` and `j`, recovered as
    /// `M(i,i) + M(j,j) - 2 M(i,j)`.
    pub fn base_distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, i) + self.get(j, j) - 2.0 * self.get(i, j)
    }

    /// Smallest eigenvalue; positive for every valid Gromov matrix.
    pub fn lambda_min(&self) -> f64 {
        crate::spectral::lambda_min(&self.sym)
    }
}

/// Adjacency of the derived graph on the base set: `i` and `j` are adjacent
/// iff the tree path between them meets no other base node, decided entirely
/// from matrix entries. `O(n^3)`.
pub fn gv_adjacency(m: &GromovMatrix, tol: f64) -> Vec<Vec<bool>> {
    let n = m.dim();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let mut edge = true;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let lhs = m.get(k, k) + m.get(i, j);
                let rhs = m.get(i, k) + m.get(k, j);
                if (lhs - rhs).abs() <= tol {
                    edge = false;
                    break;
                }
            }
            adj[i][j] = edge;
            adj[j][i] = edge;
        }
    }
    adj
}

fn check_index(idx: usize, n: usize) -> Result<(), MatrixError> {
    if idx >= n {
        return Err(MatrixError::IndexOutOfRange { index: idx, dim: n });
    }
    Ok(())
}

/// Whether base node `k` lies on the tree path between base nodes `i` and
/// `j`, decided as `M(k,k) + M(i,j) = M(i,k) + M(k,j)` within `tol`.
pub fn on_path(m: &GromovMatrix, k: usize, i: usize, j: usize, tol: f64) -> Result<bool, MatrixError> {
    let n = m.dim();
    check_index(k, n)?;
    check_index(i, n)?;
    check_index(j, n)?;
    if k == i || k == j || i == j {
        return Err(MatrixError::IndicesNotDistinct);
    }
    let lhs = m.get(k, k) + m.get(i, j);
    let rhs = m.get(i, k) + m.get(k, j);
    Ok((lhs - rhs).abs() <= tol)
}

/// Whether base node `k` lies on the path from the base vertex to base node
/// `j`, decided as `M(k,j) = M(k,k)` within `tol`.
pub fn on_path_from_base(m: &GromovMatrix, k: usize, j: usize, tol: f64) -> Result<bool, MatrixError> {
    let n = m.dim();
    check_index(k, n)?;
    check_index(j, n)?;
    if k == j {
        return Err(MatrixError::IndicesNotDistinct);
    }
    Ok((m.get(k, j) - m.get(k, k)).abs() <= tol)
}
