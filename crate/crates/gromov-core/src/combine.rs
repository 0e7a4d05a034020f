//! Convex and G-convex combinations of Gromov matrices, triple types, the
//! piecewise-linear path between two matrices, and the max-min fixpoint
//! oracle equivalent to the raising procedure.

use thiserror::Error;

use crate::matrix::{validate_ab, GromovMatrix, MatrixError, SymmetricMatrix, Violation};
use crate::DEFAULT_TOL;

/// Second-difference threshold for turning-point detection, calibrated for
/// grids around 1/1000.
pub const TURNING_POINT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("weight vector is empty")]
    Empty,
    #[error("weight {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombineError {
    #[error("no matrices given")]
    NoMatrices,
    #[error("{matrices} matrices but {weights} weights")]
    CountMismatch { matrices: usize, weights: usize },
    #[error("matrix {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize, index: usize },
    #[error("grid must have at least one step")]
    GridTooSmall,
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A point of the simplex: non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationWeights {
    alpha: Vec<f64>,
}

impl CombinationWeights {
    pub fn new(alpha: Vec<f64>, tol: f64) -> Result<Self, WeightsError> {
        if alpha.is_empty() {
            return Err(WeightsError::Empty);
        }
        for (index, &value) in alpha.iter().enumerate() {
            if !value.is_finite() || value < -tol || value > 1.0 + tol {
                return Err(WeightsError::OutOfRange { index, value });
            }
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(WeightsError::SumNotOne { sum });
        }
        Ok(Self { alpha })
    }

    /// The pair `(theta, 1 - theta)`.
    pub fn pair(theta: f64) -> Result<Self, WeightsError> {
        Self::new(vec![theta, 1.0 - theta], DEFAULT_TOL)
    }

    pub fn uniform(k: usize) -> Result<Self, WeightsError> {
        Self::new(vec![1.0 / k as f64; k], DEFAULT_TOL)
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }
}

/// All weight vectors of length `k` whose components are integer multiples
/// of `1/denom`, in lexicographic order. Includes every simplex corner.
pub fn simplex_grid(k: usize, denom: usize) -> Vec<CombinationWeights> {
    let mut out = Vec::new();
    let mut parts = vec![0usize; k];
    fn rec(parts: &mut Vec<usize>, pos: usize, left: usize, denom: usize, out: &mut Vec<CombinationWeights>) {
        if pos + 1 == parts.len() {
            parts[pos] = left;
            let alpha: Vec<f64> = parts.iter().map(|&p| p as f64 / denom as f64).collect();
            out.push(CombinationWeights::new(alpha, DEFAULT_TOL).expect("grid point is on the simplex"));
            return;
        }
        for take in 0..=left {
            parts[pos] = take;
            rec(parts, pos + 1, left - take, denom, out);
        }
    }
    if k > 0 && denom > 0 {
        rec(&mut parts, 0, denom, denom, &mut out);
    }
    out
}

fn check_family(mats: &[GromovMatrix], w: &CombinationWeights) -> Result<usize, CombineError> {
    if mats.is_empty() {
        return Err(CombineError::NoMatrices);
    }
    if mats.len() != w.len() {
        return Err(CombineError::CountMismatch { matrices: mats.len(), weights: w.len() });
    }
    let n = mats[0].dim();
    for (index, m) in mats.iter().enumerate() {
        if m.dim() != n {
            return Err(CombineError::DimensionMismatch { expected: n, got: m.dim(), index });
        }
    }
    Ok(n)
}

/// Entrywise weighted sum. Positive definite but generally not a Gromov
/// matrix, hence the plain symmetric return type.
pub fn convex(mats: &[GromovMatrix], w: &CombinationWeights) -> Result<SymmetricMatrix, CombineError> {
    let n = check_family(mats, w)?;
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        mats.iter().zip(w.as_slice()).map(|(m, &a)| a * m.get(i, j)).sum()
    }))
}

/// The raising procedure applied to the upper triangle of `m`.
///
/// Entries are visited in non-increasing order (ties by row then column).
/// For the entry at position `t`, every rectangle through it whose other two
/// corners straddle `t` has its later corner raised to the value at `t` and
/// moved directly behind it. Only existing values are ever copied, so the
/// output's entries are a subset of the input's.
fn repair(mut m: SymmetricMatrix) -> GromovMatrix {
    let n = m.dim();
    if n < 3 {
        return GromovMatrix::from_checked(m);
    }
    let id = |i: usize, j: usize| i * n + j; // requires i < j

    let mut seq: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            seq.push((i, j));
        }
    }
    seq.sort_by(|&(ai, aj), &(bi, bj)| {
        m.get(bi, bj)
            .total_cmp(&m.get(ai, aj))
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });
    let mut pos = vec![usize::MAX; n * n];
    for (p, &(i, j)) in seq.iter().enumerate() {
        pos[id(i, j)] = p;
    }

    let mut t = 0;
    while t < seq.len() {
        let (i, j) = seq[t];
        let x_t = m.get(i, j);
        let mut cursor = t + 1;
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            let p_ik = pos[id(i.min(k), i.max(k))];
            let p_jk = pos[id(j.min(k), j.max(k))];
            let p_v = if p_ik < t && p_jk > t {
                p_jk
            } else if p_jk < t && p_ik > t {
                p_ik
            } else {
                continue;
            };
            let (vi, vj) = seq[p_v];
            m.set_sym(vi, vj, x_t);
            let elem = seq.remove(p_v);
            seq.insert(cursor, elem);
            for p in cursor..=p_v {
                let (a, b) = seq[p];
                pos[id(a, b)] = p;
            }
            cursor += 1;
        }
        t += 1;
    }
    GromovMatrix::from_checked(m)
}

/// G-convex combination: the convex combination with its three-point
/// violations repaired by raising entries. Always a valid Gromov matrix,
/// entrywise at least the convex combination, and equal to it whenever the
/// convex combination is already Gromov. `O(k n^2 + n^3)` plus move costs.
pub fn g_convex(mats: &[GromovMatrix], w: &CombinationWeights) -> Result<GromovMatrix, CombineError> {
    Ok(repair(convex(mats, w)?))
}

/// Max-min of the element at `index` within a triple: the element raised to
/// the smaller of the other two if that is larger.
pub fn max_min(values: [f64; 3], index: usize) -> f64 {
    let others: Vec<f64> = (0..3).filter(|&i| i != index).map(|i| values[i]).collect();
    values[index].max(others[0].min(others[1]))
}

/// Result of the iterated max-min repair.
#[derive(Debug, Clone)]
pub struct FixpointResult {
    pub matrix: GromovMatrix,
    /// Rounds performed, including the final unchanged one; an input that is
    /// already Gromov takes exactly one round.
    pub rounds: usize,
}

/// Repairs a symmetric matrix satisfying the non-negativity and diagonal
/// dominance conditions by simultaneously replacing every off-diagonal entry
/// with its largest max-min over rectangles, until stable. Stabilizes within
/// `n(n-1)/2` changing rounds and yields the same matrix as [`g_convex`] on
/// the same input.
pub fn g_convex_fixpoint(sym: &SymmetricMatrix, tol: f64) -> Result<FixpointResult, Violation> {
    validate_ab(sym, tol)?;
    let n = sym.dim();
    let mut cur = sym.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let next = SymmetricMatrix::from_fn(n, |j, k| {
            if j == k {
                return cur.get(j, k);
            }
            let mut best = cur.get(j, k);
            for l in 0..n {
                if l == j || l == k {
                    continue;
                }
                let raised = max_min([cur.get(j, k), cur.get(l, j), cur.get(l, k)], 0);
                if raised > best {
                    best = raised;
                }
            }
            best
        });
        if next == cur {
            return Ok(FixpointResult { matrix: GromovMatrix::from_checked(next), rounds });
        }
        assert!(rounds <= n * n + 1, "max-min iteration failed to stabilize");
        cur = next;
    }
}

/// A partition of a triple into a pair and a singleton witnessing
/// `(v_i, v_l)_s = (v_j, v_l)_s <= (v_i, v_j)_s`; encodes the relative
/// branch order of the three nodes seen from the base vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleType {
    pub pair: (usize, usize),
    pub singleton: usize,
}

impl TripleType {
    fn new(a: usize, b: usize, singleton: usize) -> Self {
        Self { pair: (a.min(b), a.max(b)), singleton }
    }
}

/// All types of the triple `{i, j, l}` in `m`. Non-empty for every valid
/// matrix; contains all three partitions exactly when the three cross
/// products are equal.
pub fn triple_types(
    m: &GromovMatrix,
    i: usize,
    j: usize,
    l: usize,
    tol: f64,
) -> Result<Vec<TripleType>, MatrixError> {
    let n = m.dim();
    for &x in &[i, j, l] {
        if x >= n {
            return Err(MatrixError::IndexOutOfRange { index: x, dim: n });
        }
    }
    if i == j || j == l || i == l {
        return Err(MatrixError::IndicesNotDistinct);
    }
    let mut out = Vec::new();
    for (a, b, c) in [(i, j, l), (i, l, j), (j, l, i)] {
        // Pair {a, b} and singleton c.
        if (m.get(a, c) - m.get(b, c)).abs() <= tol && m.get(a, c) <= m.get(a, b) + tol {
            out.push(TripleType::new(a, b, c));
        }
    }
    Ok(out)
}

/// Outcome of checking that a triple's type in a G-convex combination is
/// inherited from one of the component matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeInheritance {
    /// The hypothesis held and the induced type appears in component
    /// `matrix_index`.
    Consistent { matrix_index: usize, ty: TripleType },
    /// The hypothesis held for no labeling of the triple.
    NotApplicable,
    /// The hypothesis held but no component carries the induced type; this
    /// would falsify the implementation.
    Counterexample { ty: TripleType },
}

/// For each labeling `({i, j}, l)` of the triple where the convex and
/// G-convex combinations agree at `(i, j)` and the G-convex cross products
/// at `l` are equal and dominated, the induced type must appear among the
/// triple's types in some component matrix.
pub fn check_type_inheritance(
    mats: &[GromovMatrix],
    w: &CombinationWeights,
    triple: (usize, usize, usize),
    tol: f64,
) -> Result<TypeInheritance, CombineError> {
    let n = check_family(mats, w)?;
    let (i, j, l) = triple;
    for &x in &[i, j, l] {
        if x >= n {
            return Err(CombineError::Matrix(MatrixError::IndexOutOfRange { index: x, dim: n }));
        }
    }
    if i == j || j == l || i == l {
        return Err(CombineError::Matrix(MatrixError::IndicesNotDistinct));
    }
    let m_alpha = convex(mats, w)?;
    let repaired = repair(m_alpha.clone());

    let mut any_hypothesis = None;
    for (a, b, c) in [(i, j, l), (i, l, j), (j, l, i)] {
        let agrees = (m_alpha.get(a, b) - repaired.get(a, b)).abs() <= tol;
        let cross_equal = (repaired.get(a, c) - repaired.get(b, c)).abs() <= tol;
        let dominated = repaired.get(a, c) <= repaired.get(a, b) + tol;
        if !(agrees && cross_equal && dominated) {
            continue;
        }
        let ty = TripleType::new(a, b, c);
        let mut found = None;
        for (h, m) in mats.iter().enumerate() {
            if triple_types(m, i, j, l, tol)?.contains(&ty) {
                found = Some(h);
                break;
            }
        }
        match found {
            Some(matrix_index) => {
                if any_hypothesis.is_none() {
                    any_hypothesis = Some(TypeInheritance::Consistent { matrix_index, ty });
                }
            }
            None => return Ok(TypeInheritance::Counterexample { ty }),
        }
    }
    Ok(any_hypothesis.unwrap_or(TypeInheritance::NotApplicable))
}

/// G-convex combinations `(theta, 1 - theta)` sampled along a grid, with
/// detected turning points of the piecewise-linear path.
#[derive(Debug, Clone)]
pub struct PathTrace {
    /// `(theta, matrix)` with theta ascending from 0 (second endpoint) to 1
    /// (first endpoint).
    pub samples: Vec<(f64, GromovMatrix)>,
    /// Thetas where the path bends, coalesced from flagged grid cells.
    pub turning_points: Vec<f64>,
}

impl PathTrace {
    fn second_differences(&self) -> Vec<f64> {
        let s = &self.samples;
        (1..s.len().saturating_sub(1))
            .map(|i| {
                let n = s[i].1.dim();
                let mut worst: f64 = 0.0;
                for a in 0..n {
                    for b in a..n {
                        let d = s[i + 1].1.get(a, b) - 2.0 * s[i].1.get(a, b) + s[i - 1].1.get(a, b);
                        worst = worst.max(d.abs());
                    }
                }
                worst
            })
            .collect()
    }

    /// Maximal runs of unflagged samples, as inclusive index ranges.
    fn affine_runs(&self) -> Vec<(usize, usize)> {
        let diffs = self.second_differences();
        let flagged = |i: usize| i >= 1 && i + 1 < self.samples.len() && diffs[i - 1] > TURNING_POINT_TOL;
        let mut runs = Vec::new();
        let mut start = None;
        for i in 0..self.samples.len() {
            if flagged(i) {
                if let Some(s) = start.take() {
                    runs.push((s, i - 1));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            runs.push((s, self.samples.len() - 1));
        }
        runs
    }

    /// Largest deviation of any sample from the straight line between the
    /// ends of its run; near zero when the path is piecewise affine between
    /// turning points.
    pub fn max_affine_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.affine_runs() {
            if b <= a + 1 {
                continue;
            }
            let (ta, ma) = (&self.samples[a].0, &self.samples[a].1);
            let (tb, mb) = (&self.samples[b].0, &self.samples[b].1);
            let n = ma.dim();
            for i in a + 1..b {
                let (t, m) = (&self.samples[i].0, &self.samples[i].1);
                let frac = (t - ta) / (tb - ta);
                for x in 0..n {
                    for y in x..n {
                        let lerp = ma.get(x, y) + frac * (mb.get(x, y) - ma.get(x, y));
                        worst = worst.max((m.get(x, y) - lerp).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest entrywise jump between adjacent samples; shrinks as the grid
    /// refines when the path is continuous.
    pub fn max_adjacent_jump(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.samples.windows(2) {
            worst = worst.max(w[1].1.as_sym().max_abs_diff(w[0].1.as_sym()).unwrap());
        }
        worst
    }
}

/// Samples the G-convex path between `m1` (theta = 1) and `m2` (theta = 0)
/// at `grid + 1` evenly spaced thetas and flags turning points where the
/// discrete second difference exceeds [`TURNING_POINT_TOL`]; adjacent
/// flagged cells coalesce into a single turning point at the worst cell.
pub fn trace_path(m1: &GromovMatrix, m2: &GromovMatrix, grid: usize) -> Result<PathTrace, CombineError> {
    if grid == 0 {
        return Err(CombineError::GridTooSmall);
    }
    if m1.dim() != m2.dim() {
        return Err(CombineError::DimensionMismatch { expected: m1.dim(), got: m2.dim(), index: 1 });
    }
    let n = m1.dim();
    let mut samples = Vec::with_capacity(grid + 1);
    for step in 0..=grid {
        let theta = step as f64 / grid as f64;
        let sym =
            SymmetricMatrix::from_fn(n, |i, j| theta * m1.get(i, j) + (1.0 - theta) * m2.get(i, j));
        samples.push((theta, repair(sym)));
    }
    let mut trace = PathTrace { samples, turning_points: Vec::new() };
    let diffs = trace.second_differences();
    let mut turning = Vec::new();
    let mut group: Option<(usize, f64)> = None; // (best sample index, best diff)
    for (d_idx, &d) in diffs.iter().enumerate() {
        let sample_idx = d_idx + 1;
        if d > TURNING_POINT_TOL {
            group = match group {
                Some((bi, bd)) if bd >= d => Some((bi, bd)),
                _ => Some((sample_idx, d)),
            };
        } else if let Some((bi, _)) = group.take() {
            turning.push(trace.samples[bi].0);
        }
    }
    if let Some((bi, _)) = group {
        turning.push(trace.samples[bi].0);
    }
    trace.turning_points = turning;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate;

    fn gromov(rows: &[&[f64]]) -> GromovMatrix {
        let sym =
            SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        GromovMatrix::try_new(sym, DEFAULT_TOL).unwrap()
    }

    /// Pair of 4x4 tree matrices whose even blend needs repair.
    fn blend_pair() -> (GromovMatrix, GromovMatrix) {
        let m1 = gromov(&[
            &[4.0, 1.0, 3.0, 1.0],
            &[1.0, 4.0, 1.0, 1.0],
            &[3.0, 1.0, 4.0, 1.0],
            &[1.0, 1.0, 1.0, 4.0],
        ]);
        let m2 = gromov(&[
            &[4.0, 1.0, 1.0, 1.0],
            &[1.0, 4.0, 3.0, 2.0],
            &[1.0, 3.0, 4.0, 2.0],
            &[1.0, 2.0, 2.0, 4.0],
        ]);
        (m1, m2)
    }

    fn even_pair_weights() -> CombinationWeights {
        CombinationWeights::new(vec![0.5, 0.5], DEFAULT_TOL).unwrap()
    }

    #[test]
    fn convex_blend_is_exact() {
        let (m1, m2) = blend_pair();
        let c = convex(&[m1, m2], &even_pair_weights()).unwrap();
        let expect = [
            [4.0, 1.0, 2.0, 1.0],
            [1.0, 4.0, 2.0, 1.5],
            [2.0, 2.0, 4.0, 1.5],
            [1.0, 1.5, 1.5, 4.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c.get(i, j), expect[i][j]);
            }
        }
        assert!(validate(&c, DEFAULT_TOL).is_err());
    }

    #[test]
    fn g_convex_blend_is_exact() {
        let (m1, m2) = blend_pair();
        let g = g_convex(&[m1, m2], &even_pair_weights()).unwrap();
        let expect = [
            [4.0, 2.0, 2.0, 1.5],
            [2.0, 4.0, 2.0, 1.5],
            [2.0, 2.0, 4.0, 1.5],
            [1.5, 1.5, 1.5, 4.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j), expect[i][j]);
            }
        }
    }

    #[test]
    fn convex_identity_and_errors() {
        let (m1, m2) = blend_pair();
        let id = convex(&[m1.clone()], &CombinationWeights::new(vec![1.0], DEFAULT_TOL).unwrap()).unwrap();
        assert_eq!(id.max_abs_diff(m1.as_sym()).unwrap(), 0.0);

        let small = gromov(&[&[1.0]]);
        assert!(matches!(
            convex(&[m1.clone(), small], &even_pair_weights()),
            Err(CombineError::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            convex(&[m1, m2], &CombinationWeights::new(vec![1.0], DEFAULT_TOL).unwrap()),
            Err(CombineError::CountMismatch { .. })
        ));
        assert!(matches!(convex(&[], &even_pair_weights()), Err(CombineError::NoMatrices)));
    }

    #[test]
    fn weights_are_validated() {
        assert!(matches!(CombinationWeights::new(vec![], DEFAULT_TOL), Err(WeightsError::Empty)));
        assert!(matches!(
            CombinationWeights::new(vec![1.5, -0.5], DEFAULT_TOL),
            Err(WeightsError::OutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            CombinationWeights::new(vec![0.5, 0.4], DEFAULT_TOL),
            Err(WeightsError::SumNotOne { .. })
        ));
        assert!(CombinationWeights::uniform(3).is_ok());
    }

    #[test]
    fn g_convex_fixes_nothing_on_gromov_input() {
        let (m1, _) = blend_pair();
        let g = g_convex(&[m1.clone()], &CombinationWeights::new(vec![1.0], DEFAULT_TOL).unwrap()).unwrap();
        assert_eq!(g.as_sym().max_abs_diff(m1.as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn g_convex_dominates_convex_and_copies_values() {
        let (m1, m2) = blend_pair();
        let w = even_pair_weights();
        let c = convex(&[m1.clone(), m2.clone()], &w).unwrap();
        let g = g_convex(&[m1, m2], &w).unwrap();
        let inputs = c.upper_triangle();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(g.get(i, j) >= c.get(i, j));
                assert!(inputs.iter().any(|&v| v == g.get(i, j)));
            }
        }
    }

    /// 3x3 pair with a single type transition between the endpoints; the
    /// bend sits at theta* = 1/3.
    fn bending_pair() -> (GromovMatrix, GromovMatrix, f64) {
        // x1 = 3 > x2 = 1 on one side, x1' = 1 < x2' = 2 on the other.
        let m1 = gromov(&[&[4.0, 3.0, 1.0], &[3.0, 4.0, 1.0], &[1.0, 1.0, 4.0]]);
        let m2 = gromov(&[&[4.0, 1.0, 1.0], &[1.0, 4.0, 2.0], &[1.0, 2.0, 4.0]]);
        let theta_star = (2.0 - 1.0) / ((3.0 - 1.0) + (2.0 - 1.0));
        (m1, m2, theta_star)
    }

    #[test]
    fn bending_pair_entry_tracks_the_dominant_side() {
        let (m1, m2, theta_star) = bending_pair();
        // Below theta* the repaired (0, 2) entry copies the (0, 1) blend.
        let theta = 0.1;
        assert!(theta < theta_star);
        let g = g_convex(&[m1.clone(), m2.clone()], &CombinationWeights::pair(theta).unwrap()).unwrap();
        assert!((g.get(0, 2) - (theta * 3.0 + (1.0 - theta) * 1.0)).abs() < 1e-12);
        // Above theta* it copies the (1, 2) blend.
        let theta = 0.6;
        assert!(theta > theta_star);
        let g = g_convex(&[m1.clone(), m2.clone()], &CombinationWeights::pair(theta).unwrap()).unwrap();
        assert!((g.get(0, 2) - (theta * 1.0 + (1.0 - theta) * 2.0)).abs() < 1e-12);
        // Endpoints are returned untouched.
        let g1 = g_convex(&[m1.clone(), m2.clone()], &CombinationWeights::pair(1.0).unwrap()).unwrap();
        assert_eq!(g1.as_sym().max_abs_diff(m1.as_sym()).unwrap(), 0.0);
        let g0 = g_convex(&[m1, m2.clone()], &CombinationWeights::pair(0.0).unwrap()).unwrap();
        assert_eq!(g0.as_sym().max_abs_diff(m2.as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn fixpoint_matches_g_convex_on_the_blend() {
        let (m1, m2) = blend_pair();
        let w = even_pair_weights();
        let c = convex(&[m1.clone(), m2.clone()], &w).unwrap();
        let g = g_convex(&[m1, m2], &w).unwrap();
        let fp = g_convex_fixpoint(&c, DEFAULT_TOL).unwrap();
        assert_eq!(fp.matrix.as_sym().max_abs_diff(g.as_sym()).unwrap(), 0.0);
        assert!(fp.rounds <= 1 + 4 * 3 / 2);
    }

    #[test]
    fn fixpoint_is_identity_in_one_round_on_gromov_input() {
        let (m1, _) = blend_pair();
        let fp = g_convex_fixpoint(m1.as_sym(), DEFAULT_TOL).unwrap();
        assert_eq!(fp.rounds, 1);
        assert_eq!(fp.matrix.as_sym().max_abs_diff(m1.as_sym()).unwrap(), 0.0);
    }

    #[test]
    fn fixpoint_rejects_inputs_failing_preconditions() {
        let bad = SymmetricMatrix::from_rows(&[vec![1.0, 3.0], vec![3.0, 10.0]]).unwrap();
        assert!(matches!(
            g_convex_fixpoint(&bad, DEFAULT_TOL),
            Err(Violation::DiagonalDominated { .. })
        ));
    }

    #[test]
    fn max_min_examples() {
        assert_eq!(max_min([5.0, 3.0, 1.0], 2), 3.0);
        assert_eq!(max_min([5.0, 3.0, 1.0], 0), 5.0);
        assert_eq!(max_min([2.0, 2.0, 2.0], 1), 2.0);
    }

    #[test]
    fn triple_types_on_the_blend_pair() {
        let (m1, m2) = blend_pair();
        let t1 = triple_types(&m1, 0, 2, 3, DEFAULT_TOL).unwrap();
        assert_eq!(t1, vec![TripleType { pair: (0, 2), singleton: 3 }]);
        let t2 = triple_types(&m2, 0, 2, 3, DEFAULT_TOL).unwrap();
        assert_eq!(t2, vec![TripleType { pair: (2, 3), singleton: 0 }]);

        // All cross products equal: all three partitions are types.
        let flat = gromov(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0], &[1.0, 1.0, 2.0]]);
        assert_eq!(triple_types(&flat, 0, 1, 2, DEFAULT_TOL).unwrap().len(), 3);

        assert!(triple_types(&m1, 0, 0, 1, DEFAULT_TOL).is_err());
    }

    #[test]
    fn type_inheritance_on_the_blend_pair() {
        let (m1, m2) = blend_pair();
        let out = check_type_inheritance(&[m1.clone(), m2], &even_pair_weights(), (0, 2, 3), DEFAULT_TOL)
            .unwrap();
        match out {
            TypeInheritance::Consistent { matrix_index, ty } => {
                assert_eq!(matrix_index, 0);
                assert_eq!(ty, TripleType { pair: (0, 2), singleton: 3 });
            }
            other => panic!("expected consistency, got {other:?}"),
        }

        // A single matrix inherits from itself.
        let solo = check_type_inheritance(
            &[m1],
            &CombinationWeights::new(vec![1.0], DEFAULT_TOL).unwrap(),
            (0, 1, 2),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(matches!(solo, TypeInheritance::Consistent { .. }));
    }

    #[test]
    fn trace_of_identical_endpoints_is_constant() {
        let (m1, _) = blend_pair();
        let trace = trace_path(&m1, &m1, 50).unwrap();
        assert!(trace.turning_points.is_empty());
        // Blending a matrix with itself leaves only rounding dust.
        assert!(trace.max_adjacent_jump() < 1e-12);
        assert!(trace.max_affine_deviation() < 1e-12);
    }

    #[test]
    fn trace_finds_the_single_bend() {
        let (m1, m2, theta_star) = bending_pair();
        let grid = 1000;
        let trace = trace_path(&m1, &m2, grid).unwrap();
        assert_eq!(trace.turning_points.len(), 1, "bend list: {:?}", trace.turning_points);
        assert!((trace.turning_points[0] - theta_star).abs() <= 1.0 / grid as f64);
        assert!(trace.max_affine_deviation() <= 1e-7);
        assert_eq!(trace.samples.first().unwrap().1.as_sym().max_abs_diff(m2.as_sym()).unwrap(), 0.0);
        assert_eq!(trace.samples.last().unwrap().1.as_sym().max_abs_diff(m1.as_sym()).unwrap(), 0.0);
        for (_, m) in &trace.samples {
            assert!(validate(m.as_sym(), DEFAULT_TOL).is_ok());
        }
    }

    #[test]
    fn simplex_grid_covers_corners() {
        let grid = simplex_grid(3, 10);
        assert_eq!(grid.len(), 66);
        for corner in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            assert!(grid.iter().any(|w| w.as_slice() == corner));
        }
        for w in &grid {
            let s: f64 = w.as_slice().iter().sum();
            assert!((s - 1.0).abs() <= 1e-9);
        }
        assert_eq!(simplex_grid(2, 10).len(), 11);
    }

    mod max_min_properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// The transformed triple keeps at least two of the original
            /// values, preserves the maximum, and satisfies the three-point
            /// condition.
            #[test]
            fn max_min_repair_properties(
                a in -100.0f64..100.0,
                b in -100.0f64..100.0,
                c in -100.0f64..100.0,
            ) {
                let vals = [a, b, c];
                let out = [max_min(vals, 0), max_min(vals, 1), max_min(vals, 2)];

                let mut kept = 0;
                let mut pool = vals.to_vec();
                for v in out {
                    if let Some(p) = pool.iter().position(|&x| x == v) {
                        pool.remove(p);
                        kept += 1;
                    }
                }
                prop_assert!(kept >= 2);

                let max_in = vals.iter().fold(f64::MIN, |m, &v| m.max(v));
                let max_out = out.iter().fold(f64::MIN, |m, &v| m.max(v));
                prop_assert_eq!(max_in, max_out);

                let mut sorted = out;
                sorted.sort_by(f64::total_cmp);
                prop_assert!(sorted[1] - sorted[0] == 0.0);
            }
        }
    }
}
