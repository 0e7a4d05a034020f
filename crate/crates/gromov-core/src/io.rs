//! Text formats for trees, bases, matrices, build programs and graphs.
//!
//! Numbers print with `f64`'s shortest round-trip form, so write-then-read
//! is exact and outputs are byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::matrix::{MatrixError, SymmetricMatrix};
use crate::program::{BuildOp, BuildProgram, ProgramError};
use crate::tree::{Base, BaseError, TreeError, WeightedTree};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line: line + 1, message: message.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, FormatError> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("expected a number, got {tok:?}")))
}

/// Non-empty lines with their 0-based indices, comments (`#`) stripped.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

// --- trees and bases ------------------------------------------------------

fn parse_edge_lines(
    lines: &[(usize, &str)],
) -> Result<Vec<(String, String, f64)>, FormatError> {
    let mut edges = Vec::with_capacity(lines.len());
    for &(ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(ln, format!("expected `u v w`, got {l:?}")));
        }
        edges.push((toks[0].to_string(), toks[1].to_string(), parse_f64(toks[2], ln)?));
    }
    Ok(edges)
}

/// Parses the tree format: a `tree` header line, then one `u v w` line per
/// edge.
pub fn parse_tree(text: &str) -> Result<WeightedTree, FormatError> {
    let lines = content_lines(text);
    match lines.first() {
        Some(&(_, "tree")) => {}
        Some(&(ln, other)) => return Err(parse_err(ln, format!("expected `tree` header, got {other:?}"))),
        None => return Err(parse_err(0, "empty tree file")),
    }
    Ok(WeightedTree::from_edges(parse_edge_lines(&lines[1..])?)?)
}

pub fn write_tree(tree: &WeightedTree) -> String {
    let mut out = String::from("tree\n");
    for (u, v, w) in tree.edges() {
        out.push_str(&format!("{} {} {}\n", tree.name(u), tree.name(v), w));
    }
    out
}

/// Parses the base format: a tree file plus trailer lines `base_vertex s`
/// and `base_set v1 v2 ... vn` (order significant).
pub fn parse_base(text: &str) -> Result<Base, FormatError> {
    let lines = content_lines(text);
    match lines.first() {
        Some(&(_, "tree")) => {}
        Some(&(ln, other)) => return Err(parse_err(ln, format!("expected `tree` header, got {other:?}"))),
        None => return Err(parse_err(0, "empty base file")),
    }
    let mut edge_lines = Vec::new();
    let mut base_vertex: Option<(usize, String)> = None;
    let mut base_set: Option<Vec<String>> = None;
    for &(ln, l) in &lines[1..] {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "base_vertex" => {
                if toks.len() != 2 {
                    return Err(parse_err(ln, "expected `base_vertex s`"));
                }
                base_vertex = Some((ln, toks[1].to_string()));
            }
            "base_set" => {
                base_set = Some(toks[1..].iter().map(|t| t.to_string()).collect());
            }
            _ => edge_lines.push((ln, l)),
        }
    }
    let (_, s) = base_vertex.ok_or_else(|| parse_err(lines.len(), "missing `base_vertex` line"))?;
    let v = base_set.ok_or_else(|| parse_err(lines.len(), "missing `base_set` line"))?;
    let tree = WeightedTree::from_edges(parse_edge_lines(&edge_lines)?)?;
    Ok(Base::new(tree, s, v)?)
}

pub fn write_base(base: &Base) -> String {
    let mut out = write_tree(base.tree());
    out.push_str(&format!("base_vertex {}\n", base.base_vertex()));
    out.push_str(&format!("base_set {}\n", base.base_set().join(" ")));
    out
}

// --- matrices --------------------------------------------------------------

/// Parses an n x n matrix from comma-separated rows.
pub fn parse_matrix_csv(text: &str) -> Result<SymmetricMatrix, FormatError> {
    let lines = content_lines(text);
    let mut rows = Vec::with_capacity(lines.len());
    for &(ln, l) in &lines {
        let row = l
            .split(',')
            .map(|t| parse_f64(t.trim(), ln))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(SymmetricMatrix::from_rows(&rows)?)
}

pub fn write_matrix_csv(m: &SymmetricMatrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    /// Row-major entries.
    entries: Vec<f64>,
}

pub fn parse_matrix_json(text: &str) -> Result<SymmetricMatrix, FormatError> {
    let mj: MatrixJson = serde_json::from_str(text)?;
    if mj.entries.len() != mj.n * mj.n {
        return Err(FormatError::Matrix(MatrixError::NotSquare {
            row: 0,
            len: mj.entries.len(),
            expected: mj.n * mj.n,
        }));
    }
    let rows: Vec<Vec<f64>> = mj.entries.chunks(mj.n.max(1)).map(|c| c.to_vec()).collect();
    Ok(SymmetricMatrix::from_rows(&rows)?)
}

pub fn write_matrix_json(m: &SymmetricMatrix) -> String {
    let mj = MatrixJson { n: m.dim(), entries: m.rows().into_iter().flatten().collect() };
    serde_json::to_string(&mj).expect("plain struct serializes")
}

/// Reads a matrix file, dispatching on the `.json` extension and otherwise
/// expecting CSV.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<SymmetricMatrix, FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if path.extension().map(|e| e == "json").unwrap_or(false) {
        parse_matrix_json(&text)
    } else {
        parse_matrix_csv(&text)
    }
}

// --- build programs ---------------------------------------------------------

/// Parses a build program: one op per line (`init a`, `dsum`, `ext1 a`,
/// `ext2 a b`) with an optional 1-based `perm i1 i2 ... in` trailer.
pub fn parse_program(text: &str) -> Result<BuildProgram, FormatError> {
    let mut ops = Vec::new();
    let mut perm: Option<Vec<usize>> = None;
    for (ln, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match (toks[0], toks.len()) {
            ("init", 2) => ops.push(BuildOp::Init(parse_f64(toks[1], ln)?)),
            ("dsum", 1) => ops.push(BuildOp::DirectSum),
            ("ext1", 2) => ops.push(BuildOp::ExtensionI(parse_f64(toks[1], ln)?)),
            ("ext2", 3) => ops.push(BuildOp::ExtensionII(
                parse_f64(toks[1], ln)?,
                parse_f64(toks[2], ln)?,
            )),
            ("perm", _) if toks.len() >= 2 => {
                let p = toks[1..]
                    .iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .ok()
                            .and_then(|i| i.checked_sub(1))
                            .ok_or_else(|| parse_err(ln, format!("bad permutation entry {t:?}")))
                    })
                    .collect::<Result<Vec<usize>, _>>()?;
                perm = Some(p);
            }
            _ => return Err(parse_err(ln, format!("unrecognized op {l:?}"))),
        }
    }
    Ok(BuildProgram::new(ops, perm)?)
}

pub fn write_program(p: &BuildProgram) -> String {
    let mut out = String::new();
    for op in p.ops() {
        match *op {
            BuildOp::Init(a) => out.push_str(&format!("init {a}\n")),
            BuildOp::DirectSum => out.push_str("dsum\n"),
            BuildOp::ExtensionI(a) => out.push_str(&format!("ext1 {a}\n")),
            BuildOp::ExtensionII(a, b) => out.push_str(&format!("ext2 {a} {b}\n")),
        }
    }
    let perm: Vec<String> = p.permutation().iter().map(|i| (i + 1).to_string()).collect();
    out.push_str(&format!("perm {}\n", perm.join(" ")));
    out
}

// --- graphs ------------------------------------------------------------------

/// Parses the graph format: a `graph` header line, then `u v w` per edge.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, FormatError> {
    let lines = content_lines(text);
    match lines.first() {
        Some(&(_, "graph")) => {}
        Some(&(ln, other)) => {
            return Err(parse_err(ln, format!("expected `graph` header, got {other:?}")))
        }
        None => return Err(parse_err(0, "empty graph file")),
    }
    Ok(WeightedGraph::from_edges(parse_edge_lines(&lines[1..])?)?)
}

/// Parses a headerless whitespace edge list `u v [w]`; a missing weight or
/// `unit_weights` makes every edge weight 1.
pub fn parse_edge_list(text: &str, unit_weights: bool) -> Result<WeightedGraph, FormatError> {
    let mut edges = Vec::new();
    for (ln, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let (u, v, w) = match toks.len() {
            2 => (toks[0], toks[1], 1.0),
            3 => (
                toks[0],
                toks[1],
                if unit_weights { 1.0 } else { parse_f64(toks[2], ln)? },
            ),
            _ => return Err(parse_err(ln, format!("expected `u v [w]`, got {l:?}"))),
        };
        // Real edge lists repeat edges and include self-loops; drop both.
        if u == v || edges.iter().any(|&(ref a, ref b, _)| (a, b) == (&u.to_string(), &v.to_string()) || (a, b) == (&v.to_string(), &u.to_string())) {
            continue;
        }
        edges.push((u.to_string(), v.to_string(), w));
    }
    Ok(WeightedGraph::from_edges(edges)?)
}

/// Reads a graph file: the `graph` header selects the weighted format,
/// anything else is treated as a raw edge list.
pub fn read_graph(path: impl AsRef<Path>, unit_weights: bool) -> Result<WeightedGraph, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let first = content_lines(&text).first().map(|&(_, l)| l.to_string());
    if first.as_deref() == Some("graph") {
        parse_graph(&text)
    } else {
        parse_edge_list(&text, unit_weights)
    }
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = String::from("graph\n");
    for &(u, v, w) in g.edges() {
        out.push_str(&format!("{} {} {}\n", g.name(u), g.name(v), w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::decompose;

    #[test]
    fn tree_round_trip() {
        let t = WeightedTree::from_edges([("s", "p", 1.5), ("p", "u", 1.0), ("p", "v", 3.25)])
            .unwrap();
        let text = write_tree(&t);
        assert!(text.starts_with("tree\n"));
        let back = parse_tree(&text).unwrap();
        assert_eq!(back.distance("u", "v").unwrap(), t.distance("u", "v").unwrap());
        assert_eq!(write_tree(&back), text);
    }

    #[test]
    fn base_round_trip_preserves_order() {
        let t = WeightedTree::from_edges([("s", "a", 1.0), ("s", "b", 2.0)]).unwrap();
        let b = Base::new(t, "s", vec!["b".into(), "a".into()]).unwrap();
        let text = write_base(&b);
        let back = parse_base(&text).unwrap();
        assert_eq!(back.base_vertex(), "s");
        assert_eq!(back.base_set(), &["b".to_string(), "a".to_string()]);
    }

    #[test]
    fn tree_format_errors_carry_line_numbers() {
        assert!(matches!(parse_tree(""), Err(FormatError::Parse { .. })));
        let err = parse_tree("tree\na b\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }), "{err}");
        let err = parse_tree("graph\na b 1\n").unwrap_err();
        assert!(err.to_string().contains("tree"));
        // Structural tree problems surface as tree errors.
        assert!(matches!(parse_tree("tree\na b 0\n"), Err(FormatError::Tree(_))));
    }

    #[test]
    fn matrix_csv_round_trip_is_exact() {
        let m = SymmetricMatrix::from_rows(&[
            vec![4.0, 1.5, 2.0],
            vec![1.5, 4.0, 0.1],
            vec![2.0, 0.1, 4.0],
        ])
        .unwrap();
        let text = write_matrix_csv(&m);
        assert_eq!(text, "4,1.5,2\n1.5,4,0.1\n2,0.1,4\n");
        let back = parse_matrix_csv(&text).unwrap();
        assert_eq!(back.max_abs_diff(&m).unwrap(), 0.0);
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let back = parse_matrix_json(&write_matrix_json(&m)).unwrap();
        assert_eq!(back.max_abs_diff(&m).unwrap(), 0.0);
        assert!(parse_matrix_json("{\"n\": 2, \"entries\": [1, 2, 3]}").is_err());
    }

    #[test]
    fn matrix_structural_errors_pass_through() {
        assert!(matches!(
            parse_matrix_csv("1,2\n3,4\n"),
            Err(FormatError::Matrix(MatrixError::NotSymmetric { .. }))
        ));
        assert!(matches!(
            parse_matrix_csv("1,2\n"),
            Err(FormatError::Matrix(MatrixError::NotSquare { .. }))
        ));
        assert!(matches!(parse_matrix_csv("1,x\n"), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn program_round_trip() {
        let text = "init 3\ninit 3\ndsum\next2 5 2\nperm 1 2 3\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.ops().len(), 4);
        assert_eq!(write_program(&p), text);
        assert!(matches!(parse_program("init 3\nwat\n"), Err(FormatError::Parse { line: 2, .. })));
        // Malformed stack shapes surface with the op index.
        assert!(matches!(parse_program("dsum\n"), Err(FormatError::Program(_))));
    }

    #[test]
    fn decomposition_survives_serialization() {
        let t = WeightedTree::from_edges([
            ("s", "v3", 2.0),
            ("v3", "u", 3.0),
            ("u", "v1", 3.0),
            ("u", "v2", 3.0),
        ])
        .unwrap();
        let b = Base::new(t, "s", vec!["v1".into(), "v2".into(), "v3".into()]).unwrap();
        let p = decompose(&b).unwrap();
        let back = parse_program(&write_program(&p)).unwrap();
        assert_eq!(
            back.apply().as_sym().max_abs_diff(b.gromov_matrix().as_sym()).unwrap(),
            0.0
        );
    }

    #[test]
    fn graph_and_edge_list_formats() {
        let g = WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 2.0), ("a", "c", 1.0)])
            .unwrap();
        let text = write_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.edge_count(), 3);

        // Raw edge list: duplicates and self-loops are skipped, optional
        // third column is the weight unless unit weights are forced.
        let raw = "0 1 5\n1 0 5\n1 1\n1 2\n";
        let g = parse_edge_list(raw, false).unwrap();
        assert_eq!(g.edge_count(), 2);
        let w01 = g.edges()[0].2;
        assert_eq!(w01, 5.0);
        let unit = parse_edge_list(raw, true).unwrap();
        assert_eq!(unit.edges()[0].2, 1.0);
    }
}
