//! File formats: problem JSON, graph edge lists, and TSP coordinate files.
//!
//! The problem format spells the quadratic out as `[i, j, c]` triples so the
//! files stay diffable and hand-editable:
//!
//! ```json
//! {
//!   "n_vars": 3,
//!   "quadratic": [[0, 0, -1.0], [0, 1, 2.0]],
//!   "constraints": [
//!     {"coeffs": [[0, 1.0], [1, 1.0]], "rhs": 1.0, "kind": "eq", "tag": "onehot-a"}
//!   ],
//!   "offset": 0.5
//! }
//! ```
//!
//! `constraints` and `offset` are optional. Graphs are whitespace-separated
//! `u v` edge lines (blank lines and `#` comments ignored); TSP instances are
//! JSON arrays of planar points, expanded to Euclidean distance matrices.

use std::fs;
use std::path::Path;

use crate::error::{QrbnbError, Result};
use crate::problem::{ConstrainedQuadraticProblem, LinearConstraint};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n_vars: usize,
    quadratic: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraints: Vec<LinearConstraint>,
    #[serde(default, skip_serializing_if = "is_zero")]
    offset: f64,
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Serialize a problem to the JSON format above (pretty-printed, stable
/// field and coefficient order).
pub fn problem_to_json(problem: &ConstrainedQuadraticProblem) -> Result<String> {
    let file = ProblemFile {
        n_vars: problem.n_vars,
        quadratic: problem
            .quadratic
            .iter()
            .map(|(&(i, j), &c)| (i, j, c))
            .collect(),
        constraints: problem.constraints.clone(),
        offset: problem.offset,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parse and validate a problem from the JSON format above.
pub fn problem_from_json(json: &str) -> Result<ConstrainedQuadraticProblem> {
    let file: ProblemFile = serde_json::from_str(json)?;
    let mut problem = ConstrainedQuadraticProblem::new(file.n_vars);
    for (i, j, c) in file.quadratic {
        problem.add_quadratic(i, j, c);
    }
    problem.constraints = file.constraints;
    problem.offset = file.offset;
    problem.validate()?;
    Ok(problem)
}

/// Read a file to a string, naming the path in any failure.
pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| annotate(path, e))
}

/// Write a file, naming the path in any failure.
pub fn write_file(path: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, contents).map_err(|e| annotate(path, e))
}

pub(crate) fn annotate(path: &Path, e: std::io::Error) -> QrbnbError {
    QrbnbError::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<ConstrainedQuadraticProblem> {
    problem_from_json(&read_file(path)?)
}

pub fn write_problem(
    path: impl AsRef<Path>,
    problem: &ConstrainedQuadraticProblem,
) -> Result<()> {
    write_file(path, problem_to_json(problem)?)
}

/// Parse an edge list (`u v` per line; `#` comments and blank lines
/// ignored). Returns node count (max endpoint + 1) and edges as given.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    let mut n_nodes = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (u, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(QrbnbError::InvalidInput(format!(
                    "edge list line {}: expected `u v`, got {line:?}",
                    lineno + 1
                )))
            }
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| {
                QrbnbError::InvalidInput(format!(
                    "edge list line {}: bad node id {s:?}",
                    lineno + 1
                ))
            })
        };
        let (u, v) = (parse(u)?, parse(v)?);
        n_nodes = n_nodes.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(QrbnbError::InvalidInput("empty edge list".into()));
    }
    Ok((n_nodes, edges))
}

/// Render an edge list in the format [`parse_edge_list`] reads.
pub fn format_edge_list(edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for &(u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<(usize, Vec<(usize, usize)>)> {
    parse_edge_list(&read_file(path)?)
}

pub fn write_edge_list(path: impl AsRef<Path>, edges: &[(usize, usize)]) -> Result<()> {
    write_file(path, format_edge_list(edges))
}

/// Parse TSP city coordinates: a JSON array of `[x, y]` points.
pub fn coords_from_json(json: &str) -> Result<Vec<[f64; 2]>> {
    let coords: Vec<[f64; 2]> = serde_json::from_str(json)?;
    if coords.len() < 2 {
        return Err(QrbnbError::InvalidInput(
            "a tour needs at least two cities".into(),
        ));
    }
    Ok(coords)
}

pub fn coords_to_json(coords: &[[f64; 2]]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&coords)?)
}

pub fn read_coords(path: impl AsRef<Path>) -> Result<Vec<[f64; 2]>> {
    coords_from_json(&read_file(path)?)
}

pub fn write_coords(path: impl AsRef<Path>, coords: &[[f64; 2]]) -> Result<()> {
    write_file(path, coords_to_json(coords)?)
}

/// Full Euclidean distance matrix of planar points.
pub fn coords_to_distances(coords: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let n = coords.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
            let dist = dx.hypot(dy);
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    d
}
