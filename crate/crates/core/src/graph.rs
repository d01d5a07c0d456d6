//! Undirected coverage graphs: Matrix Market ingestion, G(n, p) generation,
//! the canonical JSON document and the coverage objective.

use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from;
use crate::solution::Solution;

/// Simple undirected graph stored as sorted adjacency lists.
///
/// Adjacency is symmetric, free of duplicates and self-loops. A node always
/// covers itself, so self-loops carry no information for the objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageGraph {
    adjacency: Vec<Vec<usize>>,
}

/// Canonical JSON form: 0-based indices, each edge as `[i, j]` with `i < j`,
/// edges sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl CoverageGraph {
    /// Build from an arbitrary edge list. Self-loops are dropped and
    /// duplicates (in either orientation) collapse into one edge.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("graph must have at least one node".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Domain(format!(
                    "edge ({i}, {j}) references a node outside [0, {n})"
                )));
            }
            if i != j {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(CoverageGraph { adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edges with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            n: self.node_count(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        for (k, e) in doc.edges.iter().enumerate() {
            if e[0] >= doc.n || e[1] >= doc.n {
                return Err(Error::validation("edges", Some(k), format!("node index out of [0, {})", doc.n)));
            }
        }
        Self::from_edges(doc.n, doc.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    /// Coordinate pattern Matrix Market text, symmetric storage, lower triangle.
    pub fn to_matrix_market(&self) -> String {
        let n = self.node_count();
        let mut out = String::from("%%MatrixMarket matrix coordinate pattern symmetric\n");
        let _ = writeln!(out, "{n} {n} {}", self.edge_count());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{} {}", j + 1, i + 1);
        }
        out
    }
}

/// Parse a coordinate-format Matrix Market file into an undirected graph.
///
/// Entry values are ignored; every off-diagonal entry `(i, j)` becomes the
/// edge `{i-1, j-1}`. Non-square matrices use the larger dimension as the
/// node count.
pub fn load_matrix_market(text: &str) -> Result<CoverageGraph> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() < 3 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(Error::Parse {
            line: hline,
            message: "expected header `%%MatrixMarket matrix coordinate ...`".into(),
        });
    }

    // Size line: first line that is neither a comment nor blank.
    let mut size = None;
    for (k, line) in lines.by_ref() {
        let t = line.trim();
        if t.starts_with('%') {
            continue;
        }
        if t.is_empty() {
            return Err(Error::Parse {
                line: k,
                message: "empty size line".into(),
            });
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: k,
                message: format!("size line needs `rows cols entries`, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: k,
                message: format!("bad size value `{s}`: {e}"),
            })
        };
        size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        break;
    }
    let (rows, cols, _declared) = size.ok_or(Error::Parse {
        line: hline + 1,
        message: "missing size line".into(),
    })?;
    let n = rows.max(cols);
    if n == 0 {
        return Err(Error::Parse {
            line: hline + 1,
            message: "matrix has zero dimension".into(),
        });
    }

    let mut edges = Vec::new();
    for (k, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let mut index = |what: &str| -> Result<usize> {
            let s = it.next().ok_or_else(|| Error::Parse {
                line: k,
                message: format!("missing {what} index"),
            })?;
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: k,
                message: format!("bad {what} index `{s}`: {e}"),
            })
        };
        let i = index("row")?;
        let j = index("column")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Bounds {
                line: k,
                row: i,
                col: j,
                rows,
                cols,
            });
        }
        edges.push((i - 1, j - 1));
    }
    CoverageGraph::from_edges(n, edges)
}

/// Erdős–Rényi G(n, p): each unordered pair is an edge independently with
/// probability `p`, pairs visited in lexicographic order.
pub fn generate_random_graph(n: usize, p: f64, seed: u64) -> Result<CoverageGraph> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng_from(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    CoverageGraph::from_edges(n, edges)
}

/// Number of distinct nodes that are selected or adjacent to a selected node.
pub fn coverage_count(graph: &CoverageGraph, solution: &Solution) -> Result<usize> {
    let n = graph.node_count();
    if solution.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: solution.len(),
        });
    }
    let mut covered = vec![false; n];
    for v in solution.selected() {
        covered[v] = true;
        for &u in graph.neighbors(v) {
            covered[u] = true;
        }
    }
    Ok(covered.iter().filter(|&&c| c).count())
}
