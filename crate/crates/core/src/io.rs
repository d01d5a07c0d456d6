//! File helpers shared by the runner and the instance reader.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{load_matrix_market, CoverageGraph};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Load a graph from `.mtx` (Matrix Market) or canonical JSON.
pub fn read_graph(path: &Path) -> Result<CoverageGraph> {
    let text = read_to_string(path)?;
    let is_mtx = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    if is_mtx {
        load_matrix_market(&text)
    } else {
        CoverageGraph::from_json(&text)
    }
}

pub fn write_graph(path: &Path, graph: &CoverageGraph) -> Result<()> {
    write_string(path, &graph.to_json())
}
