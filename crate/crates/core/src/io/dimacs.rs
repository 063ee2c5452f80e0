use std::fmt::Write as _;

use thiserror::Error;

use crate::oracle::{UndirectedGraph, UndirectedGraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {0}: expected `p edge <vertices> <edges>` before any edge")]
    MissingProblemLine(usize),
    #[error("line {0}: malformed line")]
    Malformed(usize),
    #[error("invalid graph: {0}")]
    Graph(#[from] UndirectedGraphError),
}

/// Reads a DIMACS `.col` graph (1-based vertex ids).
pub fn parse_dimacs(text: &str) -> Result<UndirectedGraph, DimacsError> {
    let mut vertex_count = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut f = line.split_whitespace();
        match f.next() {
            None | Some("c") => {}
            Some("p") => {
                let (_kind, n) = (f.next(), f.next());
                let n: usize = n
                    .and_then(|s| s.parse().ok())
                    .ok_or(DimacsError::Malformed(line_no))?;
                vertex_count = Some(n);
            }
            Some("e") => {
                if vertex_count.is_none() {
                    return Err(DimacsError::MissingProblemLine(line_no));
                }
                let mut id = || -> Result<usize, DimacsError> {
                    f.next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&v| v >= 1)
                        .map(|v| v - 1)
                        .ok_or(DimacsError::Malformed(line_no))
                };
                edges.push((id()?, id()?));
            }
            Some(_) => return Err(DimacsError::Malformed(line_no)),
        }
    }
    let n = vertex_count.ok_or(DimacsError::MissingProblemLine(text.lines().count()))?;
    Ok(UndirectedGraph::new(n, edges)?)
}

pub fn render_dimacs(graph: &UndirectedGraph) -> String {
    let mut out = format!("p edge {} {}\n", graph.vertex_count(), graph.edge_count());
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "e {} {}", a + 1, b + 1);
    }
    out
}
