use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapf::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("malformed map header: {0}")]
    MalformedHeader(String),
    #[error("map declares {expected_rows}x{expected_cols} but row {row} has {found} cells")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        row: usize,
        found: usize,
    },
    #[error("unknown cell character {ch:?} at row {row}, column {col}")]
    UnknownCellChar { row: usize, col: usize, ch: char },
    #[error("delay cell ({row}, {col}) is outside the map or not passable")]
    SubsetOutOfBounds { row: usize, col: usize },
}

/// A rectangular passability grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMap {
    pub height: usize,
    pub width: usize,
    pub cells: Vec<bool>,
}

impl GridMap {
    pub fn open(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            cells: vec![true; height * width],
        }
    }

    #[inline]
    pub fn passable(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width && self.cells[row * self.width + col]
    }

    pub fn passable_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

fn header_value(line: Option<&str>, key: &str) -> Result<usize, MapError> {
    let line = line.ok_or_else(|| MapError::MalformedHeader(format!("missing `{key}` line")))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| MapError::MalformedHeader(format!("`{key}` is not a number: {v:?}"))),
        _ => Err(MapError::MalformedHeader(format!("expected `{key} <n>`, got {line:?}"))),
    }
}

/// Parses a MovingAI `.map` file.
pub fn parse_map(text: &str) -> Result<GridMap, MapError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    match lines.next().map(str::trim) {
        Some(l) if l.starts_with("type") => {}
        other => {
            return Err(MapError::MalformedHeader(format!(
                "expected `type ...`, got {other:?}"
            )))
        }
    }
    let height = header_value(lines.next(), "height")?;
    let width = header_value(lines.next(), "width")?;
    if lines.next().map(str::trim) != Some("map") {
        return Err(MapError::MalformedHeader("expected `map`".into()));
    }
    let mut cells = Vec::with_capacity(height * width);
    let mut rows = 0;
    for (row, line) in lines.enumerate() {
        if row >= height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(MapError::DimensionMismatch {
                expected_rows: height,
                expected_cols: width,
                row,
                found: line.chars().count(),
            });
        }
        let found = line.chars().count();
        if found != width {
            return Err(MapError::DimensionMismatch {
                expected_rows: height,
                expected_cols: width,
                row,
                found,
            });
        }
        for (col, ch) in line.chars().enumerate() {
            cells.push(match ch {
                '.' | 'G' => true,
                '@' | 'O' | 'T' | 'S' | 'W' => false,
                _ => return Err(MapError::UnknownCellChar { row, col, ch }),
            });
        }
        rows += 1;
    }
    if rows != height {
        return Err(MapError::DimensionMismatch {
            expected_rows: height,
            expected_cols: width,
            row: rows,
            found: 0,
        });
    }
    Ok(GridMap {
        height,
        width,
        cells,
    })
}

/// Writes `map` back in MovingAI format using `.` and `@`.
pub fn render_map(map: &GridMap) -> String {
    let mut out = format!(
        "type octile\nheight {}\nwidth {}\nmap\n",
        map.height, map.width
    );
    for row in map.cells.chunks(map.width.max(1)).take(map.height) {
        out.extend(row.iter().map(|&p| if p { '.' } else { '@' }));
        out.push('\n');
    }
    out
}

/// Which grid cells receive a self-loop.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayPolicy {
    #[default]
    AllVertices,
    /// Only these `(row, col)` cells.
    SubsetList(Vec<(usize, usize)>),
}

/// A grid turned into a graph, with the cell bookkeeping kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    pub graph: Graph,
    cell_to_vertex: Vec<Option<VertexId>>,
    vertex_to_cell: Vec<(usize, usize)>,
    width: usize,
}

impl GridGraph {
    pub fn vertex_at(&self, row: usize, col: usize) -> Option<VertexId> {
        if col >= self.width {
            return None;
        }
        self.cell_to_vertex.get(row * self.width + col).copied().flatten()
    }

    pub fn cell_of(&self, v: VertexId) -> (usize, usize) {
        self.vertex_to_cell[v as usize]
    }
}

/// One vertex per passable cell in row-major order, 4-connected.
pub fn grid_to_graph(map: &GridMap, policy: &DelayPolicy) -> Result<GridGraph, MapError> {
    let mut cell_to_vertex = vec![None; map.height * map.width];
    let mut vertex_to_cell = Vec::new();
    for r in 0..map.height {
        for c in 0..map.width {
            if map.passable(r, c) {
                cell_to_vertex[r * map.width + c] = Some(vertex_to_cell.len() as VertexId);
                vertex_to_cell.push((r, c));
            }
        }
    }
    let at = |r: usize, c: usize| cell_to_vertex[r * map.width + c];
    let mut edges = Vec::new();
    for (v, &(r, c)) in vertex_to_cell.iter().enumerate() {
        let v = v as VertexId;
        let mut neighbors = Vec::with_capacity(4);
        if r > 0 {
            neighbors.push(at(r - 1, c));
        }
        if c > 0 {
            neighbors.push(at(r, c - 1));
        }
        if c + 1 < map.width {
            neighbors.push(at(r, c + 1));
        }
        if r + 1 < map.height {
            neighbors.push(at(r + 1, c));
        }
        edges.extend(neighbors.into_iter().flatten().map(|w| (v, w)));
    }
    match policy {
        DelayPolicy::AllVertices => {
            edges.extend((0..vertex_to_cell.len() as VertexId).map(|v| (v, v)));
        }
        DelayPolicy::SubsetList(cells) => {
            let mut loops: Vec<VertexId> = Vec::with_capacity(cells.len());
            for &(row, col) in cells {
                if !map.passable(row, col) {
                    return Err(MapError::SubsetOutOfBounds { row, col });
                }
                loops.push(at(row, col).expect("passable cells have vertices"));
            }
            loops.sort_unstable();
            loops.dedup();
            edges.extend(loops.into_iter().map(|v| (v, v)));
        }
    }
    let graph = Graph::new(vertex_to_cell.len(), edges).expect("grid edges are unique");
    Ok(GridGraph {
        graph,
        cell_to_vertex,
        vertex_to_cell,
        width: map.width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_text(h: usize, w: usize, rows: &[&str]) -> String {
        format!("type octile\nheight {h}\nwidth {w}\nmap\n{}\n", rows.join("\n"))
    }

    #[test]
    fn parse_small_map() {
        let m = parse_map(&map_text(2, 2, &[".@", ".."])).unwrap();
        assert_eq!(m.passable_count(), 3);
        assert!(!m.passable(0, 1));
        let open = parse_map(&map_text(8, 8, &["........"; 8])).unwrap();
        assert_eq!(open.passable_count(), 64);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_map(&map_text(3, 2, &["..", ".."])),
            Err(MapError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_map(&map_text(1, 2, &[".x"])),
            Err(MapError::UnknownCellChar { row: 0, col: 1, ch: 'x' })
        ));
        assert!(matches!(parse_map("height 1\n"), Err(MapError::MalformedHeader(_))));
        assert!(matches!(
            parse_map("type octile\nheight one\nwidth 1\nmap\n.\n"),
            Err(MapError::MalformedHeader(_))
        ));
    }

    #[test]
    fn render_round_trip() {
        let m = parse_map(&map_text(2, 3, &[".@T", "G.."])).unwrap();
        assert_eq!(parse_map(&render_map(&m)).unwrap(), m);
    }

    #[test]
    fn grid_graph_shapes() {
        let g = grid_to_graph(&GridMap::open(1, 2), &DelayPolicy::AllVertices).unwrap();
        let edges: Vec<_> = g.graph.edges().collect();
        assert_eq!(edges.len(), 4);
        assert!(g.graph.has_edge(0, 1) && g.graph.has_edge(1, 0));
        assert!(g.graph.is_delay_vertex(0) && g.graph.is_delay_vertex(1));

        let single = grid_to_graph(&GridMap::open(1, 1), &DelayPolicy::SubsetList(vec![])).unwrap();
        assert_eq!(single.graph.vertex_count(), 1);
        assert_eq!(single.graph.edge_count(), 0);

        let square = grid_to_graph(&GridMap::open(2, 2), &DelayPolicy::AllVertices).unwrap();
        assert_eq!(square.graph.edge_count(), 12);
        assert_eq!(square.graph.delay_vertices().count(), 4);
    }

    #[test]
    fn subset_policy_validates_cells() {
        let m = parse_map(&map_text(1, 3, &[".@."])).unwrap();
        let g = grid_to_graph(&m, &DelayPolicy::SubsetList(vec![(0, 2)])).unwrap();
        assert_eq!(g.vertex_at(0, 2), Some(1));
        assert!(g.graph.is_delay_vertex(1) && !g.graph.is_delay_vertex(0));
        assert_eq!(g.cell_of(1), (0, 2));
        assert_eq!(
            grid_to_graph(&m, &DelayPolicy::SubsetList(vec![(0, 1)])),
            Err(MapError::SubsetOutOfBounds { row: 0, col: 1 })
        );
    }
}
