use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unsupported or missing scenario version header")]
    VersionUnsupported,
    #[error("malformed scenario row at line {0}")]
    MalformedRow(usize),
}

/// One scenario row. Coordinates are `(row, col)`; the file stores `x` as
/// the column and `y` as the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub bucket: u32,
    pub map_name: String,
    pub map_width: usize,
    pub map_height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub optimal_length: f64,
}

/// Parses a MovingAI `.scen` file in version 1 format.
pub fn parse_scenario(text: &str) -> Result<Vec<ScenarioEntry>, ScenarioError> {
    let mut lines = text.lines().enumerate();
    let version_ok = lines.next().is_some_and(|(_, l)| {
        let mut p = l.split_whitespace();
        p.next() == Some("version") && matches!(p.next(), Some("1" | "1.0")) && p.next().is_none()
    });
    if !version_ok {
        return Err(ScenarioError::VersionUnsupported);
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 9 {
            return Err(ScenarioError::MalformedRow(line_no));
        }
        let bad = |_| ScenarioError::MalformedRow(line_no);
        let num = |s: &str| s.trim().parse::<usize>().map_err(bad);
        out.push(ScenarioEntry {
            bucket: f[0].trim().parse().map_err(bad)?,
            map_name: f[1].to_string(),
            map_width: num(f[2])?,
            map_height: num(f[3])?,
            start: (num(f[5])?, num(f[4])?),
            goal: (num(f[7])?, num(f[6])?),
            optimal_length: f[8].trim().parse().map_err(|_| ScenarioError::MalformedRow(line_no))?,
        });
    }
    Ok(out)
}

/// Inverse of [`parse_scenario`].
pub fn render_scenario(entries: &[ScenarioEntry]) -> String {
    let mut out = String::from("version 1\n");
    for e in entries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.8}",
            e.bucket,
            e.map_name,
            e.map_width,
            e.map_height,
            e.start.1,
            e.start.0,
            e.goal.1,
            e.goal.0,
            e.optimal_length
        );
    }
    out
}
