use serde::{Deserialize, Serialize};

/// Column order of the metrics CSV.
pub const METRICS_HEADER: [&str; 16] = [
    "map",
    "instance",
    "n_agents",
    "iteration",
    "seed",
    "graph_mode",
    "solver",
    "success",
    "status",
    "wall_ms",
    "build_ms",
    "added_soc",
    "delays",
    "conflicts_at_injection",
    "expansions",
    "low_level_calls",
];

/// Columns holding wall-clock measurements.
pub const TIMING_COLUMNS: [&str; 2] = ["wall_ms", "build_ms"];

/// One repair attempt.
///
/// `added_soc` and `delays` are empty unless the repair succeeded; `delays`
/// stays empty for original-graph replanning, which does not produce a
/// delay assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub map: String,
    pub instance: usize,
    pub n_agents: usize,
    pub iteration: usize,
    pub seed: u64,
    pub graph_mode: String,
    pub solver: String,
    pub success: u8,
    pub status: String,
    pub wall_ms: f64,
    pub build_ms: f64,
    pub added_soc: Option<i64>,
    pub delays: Option<u64>,
    pub conflicts_at_injection: usize,
    pub expansions: u64,
    pub low_level_calls: u64,
}

/// Renders rows as CSV with the fixed header, even when `rows` is empty.
pub fn write_metrics_csv(rows: &[MetricsRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(METRICS_HEADER).expect("in-memory write");
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Parses CSV written by [`write_metrics_csv`].
pub fn read_metrics_csv(text: &str) -> Result<Vec<MetricsRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(success: bool) -> MetricsRow {
        MetricsRow {
            map: "m".into(),
            instance: 0,
            n_agents: 3,
            iteration: 1,
            seed: 7,
            graph_mode: "CG".into(),
            solver: "cbs".into(),
            success: success as u8,
            status: if success { "solved" } else { "timeout" }.into(),
            wall_ms: 1.5,
            build_ms: 0.25,
            added_soc: success.then_some(2),
            delays: success.then_some(2),
            conflicts_at_injection: 1,
            expansions: 4,
            low_level_calls: 9,
        }
    }

    #[test]
    fn header_only() {
        assert_eq!(write_metrics_csv(&[]), METRICS_HEADER.join(",") + "\n");
    }

    #[test]
    fn success_and_timeout_rows() {
        let text = write_metrics_csv(&[row(true), row(false)]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "m,0,3,1,7,CG,cbs,1,solved,1.5,0.25,2,2,1,4,9");
        assert_eq!(lines[2], "m,0,3,1,7,CG,cbs,0,timeout,1.5,0.25,,,1,4,9");
        assert_eq!(read_metrics_csv(&text).unwrap(), vec![row(true), row(false)]);
    }
}
