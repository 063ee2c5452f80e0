use std::collections::BTreeSet;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::map::{grid_to_graph, parse_map, DelayPolicy, MapError};
use crate::harness::InjectionRecord;
use crate::mapf::{
    DelayAssignment, DelayPermissions, Graph, Path, Plan, PlanError, TailSemantics, VertexId,
};

pub const PLAN_FORMAT: &str = "delay-repair-plan";
pub const PLAN_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PlanFileError {
    #[error("plan file is not valid: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unexpected format tag {found:?}, expected {PLAN_FORMAT:?}")]
    FormatMismatch { found: String },
    #[error("plan file version {found} is not supported (expected {PLAN_VERSION})")]
    SchemaVersionMismatch { found: u32 },
    #[error("invariant violated at `{field}`: {reason}")]
    InvariantViolation { field: String, reason: String },
    #[error("map {path}: {source}")]
    Map { path: PathBuf, source: MapError },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn violation(field: impl Into<String>, reason: impl ToString) -> PlanFileError {
    PlanFileError::InvariantViolation {
        field: field.into(),
        reason: reason.to_string(),
    }
}

/// Where the graph of a plan file comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Explicit {
        vertex_count: usize,
        /// Directed edges; a self-loop marks a vertex where waiting is possible.
        edges: Vec<(VertexId, VertexId)>,
    },
    /// A MovingAI map, resolved relative to the plan file.
    Grid {
        map: String,
        #[serde(default)]
        delay_policy: DelayPolicy,
    },
}

impl GraphSpec {
    pub fn explicit(graph: &Graph) -> Self {
        Self::Explicit {
            vertex_count: graph.vertex_count(),
            edges: graph.edges().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AgentEntry {
    source: VertexId,
    goal: VertexId,
    path: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "DelayAssignment::is_empty")]
    delays: DelayAssignment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    permitted: Option<BTreeSet<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPlanFile {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    semantics: Option<TailSemantics>,
    graph: GraphSpec,
    agents: Vec<AgentEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    injections: Vec<InjectionRecord>,
}

/// A plan together with its graph and optional repair metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanDocument {
    pub graph_spec: GraphSpec,
    pub graph: Graph,
    pub plan: Plan,
    /// Per-agent delays relative to some base plan; empty assignments when
    /// none were recorded.
    pub delays: Vec<DelayAssignment>,
    pub permissions: DelayPermissions,
    pub semantics: Option<TailSemantics>,
    pub injections: Vec<InjectionRecord>,
}

impl PlanDocument {
    /// A document with an explicit edge list and no metadata.
    pub fn new(graph: Graph, plan: Plan) -> Self {
        let n = plan.agent_count();
        Self {
            graph_spec: GraphSpec::explicit(&graph),
            graph,
            plan,
            delays: vec![DelayAssignment::new(); n],
            permissions: DelayPermissions::unrestricted(n),
            semantics: None,
            injections: Vec::new(),
        }
    }
}

/// Serialises `doc` as pretty-printed JSON.
pub fn write_plan(doc: &PlanDocument) -> String {
    let agents = (0..doc.plan.agent_count())
        .map(|a| AgentEntry {
            source: doc.plan.sources()[a],
            goal: doc.plan.goals()[a],
            path: doc.plan.path(a).vertices().to_vec(),
            delays: doc.delays.get(a).cloned().unwrap_or_default(),
            permitted: doc.permissions.agent(a).cloned(),
        })
        .collect();
    let raw = RawPlanFile {
        format: PLAN_FORMAT.to_string(),
        version: PLAN_VERSION,
        semantics: doc.semantics,
        graph: doc.graph_spec.clone(),
        agents,
        injections: doc.injections.clone(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("plan documents always serialise");
    s.push('\n');
    s
}

/// Parses and re-validates a plan file. Grid maps are looked up relative to
/// `base_dir`.
pub fn read_plan(text: &str, base_dir: Option<&FsPath>) -> Result<PlanDocument, PlanFileError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("format").and_then(|v| v.as_str()) {
        Some(PLAN_FORMAT) => {}
        other => {
            return Err(PlanFileError::FormatMismatch {
                found: other.unwrap_or("<missing>").to_string(),
            })
        }
    }
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == PLAN_VERSION as u64 => {}
        Some(v) => return Err(PlanFileError::SchemaVersionMismatch { found: v as u32 }),
        None => return Err(violation("version", "missing or not a number")),
    }
    let raw: RawPlanFile = serde_json::from_value(value)?;

    let graph = match &raw.graph {
        GraphSpec::Explicit {
            vertex_count,
            edges,
        } => Graph::new(*vertex_count, edges.iter().copied())
            .map_err(|e| violation("graph.edges", e))?,
        GraphSpec::Grid { map, delay_policy } => {
            let path = base_dir.map_or_else(|| PathBuf::from(map), |d| d.join(map));
            let text = std::fs::read_to_string(&path).map_err(|source| PlanFileError::Io {
                path: path.clone(),
                source,
            })?;
            let grid = parse_map(&text).map_err(|source| PlanFileError::Map {
                path: path.clone(),
                source,
            })?;
            grid_to_graph(&grid, delay_policy)
                .map_err(|source| PlanFileError::Map { path, source })?
                .graph
        }
    };

    if raw.agents.is_empty() {
        return Err(violation("agents", "a plan needs at least one agent"));
    }
    let mut paths = Vec::with_capacity(raw.agents.len());
    for (i, a) in raw.agents.iter().enumerate() {
        let path = Path::new(a.path.clone()).map_err(|e| violation(format!("agents[{i}].path"), e))?;
        paths.push(path);
    }
    let sources = raw.agents.iter().map(|a| a.source).collect();
    let goals = raw.agents.iter().map(|a| a.goal).collect();
    let plan = Plan::new(paths, sources, goals).map_err(|e| {
        let field = match &e {
            PlanError::SourceMismatch { agent, .. } | PlanError::GoalMismatch { agent, .. } => {
                format!("agents[{agent}].path")
            }
            _ => "agents".to_string(),
        };
        violation(field, e)
    })?;
    plan.validate_on(&graph).map_err(|e| match &e {
        PlanError::MissingEdge { agent, .. } => violation(format!("agents[{agent}].path"), e),
        _ => violation("agents", e),
    })?;

    let permissions =
        DelayPermissions::from_options(raw.agents.iter().map(|a| a.permitted.clone()).collect());
    let delays: Vec<DelayAssignment> = raw.agents.iter().map(|a| a.delays.clone()).collect();
    for (i, d) in delays.iter().enumerate() {
        if let Some((index, _)) = d.iter().find(|&(j, _)| j == 0) {
            return Err(violation(format!("agents[{i}].delays"), format!("index {index} is not 1-based")));
        }
    }
    for (k, inj) in raw.injections.iter().enumerate() {
        if inj.agent >= plan.agent_count() {
            return Err(violation(format!("injections[{k}].agent"), "no such agent"));
        }
    }

    Ok(PlanDocument {
        graph_spec: raw.graph,
        graph,
        plan,
        delays,
        permissions,
        semantics: raw.semantics,
        injections: raw.injections,
    })
}

/// Reads a plan file from disk, resolving maps next to it.
pub fn load_plan(path: &FsPath) -> Result<PlanDocument, PlanFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| PlanFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_plan(&text, path.parent())
}
