//! Directed routing networks, path enumeration, and path/edge flows.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::latency::LatencyFn;
use crate::{invalid, Result};

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub latency: LatencyFn,
}

#[derive(Debug, Clone, Copy)]
pub struct OdPair {
    pub origin: usize,
    pub dest: usize,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct RoutingProblem {
    pub id: String,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub od_pairs: Vec<OdPair>,
}

impl RoutingProblem {
    pub fn new(
        id: impl Into<String>,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        od_pairs: Vec<OdPair>,
    ) -> Result<RoutingProblem> {
        let problem = RoutingProblem { id: id.into(), vertices, edges, od_pairs };
        problem.validate()?;
        Ok(problem)
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(invalid("network has no vertices"));
        }
        let mut names = HashSet::new();
        for v in &self.vertices {
            if v.is_empty() {
                return Err(invalid("empty vertex name"));
            }
            if !names.insert(v.as_str()) {
                return Err(invalid(format!("duplicate vertex name {v:?}")));
            }
        }
        let mut ids = HashSet::new();
        for e in &self.edges {
            if e.id.is_empty() {
                return Err(invalid("empty edge id"));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(invalid(format!("duplicate edge id {:?}", e.id)));
            }
            if e.tail >= self.vertices.len() || e.head >= self.vertices.len() {
                return Err(invalid(format!("edge {:?} references unknown vertex", e.id)));
            }
            e.latency.validate()?;
        }
        if self.od_pairs.is_empty() {
            return Err(invalid("network needs at least one origin-destination pair"));
        }
        for od in &self.od_pairs {
            if od.origin >= self.vertices.len() || od.dest >= self.vertices.len() {
                return Err(invalid("od pair references unknown vertex"));
            }
            if od.origin == od.dest {
                return Err(invalid(format!(
                    "od pair has origin equal to destination ({})",
                    self.vertices[od.origin]
                )));
            }
            if !od.rate.is_finite() || od.rate <= 0.0 {
                return Err(invalid(format!("od rate must be finite and > 0 (got {})", od.rate)));
            }
            if !self.reaches(od.origin, od.dest) {
                return Err(invalid(format!(
                    "destination {} unreachable from {}",
                    self.vertices[od.dest], self.vertices[od.origin]
                )));
            }
        }
        Ok(())
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for e in &self.edges {
                if e.tail == v && !seen[e.head] {
                    seen[e.head] = true;
                    stack.push(e.head);
                }
            }
        }
        false
    }

    pub fn total_demand(&self) -> f64 {
        self.od_pairs.iter().map(|od| od.rate).sum()
    }

    /// All simple paths per OD pair, each path a sequence of edge indices,
    /// sorted lexicographically by edge-id sequence. Errors once the total
    /// number of paths exceeds `cap`.
    pub fn enumerate_paths(&self, cap: usize) -> Result<PathSet> {
        // Out-edges sorted by id so DFS emits paths in lexicographic order.
        let mut adjacency = vec![Vec::new(); self.vertices.len()];
        for (idx, e) in self.edges.iter().enumerate() {
            adjacency[e.tail].push(idx);
        }
        for out in &mut adjacency {
            out.sort_by(|&a, &b| self.edges[a].id.cmp(&self.edges[b].id));
        }

        let mut per_od = Vec::with_capacity(self.od_pairs.len());
        let mut count = 0usize;
        for od in &self.od_pairs {
            let mut paths = Vec::new();
            let mut visited = vec![false; self.vertices.len()];
            let mut stack = Vec::new();
            visited[od.origin] = true;
            self.dfs(od.origin, od.dest, &adjacency, &mut visited, &mut stack, &mut paths, cap, &mut count)?;
            if paths.is_empty() {
                return Err(invalid(format!(
                    "no path from {} to {}",
                    self.vertices[od.origin], self.vertices[od.dest]
                )));
            }
            per_od.push(paths);
        }
        let parallel = per_od.iter().flatten().all(|p| p.len() == 1);
        Ok(PathSet { per_od, parallel })
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        v: usize,
        dest: usize,
        adjacency: &[Vec<usize>],
        visited: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
        cap: usize,
        count: &mut usize,
    ) -> Result<()> {
        for &e in &adjacency[v] {
            let head = self.edges[e].head;
            if visited[head] {
                continue;
            }
            stack.push(e);
            if head == dest {
                *count += 1;
                if *count > cap {
                    return Err(invalid(format!(
                        "path enumeration exceeded cap of {cap}; raise the path count cap for this network"
                    )));
                }
                paths.push(stack.clone());
            } else {
                visited[head] = true;
                self.dfs(head, dest, adjacency, visited, stack, paths, cap, count)?;
                visited[head] = false;
            }
            stack.pop();
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<RoutingProblem> {
        let spec: ProblemSpec = serde_json::from_str(s)?;
        spec.resolve()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_spec()).expect("serializable");
        s.push('\n');
        s
    }

    fn to_spec(&self) -> ProblemSpec {
        ProblemSpec {
            id: if self.id.is_empty() { None } else { Some(self.id.clone()) },
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    tail: self.vertices[e.tail].clone(),
                    head: self.vertices[e.head].clone(),
                    latency: e.latency.clone(),
                })
                .collect(),
            od: self
                .od_pairs
                .iter()
                .map(|od| OdSpec {
                    origin: self.vertices[od.origin].clone(),
                    dest: self.vertices[od.dest].clone(),
                    rate: od.rate,
                })
                .collect(),
        }
    }
}

/// On-disk form of a routing problem (`.cg.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub od: Vec<OdSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub latency: LatencyFn,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdSpec {
    pub origin: String,
    pub dest: String,
    pub rate: f64,
}

impl ProblemSpec {
    pub fn resolve(&self) -> Result<RoutingProblem> {
        let index = |name: &str| -> Result<usize> {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| invalid(format!("unknown vertex {name:?}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    id: e.id.clone(),
                    tail: index(&e.tail)?,
                    head: index(&e.head)?,
                    latency: e.latency.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let od_pairs = self
            .od
            .iter()
            .map(|od| {
                Ok(OdPair { origin: index(&od.origin)?, dest: index(&od.dest)?, rate: od.rate })
            })
            .collect::<Result<Vec<_>>>()?;
        RoutingProblem::new(
            self.id.clone().unwrap_or_else(|| "problem".to_string()),
            self.vertices.clone(),
            edges,
            od_pairs,
        )
    }
}

/// Enumerated simple paths for every OD pair of one problem.
#[derive(Debug, Clone)]
pub struct PathSet {
    /// `per_od[k][i]` is the i-th path of OD pair k as edge indices.
    pub per_od: Vec<Vec<Vec<usize>>>,
    /// True iff every path consists of a single edge.
    pub parallel: bool,
}

impl PathSet {
    pub fn n_ods(&self) -> usize {
        self.per_od.len()
    }

    pub fn total_paths(&self) -> usize {
        self.per_od.iter().map(|p| p.len()).sum()
    }

    pub fn path_ids(&self, problem: &RoutingProblem) -> Vec<Vec<Vec<String>>> {
        self.per_od
            .iter()
            .map(|paths| {
                paths
                    .iter()
                    .map(|p| p.iter().map(|&e| problem.edges[e].id.clone()).collect())
                    .collect()
            })
            .collect()
    }
}

/// A path-flow assignment, split per OD pair and per sensitivity class.
///
/// `path_flows[k][c][i]` is the mass of class c of OD pair k on path i. The
/// per-edge aggregate over all ODs and classes is kept in `edge_flows`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub path_flows: Vec<Vec<Vec<f64>>>,
    pub edge_flows: Vec<f64>,
}

impl FlowAssignment {
    pub fn from_path_flows(
        problem: &RoutingProblem,
        paths: &PathSet,
        path_flows: Vec<Vec<Vec<f64>>>,
    ) -> Result<FlowAssignment> {
        if path_flows.len() != paths.per_od.len() {
            return Err(invalid(format!(
                "flow has {} od groups, path set has {}",
                path_flows.len(),
                paths.per_od.len()
            )));
        }
        for (k, classes) in path_flows.iter().enumerate() {
            for class in classes {
                if class.len() != paths.per_od[k].len() {
                    return Err(invalid(format!(
                        "od {} flow row has {} entries, path set has {} paths",
                        k,
                        class.len(),
                        paths.per_od[k].len()
                    )));
                }
                for &f in class {
                    if !f.is_finite() || f < -1e-12 {
                        return Err(invalid(format!("path flow must be ≥ 0 (got {f})")));
                    }
                }
            }
        }
        let edge_flows = aggregate_edge_flows(problem, paths, &path_flows);
        Ok(FlowAssignment { path_flows, edge_flows })
    }

    /// Checks OD masses against rates within `tol·max(1, rate)`.
    pub fn check_feasible(&self, problem: &RoutingProblem, tol: f64) -> Result<()> {
        if self.edge_flows.len() != problem.edges.len() {
            return Err(invalid(format!(
                "flow covers {} edges, network has {}",
                self.edge_flows.len(),
                problem.edges.len()
            )));
        }
        if self.path_flows.len() != problem.od_pairs.len() {
            return Err(invalid(format!(
                "flow has {} od groups, network has {}",
                self.path_flows.len(),
                problem.od_pairs.len()
            )));
        }
        for (k, od) in problem.od_pairs.iter().enumerate() {
            let total: f64 = self.path_flows[k].iter().flatten().sum();
            if (total - od.rate).abs() > tol * od.rate.max(1.0) {
                return Err(invalid(format!(
                    "od {} routes mass {} but has rate {}",
                    k, total, od.rate
                )));
            }
        }
        Ok(())
    }
}

/// Per-edge aggregate flow: sums every OD pair and class.
pub fn aggregate_edge_flows(
    problem: &RoutingProblem,
    paths: &PathSet,
    path_flows: &[Vec<Vec<f64>>],
) -> Vec<f64> {
    let mut edge = vec![0.0; problem.edges.len()];
    for (k, classes) in path_flows.iter().enumerate() {
        for class in classes {
            for (i, &f) in class.iter().enumerate() {
                if f != 0.0 {
                    for &e in &paths.per_od[k][i] {
                        edge[e] += f;
                    }
                }
            }
        }
    }
    // Clamp roundoff dust so downstream latency evaluation sees flows ≥ 0.
    for f in &mut edge {
        if *f < 0.0 {
            *f = 0.0;
        }
    }
    edge
}
