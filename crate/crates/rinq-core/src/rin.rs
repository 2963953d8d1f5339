//! Residue interaction network: distance-cutoff contact graph over Cα
//! positions, its adjacency matrix, and DOT / GraphML / JSON export.

use crate::error::{Result, RinqError};
use crate::matrix::{norm2, DenseMatrix};
use crate::pdb::ResidueRecord;

pub const DEFAULT_CUTOFF: f64 = 8.0;

/// Undirected, unweighted contact graph. Node index i corresponds to
/// `nodes[i]`, establishing the stable bit-index ↔ residue map used by the
/// QUBO layer.
#[derive(Debug, Clone)]
pub struct ResidueGraph {
    pub pdb_id: String,
    pub nodes: Vec<ResidueRecord>,
    /// Unordered pairs stored as (i, j) with i < j, sorted.
    pub edges: Vec<(usize, usize)>,
    pub cutoff: f64,
    pub warnings: Vec<String>,
}

impl ResidueGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True when every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

/// Symmetric 0/1 matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: DenseMatrix,
}

impl AdjacencyMatrix {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for &(i, j) in edges {
            assert!(i != j, "no self-loops");
            m.set(i, j, 1.0);
            m.set(j, i, 1.0);
        }
        AdjacencyMatrix { entries: m }
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.entries.row(i).iter().sum())
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        let total: f64 = (0..self.n())
            .map(|i| self.entries.row(i).iter().sum::<f64>())
            .sum();
        (total / 2.0).round() as usize
    }
}

/// Build the contact graph: edge (i, j) iff the Cα distance is ≤ cutoff.
/// The boundary is inclusive so a pair exactly at the cutoff is connected.
pub fn build_rin(residues: &[ResidueRecord], cutoff: f64) -> Result<ResidueGraph> {
    if residues.is_empty() {
        return Err(RinqError::DegenerateInput(
            "cannot build a residue graph from zero residues".into(),
        ));
    }
    if cutoff <= 0.0 || cutoff.is_nan() {
        return Err(RinqError::Usage(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    let mut warnings = Vec::new();
    if residues.len() < 2 {
        warnings.push("degenerate graph: fewer than 2 residues".to_string());
    }
    let mut edges = Vec::new();
    for i in 0..residues.len() {
        for j in (i + 1)..residues.len() {
            if residues[i].ca_position.distance(&residues[j].ca_position) <= cutoff {
                edges.push((i, j));
            }
        }
    }
    Ok(ResidueGraph {
        pdb_id: "UNKN".to_string(),
        nodes: residues.to_vec(),
        edges,
        cutoff,
        warnings,
    })
}

pub fn adjacency(graph: &ResidueGraph) -> AdjacencyMatrix {
    AdjacencyMatrix::from_edges(graph.n(), &graph.edges)
}

/// Normalized degree vector d̂ = d / ‖d‖₂.
pub fn degree_unit_vector(a: &AdjacencyMatrix) -> Result<Vec<f64>> {
    let d = a.degrees();
    let norm = norm2(&d);
    if norm == 0.0 {
        return Err(RinqError::DegenerateInput(
            "degree vector is all-zero (edgeless graph); d/‖d‖ is undefined".into(),
        ));
    }
    Ok(d.iter().map(|x| x / norm).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = RinqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "json" => Ok(ExportFormat::Json),
            other => Err(RinqError::Usage(format!(
                "unknown export format {other:?} (expected dot, graphml or json)"
            ))),
        }
    }
}

/// Serialize the graph with residue labels and optional per-node scores.
/// Output ordering is deterministic: nodes by index, edges as stored.
pub fn export_graph(
    graph: &ResidueGraph,
    scores: Option<&[f64]>,
    format: ExportFormat,
) -> Result<String> {
    if let Some(s) = scores {
        if s.len() != graph.n() {
            return Err(RinqError::Usage(format!(
                "scores cover {} nodes but the graph has {}",
                s.len(),
                graph.n()
            )));
        }
    }
    Ok(match format {
        ExportFormat::Dot => export_dot(graph, scores),
        ExportFormat::GraphMl => export_graphml(graph, scores),
        ExportFormat::Json => export_json(graph, scores),
    })
}

fn export_dot(graph: &ResidueGraph, scores: Option<&[f64]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph \"{}\" {{\n", graph.pdb_id));
    for (i, node) in graph.nodes.iter().enumerate() {
        match scores {
            Some(s) => out.push_str(&format!(
                "  n{i} [label=\"{}\", score={}];\n",
                node.label(),
                fmt_f64(s[i])
            )),
            None => out.push_str(&format!("  n{i} [label=\"{}\"];\n", node.label())),
        }
    }
    for &(i, j) in &graph.edges {
        out.push_str(&format!("  n{i} -- n{j};\n"));
    }
    out.push_str("}\n");
    out
}

fn export_graphml(graph: &ResidueGraph, scores: Option<&[f64]>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    if scores.is_some() {
        out.push_str(
            "  <key id=\"score\" for=\"node\" attr.name=\"score\" attr.type=\"double\"/>\n",
        );
    }
    out.push_str(&format!(
        "  <graph id=\"{}\" edgedefault=\"undirected\">\n",
        graph.pdb_id
    ));
    for (i, node) in graph.nodes.iter().enumerate() {
        out.push_str(&format!("    <node id=\"n{i}\">\n"));
        out.push_str(&format!(
            "      <data key=\"label\">{}</data>\n",
            node.label()
        ));
        if let Some(s) = scores {
            out.push_str(&format!(
                "      <data key=\"score\">{}</data>\n",
                fmt_f64(s[i])
            ));
        }
        out.push_str("    </node>\n");
    }
    for (k, &(i, j)) in graph.edges.iter().enumerate() {
        out.push_str(&format!(
            "    <edge id=\"e{k}\" source=\"n{i}\" target=\"n{j}\"/>\n"
        ));
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn export_json(graph: &ResidueGraph, scores: Option<&[f64]>) -> String {
    use serde_json::{json, Value};
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let mut obj = serde_json::Map::new();
            obj.insert("index".into(), json!(i));
            obj.insert("chain".into(), json!(node.chain_id.to_string()));
            obj.insert("res_seq".into(), json!(node.res_seq));
            obj.insert("res_name".into(), json!(node.res_name));
            if let Some(s) = scores {
                obj.insert("score".into(), json!(s[i]));
            }
            Value::Object(obj)
        })
        .collect();
    let edges: Vec<Value> = graph.edges.iter().map(|&(i, j)| json!([i, j])).collect();
    let doc = json!({
        "pdb_id": graph.pdb_id,
        "cutoff": graph.cutoff,
        "nodes": nodes,
        "edges": edges,
    });
    serde_json::to_string_pretty(&doc).expect("graph JSON serialization")
}

fn fmt_f64(v: f64) -> String {
    let mut s = serde_json::Number::from_f64(v)
        .map(|n| n.to_string())
        .unwrap_or_else(|| "null".to_string());
    if !s.contains('.') && !s.contains('e') && s != "null" {
        s.push_str(".0");
    }
    s
}
