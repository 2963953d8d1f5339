//! Comparison of QUBO-selected residue sets against classical rankings:
//! Jaccard agreement, τ-sweep ranking reconstruction, and end-to-end report
//! assembly for one protein.

use std::collections::BTreeSet;

use serde_json::json;

use crate::annealer::{anneal, filter_valid, AnnealSchedule};
use crate::centrality::{
    eigenvector_centrality, estrada_centrality, top_tau, CentralityScores, Measure,
};
use crate::error::{Result, RinqError};
use crate::pdb::{extract_ca, parse_pdb};
use crate::qubo::{
    build_eigenvector_qubo, build_eigenvector_qubo_cubic, build_eigenvector_qubo_mixed,
    build_estrada_qubo, default_penalties, Formulation, QuboMatrix,
};
use crate::rin::{adjacency, build_rin, AdjacencyMatrix, DEFAULT_CUTOFF};

/// |A∩B| / |A∪B|. Undefined when both sets are empty.
pub fn jaccard(set_a: &BTreeSet<usize>, set_b: &BTreeSet<usize>) -> Result<f64> {
    if set_a.is_empty() && set_b.is_empty() {
        return Err(RinqError::DegenerateInput(
            "jaccard of two empty sets is undefined".into(),
        ));
    }
    let intersection = set_a.intersection(set_b).count() as f64;
    let union = set_a.union(set_b).count() as f64;
    Ok(intersection / union)
}

fn build_qubo(
    a: &AdjacencyMatrix,
    formulation: Formulation,
    tau: usize,
    p0: f64,
    p1: f64,
) -> Result<QuboMatrix> {
    match formulation {
        Formulation::EigenvectorSimple => build_eigenvector_qubo(a, tau, p0, p1),
        Formulation::EigenvectorCubic => build_eigenvector_qubo_cubic(a, tau, p0, p1),
        Formulation::EigenvectorMixed => build_eigenvector_qubo_mixed(a, tau, p0, p1),
        Formulation::Estrada => build_estrada_qubo(a, tau, p0, p1),
    }
}

fn classical_for(a: &AdjacencyMatrix, formulation: Formulation) -> Result<CentralityScores> {
    match formulation {
        Formulation::Estrada => Ok(estrada_centrality(a)),
        _ => eigenvector_centrality(a, 1000, 1e-6),
    }
}

/// Solve the QUBO at τ = 1..tau_max and read a ranking off the nested
/// selections: the rank-τ node is the element of S_τ \ S_{τ−1}. Non-nested
/// levels are flagged and their new elements ranked by classical score.
pub fn tau_sweep_ranking(
    a: &AdjacencyMatrix,
    formulation: Formulation,
    tau_max: usize,
    p0: f64,
    p1: f64,
    schedule: &AnnealSchedule,
) -> Result<(Vec<usize>, Vec<String>)> {
    if tau_max < 1 || tau_max > a.n() {
        return Err(RinqError::Usage(format!(
            "tau_max must be in 1..={}, got {tau_max}",
            a.n()
        )));
    }
    let classical = classical_for(a, formulation)?;
    let mut ranking: Vec<usize> = Vec::new();
    let mut warnings = Vec::new();
    let mut previous: BTreeSet<usize> = BTreeSet::new();
    for tau in 1..=tau_max {
        let q = build_qubo(a, formulation, tau, p0, p1)
            .map_err(|e| RinqError::Sweep { tau, source: Box::new(e) })?;
        let set = anneal(&q, schedule)
            .map_err(|e| RinqError::Sweep { tau, source: Box::new(e) })?;
        let best = filter_valid(&set, tau).ok_or(RinqError::Sweep {
            tau,
            source: Box::new(RinqError::NoValidSample { tau }),
        })?;
        let selected: BTreeSet<usize> = best.selected_indices().into_iter().collect();
        let mut fresh: Vec<usize> = selected.difference(&previous).copied().collect();
        if fresh.len() != 1 {
            warnings.push(format!("non-nested sweep at tau={tau}"));
            fresh.sort_by(|&i, &j| {
                classical.values[j]
                    .total_cmp(&classical.values[i])
                    .then(i.cmp(&j))
            });
        }
        ranking.extend(fresh);
        previous = selected;
    }
    Ok((ranking, warnings))
}

/// Everything `compare_run` needs besides the structure itself.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub chain: Option<char>,
    pub model: Option<u32>,
    pub cutoff: f64,
    pub measure: Measure,
    pub formulation: Formulation,
    pub tau: usize,
    pub p0: Option<f64>,
    pub p1: Option<f64>,
    pub schedule: AnnealSchedule,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            chain: None,
            model: None,
            cutoff: DEFAULT_CUTOFF,
            measure: Measure::Eigenvector,
            formulation: Formulation::EigenvectorSimple,
            tau: 5,
            p0: None,
            p1: None,
            schedule: AnnealSchedule::default(),
        }
    }
}

impl PipelineConfig {
    /// The formulation actually used: the Estrada measure forces the
    /// Estrada QUBO regardless of the eigenvector formulation choice.
    pub fn effective_formulation(&self) -> Formulation {
        match self.measure {
            Measure::Estrada => Formulation::Estrada,
            Measure::Eigenvector => self.formulation,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankedNode {
    pub index: usize,
    pub label: String,
    pub res_seq: i32,
    pub score: f64,
}

/// Outcome of one end-to-end pipeline run.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub pdb_id: String,
    pub n: usize,
    pub edge_count: usize,
    pub cutoff: f64,
    pub measure: Measure,
    pub formulation: Formulation,
    pub tau: usize,
    pub p0: f64,
    pub p1: f64,
    pub classical_top: Vec<RankedNode>,
    pub qubo_top_indices: Vec<usize>,
    pub qubo_top_labels: Vec<String>,
    pub qubo_bits: String,
    pub qubo_energy: f64,
    pub jaccard: f64,
    pub schedule: AnnealSchedule,
    pub warnings: Vec<String>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

/// Run the full pipeline on already-loaded PDB text: parse → extract →
/// graph → classical scores → QUBO → anneal → filter → Jaccard.
/// Deterministic given the schedule seed.
pub fn compare_run(pdb_id: &str, pdb_text: &str, cfg: &PipelineConfig) -> Result<AnalysisReport> {
    let models = stage("parse", parse_pdb(pdb_text))?;
    let model = match cfg.model {
        Some(number) => stage(
            "parse",
            models
                .iter()
                .find(|m| m.model_number == number)
                .ok_or_else(|| {
                    RinqError::DegenerateInput(format!("model {number} not present in structure"))
                }),
        )?,
        None => &models[0],
    };
    let residues = extract_ca(model, cfg.chain);
    let mut graph = stage("rin", build_rin(&residues, cfg.cutoff))?;
    graph.pdb_id = pdb_id.to_string();
    let a = adjacency(&graph);
    let mut warnings = graph.warnings.clone();

    let classical = stage("classical", classical_for(&a, cfg.effective_formulation()))?;
    warnings.extend(classical.warnings.iter().cloned());
    let classical_indices = stage("classical", top_tau(&classical, cfg.tau))?;

    let (default_p0, default_p1) = default_penalties(a.n());
    let p0 = cfg.p0.unwrap_or(default_p0);
    let p1 = cfg.p1.unwrap_or(default_p1);
    let formulation = cfg.effective_formulation();
    let q = stage("qubo", build_qubo(&a, formulation, cfg.tau, p0, p1))?;
    let set = stage("anneal", anneal(&q, &cfg.schedule))?;
    let best = stage(
        "filter",
        filter_valid(&set, cfg.tau).ok_or(RinqError::NoValidSample { tau: cfg.tau }),
    )?;

    let classical_set: BTreeSet<usize> = classical_indices.iter().copied().collect();
    let qubo_set: BTreeSet<usize> = best.selected_indices().into_iter().collect();
    let agreement = stage("jaccard", jaccard(&classical_set, &qubo_set))?;

    Ok(AnalysisReport {
        pdb_id: pdb_id.to_string(),
        n: graph.n(),
        edge_count: graph.edge_count(),
        cutoff: cfg.cutoff,
        measure: cfg.measure,
        formulation,
        tau: cfg.tau,
        p0,
        p1,
        classical_top: classical_indices
            .iter()
            .map(|&i| RankedNode {
                index: i,
                label: graph.nodes[i].label(),
                res_seq: graph.nodes[i].res_seq,
                score: classical.values[i],
            })
            .collect(),
        qubo_top_indices: best.selected_indices(),
        qubo_top_labels: best
            .selected_indices()
            .iter()
            .map(|&i| graph.nodes[i].label())
            .collect(),
        qubo_bits: best.bitstring(),
        qubo_energy: best.energy,
        jaccard: agreement,
        schedule: cfg.schedule.clone(),
        warnings,
    })
}

impl AnalysisReport {
    /// Canonical JSON: keys are emitted sorted, so identical runs are
    /// byte-identical.
    pub fn to_json(&self) -> String {
        let classical: Vec<serde_json::Value> = self
            .classical_top
            .iter()
            .map(|r| {
                json!({
                    "index": r.index,
                    "label": r.label,
                    "res_seq": r.res_seq,
                    "score": r.score,
                })
            })
            .collect();
        let doc = json!({
            "pdb_id": self.pdb_id,
            "n": self.n,
            "edge_count": self.edge_count,
            "cutoff": self.cutoff,
            "measure": self.measure.as_str(),
            "formulation": self.formulation.as_str(),
            "tau": self.tau,
            "p0": self.p0,
            "p1": self.p1,
            "classical_top": classical,
            "qubo_top": {
                "indices": self.qubo_top_indices,
                "labels": self.qubo_top_labels,
                "bits": self.qubo_bits,
                "energy": self.qubo_energy,
            },
            "jaccard": self.jaccard,
            "schedule": self.schedule.to_json_value(),
            "warnings": self.warnings,
        });
        serde_json::to_string_pretty(&doc).expect("report JSON serialization")
    }

    /// Human-readable summary table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{}  n={}  edges={}  cutoff={} A\n",
            self.pdb_id, self.n, self.edge_count, self.cutoff
        ));
        out.push_str(&format!(
            "measure={}  formulation={}  tau={}  p0={:.6}  p1={}  seed={}\n",
            self.measure.as_str(),
            self.formulation.as_str(),
            self.tau,
            self.p0,
            self.p1,
            self.schedule.seed
        ));
        out.push_str("classical top:\n");
        for r in &self.classical_top {
            out.push_str(&format!(
                "  bit {:>3}  {:<12} {:.4}\n",
                r.index, r.label, r.score
            ));
        }
        out.push_str(&format!(
            "qubo selection: bits=[{}] labels=[{}] energy={:.4}\n",
            join(&self.qubo_top_indices, ", "),
            self.qubo_top_labels.join(", "),
            self.qubo_energy
        ));
        out.push_str(&format!("jaccard: {:.3}\n", self.jaccard));
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }

    pub fn csv_header() -> &'static str {
        "pdb_id,n,edge_count,measure,formulation,tau,seed,classical_top,qubo_top,energy,jaccard,warnings"
    }

    /// One corpus CSV row; residue lists are res_seq values joined by ';'.
    pub fn to_csv_row(&self) -> String {
        let classical: Vec<i32> = self.classical_top.iter().map(|r| r.res_seq).collect();
        let qubo: Vec<String> = self.qubo_top_labels
            .iter()
            .map(|l| l.split(':').nth(1).unwrap_or(l).to_string())
            .collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{:.4},{:.3},{}",
            self.pdb_id,
            self.n,
            self.edge_count,
            self.measure.as_str(),
            self.formulation.as_str(),
            self.tau,
            self.schedule.seed,
            join(&classical, ";"),
            qubo.join(";"),
            self.qubo_energy,
            self.jaccard,
            self.warnings.len()
        )
    }
}

fn join<T: std::fmt::Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}
