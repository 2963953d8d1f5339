//! Residue interaction network centrality via QUBO optimization.
//!
//! The pipeline: parse a PDB structure, extract Cα coordinates, build the
//! 8 Å contact graph, then either score residues classically (power-iteration
//! eigenvector centrality, matrix-exponential Estrada centrality) or encode
//! the top-τ selection as a QUBO and solve it by Metropolis simulated
//! annealing. An exhaustive brute-force solver and Jaccard comparison tooling
//! validate the annealed selections against the classical rankings.
//!
//! - [`pdb`] — PDB parsing, Cα extraction, cached structure fetching
//! - [`rin`] — contact graph construction, adjacency matrix, graph export
//! - [`centrality`] — classical eigenvector / Estrada scores
//! - [`qubo`] — QUBO matrix builders, penalties, truncated expm + error bound
//! - [`annealer`] — simulated annealing, constraint filtering, brute force
//! - [`analysis`] — Jaccard agreement, τ-sweep ranking, end-to-end reports

pub mod analysis;
pub mod annealer;
pub mod centrality;
mod error;
pub mod matrix;
pub mod pdb;
pub mod qubo;
pub mod rin;

pub use analysis::{compare_run, jaccard, tau_sweep_ranking, AnalysisReport, PipelineConfig};
pub use annealer::{anneal, brute_force_solve, filter_valid, AnnealSchedule, Interpolation, Sample, SampleSet};
pub use centrality::{eigenvector_centrality, estrada_centrality, matrix_exponential, top_tau, CentralityScores, Measure};
pub use error::{Result, RinqError};
pub use matrix::DenseMatrix;
pub use pdb::{extract_ca, fetch_pdb, parse_pdb, ResidueRecord, StructureModel};
pub use qubo::{
    build_eigenvector_qubo, build_eigenvector_qubo_cubic, build_eigenvector_qubo_mixed,
    build_estrada_qubo, constraint_matrix, default_penalties, qubo_energy, truncated_expm,
    truncation_error_bound, ConstraintMatrix, Formulation, QuboMatrix,
};
pub use rin::{adjacency, build_rin, degree_unit_vector, export_graph, AdjacencyMatrix, ExportFormat, ResidueGraph};
