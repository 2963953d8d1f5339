//! Classical centrality oracles: eigenvector centrality by power iteration
//! and Estrada centrality from the full matrix exponential.

use crate::error::{Result, RinqError};
use crate::matrix::{dot, norm2, DenseMatrix};
use crate::rin::{AdjacencyMatrix, ResidueGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Eigenvector,
    Estrada,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Eigenvector => "eigenvector",
            Measure::Estrada => "estrada",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = RinqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eigenvector" => Ok(Measure::Eigenvector),
            "estrada" => Ok(Measure::Estrada),
            other => Err(RinqError::Usage(format!(
                "unknown measure {other:?} (expected eigenvector or estrada)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CentralityScores {
    pub measure: Measure,
    /// Score per node index.
    pub values: Vec<f64>,
    /// Principal-eigenvalue estimate; populated for eigenvector centrality.
    pub eigenvalue_estimate: Option<f64>,
    pub warnings: Vec<String>,
}

fn is_connected(a: &AdjacencyMatrix) -> bool {
    let n = a.n();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for (w, &value) in a.matrix().row(v).iter().enumerate() {
            if value != 0.0 && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Principal eigenvector of A by normalized power iteration.
///
/// Iterates the shifted operator x ← (x + Ax)/‖x + Ax‖₂ from the uniform
/// start vector; the shift keeps bipartite graphs (eigenvalues ±λ₁) from
/// oscillating, matching the convention of the reference graph library this
/// implementation is compared against. Convergence is per-node:
/// ‖xᵏ⁺¹ − xᵏ‖₁ < n·tol.
pub fn eigenvector_centrality(
    a: &AdjacencyMatrix,
    max_iter: usize,
    tol: f64,
) -> Result<CentralityScores> {
    let n = a.n();
    if n == 0 {
        return Err(RinqError::DegenerateInput(
            "eigenvector centrality of an empty graph".into(),
        ));
    }
    if a.edge_count() == 0 {
        return Err(RinqError::DegenerateInput(
            "eigenvector centrality of an edgeless graph".into(),
        ));
    }

    let mut warnings = Vec::new();
    if !is_connected(a) {
        warnings.push(
            "graph disconnected: scores reflect the dominant component, zeros elsewhere"
                .to_string(),
        );
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let ax = a.matrix().matvec(&x);
        let y: Vec<f64> = x.iter().zip(&ax).map(|(xi, axi)| xi + axi).collect();
        let norm = norm2(&y);
        if norm == 0.0 {
            return Err(RinqError::DegenerateInput(
                "power iteration collapsed to the zero vector".into(),
            ));
        }
        let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if residual < n as f64 * tol {
            let values: Vec<f64> = x.iter().map(|v| v.abs()).collect();
            let eigenvalue = dot(&values, &a.matrix().matvec(&values));
            return Ok(CentralityScores {
                measure: Measure::Eigenvector,
                values,
                eigenvalue_estimate: Some(eigenvalue),
                warnings,
            });
        }
    }
    Err(RinqError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// exp(A) by scaling-and-squaring of the Taylor series: scale by 2ˢ with
/// s = max(0, ⌈log₂‖A‖_F⌉), sum terms until the next one is below 10⁻¹²
/// relative to the partial sum, then square s times. Output is symmetrized.
pub fn matrix_exponential(a: &AdjacencyMatrix) -> DenseMatrix {
    exp_dense(a.matrix())
}

pub(crate) fn exp_dense(m: &DenseMatrix) -> DenseMatrix {
    let n = m.n();
    let fnorm = m.frobenius_norm();
    let s: u32 = if fnorm <= 1.0 {
        0
    } else {
        fnorm.log2().ceil() as u32
    };
    let mut scaled = m.clone();
    scaled.scale(1.0 / 2f64.powi(s as i32));

    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..200 {
        term = term.matmul(&scaled);
        term.scale(1.0 / k as f64);
        sum.add_scaled(&term, 1.0);
        if term.frobenius_norm() < 1e-12 * sum.frobenius_norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    debug_assert!(sum.max_abs_asymmetry() < 1e-9);
    sum.symmetrize();
    sum
}

/// Estrada (subgraph) centrality: the diagonal of exp(A).
pub fn estrada_centrality(a: &AdjacencyMatrix) -> CentralityScores {
    let e = matrix_exponential(a);
    let values = (0..a.n()).map(|i| e.get(i, i)).collect();
    CentralityScores {
        measure: Measure::Estrada,
        values,
        eigenvalue_estimate: None,
        warnings: Vec::new(),
    }
}

/// The tau highest-scoring node indices, descending by score with ties
/// broken by ascending index.
pub fn top_tau(scores: &CentralityScores, tau: usize) -> Result<Vec<usize>> {
    let n = scores.values.len();
    if tau < 1 || tau > n {
        return Err(RinqError::Usage(format!(
            "tau must be in 1..={n}, got {tau}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        scores.values[j]
            .total_cmp(&scores.values[i])
            .then(i.cmp(&j))
    });
    order.truncate(tau);
    Ok(order)
}

/// CSV serialization: `index,chain,res_seq,res_name,score`, one row per node.
pub fn scores_to_csv(scores: &CentralityScores, graph: &ResidueGraph) -> String {
    let mut out = String::from("index,chain,res_seq,res_name,score\n");
    for (i, node) in graph.nodes.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{}\n",
            node.chain_id, node.res_seq, node.res_name, scores.values[i]
        ));
    }
    out
}

pub fn scores_to_json(scores: &CentralityScores, graph: &ResidueGraph) -> String {
    use serde_json::{json, Value};
    let rows: Vec<Value> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            json!({
                "index": i,
                "chain": node.chain_id.to_string(),
                "res_seq": node.res_seq,
                "res_name": node.res_name,
                "score": scores.values[i],
            })
        })
        .collect();
    let doc = json!({
        "measure": scores.measure.as_str(),
        "eigenvalue_estimate": scores.eigenvalue_estimate,
        "warnings": scores.warnings,
        "scores": rows,
    });
    serde_json::to_string_pretty(&doc).expect("score JSON serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn complete(n: usize) -> AdjacencyMatrix {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        AdjacencyMatrix::from_edges(n, &edges)
    }

    #[test]
    fn k4_is_exactly_half() {
        let scores = eigenvector_centrality(&complete(4), 1000, 1e-6).unwrap();
        for v in &scores.values {
            assert_eq!(*v, 0.5);
        }
        assert!((scores.eigenvalue_estimate.unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn p3_matches_exact_eigenvector() {
        let p3 = AdjacencyMatrix::from_edges(3, &[(0, 1), (1, 2)]);
        let scores = eigenvector_centrality(&p3, 1000, 1e-6).unwrap();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (v, e) in scores.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-5, "{v} vs {e}");
        }
        assert!((scores.eigenvalue_estimate.unwrap() - 2f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn edgeless_graph_is_degenerate() {
        let a = AdjacencyMatrix::from_edges(3, &[]);
        assert!(matches!(
            eigenvector_centrality(&a, 1000, 1e-6),
            Err(RinqError::DegenerateInput(_))
        ));
    }

    #[test]
    fn non_convergence_reports_residual() {
        let p3 = AdjacencyMatrix::from_edges(3, &[(0, 1), (1, 2)]);
        match eigenvector_centrality(&p3, 1, 1e-15) {
            Err(RinqError::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual.is_finite());
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn disconnected_graph_warns() {
        let a = AdjacencyMatrix::from_edges(4, &[(0, 1), (2, 3)]);
        let scores = eigenvector_centrality(&a, 1000, 1e-6).unwrap();
        assert!(!scores.warnings.is_empty());
    }

    #[test]
    fn zero_matrix_exponential_is_identity() {
        let a = AdjacencyMatrix::from_edges(3, &[]);
        let e = matrix_exponential(&a);
        assert_eq!(e, DenseMatrix::identity(3));
    }

    #[test]
    fn k2_exponential_closed_form() {
        let a = AdjacencyMatrix::from_edges(2, &[(0, 1)]);
        let e = matrix_exponential(&a);
        let cosh1 = 1f64.cosh();
        let sinh1 = 1f64.sinh();
        assert!((e.get(0, 0) - cosh1).abs() < 1e-12);
        assert!((e.get(1, 1) - cosh1).abs() < 1e-12);
        assert!((e.get(0, 1) - sinh1).abs() < 1e-12);
    }

    #[test]
    fn isolated_node_estrada_is_one() {
        let a = AdjacencyMatrix::from_edges(1, &[]);
        let scores = estrada_centrality(&a);
        assert_eq!(scores.values, vec![1.0]);
    }

    #[test]
    fn k2_estrada_is_cosh() {
        let a = AdjacencyMatrix::from_edges(2, &[(0, 1)]);
        let scores = estrada_centrality(&a);
        for v in &scores.values {
            assert!((v - 1f64.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn estrada_at_least_one_on_simple_graphs() {
        let a = AdjacencyMatrix::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        for v in estrada_centrality(&a).values {
            assert!(v >= 1.0);
        }
    }

    #[test]
    fn score_serializations_cover_every_node() {
        use crate::pdb::{ResidueRecord, Vec3};
        use crate::rin::build_rin;
        let residues: Vec<ResidueRecord> = (0..3)
            .map(|i| ResidueRecord {
                chain_id: 'A',
                res_seq: i + 1,
                insertion_code: None,
                res_name: "GLY".to_string(),
                ca_position: Vec3::new(4.0 * i as f64, 0.0, 0.0),
            })
            .collect();
        let graph = build_rin(&residues, 8.0).unwrap();
        let scores = eigenvector_centrality(&crate::rin::adjacency(&graph), 1000, 1e-6).unwrap();
        let csv = scores_to_csv(&scores, &graph);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("index,chain,res_seq,res_name,score\n"));
        let doc: serde_json::Value = serde_json::from_str(&scores_to_json(&scores, &graph)).unwrap();
        assert_eq!(doc["measure"], "eigenvector");
        assert_eq!(doc["scores"].as_array().unwrap().len(), 3);
        assert!(doc["eigenvalue_estimate"].is_number());
    }

    #[test]
    fn top_tau_ordering_and_ties() {
        let scores = CentralityScores {
            measure: Measure::Eigenvector,
            values: vec![0.5, 0.5, 0.1],
            eigenvalue_estimate: None,
            warnings: Vec::new(),
        };
        assert_eq!(top_tau(&scores, 1).unwrap(), vec![0]);
        assert_eq!(top_tau(&scores, 3).unwrap(), vec![0, 1, 2]);
        assert!(matches!(top_tau(&scores, 0), Err(RinqError::Usage(_))));
        assert!(matches!(top_tau(&scores, 4), Err(RinqError::Usage(_))));
    }

    /// Series trace: tr(exp A) = Σ_k tr(Aᵏ)/k!, summed independently of the
    /// scaling-and-squaring route.
    fn trace_by_series(a: &AdjacencyMatrix) -> f64 {
        // Odd-power traces vanish on bipartite graphs, so no early break on
        // a single tiny term; 80 terms is far past convergence for n ≤ 12.
        let n = a.n();
        let mut total = n as f64;
        let mut power = DenseMatrix::identity(n);
        let mut factorial = 1.0;
        for k in 1..80 {
            power = power.matmul(a.matrix());
            factorial *= k as f64;
            total += power.trace() / factorial;
        }
        total
    }

    proptest! {
        #[test]
        fn estrada_sum_equals_series_trace(
            edge_bits in proptest::collection::vec(any::<bool>(), 66),
        ) {
            // n = 12 has 66 unordered pairs
            let n = 12;
            let mut edges = Vec::new();
            let mut idx = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if edge_bits[idx] {
                        edges.push((i, j));
                    }
                    idx += 1;
                }
            }
            let a = AdjacencyMatrix::from_edges(n, &edges);
            let total: f64 = estrada_centrality(&a).values.iter().sum();
            let oracle = trace_by_series(&a);
            prop_assert!((total - oracle).abs() < 1e-6, "{total} vs {oracle}");
        }

        #[test]
        fn permutation_equivariance(
            edge_bits in proptest::collection::vec(any::<bool>(), 28),
            seed in 0u64..1000,
        ) {
            let n = 8;
            let mut edges = Vec::new();
            let mut idx = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if edge_bits[idx] {
                        edges.push((i, j));
                    }
                    idx += 1;
                }
            }
            prop_assume!(!edges.is_empty());
            // simple seeded permutation
            let mut perm: Vec<usize> = (0..n).collect();
            let mut state = seed.wrapping_add(1);
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                perm.swap(i, j);
            }
            let permuted: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(i, j)| {
                    let (a, b) = (perm[i], perm[j]);
                    if a < b { (a, b) } else { (b, a) }
                })
                .collect();
            let a1 = AdjacencyMatrix::from_edges(n, &edges);
            let a2 = AdjacencyMatrix::from_edges(n, &permuted);
            let s1 = estrada_centrality(&a1).values;
            let s2 = estrada_centrality(&a2).values;
            for i in 0..n {
                prop_assert!((s1[i] - s2[perm[i]]).abs() < 1e-9);
            }
        }
    }
}
