//! Integration tests over the vendored structure fixtures and the fetch
//! cache, exercising the parse → graph → score pipeline end to end.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};

use rinq_core::{
    adjacency, build_rin, eigenvector_centrality, estrada_centrality, export_graph, extract_ca,
    parse_pdb, top_tau, ExportFormat,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/pdb")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing fixture {path:?}: {e}"))
}

fn graph_of(name: &str) -> rinq_core::ResidueGraph {
    let models = parse_pdb(&fixture(name)).unwrap();
    let residues = extract_ca(&models[0], None);
    build_rin(&residues, 8.0).unwrap()
}

#[test]
fn fixture_1xy1_has_nine_residues_and_23_edges() {
    let models = parse_pdb(&fixture("1XY1.pdb")).unwrap();
    assert_eq!(models.len(), 1);
    let residues = extract_ca(&models[0], None);
    assert_eq!(residues.len(), 9);
    let graph = build_rin(&residues, 8.0).unwrap();
    assert_eq!(graph.edge_count(), 23);
    // ‖A‖_F = √(2|E|)
    let a = adjacency(&graph);
    assert!((a.matrix().frobenius_norm() - (2.0 * 23.0f64).sqrt()).abs() < 1e-9);
}

#[test]
fn fixture_1xy1_eigenvector_ranking() {
    let graph = graph_of("1XY1.pdb");
    let a = adjacency(&graph);
    let scores = eigenvector_centrality(&a, 1000, 1e-6).unwrap();
    // residue labels are res_seq = index + 1; ranking 6 > 5 > 1 > {2,3} > 7 > 4 > 8 > 9
    let order = top_tau(&scores, 9).unwrap();
    let res_seq: Vec<i32> = order.iter().map(|&i| graph.nodes[i].res_seq).collect();
    assert_eq!(res_seq, vec![6, 5, 1, 2, 3, 7, 4, 8, 9]);
}

#[test]
fn fixture_1ubq_is_the_reference_crystal() {
    let graph = graph_of("1UBQ.pdb");
    assert_eq!(graph.n(), 76);
    let a = adjacency(&graph);
    let ec = eigenvector_centrality(&a, 1000, 1e-6).unwrap();
    let top: Vec<i32> = top_tau(&ec, 5)
        .unwrap()
        .iter()
        .map(|&i| graph.nodes[i].res_seq)
        .collect();
    assert_eq!(top, vec![5, 67, 4, 3, 69]);
    let es = estrada_centrality(&a);
    let top: Vec<i32> = top_tau(&es, 5)
        .unwrap()
        .iter()
        .map(|&i| graph.nodes[i].res_seq)
        .collect();
    assert_eq!(top, vec![5, 4, 23, 3, 6]);
}

#[test]
fn all_twelve_fixtures_parse_and_build() {
    let expected_n = [
        ("1A7F.pdb", 29),
        ("1GCN.pdb", 29),
        ("1JL9.pdb", 51),
        ("1Q71.pdb", 21),
        ("1UBQ.pdb", 76),
        ("1XY1.pdb", 9),
        ("2K6O.pdb", 37),
        ("2MLT.pdb", 26),
        ("2N08.pdb", 11),
        ("4D5M.pdb", 10),
        ("6A5J.pdb", 13),
        ("6RQS.pdb", 16),
    ];
    for (name, n) in expected_n {
        let graph = graph_of(name);
        assert_eq!(graph.n(), n, "{name}");
        assert!(graph.is_connected(), "{name} should be connected");
    }
}

#[test]
fn export_1xy1_with_scores_carries_nine_score_attributes() {
    let mut graph = graph_of("1XY1.pdb");
    graph.pdb_id = "1XY1".into();
    let a = adjacency(&graph);
    let scores = eigenvector_centrality(&a, 1000, 1e-6).unwrap();
    let json = export_graph(&graph, Some(&scores.values), ExportFormat::Json).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let nodes = doc["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 9);
    for node in nodes {
        assert!(node["score"].is_number());
    }
    let graphml = export_graph(&graph, Some(&scores.values), ExportFormat::GraphMl).unwrap();
    assert_eq!(graphml.matches("<data key=\"score\">").count(), 9);
}

#[test]
fn round_trip_every_residue_comes_from_an_atom_line() {
    let text = fixture("6A5J.pdb");
    let models = parse_pdb(&text).unwrap();
    let residues = extract_ca(&models[0], None);
    for r in &residues {
        let found = text.lines().any(|line| {
            line.starts_with("ATOM")
                && line.len() >= 54
                && line[21..22].starts_with(r.chain_id)
                && line[22..26].trim() == r.res_seq.to_string()
                && line[17..20].trim() == r.res_name
        });
        assert!(found, "residue {r} not backed by an ATOM line");
    }
}

/// Serve exactly one HTTP response, then close.
fn serve_once(body: String) -> (String, std::thread::JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut buf = [0u8; 4096];
        let _ = stream.read(&mut buf);
        let response = format!(
            "HTTP/1.1 200 OK\r\ncontent-type: text/plain\r\ncontent-length: {}\r\n\r\n{}",
            body.len(),
            body
        );
        stream.write_all(response.as_bytes()).unwrap();
    });
    (format!("http://{addr}"), handle)
}

#[test]
fn fetch_cold_cache_downloads_and_persists() {
    let body = fixture("1XY1.pdb");
    let (base, handle) = serve_once(body.clone());
    let dir = tempfile::tempdir().unwrap();
    let got = rinq_core::pdb::fetch_pdb_from(&base, "1xy1", dir.path()).unwrap();
    handle.join().unwrap();
    assert_eq!(got, body);
    // persisted under the uppercase id; a second call must not hit the
    // (now closed) server
    assert!(dir.path().join("1XY1.pdb").exists());
    let again = rinq_core::pdb::fetch_pdb_from(&base, "1XY1", dir.path()).unwrap();
    assert_eq!(again, body);
}

#[test]
fn fetch_http_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let err = rinq_core::pdb::fetch_pdb_from("http://127.0.0.1:1", "1xy1", dir.path());
    assert!(matches!(err, Err(rinq_core::RinqError::Fetch { .. })));
}

#[test]
fn chain_filter_isolates_chains() {
    // two-chain toy structure: chain A is a close pair, chain B is far away
    let text = "\
ATOM      1  CA  ALA A   1       0.000   0.000   0.000  1.00  0.00           C
ATOM      2  CA  ALA A   2       5.000   0.000   0.000  1.00  0.00           C
ATOM      3  CA  ALA B   1     100.000   0.000   0.000  1.00  0.00           C
ATOM      4  CA  ALA B   2     105.000   0.000   0.000  1.00  0.00           C
";
    let models = parse_pdb(text).unwrap();
    let all = extract_ca(&models[0], None);
    assert_eq!(all.len(), 4);
    let only_a = extract_ca(&models[0], Some('A'));
    assert_eq!(only_a.len(), 2);
    let g = build_rin(&only_a, 8.0).unwrap();
    assert_eq!(g.edge_count(), 1);
}

#[test]
fn estrada_top_sets_match_eigenvector_for_compact_peptides() {
    // same top-5 set under both measures for these graphs
    for name in ["2N08.pdb", "6A5J.pdb"] {
        let graph = graph_of(name);
        let a = adjacency(&graph);
        let ec: BTreeSet<usize> = top_tau(&eigenvector_centrality(&a, 1000, 1e-6).unwrap(), 5)
            .unwrap()
            .into_iter()
            .collect();
        let es: BTreeSet<usize> = top_tau(&estrada_centrality(&a), 5)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(ec, es, "{name}");
    }
}

/// Fixture graphs must sit clear of the 8 Å boundary so rounding in the
/// text format can never flip an edge.
#[test]
fn fixtures_avoid_the_cutoff_boundary() {
    for name in [
        "1XY1.pdb", "2N08.pdb", "4D5M.pdb", "6A5J.pdb", "6RQS.pdb", "1Q71.pdb", "2MLT.pdb",
        "1GCN.pdb", "1A7F.pdb",
    ] {
        let models = parse_pdb(&fixture(name)).unwrap();
        let residues = extract_ca(&models[0], None);
        for i in 0..residues.len() {
            for j in (i + 1)..residues.len() {
                let d = residues[i].ca_position.distance(&residues[j].ca_position);
                assert!(
                    !(7.95..=8.05).contains(&d),
                    "{name}: pair ({i},{j}) sits at {d:.3} Å, inside the guard band"
                );
            }
        }
    }
}

#[test]
fn fixtures_dir_is_where_tests_expect() {
    assert!(Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/pdb/1XY1.pdb")
        .exists());
}
