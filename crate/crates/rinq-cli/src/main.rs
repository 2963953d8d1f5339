//! `rinq` — residue interaction network centrality via QUBO annealing.
//!
//! Subcommands map onto the pipeline stages: `fetch` (structure download +
//! cache), `graph` (contact network export), `centrality` (classical
//! scores), `solve` (QUBO + annealer), `compare` (full report), `corpus`
//! (compare over a manifest of proteins).
//!
//! Exit codes: 0 success, 1 usage error, 2 pipeline error, 3 no valid
//! sample satisfied the τ-cardinality constraint.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use rinq_core::{
    adjacency, anneal, build_rin, compare_run, default_penalties, eigenvector_centrality,
    estrada_centrality, export_graph, extract_ca, filter_valid, parse_pdb, AnalysisReport,
    AnnealSchedule, ExportFormat, Formulation, Measure, PipelineConfig, Result, RinqError,
};

const CACHE_DIR_ENV: &str = "RINQ_CACHE_DIR";

#[derive(Parser)]
#[command(name = "rinq", version, about = "Top-τ central residues in protein contact networks by QUBO annealing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct StructureOpts {
    /// PDB id (fetched through the cache) or path to a PDB file
    input: String,

    /// Restrict extraction to one chain
    #[arg(long)]
    chain: Option<char>,

    /// Model number to use (default: first model in the file)
    #[arg(long)]
    model: Option<u32>,

    /// Contact distance cutoff in Å
    #[arg(long, default_value_t = 8.0)]
    cutoff: f64,

    /// Structure cache directory (default: $RINQ_CACHE_DIR or ./.rinq-cache)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ScheduleOpts {
    /// Master seed for the annealer's per-read substreams
    #[arg(long, default_value_t = rinq_core::annealer::DEFAULT_SEED)]
    seed: u64,

    /// Independent annealing trajectories
    #[arg(long, default_value_t = 10_000)]
    reads: u32,

    /// Sweeps per read
    #[arg(long, default_value_t = 1000)]
    sweeps: u32,

    #[arg(long, default_value_t = 0.1)]
    beta_min: f64,

    #[arg(long, default_value_t = 4.0)]
    beta_max: f64,

    /// β interpolation across sweeps: geometric or linear
    #[arg(long, default_value = "geometric")]
    interpolation: String,
}

impl ScheduleOpts {
    fn schedule(&self) -> Result<AnnealSchedule> {
        let schedule = AnnealSchedule {
            beta_min: self.beta_min,
            beta_max: self.beta_max,
            sweeps: self.sweeps,
            reads: self.reads,
            interpolation: rinq_core::Interpolation::from_str(&self.interpolation)?,
            seed: self.seed,
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

#[derive(Args, Clone)]
struct QuboOpts {
    /// Number of central residues to select
    #[arg(long, default_value_t = 5)]
    tau: usize,

    /// Eigenvector QUBO variant: simple, cubic or mixed
    #[arg(long, default_value = "simple")]
    formulation: String,

    /// Centrality weight (default 1/√n)
    #[arg(long)]
    p0: Option<f64>,

    /// Cardinality penalty weight (default 10n)
    #[arg(long)]
    p1: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Download a PDB entry into the cache (no-op when already cached)
    Fetch {
        /// 4-character PDB identifier
        id: String,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },

    /// Build the residue interaction network and export it
    Graph {
        #[command(flatten)]
        structure: StructureOpts,

        /// Output format: dot, graphml or json
        #[arg(long, default_value = "json")]
        format: String,

        /// Attach per-node scores from this measure: eigenvector or estrada
        #[arg(long)]
        scores: Option<String>,

        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Compute classical centrality scores
    Centrality {
        #[command(flatten)]
        structure: StructureOpts,

        /// eigenvector or estrada
        #[arg(long, default_value = "eigenvector")]
        measure: String,

        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,

        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Build the QUBO, anneal it, and report the best valid sample
    Solve {
        #[command(flatten)]
        structure: StructureOpts,

        /// eigenvector or estrada
        #[arg(long, default_value = "eigenvector")]
        measure: String,

        #[command(flatten)]
        qubo: QuboOpts,

        #[command(flatten)]
        schedule: ScheduleOpts,

        /// Output format: json or text
        #[arg(long, default_value = "json")]
        format: String,

        /// Also write the constructed QUBO matrix (.csv for COO, else JSON)
        #[arg(long)]
        dump_qubo: Option<PathBuf>,

        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Full pipeline: classical ranking vs QUBO selection with Jaccard
    Compare {
        #[command(flatten)]
        structure: StructureOpts,

        /// eigenvector or estrada
        #[arg(long, default_value = "eigenvector")]
        measure: String,

        #[command(flatten)]
        qubo: QuboOpts,

        #[command(flatten)]
        schedule: ScheduleOpts,

        /// Output format: json or text
        #[arg(long, default_value = "json")]
        format: String,

        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Run compare over a manifest of proteins and emit one CSV row each
    Corpus {
        /// Text file: one PDB id or path per line, optional key=value
        /// overrides (tau, measure, formulation, seed, cutoff, chain,
        /// p0, p1, reads, sweeps)
        manifest: PathBuf,

        #[command(flatten)]
        qubo: QuboOpts,

        #[command(flatten)]
        schedule: ScheduleOpts,

        /// eigenvector or estrada (per-line override wins)
        #[arg(long, default_value = "eigenvector")]
        measure: String,

        #[arg(long, default_value_t = 8.0)]
        cutoff: f64,

        #[arg(long)]
        cache_dir: Option<PathBuf>,

        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn cache_dir_or_default(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".rinq-cache"))
}

/// Resolve an input argument to (pdb_id, file content): an existing path is
/// read directly, anything else must be a PDB id and goes through the cache.
fn resolve_input(input: &str, cache_dir: &Option<PathBuf>) -> Result<(String, String)> {
    let path = Path::new(input);
    if path.exists() {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_ascii_uppercase())
            .unwrap_or_else(|| "UNKN".to_string());
        let text = std::fs::read_to_string(path)?;
        return Ok((id, text));
    }
    if rinq_core::pdb::validate_pdb_id(input).is_ok() {
        let id = input.to_ascii_uppercase();
        let text = rinq_core::fetch_pdb(input, &cache_dir_or_default(cache_dir))?;
        return Ok((id, text));
    }
    Err(RinqError::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("{input}: not a file, and not a valid PDB id"),
    ))
    .at_stage("input"))
}

fn load_graph(opts: &StructureOpts) -> Result<rinq_core::ResidueGraph> {
    let (pdb_id, text) = resolve_input(&opts.input, &opts.cache_dir)?;
    let models = parse_pdb(&text).map_err(|e| e.at_stage("parse"))?;
    let model = match opts.model {
        Some(number) => models
            .iter()
            .find(|m| m.model_number == number)
            .ok_or_else(|| {
                RinqError::DegenerateInput(format!("model {number} not present")).at_stage("parse")
            })?,
        None => &models[0],
    };
    let residues = extract_ca(model, opts.chain);
    let mut graph = build_rin(&residues, opts.cutoff).map_err(|e| e.at_stage("rin"))?;
    graph.pdb_id = pdb_id;
    Ok(graph)
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn classical_scores(
    graph: &rinq_core::ResidueGraph,
    measure: Measure,
) -> Result<rinq_core::CentralityScores> {
    let a = adjacency(graph);
    match measure {
        Measure::Eigenvector => eigenvector_centrality(&a, 1000, 1e-6),
        Measure::Estrada => Ok(estrada_centrality(&a)),
    }
    .map_err(|e| e.at_stage("classical"))
}

fn build_qubo_for(
    a: &rinq_core::AdjacencyMatrix,
    measure: Measure,
    opts: &QuboOpts,
) -> Result<rinq_core::QuboMatrix> {
    let (dp0, dp1) = default_penalties(a.n());
    let p0 = opts.p0.unwrap_or(dp0);
    let p1 = opts.p1.unwrap_or(dp1);
    let formulation = match measure {
        Measure::Estrada => Formulation::Estrada,
        Measure::Eigenvector => Formulation::from_str(&opts.formulation)?,
    };
    match formulation {
        Formulation::EigenvectorSimple => rinq_core::build_eigenvector_qubo(a, opts.tau, p0, p1),
        Formulation::EigenvectorCubic => {
            rinq_core::build_eigenvector_qubo_cubic(a, opts.tau, p0, p1)
        }
        Formulation::EigenvectorMixed => {
            rinq_core::build_eigenvector_qubo_mixed(a, opts.tau, p0, p1)
        }
        Formulation::Estrada => rinq_core::build_estrada_qubo(a, opts.tau, p0, p1),
    }
    .map_err(|e| e.at_stage("qubo"))
}

fn pipeline_config(
    structure: &StructureOpts,
    measure: Measure,
    qubo: &QuboOpts,
    schedule: AnnealSchedule,
) -> Result<PipelineConfig> {
    Ok(PipelineConfig {
        chain: structure.chain,
        model: structure.model,
        cutoff: structure.cutoff,
        measure,
        formulation: Formulation::from_str(&qubo.formulation)?,
        tau: qubo.tau,
        p0: qubo.p0,
        p1: qubo.p1,
        schedule,
    })
}

fn run_solve(
    structure: &StructureOpts,
    measure: &str,
    qubo_opts: &QuboOpts,
    schedule_opts: &ScheduleOpts,
    format: &str,
    dump_qubo: &Option<PathBuf>,
    output: &Option<PathBuf>,
) -> Result<()> {
    let measure = Measure::from_str(measure)?;
    let schedule = schedule_opts.schedule()?;
    let graph = load_graph(structure)?;
    let a = adjacency(&graph);
    let q = build_qubo_for(&a, measure, qubo_opts)?;
    if let Some(path) = dump_qubo {
        let dump = if path.extension().is_some_and(|e| e == "csv") {
            rinq_core::qubo::qubo_to_coo_csv(&q)
        } else {
            rinq_core::qubo::qubo_to_json(&q)
        };
        std::fs::write(path, dump)?;
    }
    let set = anneal(&q, &schedule).map_err(|e| e.at_stage("anneal"))?;
    let best = filter_valid(&set, qubo_opts.tau).ok_or(RinqError::NoValidSample {
        tau: qubo_opts.tau,
    })?;
    let labels: Vec<String> = best
        .selected_indices()
        .iter()
        .map(|&i| graph.nodes[i].label())
        .collect();
    let content = match format {
        "json" => {
            let doc = serde_json::json!({
                "pdb_id": graph.pdb_id,
                "n": graph.n(),
                "edge_count": graph.edge_count(),
                "formulation": q.formulation.as_str(),
                "tau": q.tau,
                "p0": q.p0,
                "p1": q.p1,
                "schedule": schedule.to_json_value(),
                "bits": best.bitstring(),
                "indices": best.selected_indices(),
                "labels": labels,
                "energy": best.energy,
                "occurrences": best.occurrences,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("solve JSON"))
        }
        "text" => format!(
            "{} n={} {} tau={} energy={:.4} bits={} labels=[{}]\n",
            graph.pdb_id,
            graph.n(),
            q.formulation.as_str(),
            q.tau,
            best.energy,
            best.bitstring(),
            labels.join(", ")
        ),
        other => {
            return Err(RinqError::Usage(format!(
                "unknown output format {other:?} (expected json or text)"
            )))
        }
    };
    emit(output, &content)
}

fn parse_manifest_line(line: &str) -> Option<(String, Vec<(String, String)>)> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return None;
    }
    let mut parts = trimmed.split_whitespace();
    let id = parts.next()?.to_string();
    let overrides = parts
        .filter_map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect();
    Some((id, overrides))
}

#[allow(clippy::too_many_arguments)]
fn run_corpus(
    manifest: &PathBuf,
    qubo: &QuboOpts,
    schedule_opts: &ScheduleOpts,
    measure: &str,
    cutoff: f64,
    cache_dir: &Option<PathBuf>,
    output: &Option<PathBuf>,
) -> Result<()> {
    let text = std::fs::read_to_string(manifest)?;
    let entries: Vec<(String, Vec<(String, String)>)> =
        text.lines().filter_map(parse_manifest_line).collect();
    if entries.is_empty() {
        return Err(RinqError::Usage(format!(
            "manifest {} lists no proteins",
            manifest.display()
        )));
    }
    let base_schedule = schedule_opts.schedule()?;
    let base_measure = Measure::from_str(measure)?;
    let base_formulation = Formulation::from_str(&qubo.formulation)?;

    let rows: Vec<String> = entries
        .par_iter()
        .map(|(input, overrides)| -> String {
            let run_one = || -> Result<AnalysisReport> {
                let mut cfg = PipelineConfig {
                    chain: None,
                    model: None,
                    cutoff,
                    measure: base_measure,
                    formulation: base_formulation,
                    tau: qubo.tau,
                    p0: qubo.p0,
                    p1: qubo.p1,
                    schedule: base_schedule.clone(),
                };
                for (key, value) in overrides {
                    match key.as_str() {
                        "tau" => cfg.tau = value.parse().map_err(|_| bad_override(key, value))?,
                        "measure" => cfg.measure = Measure::from_str(value)?,
                        "formulation" => cfg.formulation = Formulation::from_str(value)?,
                        "seed" => {
                            cfg.schedule.seed =
                                value.parse().map_err(|_| bad_override(key, value))?
                        }
                        "reads" => {
                            cfg.schedule.reads =
                                value.parse().map_err(|_| bad_override(key, value))?
                        }
                        "sweeps" => {
                            cfg.schedule.sweeps =
                                value.parse().map_err(|_| bad_override(key, value))?
                        }
                        "cutoff" => {
                            cfg.cutoff = value.parse().map_err(|_| bad_override(key, value))?
                        }
                        "chain" => cfg.chain = value.chars().next(),
                        "p0" => {
                            cfg.p0 = Some(value.parse().map_err(|_| bad_override(key, value))?)
                        }
                        "p1" => {
                            cfg.p1 = Some(value.parse().map_err(|_| bad_override(key, value))?)
                        }
                        other => return Err(RinqError::Usage(format!(
                            "unknown manifest override {other:?}"
                        ))),
                    }
                }
                let (pdb_id, text) = resolve_input(input, cache_dir)?;
                compare_run(&pdb_id, &text, &cfg)
            };
            match run_one() {
                Ok(report) => report.to_csv_row(),
                Err(e) => format!("{input},,,,,,,,,,,\"error: {e}\""),
            }
        })
        .collect();

    let mut content = String::from(AnalysisReport::csv_header());
    content.push('\n');
    for row in rows {
        content.push_str(&row);
        content.push('\n');
    }
    emit(output, &content)
}

fn bad_override(key: &str, value: &str) -> RinqError {
    RinqError::Usage(format!("manifest override {key}={value} is not valid"))
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Fetch { id, cache_dir } => {
            let dir = cache_dir_or_default(cache_dir);
            rinq_core::fetch_pdb(id, &dir).map_err(|e| e.at_stage("fetch"))?;
            let id = id.to_ascii_uppercase();
            println!("{}", dir.join(format!("{id}.pdb")).display());
            Ok(())
        }
        Command::Graph {
            structure,
            format,
            scores,
            output,
        } => {
            let graph = load_graph(structure)?;
            let score_values = match scores {
                Some(measure) => {
                    Some(classical_scores(&graph, Measure::from_str(measure)?)?.values)
                }
                None => None,
            };
            let format = ExportFormat::from_str(format)?;
            let content = export_graph(&graph, score_values.as_deref(), format)
                .map_err(|e| e.at_stage("export"))?;
            emit(output, &content)
        }
        Command::Centrality {
            structure,
            measure,
            format,
            output,
        } => {
            let graph = load_graph(structure)?;
            let scores = classical_scores(&graph, Measure::from_str(measure)?)?;
            let content = match format.as_str() {
                "csv" => rinq_core::centrality::scores_to_csv(&scores, &graph),
                "json" => rinq_core::centrality::scores_to_json(&scores, &graph),
                other => {
                    return Err(RinqError::Usage(format!(
                        "unknown output format {other:?} (expected csv or json)"
                    )))
                }
            };
            emit(output, &content)
        }
        Command::Solve {
            structure,
            measure,
            qubo,
            schedule,
            format,
            dump_qubo,
            output,
        } => run_solve(structure, measure, qubo, schedule, format, dump_qubo, output),
        Command::Compare {
            structure,
            measure,
            qubo,
            schedule,
            format,
            output,
        } => {
            let measure = Measure::from_str(measure)?;
            let cfg = pipeline_config(structure, measure, qubo, schedule.schedule()?)?;
            let (pdb_id, text) = resolve_input(&structure.input, &structure.cache_dir)?;
            let report = compare_run(&pdb_id, &text, &cfg)?;
            let content = match format.as_str() {
                "json" => format!("{}\n", report.to_json()),
                "text" => report.to_text(),
                other => {
                    return Err(RinqError::Usage(format!(
                        "unknown output format {other:?} (expected json or text)"
                    )))
                }
            };
            emit(output, &content)
        }
        Command::Corpus {
            manifest,
            qubo,
            schedule,
            measure,
            cutoff,
            cache_dir,
            output,
        } => run_corpus(manifest, qubo, schedule, measure, *cutoff, cache_dir, output),
    }
}

/// Exit code per the interface contract; NoValidSample anywhere in the
/// stage chain maps to 3, usage errors to 1, everything else to 2.
fn exit_code(err: &RinqError) -> i32 {
    match err {
        RinqError::NoValidSample { .. } => 3,
        RinqError::Usage(_) => 1,
        RinqError::Stage { source, .. } | RinqError::Sweep { source, .. } => exit_code(source),
        _ => 2,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
