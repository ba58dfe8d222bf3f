//! Command-line interface over the csanet library.
//!
//! Exit codes: 0 on success, 1 for data/validation failures, 2 for
//! usage errors (the clap default). Diagnostics go to standard error;
//! standard output carries only results and written-file notices, so
//! identical inputs and flags produce byte-identical output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use csanet::corpus::{load_corpus, validate_corpus, CorpusDataset};
use csanet::graph::{build_graph, components, CoauthorGraph};
use csanet::report::{
    self, edge_table, graph_description, node_table, trajectory_table, AnalysisOptions,
};
use csanet::robustness::{compare_strategies, AttackKind, AttackStrategy};
use csanet::structure::{greedy_modularity, k_core, CommunityPartition, EdgeWeighting};

#[derive(Parser)]
#[command(
    name = "csanet",
    version,
    about = "Co-authorship network analysis of joint cybersecurity advisories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Input files shared by every subcommand.
#[derive(Args)]
struct InputArgs {
    /// Advisory corpus, one JSON record per line.
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Agency registry CSV (canonical_id,display_name,country,aliases).
    #[arg(long, value_name = "PATH")]
    registry: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check corpus integrity against the registry.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Build the co-authorship graph and write its table files.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory for edges.csv, nodes.csv, and graph.dot.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run the full structural analysis and emit the report.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Directory to receive report.json (omit to skip the file).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Number of ranking rows and dyads to include.
        #[arg(long, value_name = "N", default_value_t = 10)]
        top: usize,
        /// Let community detection read edge weights.
        #[arg(long)]
        weighted_modularity: bool,
        /// Rendering for standard output.
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Simulate node removals and record fragmentation trajectories.
    Attack {
        #[command(flatten)]
        input: InputArgs,
        /// Directory to receive one trajectory CSV per strategy.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Removal strategy; repeat the flag to compare several.
        #[arg(long = "strategy", value_enum, required = true, value_name = "KIND")]
        strategies: Vec<StrategyKind>,
        /// Number of removals (default: every node, or every listed
        /// target when an explicit strategy is present).
        #[arg(long, value_name = "N")]
        count: Option<usize>,
        /// Seed for the random strategy.
        #[arg(long, value_name = "U64", default_value_t = 0)]
        seed: u64,
        /// Removal target for the explicit strategy; repeatable, in order.
        #[arg(long = "target", value_name = "AGENCY")]
        targets: Vec<String>,
        /// Rank once on the intact graph instead of re-ranking after
        /// each removal.
        #[arg(long)]
        initial_ranking: bool,
        /// Rendering for standard output.
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Write every interchange file for downstream tools.
    Export {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable tables, three decimals on every real number.
    Table,
    /// Full-precision JSON.
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    ByDegree,
    ByStrength,
    ByBetweenness,
    Random,
    Explicit,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { input } => {
            let corpus = load(&input)?;
            if let Some(code) = report_violations(&corpus) {
                return Ok(code);
            }
            println!(
                "corpus OK: {} advisories, {} participating agencies, {} registry entries",
                corpus.advisories.len(),
                corpus.distinct_agencies().len(),
                corpus.registry.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { input, out } => {
            let corpus = load(&input)?;
            if let Some(code) = report_violations(&corpus) {
                return Ok(code);
            }
            let graph = build_graph(&corpus);
            write_graph_files(&graph, &corpus, &out)?;
            let view = components(&graph);
            println!(
                "graph: {} nodes, {} edges, {} components",
                graph.node_count(),
                graph.edge_count(),
                view.count
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            input,
            out,
            top,
            weighted_modularity,
            format,
        } => {
            let corpus = load(&input)?;
            if let Some(code) = report_violations(&corpus) {
                return Ok(code);
            }
            let graph = build_graph(&corpus);
            let options = AnalysisOptions {
                top,
                weighting: weighting_flag(weighted_modularity),
            };
            let bundle = match report::analyze(&graph, &options) {
                Ok(bundle) => bundle,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(ExitCode::from(1));
                }
            };
            if let Some(dir) = out {
                fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                write_file(&dir, "report.json", &report::render_structured(&bundle))?;
            }
            match format {
                OutputFormat::Table => print!("{}", report::render_table(&bundle)),
                OutputFormat::Structured => print!("{}", report::render_structured(&bundle)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Attack {
            input,
            out,
            strategies,
            count,
            seed,
            targets,
            initial_ranking,
            format,
        } => {
            let wants_explicit = strategies.contains(&StrategyKind::Explicit);
            if wants_explicit && targets.is_empty() {
                eprintln!("error: the explicit strategy requires at least one --target");
                return Ok(ExitCode::from(2));
            }
            if !wants_explicit && !targets.is_empty() {
                eprintln!("error: --target only applies to --strategy explicit");
                return Ok(ExitCode::from(2));
            }
            let corpus = load(&input)?;
            if let Some(code) = report_violations(&corpus) {
                return Ok(code);
            }
            let graph = build_graph(&corpus);
            let plans: Vec<AttackStrategy> = strategies
                .iter()
                .map(|kind| AttackStrategy {
                    kind: attack_kind(*kind, seed, &targets),
                    recompute: !initial_ranking,
                })
                .collect();
            let default_count = if wants_explicit {
                graph.node_count().min(targets.len())
            } else {
                graph.node_count()
            };
            let count = count.unwrap_or(default_count);
            let trajectories = match compare_strategies(&graph, &plans, count) {
                Ok(trajectories) => trajectories,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(ExitCode::from(1));
                }
            };
            if let Some(dir) = out {
                fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                for trajectory in &trajectories {
                    let name = format!("attack-{}.csv", strategy_slug(&trajectory.strategy));
                    write_file(&dir, &name, &trajectory_table(trajectory))?;
                }
            }
            match format {
                OutputFormat::Table => {
                    for trajectory in &trajectories {
                        print!("{}", render_trajectory(trajectory));
                    }
                }
                OutputFormat::Structured => {
                    let mut text = serde_json::to_string_pretty(&trajectories)
                        .expect("trajectories serialize infallibly");
                    text.push('\n');
                    print!("{text}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Export { input, out } => {
            let corpus = load(&input)?;
            if let Some(code) = report_violations(&corpus) {
                return Ok(code);
            }
            let graph = build_graph(&corpus);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write_file(&out, "corpus.jsonl", &corpus.to_jsonl())?;
            write_file(&out, "registry.csv", &corpus.registry.to_csv())?;
            write_graph_files(&graph, &corpus, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(input: &InputArgs) -> Result<CorpusDataset> {
    load_corpus(&input.corpus, &input.registry).with_context(|| {
        format!(
            "loading corpus {} with registry {}",
            input.corpus.display(),
            input.registry.display()
        )
    })
}

/// Prints violations to standard error; `Some(exit 1)` when dirty.
fn report_violations(corpus: &CorpusDataset) -> Option<ExitCode> {
    let report = validate_corpus(corpus);
    if report.is_clean() {
        return None;
    }
    for violation in &report.violations {
        eprintln!("violation: {violation}");
    }
    eprintln!("corpus failed validation: {} violation(s)", report.violations.len());
    Some(ExitCode::from(1))
}

fn weighting_flag(weighted: bool) -> EdgeWeighting {
    if weighted {
        EdgeWeighting::Weighted
    } else {
        EdgeWeighting::Unweighted
    }
}

fn attack_kind(kind: StrategyKind, seed: u64, targets: &[String]) -> AttackKind {
    match kind {
        StrategyKind::ByDegree => AttackKind::ByDegree,
        StrategyKind::ByStrength => AttackKind::ByStrength,
        StrategyKind::ByBetweenness => AttackKind::ByBetweenness,
        StrategyKind::Random => AttackKind::Random { seed },
        StrategyKind::Explicit => AttackKind::Explicit {
            targets: targets.to_vec(),
        },
    }
}

fn strategy_slug(strategy: &AttackStrategy) -> String {
    let base = match &strategy.kind {
        AttackKind::ByDegree => "by-degree".to_string(),
        AttackKind::ByStrength => "by-strength".to_string(),
        AttackKind::ByBetweenness => "by-betweenness".to_string(),
        AttackKind::Random { seed } => format!("random-{seed}"),
        AttackKind::Explicit { .. } => "explicit".to_string(),
    };
    if strategy.recompute {
        base
    } else {
        format!("{base}-static")
    }
}

fn render_trajectory(trajectory: &csanet::robustness::FragmentationTrajectory) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let mode = if trajectory.strategy.recompute {
        "adaptive"
    } else {
        "initial-ranking"
    };
    let _ = writeln!(out, "ATTACK {} ({mode})", trajectory.strategy.kind);
    let _ = writeln!(
        out,
        "  {:<4} {:<12} {:>5} {:>10} {:>9} {:>5}",
        "step", "removed", "giant", "components", "apl", "edges"
    );
    for (index, step) in trajectory.steps.iter().enumerate() {
        let apl = step
            .apl_giant
            .map(report::round3)
            .unwrap_or_else(|| "-".to_string());
        let _ = writeln!(
            out,
            "  {:<4} {:<12} {:>5} {:>10} {:>9} {:>5}",
            index + 1,
            step.removed,
            step.giant_size,
            step.components,
            apl,
            step.edges_remaining,
        );
    }
    out
}

/// Writes edges.csv, nodes.csv, and graph.dot into `dir`.
fn write_graph_files(graph: &CoauthorGraph, corpus: &CorpusDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let cores = k_core(graph);
    let communities: Option<CommunityPartition> = if graph.edge_count() > 0 {
        Some(
            greedy_modularity(graph, EdgeWeighting::Unweighted)
                .expect("graph has edges, so agglomeration is defined"),
        )
    } else {
        None
    };
    write_file(dir, "edges.csv", &edge_table(graph))?;
    let nodes = node_table(graph, &corpus.registry, &cores, communities.as_ref())
        .context("assembling node table")?;
    write_file(dir, "nodes.csv", &nodes)?;
    write_file(dir, "graph.dot", &graph_description(graph))?;
    Ok(())
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}
