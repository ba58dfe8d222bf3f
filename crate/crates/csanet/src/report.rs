//! Report assembly, rendering, and interchange exports.
//!
//! [`analyze`] runs one consistent pass over a graph and packs everything
//! downstream consumers need into a [`ReportBundle`]: the global summary,
//! the centrality ranking, the heaviest dyads, community structure, core
//! shells, and plot-ready data series. Rendering is split from analysis:
//! structured output keeps full floating-point precision, while the
//! human-readable table rounds every real number to exactly three
//! decimals. Interchange files (edge table, node table, graph
//! description) are plain UTF-8 with fully sorted rows, so identical
//! inputs produce byte-identical files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::AgencyRegistry;
use crate::graph::CoauthorGraph;
use crate::metrics::{self, GlobalMetrics};
use crate::robustness::FragmentationTrajectory;
use crate::structure::{self, CommunityPartition, CoreDecomposition, EdgeWeighting};
use crate::AgencyId;

/// One row of the centrality ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow {
    pub agency: AgencyId,
    pub degree: usize,
    pub strength: u64,
    pub betweenness: f64,
}

/// Centrality ranking sorted by degree descending, then strength
/// descending, then agency identifier ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub rows: Vec<RankingRow>,
}

/// One weighted co-authorship pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dyad {
    pub source: AgencyId,
    pub target: AgencyId,
    pub weight: u32,
}

/// All agencies whose core number is exactly `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreShell {
    pub k: u32,
    pub members: Vec<AgencyId>,
}

/// Bar-chart point: one agency and its degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarPoint {
    pub agency: AgencyId,
    pub degree: usize,
}

/// Scatter point relating partner count to co-authorship volume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScatterPoint {
    pub agency: AgencyId,
    pub degree: usize,
    pub strength: u64,
}

/// Histogram bin over normalized betweenness values. The final bin
/// includes its upper bound; all others are half-open.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Shell size by core number, innermost first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellSize {
    pub k: u32,
    pub count: usize,
}

/// Plot-ready data series, all derived from the same analysis pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureSeries {
    /// Top agencies by degree (at most fifteen), bar-chart order.
    pub degree_bars: Vec<BarPoint>,
    /// Degree versus strength for every node, identifier order.
    pub degree_vs_strength: Vec<ScatterPoint>,
    /// Distribution of normalized betweenness over ten equal-width bins.
    pub betweenness_histogram: Vec<HistogramBin>,
    /// Node count per core shell, innermost first.
    pub shell_sizes: Vec<ShellSize>,
}

/// Everything one analysis pass produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub global: GlobalMetrics,
    pub top_n: RankingTable,
    pub dyads: Vec<Dyad>,
    pub communities: CommunityPartition,
    pub cores: CoreDecomposition,
    pub shells: Vec<CoreShell>,
    pub figures: FigureSeries,
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Row count for the ranking table and the dyad list.
    pub top: usize,
    /// Whether community detection reads edge weights.
    pub weighting: EdgeWeighting,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            top: 10,
            weighting: EdgeWeighting::Unweighted,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReportError {
    #[error("analysis requires a graph with at least one edge")]
    EmptyGraph,
    #[error("node '{node}' is missing from the agency registry")]
    UnknownNode { node: AgencyId },
    #[error("malformed interchange data at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Ranks every node by degree, strength, and identifier, returning the
/// first `n` rows (all rows when `n` exceeds the node count).
pub fn ranking_table(graph: &CoauthorGraph, n: usize) -> RankingTable {
    let mut table = full_ranking(graph);
    table.rows.truncate(n);
    table
}

fn full_ranking(graph: &CoauthorGraph) -> RankingTable {
    let degrees = metrics::degree_and_strength(graph);
    let betweenness = metrics::betweenness_all(graph);
    let mut rows: Vec<RankingRow> = degrees
        .into_iter()
        .map(|(agency, (degree, strength))| {
            let betweenness = betweenness[&agency];
            RankingRow {
                agency,
                degree,
                strength,
                betweenness,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.degree
            .cmp(&a.degree)
            .then(b.strength.cmp(&a.strength))
            .then(a.agency.cmp(&b.agency))
    });
    RankingTable { rows }
}

/// The `n` heaviest edges, sorted by weight descending then pair
/// identifiers ascending.
pub fn top_dyads(graph: &CoauthorGraph, n: usize) -> Vec<Dyad> {
    let mut dyads: Vec<Dyad> = graph
        .edges()
        .map(|(a, b, data)| Dyad {
            source: a.clone(),
            target: b.clone(),
            weight: data.weight,
        })
        .collect();
    dyads.sort_by(|x, y| {
        y.weight
            .cmp(&x.weight)
            .then_with(|| (&x.source, &x.target).cmp(&(&y.source, &y.target)))
    });
    dyads.truncate(n);
    dyads
}

/// Runs the complete analysis pass and assembles the report bundle.
///
/// Fails with [`ReportError::EmptyGraph`] when the graph has no edges:
/// path lengths and community structure are undefined there.
pub fn analyze(
    graph: &CoauthorGraph,
    options: &AnalysisOptions,
) -> Result<ReportBundle, ReportError> {
    if graph.edge_count() == 0 {
        return Err(ReportError::EmptyGraph);
    }
    let communities = structure::greedy_modularity(graph, options.weighting)
        .expect("graph has edges, so agglomeration is defined");
    let global = metrics::global_metrics(graph, Some(&communities))
        .expect("graph has an edge, so the giant component has two nodes");
    let ranking = full_ranking(graph);
    let cores = structure::k_core(graph);
    let shells: Vec<CoreShell> = structure::core_shells(&cores)
        .into_iter()
        .map(|(k, members)| CoreShell {
            k,
            members: members.into_iter().collect(),
        })
        .collect();

    let degree_bars = ranking
        .rows
        .iter()
        .take(15)
        .map(|row| BarPoint {
            agency: row.agency.clone(),
            degree: row.degree,
        })
        .collect();
    let degree_vs_strength = metrics::degree_and_strength(graph)
        .into_iter()
        .map(|(agency, (degree, strength))| ScatterPoint {
            agency,
            degree,
            strength,
        })
        .collect();
    let betweenness_histogram =
        histogram(&ranking.rows.iter().map(|r| r.betweenness).collect::<Vec<_>>());
    let shell_sizes = shells
        .iter()
        .map(|shell| ShellSize {
            k: shell.k,
            count: shell.members.len(),
        })
        .collect();

    let mut top_n = ranking;
    top_n.rows.truncate(options.top);
    Ok(ReportBundle {
        global,
        dyads: top_dyads(graph, options.top),
        communities,
        cores,
        shells,
        figures: FigureSeries {
            degree_bars,
            degree_vs_strength,
            betweenness_histogram,
            shell_sizes,
        },
        top_n,
    })
}

/// Ten equal-width bins over [0, max]; a single point-mass bin when all
/// values are zero. The last bin is closed so the maximum is counted.
fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return vec![HistogramBin {
            lower: 0.0,
            upper: 0.0,
            count: values.len(),
        }];
    }
    let mut bins: Vec<HistogramBin> = (0..10)
        .map(|i| HistogramBin {
            lower: max * i as f64 / 10.0,
            upper: max * (i + 1) as f64 / 10.0,
            count: 0,
        })
        .collect();
    for &v in values {
        let index = ((v / max * 10.0).floor() as usize).min(9);
        bins[index].count += 1;
    }
    bins
}

/// CSV edge table: `source,target,weight`, rows sorted by node pair.
pub fn edge_table(graph: &CoauthorGraph) -> String {
    let mut out = String::from("source,target,weight\n");
    for (a, b, data) in graph.edges() {
        let _ = writeln!(out, "{},{},{}", csv_field(a), csv_field(b), data.weight);
    }
    out
}

/// CSV node table joining graph position with registry identity:
/// `id,country,display_name,degree,strength,core_number,community`.
///
/// The community column is left empty when no partition is supplied
/// (e.g. for an edgeless graph, where detection is undefined).
pub fn node_table(
    graph: &CoauthorGraph,
    registry: &AgencyRegistry,
    cores: &CoreDecomposition,
    communities: Option<&CommunityPartition>,
) -> Result<String, ReportError> {
    let mut out = String::from("id,country,display_name,degree,strength,core_number,community\n");
    for node in graph.nodes() {
        let entry = registry
            .get(node)
            .ok_or_else(|| ReportError::UnknownNode { node: node.clone() })?;
        let community = communities
            .and_then(|p| p.assignment.get(node))
            .map(|label| label.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(node),
            csv_field(&entry.country),
            csv_field(&entry.display_name),
            graph.degree(node),
            graph.strength(node),
            cores.core_number.get(node).copied().unwrap_or(0),
            community,
        );
    }
    Ok(out)
}

/// Plain-text graph description in DOT syntax with weight attributes;
/// nodes and edges appear in sorted order.
pub fn graph_description(graph: &CoauthorGraph) -> String {
    let mut out = String::from("graph coauthorship {\n");
    for node in graph.nodes() {
        let _ = writeln!(out, "  \"{node}\";");
    }
    for (a, b, data) in graph.edges() {
        let _ = writeln!(out, "  \"{a}\" -- \"{b}\" [weight={}];", data.weight);
    }
    out.push_str("}\n");
    out
}

/// Minimal CSV quoting: fields containing a comma, quote, or newline are
/// wrapped in double quotes with inner quotes doubled.
fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// Splits one CSV record, honoring the quoting rules of [`csv_field`].
fn split_csv_line(line: &str, lineno: usize) -> Result<Vec<String>, ReportError> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    current.push('"');
                }
                '"' => quoted = false,
                other => current.push(other),
            }
        } else {
            match c {
                '"' if current.is_empty() => quoted = true,
                ',' => fields.push(std::mem::take(&mut current)),
                other => current.push(other),
            }
        }
    }
    if quoted {
        return Err(ReportError::Malformed {
            line: lineno,
            message: "unterminated quoted field".into(),
        });
    }
    fields.push(current);
    Ok(fields)
}

/// Parses an edge table produced by [`edge_table`] back into
/// `(source, target, weight)` triples.
pub fn parse_edge_table(text: &str) -> Result<Vec<(AgencyId, AgencyId, u32)>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "source,target,weight")) => {}
        Some((_, other)) => {
            return Err(ReportError::Malformed {
                line: 1,
                message: format!("expected edge-table header, found '{other}'"),
            })
        }
        None => {
            return Err(ReportError::Malformed {
                line: 1,
                message: "empty edge table".into(),
            })
        }
    }
    let mut edges = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = index + 1;
        let fields = split_csv_line(line, lineno)?;
        if fields.len() != 3 {
            return Err(ReportError::Malformed {
                line: lineno,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let weight: u32 = fields[2].parse().map_err(|_| ReportError::Malformed {
            line: lineno,
            message: format!("invalid weight '{}'", fields[2]),
        })?;
        edges.push((fields[0].clone(), fields[1].clone(), weight));
    }
    Ok(edges)
}

/// Extracts the node identifiers (first column) from a node table
/// produced by [`node_table`].
pub fn parse_node_ids(text: &str) -> Result<BTreeSet<AgencyId>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header))
            if header == "id,country,display_name,degree,strength,core_number,community" => {}
        Some((_, other)) => {
            return Err(ReportError::Malformed {
                line: 1,
                message: format!("expected node-table header, found '{other}'"),
            })
        }
        None => {
            return Err(ReportError::Malformed {
                line: 1,
                message: "empty node table".into(),
            })
        }
    }
    let mut ids = BTreeSet::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields = split_csv_line(line, index + 1)?;
        if fields.is_empty() || fields[0].is_empty() {
            return Err(ReportError::Malformed {
                line: index + 1,
                message: "missing node identifier".into(),
            });
        }
        ids.insert(fields[0].clone());
    }
    Ok(ids)
}

/// CSV fragmentation trajectory: one row per removal, full precision,
/// empty `apl_giant` when the surviving giant has fewer than two nodes.
pub fn trajectory_table(trajectory: &FragmentationTrajectory) -> String {
    let mut out = String::from("step,removed,giant_size,components,apl_giant,edges_remaining\n");
    for (index, step) in trajectory.steps.iter().enumerate() {
        let apl = step.apl_giant.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            index + 1,
            csv_field(&step.removed),
            step.giant_size,
            step.components,
            apl,
            step.edges_remaining,
        );
    }
    out
}

/// Formats a real number with exactly three decimals, folding the
/// negative-zero artifact into plain zero.
pub fn round3(value: f64) -> String {
    let text = format!("{value:.3}");
    if text == "-0.000" {
        "0.000".to_string()
    } else {
        text
    }
}

/// Full-precision structured rendering of the bundle (JSON document,
/// trailing newline).
pub fn render_structured(bundle: &ReportBundle) -> String {
    let mut text =
        serde_json::to_string_pretty(bundle).expect("report bundle serializes infallibly");
    text.push('\n');
    text
}

/// Human-readable rendering: fixed sections, three decimals on every
/// real number, stable ordering throughout.
pub fn render_table(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    let global = &bundle.global;
    out.push_str("GLOBAL METRICS\n");
    let _ = writeln!(out, "  nodes                 {}", global.nodes);
    let _ = writeln!(out, "  edges                 {}", global.edges);
    let _ = writeln!(out, "  components            {}", global.components);
    let _ = writeln!(
        out,
        "  average clustering    {}",
        round3(global.avg_clustering)
    );
    let _ = writeln!(
        out,
        "  degree assortativity  {}",
        global
            .assortativity
            .map(round3)
            .unwrap_or_else(|| "undefined".to_string())
    );
    let _ = writeln!(
        out,
        "  average path length   {}",
        round3(global.avg_path_length)
    );
    if let Some(count) = global.community_count {
        let _ = writeln!(out, "  communities           {count}");
    }
    if let Some(q) = global.modularity {
        let _ = writeln!(out, "  modularity            {}", round3(q));
    }

    out.push_str("\nTOP AGENCIES\n");
    let _ = writeln!(
        out,
        "  {:<4} {:<12} {:>6} {:>8} {:>12}",
        "rank", "agency", "degree", "strength", "betweenness"
    );
    for (rank, row) in bundle.top_n.rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:<4} {:<12} {:>6} {:>8} {:>12}",
            rank + 1,
            row.agency,
            row.degree,
            row.strength,
            round3(row.betweenness),
        );
    }

    out.push_str("\nTOP DYADS\n");
    for dyad in &bundle.dyads {
        let _ = writeln!(
            out,
            "  {} -- {}  {}",
            dyad.source, dyad.target, dyad.weight
        );
    }

    out.push_str("\nCOMMUNITIES");
    let _ = writeln!(out, " (modularity {})", round3(bundle.communities.q));
    for (label, members) in communities_by_label(&bundle.communities) {
        let _ = writeln!(
            out,
            "  community {} ({} members): {}",
            label,
            members.len(),
            members.join(", ")
        );
    }

    out.push_str("\nCORE SHELLS\n");
    for shell in &bundle.shells {
        let _ = writeln!(
            out,
            "  {}-core shell ({} members): {}",
            shell.k,
            shell.members.len(),
            shell.members.join(", ")
        );
    }
    out
}

/// Members of each community keyed by label, ascending.
fn communities_by_label(partition: &CommunityPartition) -> Vec<(usize, Vec<AgencyId>)> {
    let mut grouped: BTreeMap<usize, Vec<AgencyId>> = BTreeMap::new();
    for (agency, &label) in &partition.assignment {
        grouped.entry(label).or_default().push(agency.clone());
    }
    grouped.into_iter().collect()
}
