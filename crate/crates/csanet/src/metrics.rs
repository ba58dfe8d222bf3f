//! Node-level and global statistics of the co-authorship graph.
//!
//! Degree counts unique partners; strength sums incident edge weights.
//! Everything distance- or triad-based — betweenness, clustering,
//! average path length — treats the graph as unweighted: weights encode
//! repeat-collaboration intensity, not traversal cost. Values are kept at
//! full precision here; rounding to three decimals happens only in the
//! report layer.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::CoauthorGraph;
use crate::structure::CommunityPartition;
use crate::AgencyId;

/// Per-agency centrality record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetrics {
    pub agency: AgencyId,
    /// Unique co-authoring partners.
    pub degree: usize,
    /// Sum of incident edge weights (weighted degree).
    pub strength: u64,
    /// Normalized betweenness centrality; see [`betweenness_all`] for
    /// the pair-counting convention (a star center scores 2.0).
    pub betweenness: f64,
    /// Triadic closure around this agency, in [0, 1].
    pub local_clustering: f64,
}

/// The global summary row set: counts, cohesion, mixing, path length,
/// and (when a partition is supplied) community structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub avg_clustering: f64,
    /// `None` when endpoint-degree variance is zero (e.g. regular
    /// graphs), where the Pearson coefficient is undefined.
    pub assortativity: Option<f64>,
    /// Mean shortest-path distance within the giant component.
    pub avg_path_length: f64,
    pub community_count: Option<usize>,
    pub modularity: Option<f64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("giant component has {giant} node(s); need at least 2")]
    DegenerateGraph { giant: usize },
    #[error("degree assortativity undefined: endpoint degrees have zero variance")]
    UndefinedAssortativity,
}

/// Degree (unique partners) and strength (summed weights) per agency.
pub fn degree_and_strength(graph: &CoauthorGraph) -> BTreeMap<AgencyId, (usize, u64)> {
    graph
        .nodes()
        .map(|id| (id.clone(), (graph.degree(id), graph.strength(id))))
        .collect()
}

/// Normalized betweenness centrality for every agency.
///
/// Shortest paths are counted on the unweighted graph with Brandes'
/// algorithm; scores exclude endpoints. Normalization follows the
/// convention of common network-analysis tooling (and the published
/// rankings this library reproduces): the accumulation counts each
/// unordered pair from both endpoints and is divided by the number of
/// unordered pairs of distinct others, (n-1)(n-2)/2, where n is the
/// full node count. A star center therefore scores 2.0, not 1.0.
/// Graphs with fewer than three nodes score 0 everywhere by convention.
pub fn betweenness_all(graph: &CoauthorGraph) -> BTreeMap<AgencyId, f64> {
    let view = graph.indexed();
    let n = view.ids.len();
    let raw = crate::algo::brandes(&view.adj);
    let scale = if n >= 3 {
        4.0 / ((n as f64 - 1.0) * (n as f64 - 2.0))
    } else {
        0.0
    };
    view.ids
        .iter()
        .zip(raw)
        .map(|(id, value)| (id.clone(), value * scale))
        .collect()
}

/// Local clustering coefficient per agency plus the unweighted mean over
/// all nodes; agencies with fewer than two partners contribute 0.
pub fn clustering(graph: &CoauthorGraph) -> (BTreeMap<AgencyId, f64>, f64) {
    let view = graph.indexed();
    let n = view.ids.len();
    let mut local = BTreeMap::new();
    let mut total = 0.0;
    for (v, id) in view.ids.iter().enumerate() {
        let neighbors = &view.adj[v];
        let degree = neighbors.len();
        let coefficient = if degree < 2 {
            0.0
        } else {
            let mut triangles = 0u64;
            for (i, &a) in neighbors.iter().enumerate() {
                for &b in &neighbors[i + 1..] {
                    if view.adj[a].binary_search(&b).is_ok() {
                        triangles += 1;
                    }
                }
            }
            2.0 * triangles as f64 / (degree as f64 * (degree as f64 - 1.0))
        };
        total += coefficient;
        local.insert(id.clone(), coefficient);
    }
    let average = if n == 0 { 0.0 } else { total / n as f64 };
    (local, average)
}

/// Pearson correlation of endpoint degrees over the symmetrized edge
/// list (each undirected edge contributes both orientations). Weights
/// are ignored. Fails with [`MetricsError::UndefinedAssortativity`] when
/// the graph has no edges or all endpoint degrees coincide.
pub fn degree_assortativity(graph: &CoauthorGraph) -> Result<f64, MetricsError> {
    let degrees: BTreeMap<&AgencyId, f64> = graph
        .nodes()
        .map(|id| (id, graph.degree(id) as f64))
        .collect();
    let m = graph.edge_count();
    if m == 0 {
        return Err(MetricsError::UndefinedAssortativity);
    }
    let count = 2.0 * m as f64;
    let mut sum = 0.0;
    for (a, b, _) in graph.edges() {
        sum += degrees[a] + degrees[b];
    }
    let mean = sum / count;
    let mut variance = 0.0;
    let mut covariance = 0.0;
    for (a, b, _) in graph.edges() {
        let da = degrees[a] - mean;
        let db = degrees[b] - mean;
        variance += da * da + db * db;
        covariance += 2.0 * da * db;
    }
    if variance == 0.0 {
        return Err(MetricsError::UndefinedAssortativity);
    }
    Ok(covariance / variance)
}

/// Mean unweighted shortest-path distance over unordered node pairs of
/// the giant component.
pub fn average_path_length(graph: &CoauthorGraph) -> Result<f64, MetricsError> {
    let view = graph.indexed();
    let (labels, count) = crate::algo::components(&view.adj);
    let mut sizes = vec![0usize; count];
    for &label in &labels {
        sizes[label] += 1;
    }
    // Ties keep the lowest label, whose seed is the smallest member.
    let giant_label = sizes
        .iter()
        .enumerate()
        .max_by(|(la, sa), (lb, sb)| sa.cmp(sb).then(lb.cmp(la)))
        .map(|(label, _)| label);
    let members: Vec<usize> = match giant_label {
        Some(label) => (0..view.ids.len())
            .filter(|&v| labels[v] == label)
            .collect(),
        None => Vec::new(),
    };
    crate::algo::component_apl(&view.adj, &members).ok_or(
        MetricsError::DegenerateGraph {
            giant: members.len(),
        },
    )
}

/// Full per-agency records: degree, strength, betweenness, clustering.
pub fn node_metrics(graph: &CoauthorGraph) -> BTreeMap<AgencyId, NodeMetrics> {
    let betweenness = betweenness_all(graph);
    let (local_clustering, _) = clustering(graph);
    graph
        .nodes()
        .map(|id| {
            (
                id.clone(),
                NodeMetrics {
                    agency: id.clone(),
                    degree: graph.degree(id),
                    strength: graph.strength(id),
                    betweenness: betweenness[id],
                    local_clustering: local_clustering[id],
                },
            )
        })
        .collect()
}

/// Assembles the global summary. Community fields come from the supplied
/// partition and are omitted when it is absent; an undefined
/// assortativity becomes `None` rather than an error.
pub fn global_metrics(
    graph: &CoauthorGraph,
    partition: Option<&CommunityPartition>,
) -> Result<GlobalMetrics, MetricsError> {
    let (_, avg_clustering) = clustering(graph);
    let assortativity = match degree_assortativity(graph) {
        Ok(r) => Some(r),
        Err(MetricsError::UndefinedAssortativity) => None,
        Err(other) => return Err(other),
    };
    let avg_path_length = average_path_length(graph)?;
    let components = crate::graph::components(graph).count;
    Ok(GlobalMetrics {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        components,
        avg_clustering,
        assortativity,
        avg_path_length,
        community_count: partition.map(|p| p.community_count()),
        modularity: partition.map(|p| p.q),
    })
}
