//! Weighted co-authorship graph built by clique projection.
//!
//! Each advisory with k co-signing agencies contributes C(k,2) unordered
//! pairs; a pair that co-appears in several advisories accumulates an
//! integer weight equal to the number of shared advisories. Edges also
//! remember which advisories produced them so every weight is auditable.
//!
//! A built graph is immutable: every analysis module reads it through
//! shared references, so values can be shared freely across threads.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::CorpusDataset;
use crate::AgencyId;

/// Weight plus the advisories that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeData {
    /// Number of co-signed advisories for this pair.
    pub weight: u32,
    /// Contributing advisory identifiers. Empty on graphs rebuilt from an
    /// exported edge table, which carries weights but not provenance.
    pub advisory_ids: BTreeSet<String>,
}

/// Undirected weighted co-authorship graph.
///
/// Nodes are canonical agency identifiers; edge keys are ordered pairs
/// `(a, b)` with `a < b`, so each undirected edge is stored exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoauthorGraph {
    nodes: BTreeSet<AgencyId>,
    edges: BTreeMap<(AgencyId, AgencyId), EdgeData>,
    adjacency: BTreeMap<AgencyId, BTreeMap<AgencyId, u32>>,
}

/// Connected-component labeling with the giant component singled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentView {
    /// Node -> 0-based component label, in order of each component's
    /// smallest member.
    pub membership: BTreeMap<AgencyId, usize>,
    /// Largest component; ties go to the one with the lexicographically
    /// smallest member.
    pub giant: BTreeSet<AgencyId>,
    pub count: usize,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {nodes} node(s); operation needs at least {required}")]
    DegenerateGraph { nodes: usize, required: usize },
    #[error("self-loop on {node}")]
    SelfLoop { node: AgencyId },
    #[error("duplicate edge {a}--{b}")]
    DuplicateEdge { a: AgencyId, b: AgencyId },
    #[error("edge {a}--{b} has zero weight")]
    ZeroWeight { a: AgencyId, b: AgencyId },
    #[error("edge references unknown node {node}")]
    UnknownNode { node: AgencyId },
}

impl Default for CoauthorGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl CoauthorGraph {
    pub fn new() -> Self {
        CoauthorGraph {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            adjacency: BTreeMap::new(),
        }
    }

    /// Builds a graph from an explicit node roster and weighted edge
    /// list, the inverse of the edge/node-table exports. Provenance
    /// (contributing advisory ids) cannot be reconstructed from a weight
    /// table, so it comes back empty; use [`CoauthorGraph::structural_eq`]
    /// to compare a round-tripped graph with its original.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator<Item = AgencyId>,
        E: IntoIterator<Item = (AgencyId, AgencyId, u32)>,
    {
        let mut graph = CoauthorGraph::new();
        for node in nodes {
            graph.insert_node(node);
        }
        for (a, b, weight) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            if weight == 0 {
                return Err(GraphError::ZeroWeight { a, b });
            }
            for endpoint in [&a, &b] {
                if !graph.nodes.contains(endpoint) {
                    return Err(GraphError::UnknownNode {
                        node: endpoint.clone(),
                    });
                }
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if graph.edges.contains_key(&(lo.clone(), hi.clone())) {
                return Err(GraphError::DuplicateEdge { a: lo, b: hi });
            }
            graph
                .adjacency
                .get_mut(&lo)
                .expect("endpoint present")
                .insert(hi.clone(), weight);
            graph
                .adjacency
                .get_mut(&hi)
                .expect("endpoint present")
                .insert(lo.clone(), weight);
            graph.edges.insert(
                (lo, hi),
                EdgeData {
                    weight,
                    advisory_ids: BTreeSet::new(),
                },
            );
        }
        Ok(graph)
    }

    fn insert_node(&mut self, node: AgencyId) {
        if self.nodes.insert(node.clone()) {
            self.adjacency.insert(node, BTreeMap::new());
        }
    }

    fn bump_edge(&mut self, a: &AgencyId, b: &AgencyId, advisory_id: &str) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let data = self
            .edges
            .entry((lo.clone(), hi.clone()))
            .or_insert(EdgeData {
                weight: 0,
                advisory_ids: BTreeSet::new(),
            });
        data.weight += 1;
        data.advisory_ids.insert(advisory_id.to_string());
        *self
            .adjacency
            .get_mut(lo)
            .expect("node inserted before edge")
            .entry(hi.clone())
            .or_insert(0) += 1;
        *self
            .adjacency
            .get_mut(hi)
            .expect("node inserted before edge")
            .entry(lo.clone())
            .or_insert(0) += 1;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &AgencyId> {
        self.nodes.iter()
    }

    pub fn contains_node(&self, node: &str) -> bool {
        self.nodes.contains(node)
    }

    /// Edges in lexicographic `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (&AgencyId, &AgencyId, &EdgeData)> {
        self.edges.iter().map(|((a, b), data)| (a, b, data))
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u32> {
        self.adjacency.get(a)?.get(b).copied()
    }

    /// Neighbors of `node` with edge weights, in lexicographic order.
    pub fn neighbors(&self, node: &str) -> impl Iterator<Item = (&AgencyId, u32)> {
        self.adjacency
            .get(node)
            .into_iter()
            .flat_map(|m| m.iter().map(|(n, w)| (n, *w)))
    }

    pub fn degree(&self, node: &str) -> usize {
        self.adjacency.get(node).map_or(0, |m| m.len())
    }

    /// Sum of incident edge weights (weighted degree).
    pub fn strength(&self, node: &str) -> u64 {
        self.adjacency
            .get(node)
            .map_or(0, |m| m.values().map(|&w| u64::from(w)).sum())
    }

    /// Total of all edge weights; equals Σ over advisories of C(k,2) for
    /// corpus-built graphs.
    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|d| u64::from(d.weight)).sum()
    }

    /// Node set, edge set, and weights equal; ignores advisory
    /// provenance, which an edge-table round trip cannot preserve.
    pub fn structural_eq(&self, other: &CoauthorGraph) -> bool {
        self.nodes == other.nodes
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(other.edges.iter())
                .all(|((ka, da), (kb, db))| ka == kb && da.weight == db.weight)
    }

    /// Index-based view for the algorithm kernels: ids sorted
    /// lexicographically, adjacency as sorted index lists.
    pub(crate) fn indexed(&self) -> IndexedView {
        let ids: Vec<AgencyId> = self.nodes.iter().cloned().collect();
        let index: BTreeMap<&AgencyId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut weights = vec![Vec::new(); ids.len()];
        for (i, id) in ids.iter().enumerate() {
            for (neighbor, w) in self.neighbors(id) {
                adj[i].push(index[neighbor]);
                weights[i].push(w);
            }
        }
        IndexedView { ids, adj, weights }
    }
}

/// Sorted-index adjacency snapshot consumed by the algorithm kernels.
pub(crate) struct IndexedView {
    pub ids: Vec<AgencyId>,
    pub adj: Vec<Vec<usize>>,
    pub weights: Vec<Vec<u32>>,
}

/// Projects the corpus onto the co-authorship graph: every advisory
/// becomes a clique over its agency set, and repeat co-appearances
/// increment edge weights. Agencies from single-author advisories appear
/// as isolated nodes.
pub fn build_graph(corpus: &CorpusDataset) -> CoauthorGraph {
    let mut graph = CoauthorGraph::new();
    for advisory in &corpus.advisories {
        let members: Vec<&AgencyId> = advisory.agencies.iter().collect();
        for member in &members {
            graph.insert_node((*member).clone());
        }
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                graph.bump_edge(a, b, &advisory.advisory_id);
            }
        }
    }
    graph
}

/// Labels connected components by breadth-first traversal and singles
/// out the giant one. The empty graph yields an empty view.
pub fn components(graph: &CoauthorGraph) -> ComponentView {
    let view = graph.indexed();
    let (labels, count) = crate::algo::components(&view.adj);
    let mut membership = BTreeMap::new();
    for (i, id) in view.ids.iter().enumerate() {
        membership.insert(id.clone(), labels[i]);
    }
    let mut sizes = vec![0usize; count];
    for &label in &labels {
        sizes[label] += 1;
    }
    // Labels run in order of each component's smallest member, so the
    // first maximal size wins ties with the smallest lexicographic member.
    let giant_label = sizes
        .iter()
        .enumerate()
        .max_by(|(la, sa), (lb, sb)| sa.cmp(sb).then(lb.cmp(la)))
        .map(|(label, _)| label);
    let giant = match giant_label {
        Some(label) => view
            .ids
            .iter()
            .enumerate()
            .filter(|(i, _)| labels[*i] == label)
            .map(|(_, id)| id.clone())
            .collect(),
        None => BTreeSet::new(),
    };
    ComponentView {
        membership,
        giant,
        count,
    }
}

/// Unweighted edge density |E| / C(|V|, 2).
pub fn density(graph: &CoauthorGraph) -> Result<f64, GraphError> {
    let n = graph.node_count();
    if n < 2 {
        return Err(GraphError::DegenerateGraph {
            nodes: n,
            required: 2,
        });
    }
    let possible = n as f64 * (n as f64 - 1.0) / 2.0;
    Ok(graph.edge_count() as f64 / possible)
}
