//! Meso-scale structure: greedy modularity communities and k-cores.
//!
//! Community detection is the classic agglomerative greedy-modularity
//! scheme: start from singletons and repeatedly apply the merge with the
//! largest modularity gain until no merge improves Q. Merging runs on the
//! unweighted graph by default (edge weights can be switched in), and
//! ties are broken deterministically so identical inputs give identical
//! partitions on every platform.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::CoauthorGraph;
use crate::AgencyId;

/// Gains within this distance of the best are treated as ties and
/// resolved by the lexicographic rule below.
const TIE_EPSILON: f64 = 1e-12;

/// Whether modularity reads edge multiplicities or just the topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeWeighting {
    #[default]
    Unweighted,
    Weighted,
}

/// Community assignment with its modularity score.
///
/// Labels are 0-based, ordered by descending community size and then by
/// lexicographically smallest member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityPartition {
    pub assignment: BTreeMap<AgencyId, usize>,
    pub q: f64,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment
            .values()
            .max()
            .map_or(0, |&label| label + 1)
    }

    /// Members per community, indexed by label.
    pub fn community_sets(&self) -> Vec<BTreeSet<AgencyId>> {
        let mut sets = vec![BTreeSet::new(); self.community_count()];
        for (agency, &label) in &self.assignment {
            sets[label].insert(agency.clone());
        }
        sets
    }
}

/// Core numbers per agency with the maximum over the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreDecomposition {
    pub core_number: BTreeMap<AgencyId, u32>,
    pub max_core: u32,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("modularity needs at least one edge")]
    EmptyGraph,
    #[error("assignment does not cover node {node}")]
    UncoveredNode { node: AgencyId },
}

/// Total mass and per-node mass under the chosen weighting: edge count
/// and degrees, or total weight and strengths.
fn masses(graph: &CoauthorGraph, weighting: EdgeWeighting) -> (f64, BTreeMap<&AgencyId, f64>) {
    match weighting {
        EdgeWeighting::Unweighted => (
            graph.edge_count() as f64,
            graph
                .nodes()
                .map(|id| (id, graph.degree(id) as f64))
                .collect(),
        ),
        EdgeWeighting::Weighted => (
            graph.total_weight() as f64,
            graph
                .nodes()
                .map(|id| (id, graph.strength(id) as f64))
                .collect(),
        ),
    }
}

/// Agglomerative greedy-modularity community detection.
///
/// Merging stops at the first local optimum: when the best available
/// merge no longer improves Q (gains within [`TIE_EPSILON`] count as no
/// improvement). Among equal-gain merges the pair whose sorted
/// (smallest-member, smallest-member) identifier pair is lowest wins.
pub fn greedy_modularity(
    graph: &CoauthorGraph,
    weighting: EdgeWeighting,
) -> Result<CommunityPartition, StructureError> {
    if graph.edge_count() == 0 {
        return Err(StructureError::EmptyGraph);
    }
    let view = graph.indexed();
    let n = view.ids.len();
    let index: BTreeMap<&AgencyId, usize> = view
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let (mass, node_mass) = masses(graph, weighting);

    // Community state, keyed by representative index. `min_member` uses
    // node indices, which follow lexicographic identifier order.
    let mut active: BTreeSet<usize> = (0..n).collect();
    let mut min_member: Vec<usize> = (0..n).collect();
    let mut members: Vec<BTreeSet<usize>> = (0..n).map(|v| BTreeSet::from([v])).collect();
    let mut total: Vec<f64> = view.ids.iter().map(|id| node_mass[id]).collect();
    let mut internal: Vec<f64> = vec![0.0; n];
    let mut between: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for (a, b, data) in graph.edges() {
        let (i, j) = (index[a], index[b]);
        let w = match weighting {
            EdgeWeighting::Unweighted => 1.0,
            EdgeWeighting::Weighted => f64::from(data.weight),
        };
        between[i].insert(j, w);
        between[j].insert(i, w);
    }

    loop {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for &c1 in &active {
            for (&c2, &e12) in &between[c1] {
                if c2 < c1 {
                    continue;
                }
                let gain = e12 / mass - total[c1] * total[c2] / (2.0 * mass * mass);
                let pair = if min_member[c1] < min_member[c2] {
                    (min_member[c1], min_member[c2])
                } else {
                    (min_member[c2], min_member[c1])
                };
                let take = match &best {
                    None => true,
                    Some((best_gain, best_pair, _, _)) => {
                        gain > best_gain + TIE_EPSILON
                            || ((gain - best_gain).abs() <= TIE_EPSILON
                                && pair < *best_pair)
                    }
                };
                if take {
                    best = Some((gain, pair, c1, c2));
                }
            }
        }
        let Some((gain, _, a, b)) = best else { break };
        if gain <= TIE_EPSILON {
            break;
        }
        // Merge b into a.
        let cross = between[a].get(&b).copied().unwrap_or(0.0);
        internal[a] += internal[b] + cross;
        total[a] += total[b];
        min_member[a] = min_member[a].min(min_member[b]);
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        let b_neighbors: Vec<(usize, f64)> =
            between[b].iter().map(|(&c, &e)| (c, e)).collect();
        for (c, e) in b_neighbors {
            if c == a {
                continue;
            }
            *between[a].entry(c).or_insert(0.0) += e;
            *between[c].entry(a).or_insert(0.0) += e;
            between[c].remove(&b);
        }
        between[a].remove(&b);
        between[b].clear();
        active.remove(&b);
    }

    // Recompute Q from scratch rather than accumulating gains.
    let q: f64 = active
        .iter()
        .map(|&c| internal[c] / mass - (total[c] / (2.0 * mass)).powi(2))
        .sum();

    // Label communities by descending size, then smallest member.
    let mut communities: Vec<BTreeSet<usize>> = active
        .iter()
        .map(|&c| std::mem::take(&mut members[c]))
        .collect();
    communities.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
    });
    let mut assignment = BTreeMap::new();
    for (label, community) in communities.iter().enumerate() {
        for &v in community {
            assignment.insert(view.ids[v].clone(), label);
        }
    }
    Ok(CommunityPartition { assignment, q })
}

/// Modularity of an explicit assignment: Q = Σ_c [e_c/m − (d_c/2m)²]
/// with e_c the intra-community mass, d_c the community's total node
/// mass, and m the total mass (edge count or total weight).
pub fn modularity(
    graph: &CoauthorGraph,
    assignment: &BTreeMap<AgencyId, usize>,
    weighting: EdgeWeighting,
) -> Result<f64, StructureError> {
    if graph.edge_count() == 0 {
        return Err(StructureError::EmptyGraph);
    }
    for node in graph.nodes() {
        if !assignment.contains_key(node) {
            return Err(StructureError::UncoveredNode { node: node.clone() });
        }
    }
    let (mass, node_mass) = masses(graph, weighting);
    let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
    let mut total: BTreeMap<usize, f64> = BTreeMap::new();
    for node in graph.nodes() {
        *total.entry(assignment[node]).or_insert(0.0) += node_mass[node];
    }
    for (a, b, data) in graph.edges() {
        if assignment[a] == assignment[b] {
            let w = match weighting {
                EdgeWeighting::Unweighted => 1.0,
                EdgeWeighting::Weighted => f64::from(data.weight),
            };
            *internal.entry(assignment[a]).or_insert(0.0) += w;
        }
    }
    Ok(total
        .iter()
        .map(|(community, d)| {
            let e = internal.get(community).copied().unwrap_or(0.0);
            e / mass - (d / (2.0 * mass)).powi(2)
        })
        .sum())
}

/// Core numbers by iterative peeling: repeatedly remove the node of
/// minimum remaining degree (lexicographic order inside a degree
/// bucket — removal order never changes core numbers, only traces).
pub fn k_core(graph: &CoauthorGraph) -> CoreDecomposition {
    let view = graph.indexed();
    let n = view.ids.len();
    let mut degree: Vec<usize> = view.adj.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); max_degree + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].insert(v);
    }
    let mut alive = vec![true; n];
    let mut core = vec![0u32; n];
    let mut k = 0u32;
    for _ in 0..n {
        let d = (0..buckets.len())
            .find(|&d| !buckets[d].is_empty())
            .expect("a live node remains");
        let v = *buckets[d].iter().next().expect("bucket non-empty");
        buckets[d].remove(&v);
        alive[v] = false;
        k = k.max(d as u32);
        core[v] = k;
        for &w in &view.adj[v] {
            if alive[w] {
                buckets[degree[w]].remove(&w);
                degree[w] -= 1;
                buckets[degree[w]].insert(w);
            }
        }
    }
    let core_number: BTreeMap<AgencyId, u32> = view
        .ids
        .iter()
        .enumerate()
        .map(|(v, id)| (id.clone(), core[v]))
        .collect();
    let max_core = core_number.values().copied().max().unwrap_or(0);
    CoreDecomposition {
        core_number,
        max_core,
    }
}

/// Shells in descending k: the agencies whose core number is exactly k.
/// Together the shells partition the node set.
pub fn core_shells(decomposition: &CoreDecomposition) -> Vec<(u32, BTreeSet<AgencyId>)> {
    let mut by_k: BTreeMap<u32, BTreeSet<AgencyId>> = BTreeMap::new();
    for (agency, &k) in &decomposition.core_number {
        by_k.entry(k).or_default().insert(agency.clone());
    }
    by_k.into_iter().rev().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_of(nodes: &[&str], edges: &[(&str, &str, u32)]) -> CoauthorGraph {
        CoauthorGraph::from_parts(
            nodes.iter().map(|s| s.to_string()),
            edges
                .iter()
                .map(|(a, b, w)| (a.to_string(), b.to_string(), *w)),
        )
        .expect("valid test graph")
    }

    /// Two triangles joined by a single bridge edge.
    fn bridged_triangles() -> CoauthorGraph {
        graph_of(
            &["A", "B", "C", "D", "E", "F"],
            &[
                ("A", "B", 1),
                ("A", "C", 1),
                ("B", "C", 1),
                ("C", "D", 1),
                ("D", "E", 1),
                ("D", "F", 1),
                ("E", "F", 1),
            ],
        )
    }

    #[test]
    fn bridged_triangles_split_into_two_communities() {
        let partition =
            greedy_modularity(&bridged_triangles(), EdgeWeighting::Unweighted)
                .expect("has edges");
        assert_eq!(partition.community_count(), 2);
        assert!((partition.q - 5.0 / 14.0).abs() < 1e-12);
        let sets = partition.community_sets();
        let as_vec: Vec<Vec<&str>> = sets
            .iter()
            .map(|s| s.iter().map(String::as_str).collect())
            .collect();
        assert!(as_vec.contains(&vec!["A", "B", "C"]));
        assert!(as_vec.contains(&vec!["D", "E", "F"]));
    }

    #[test]
    fn triangle_stays_one_community_at_zero_q() {
        let graph = graph_of(
            &["A", "B", "C"],
            &[("A", "B", 1), ("A", "C", 1), ("B", "C", 1)],
        );
        let partition =
            greedy_modularity(&graph, EdgeWeighting::Unweighted).expect("has edges");
        assert_eq!(partition.community_count(), 1);
        assert_eq!(partition.q, 0.0);
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let graph = graph_of(&["A", "B"], &[]);
        assert_eq!(
            greedy_modularity(&graph, EdgeWeighting::Unweighted),
            Err(StructureError::EmptyGraph)
        );
        assert_eq!(
            modularity(&graph, &BTreeMap::new(), EdgeWeighting::Unweighted),
            Err(StructureError::EmptyGraph)
        );
    }

    #[test]
    fn one_community_scores_exactly_zero() {
        let graph = bridged_triangles();
        let assignment: BTreeMap<AgencyId, usize> =
            graph.nodes().map(|id| (id.clone(), 0)).collect();
        assert_eq!(
            modularity(&graph, &assignment, EdgeWeighting::Unweighted).expect("covered"),
            0.0
        );
    }

    #[test]
    fn singletons_on_four_cycle_score_minus_quarter() {
        let graph = graph_of(
            &["A", "B", "C", "D"],
            &[("A", "B", 1), ("B", "C", 1), ("C", "D", 1), ("A", "D", 1)],
        );
        let assignment: BTreeMap<AgencyId, usize> = graph
            .nodes()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        assert_eq!(
            modularity(&graph, &assignment, EdgeWeighting::Unweighted).expect("covered"),
            -0.25
        );
    }

    #[test]
    fn modularity_requires_full_coverage() {
        let graph = graph_of(&["A", "B"], &[("A", "B", 1)]);
        let partial: BTreeMap<AgencyId, usize> = [("A".to_string(), 0)].into();
        assert_eq!(
            modularity(&graph, &partial, EdgeWeighting::Unweighted),
            Err(StructureError::UncoveredNode { node: "B".into() })
        );
    }

    #[test]
    fn labels_ordered_by_size_then_smallest_member() {
        // Community of three (D, E, F) must take label 0 over the pair
        // (A, B) despite sorting later alphabetically.
        let graph = graph_of(
            &["A", "B", "D", "E", "F"],
            &[
                ("A", "B", 1),
                ("D", "E", 1),
                ("D", "F", 1),
                ("E", "F", 1),
            ],
        );
        let partition =
            greedy_modularity(&graph, EdgeWeighting::Unweighted).expect("has edges");
        assert_eq!(partition.assignment["D"], 0);
        assert_eq!(partition.assignment["A"], 1);
    }

    #[test]
    fn weighted_merging_follows_heavy_edges() {
        // On the unweighted square every split is worth Q = 0; with two
        // heavy opposite edges the same split carries real mass.
        let graph = graph_of(
            &["A", "B", "C", "D"],
            &[("A", "B", 10), ("C", "D", 10), ("B", "C", 1), ("A", "D", 1)],
        );
        let unweighted =
            greedy_modularity(&graph, EdgeWeighting::Unweighted).expect("edges");
        let weighted =
            greedy_modularity(&graph, EdgeWeighting::Weighted).expect("edges");
        assert_eq!(unweighted.q, 0.0);
        assert!(weighted.q > 0.3);
        assert_eq!(weighted.community_count(), 2);
        assert_eq!(weighted.assignment["A"], weighted.assignment["B"]);
        assert_eq!(weighted.assignment["C"], weighted.assignment["D"]);
    }

    #[test]
    fn complete_graph_cores() {
        let graph = graph_of(
            &["A", "B", "C", "D"],
            &[
                ("A", "B", 1),
                ("A", "C", 1),
                ("A", "D", 1),
                ("B", "C", 1),
                ("B", "D", 1),
                ("C", "D", 1),
            ],
        );
        let decomposition = k_core(&graph);
        assert_eq!(decomposition.max_core, 3);
        assert!(decomposition.core_number.values().all(|&k| k == 3));
    }

    #[test]
    fn star_collapses_to_one_core() {
        let graph = graph_of(
            &["A", "B", "C", "D", "E", "H"],
            &[
                ("H", "A", 1),
                ("H", "B", 1),
                ("H", "C", 1),
                ("H", "D", 1),
                ("H", "E", 1),
            ],
        );
        let decomposition = k_core(&graph);
        assert_eq!(decomposition.max_core, 1);
        assert!(decomposition.core_number.values().all(|&k| k == 1));
    }

    #[test]
    fn shells_partition_nodes_in_descending_k() {
        // Triangle with a pendant: the pendant peels at 1, the triangle
        // at 2.
        let graph = graph_of(
            &["A", "B", "C", "P"],
            &[("A", "B", 1), ("A", "C", 1), ("B", "C", 1), ("C", "P", 1)],
        );
        let decomposition = k_core(&graph);
        let shells = core_shells(&decomposition);
        assert_eq!(shells.len(), 2);
        assert_eq!(shells[0].0, 2);
        assert_eq!(shells[0].1.len(), 3);
        assert_eq!(shells[1].0, 1);
        assert!(shells[1].1.contains("P"));
        let total: usize = shells.iter().map(|(_, s)| s.len()).sum();
        assert_eq!(total, graph.node_count());
    }

    #[test]
    fn empty_graph_has_empty_decomposition() {
        let decomposition = k_core(&CoauthorGraph::new());
        assert_eq!(decomposition.max_core, 0);
        assert!(decomposition.core_number.is_empty());
        assert!(core_shells(&decomposition).is_empty());
    }
}
