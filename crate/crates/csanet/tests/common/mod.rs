//! Shared generators and independent oracles for the integration suites.
//!
//! Every oracle recomputes its quantity from first principles — explicit
//! shortest-path enumeration, exhaustive partition search, naive
//! min-degree peeling, all-pairs BFS — sharing no code with the library
//! implementations they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use csanet::corpus::{AdvisoryRecord, AgencyEntry, AgencyRegistry, CorpusDataset, ThreatType};
use csanet::graph::CoauthorGraph;
use csanet::AgencyId;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_ids(n: usize) -> Vec<AgencyId> {
    (0..n).map(|i| format!("N{i:02}")).collect()
}

/// Graph from index edges over the `node_ids(n)` roster.
pub fn graph_from_edges(n: usize, edges: &[(usize, usize, u32)]) -> CoauthorGraph {
    let ids = node_ids(n);
    CoauthorGraph::from_parts(
        ids.clone(),
        edges
            .iter()
            .map(|&(a, b, w)| (ids[a].clone(), ids[b].clone(), w)),
    )
    .expect("edge list must be well-formed")
}

/// Connected random graph: a random spanning tree plus density `p`
/// extras, edge weights 1..=5.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> CoauthorGraph {
    let mut edges = BTreeMap::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert((j, i), rng.random_range(1..=5u32));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random_bool(p) {
                edges
                    .entry((a, b))
                    .or_insert_with(|| rng.random_range(1..=5u32));
            }
        }
    }
    let list: Vec<(usize, usize, u32)> =
        edges.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    graph_from_edges(n, &list)
}

/// Random graph that may be disconnected (no spanning tree).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> CoauthorGraph {
    let mut list = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random_bool(p) {
                list.push((a, b, rng.random_range(1..=5u32)));
            }
        }
    }
    graph_from_edges(n, &list)
}

/// Star with `leaves` spokes: node 0 is the hub.
pub fn star_graph(leaves: usize) -> CoauthorGraph {
    let edges: Vec<(usize, usize, u32)> = (1..=leaves).map(|i| (0, i, 1)).collect();
    graph_from_edges(leaves + 1, &edges)
}

// ------------------------------------------------------------------ oracles

fn adjacency(graph: &CoauthorGraph) -> (Vec<AgencyId>, Vec<Vec<usize>>) {
    let ids: Vec<AgencyId> = graph.nodes().cloned().collect();
    let index: BTreeMap<&AgencyId, usize> =
        ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let mut adj = vec![Vec::new(); ids.len()];
    for (a, b, _) in graph.edges() {
        let (i, j) = (index[a], index[b]);
        adj[i].push(j);
        adj[j].push(i);
    }
    (ids, adj)
}

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Betweenness by literal shortest-path enumeration: for every pair,
/// walk the whole set of shortest paths and tally interior vertices.
/// Normalization matches the library: pairs counted from both endpoints
/// over divisor (n-1)(n-2)/2, zero for n < 3.
pub fn brute_betweenness(graph: &CoauthorGraph) -> BTreeMap<AgencyId, f64> {
    let (ids, adj) = adjacency(graph);
    let n = ids.len();
    let mut score = vec![0.0f64; n];
    if n > 2 {
        for s in 0..n {
            let dist = bfs_dist(&adj, s);
            for t in (s + 1)..n {
                if dist[t].is_none() {
                    continue;
                }
                let mut paths: Vec<Vec<usize>> = Vec::new();
                let mut stack = vec![vec![t]];
                while let Some(path) = stack.pop() {
                    let head = *path.last().unwrap();
                    if head == s {
                        paths.push(path);
                        continue;
                    }
                    for &u in &adj[head] {
                        if dist[u].map(|d| d + 1) == dist[head] {
                            let mut next = path.clone();
                            next.push(u);
                            stack.push(next);
                        }
                    }
                }
                let total = paths.len() as f64;
                for path in &paths {
                    for &v in &path[1..path.len() - 1] {
                        score[v] += 1.0 / total;
                    }
                }
            }
        }
        // Each unordered pair was counted once above; the library convention
        // counts pairs from both endpoints over divisor (n-1)(n-2)/2, which
        // is equivalent to doubling: net scale 4/((n-1)(n-2)).
        let scale = 4.0 / ((n - 1) as f64 * (n - 2) as f64);
        for s in &mut score {
            *s *= scale;
        }
    }
    ids.into_iter().zip(score).collect()
}

/// Core numbers by independent recomputation: for each k, repeatedly
/// delete vertices of degree < k and record the survivors.
pub fn brute_core_numbers(graph: &CoauthorGraph) -> BTreeMap<AgencyId, u32> {
    let (ids, adj) = adjacency(graph);
    let n = ids.len();
    let mut core = vec![0u32; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let mut removed = false;
            for v in 0..n {
                if alive[v] {
                    let deg = adj[v].iter().filter(|&&u| alive[u]).count();
                    if deg < k {
                        alive[v] = false;
                        removed = true;
                    }
                }
            }
            if !removed {
                break;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k as u32;
            }
        }
    }
    ids.into_iter().zip(core).collect()
}

/// All set partitions of `n` items as restricted-growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(labels: &mut Vec<usize>, i: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for label in 0..=max + 1 {
            labels[i] = label;
            rec(labels, i + 1, max.max(label), out);
        }
    }
    if n > 0 {
        rec(&mut labels, 1, 0, &mut out);
    }
    out
}

/// Newman modularity of a labeling, unweighted, straight from the sums.
pub fn modularity_oracle(graph: &CoauthorGraph, labels: &BTreeMap<AgencyId, usize>) -> f64 {
    let m = graph.edge_count() as f64;
    let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
    let mut degree_sum: BTreeMap<usize, f64> = BTreeMap::new();
    for (a, b, _) in graph.edges() {
        if labels[a] == labels[b] {
            *internal.entry(labels[a]).or_default() += 1.0;
        }
    }
    for id in graph.nodes() {
        *degree_sum.entry(labels[id]).or_default() += graph.degree(id) as f64;
    }
    degree_sum
        .iter()
        .map(|(c, d)| {
            internal.get(c).copied().unwrap_or(0.0) / m - (d / (2.0 * m)).powi(2)
        })
        .sum()
}

/// Mean shortest-path distance over unordered pairs of the largest
/// component, by all-pairs BFS.
pub fn apl_oracle(graph: &CoauthorGraph) -> Option<f64> {
    let (ids, adj) = adjacency(graph);
    let n = ids.len();
    let mut best: Option<Vec<usize>> = None;
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let members: Vec<usize> = bfs_dist(&adj, s)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
            .collect();
        for &v in &members {
            seen[v] = true;
        }
        if best.as_ref().is_none_or(|b| members.len() > b.len()) {
            best = Some(members);
        }
    }
    let giant = best?;
    if giant.len() < 2 {
        return None;
    }
    let mut total = 0usize;
    for &s in &giant {
        let dist = bfs_dist(&adj, s);
        for &t in &giant {
            if t > s {
                total += dist[t].expect("giant component must be connected");
            }
        }
    }
    let pairs = giant.len() * (giant.len() - 1) / 2;
    Some(total as f64 / pairs as f64)
}

/// (largest component size, component count) by plain BFS sweep.
pub fn components_oracle(graph: &CoauthorGraph) -> (usize, usize) {
    let (_, adj) = adjacency(graph);
    let n = adj.len();
    let mut seen = vec![false; n];
    let (mut giant, mut count) = (0usize, 0usize);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let members: Vec<usize> = bfs_dist(&adj, s)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
            .collect();
        for &v in &members {
            seen[v] = true;
        }
        giant = giant.max(members.len());
    }
    (giant, count)
}

pub fn density_oracle(graph: &CoauthorGraph) -> f64 {
    let n = graph.node_count() as f64;
    graph.edge_count() as f64 / (n * (n - 1.0) / 2.0)
}

// ----------------------------------------------------------------- corpora

/// Synthetic registry of `n` agencies with display names and aliases.
pub fn synthetic_registry(n: usize) -> AgencyRegistry {
    AgencyRegistry::from_entries((0..n).map(|i| {
        (
            format!("AG{i:02}"),
            AgencyEntry {
                display_name: format!("Agency Number {i:02}"),
                country: "US".into(),
                aliases: BTreeSet::from([format!("The {i:02}th Agency")]),
            },
        )
    }))
    .expect("synthetic registry must be valid")
}

/// Random advisory corpus over a synthetic registry: 1..=12 advisories,
/// each signed by 2..=7 distinct agencies.
pub fn random_corpus(rng: &mut ChaCha8Rng, pool: usize) -> CorpusDataset {
    let registry = synthetic_registry(pool);
    let count = rng.random_range(1..=12);
    let advisories = (0..count)
        .map(|i| {
            let k = rng.random_range(2..=7.min(pool));
            let mut agencies = BTreeSet::new();
            while agencies.len() < k {
                agencies.insert(format!("AG{:02}", rng.random_range(0..pool)));
            }
            AdvisoryRecord {
                advisory_id: format!("ADV-{i:03}"),
                published: chrono::NaiveDate::from_ymd_opt(2025, 1, 1 + (i as u32 % 28))
                    .unwrap(),
                threat_type: match i % 3 {
                    0 => ThreatType::Apt,
                    1 => ThreatType::Ransomware,
                    _ => ThreatType::InfrastructureExploitation,
                },
                agencies,
            }
        })
        .collect();
    CorpusDataset {
        advisories,
        registry,
        provenance: "synthetic".into(),
    }
}
