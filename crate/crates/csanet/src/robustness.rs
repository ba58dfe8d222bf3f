//! Targeted-attack and random-failure simulation.
//!
//! A fragmentation experiment removes vertices from the co-authorship graph
//! one at a time and records, after every removal, how much connected
//! structure survives. Removal order is set by an [`AttackStrategy`]:
//! centrality-guided orders model coordinated hub loss, the seeded random
//! order models uncoordinated failure, and explicit orders replay a fixed
//! scenario. Rankings can be recomputed after every removal (adaptive) or
//! frozen at their initial values.
//!
//! All tie-breaks are lexicographic on agency id and the random order draws
//! from a ChaCha8 generator seeded explicitly, so a trajectory is a pure
//! function of `(graph, strategy, count)`.

use std::collections::BTreeSet;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algo;
use crate::graph::CoauthorGraph;
use crate::AgencyId;

/// How removal targets are chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttackKind {
    /// Highest degree first.
    ByDegree,
    /// Highest strength (weighted degree) first.
    ByStrength,
    /// Highest betweenness first.
    ByBetweenness,
    /// Uniform random order from a seeded generator.
    Random { seed: u64 },
    /// Caller-supplied removal order, consumed front to back.
    Explicit { targets: Vec<AgencyId> },
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackKind::ByDegree => write!(f, "by-degree"),
            AttackKind::ByStrength => write!(f, "by-strength"),
            AttackKind::ByBetweenness => write!(f, "by-betweenness"),
            AttackKind::Random { seed } => write!(f, "random(seed={seed})"),
            AttackKind::Explicit { .. } => write!(f, "explicit"),
        }
    }
}

/// A removal order plus the adaptive/static switch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackStrategy {
    pub kind: AttackKind,
    /// Re-rank remaining vertices after every removal. Ignored by
    /// `Random` and `Explicit`, which carry their own orders.
    pub recompute: bool,
}

impl AttackStrategy {
    pub fn new(kind: AttackKind) -> Self {
        AttackStrategy {
            kind,
            recompute: true,
        }
    }
}

/// State of the surviving graph after one removal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackStep {
    /// Agency removed at this step.
    pub removed: AgencyId,
    /// Vertex count of the largest surviving component.
    pub giant_size: usize,
    /// Number of connected components among survivors.
    pub components: usize,
    /// Average shortest path length within the giant component;
    /// `None` once the giant component has fewer than two vertices.
    pub apl_giant: Option<f64>,
    /// Edges with both endpoints still present.
    pub edges_remaining: usize,
}

/// Full record of one simulated attack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentationTrajectory {
    pub strategy: AttackStrategy,
    pub steps: Vec<AttackStep>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RobustnessError {
    #[error("attack target '{node}' is not a vertex of the graph")]
    UnknownNode { node: AgencyId },
    #[error("attack target '{node}' appears more than once")]
    DuplicateTarget { node: AgencyId },
    #[error("cannot remove {requested} vertices: only {available} available")]
    InvalidCount { requested: usize, available: usize },
}

/// Mutable simulation state over the indexed view of a graph.
struct Simulation {
    ids: Vec<AgencyId>,
    adj: Vec<Vec<usize>>,
    weights: Vec<Vec<u32>>,
    alive: Vec<bool>,
}

impl Simulation {
    fn new(graph: &CoauthorGraph) -> Self {
        let view = graph.indexed();
        let alive = vec![true; view.ids.len()];
        Simulation {
            ids: view.ids,
            adj: view.adj,
            weights: view.weights,
            alive,
        }
    }

    fn living(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ids.len()).filter(|&v| self.alive[v])
    }

    /// Adjacency restricted to living vertices, in the original indexing.
    /// Dead vertices keep an entry (empty) so index arithmetic is stable.
    fn surviving_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.ids.len()];
        for v in self.living() {
            adj[v] = self.adj[v]
                .iter()
                .copied()
                .filter(|&u| self.alive[u])
                .collect();
        }
        adj
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&u| self.alive[u]).count()
    }

    fn strength(&self, v: usize) -> u64 {
        self.adj[v]
            .iter()
            .zip(&self.weights[v])
            .filter(|(&u, _)| self.alive[u])
            .map(|(_, &w)| u64::from(w))
            .sum()
    }

    /// Highest-ranked living vertex under `score`, ties to the smaller
    /// index (equivalently, the lexicographically smaller agency id).
    fn argmax_living<S: PartialOrd>(&self, mut score: impl FnMut(&Self, usize) -> S) -> usize {
        let mut best: Option<(usize, S)> = None;
        for v in self.living() {
            let s = score(self, v);
            match &best {
                Some((_, bs)) if s <= *bs => {}
                _ => best = Some((v, s)),
            }
        }
        best.expect("argmax over at least one living vertex").0
    }

    fn measure(&self, removed: AgencyId) -> AttackStep {
        let adj = self.surviving_adjacency();
        let members: Vec<usize> = self.living().collect();
        let edges_remaining = adj.iter().map(Vec::len).sum::<usize>() / 2;
        if members.is_empty() {
            return AttackStep {
                removed,
                giant_size: 0,
                components: 0,
                apl_giant: None,
                edges_remaining,
            };
        }
        let (labels, components) = algo::components_of(&adj, &members);
        // Giant component: largest size, ties to the smallest label so
        // the choice is deterministic.
        let mut sizes: Vec<usize> = vec![0; components];
        for &v in &members {
            sizes[labels[v]] += 1;
        }
        let giant_label = (0..components)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("at least one component");
        let giant: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&v| labels[v] == giant_label)
            .collect();
        AttackStep {
            removed,
            giant_size: giant.len(),
            components,
            apl_giant: algo::component_apl(&adj, &giant),
            edges_remaining,
        }
    }
}

/// Runs one attack, removing `count` vertices and recording the surviving
/// structure after each removal.
///
/// `Explicit` targets are validated up front; `count` may not exceed the
/// number of vertices (for `Explicit`, the number of supplied targets).
pub fn run_attack(
    graph: &CoauthorGraph,
    strategy: &AttackStrategy,
    count: usize,
) -> Result<FragmentationTrajectory, RobustnessError> {
    let mut sim = Simulation::new(graph);
    // Explicit and random strategies fix their whole order up front.
    let fixed_order: Option<Vec<usize>> = match &strategy.kind {
        AttackKind::Explicit { targets } => {
            let mut seen = BTreeSet::new();
            let mut order = Vec::with_capacity(targets.len());
            for t in targets {
                let idx = sim
                    .ids
                    .binary_search(t)
                    .map_err(|_| RobustnessError::UnknownNode { node: t.clone() })?;
                if !seen.insert(idx) {
                    return Err(RobustnessError::DuplicateTarget { node: t.clone() });
                }
                order.push(idx);
            }
            if count > order.len() {
                return Err(RobustnessError::InvalidCount {
                    requested: count,
                    available: order.len(),
                });
            }
            Some(order)
        }
        AttackKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut remaining: Vec<usize> = (0..sim.ids.len()).collect();
            let mut order = Vec::with_capacity(remaining.len());
            while !remaining.is_empty() {
                let pick = (0..remaining.len())
                    .choose(&mut rng)
                    .expect("non-empty remaining set");
                order.push(remaining.remove(pick));
            }
            Some(order)
        }
        _ => None,
    };
    if count > sim.ids.len() {
        return Err(RobustnessError::InvalidCount {
            requested: count,
            available: sim.ids.len(),
        });
    }

    // Static centrality orders are fixed before any removal.
    let static_order: Option<Vec<usize>> = match (&strategy.kind, strategy.recompute) {
        (AttackKind::ByDegree, false) => Some(rank_all(&sim, |s, v| s.degree(v) as f64)),
        (AttackKind::ByStrength, false) => Some(rank_all(&sim, |s, v| s.strength(v) as f64)),
        (AttackKind::ByBetweenness, false) => {
            let bc = algo::brandes(&sim.surviving_adjacency());
            Some(rank_all(&sim, |_, v| bc[v]))
        }
        _ => None,
    };

    let mut steps = Vec::with_capacity(count);
    let mut planned = fixed_order.or(static_order).map(Vec::into_iter);
    for _ in 0..count {
        let victim = match &mut planned {
            Some(order) => order.next().expect("plan covers every removal"),
            None => match &strategy.kind {
                AttackKind::ByDegree => sim.argmax_living(|s, v| s.degree(v)),
                AttackKind::ByStrength => sim.argmax_living(|s, v| s.strength(v)),
                AttackKind::ByBetweenness => {
                    let bc = algo::brandes(&sim.surviving_adjacency());
                    sim.argmax_living(|_, v| bc[v])
                }
                AttackKind::Random { .. } | AttackKind::Explicit { .. } => {
                    unreachable!("random and explicit orders are precomputed")
                }
            },
        };
        sim.alive[victim] = false;
        steps.push(sim.measure(sim.ids[victim].clone()));
    }

    Ok(FragmentationTrajectory {
        strategy: strategy.clone(),
        steps,
    })
}

/// Ranks every vertex by descending score, ties to the smaller index.
fn rank_all(sim: &Simulation, mut score: impl FnMut(&Simulation, usize) -> f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sim.ids.len()).collect();
    let scores: Vec<f64> = order.iter().map(|&v| score(sim, v)).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("centrality scores are finite")
            .then(a.cmp(&b))
    });
    order
}

/// Runs several attacks on the same graph, preserving input order.
pub fn compare_strategies(
    graph: &CoauthorGraph,
    strategies: &[AttackStrategy],
    count: usize,
) -> Result<Vec<FragmentationTrajectory>, RobustnessError> {
    strategies
        .iter()
        .map(|s| run_attack(graph, s, count))
        .collect()
}
