//! Co-authorship network analysis of joint cybersecurity advisories.
//!
//! The crate turns a corpus of multi-agency advisories into a weighted
//! undirected co-authorship graph and computes the structural profile of
//! the coalition behind them: centrality rankings, global cohesion
//! metrics, greedy-modularity communities, the k-core nucleus, and
//! hub-removal robustness trajectories.
//!
//! Pipeline: [`corpus`] parses and validates the advisory records and the
//! agency registry; [`graph`] projects each advisory's author set into a
//! clique and accumulates integer edge weights; [`metrics`] and
//! [`structure`] compute node-level and meso-scale statistics;
//! [`robustness`] simulates targeted and random node removal; [`report`]
//! assembles rankings, figure-ready data series, and interchange files
//! for the CLI.
//!
//! Everything is deterministic: iteration follows lexicographic agency
//! order, random attack strategies use an explicitly seeded ChaCha8
//! generator, and repeated runs over the same inputs produce
//! byte-identical outputs.

pub mod corpus;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod robustness;
pub mod structure;

mod algo;

pub use corpus::{AdvisoryRecord, AgencyRegistry, CorpusDataset, ThreatType};
pub use graph::{build_graph, CoauthorGraph};
pub use metrics::{GlobalMetrics, NodeMetrics};
pub use report::ReportBundle;
pub use robustness::{AttackKind, AttackStrategy, FragmentationTrajectory};
pub use structure::{CommunityPartition, CoreDecomposition};

/// Canonical agency identifier (e.g. `CISA`, `NCSC-UK`).
///
/// Registry lookups resolve display names and aliases to this form; the
/// graph and all downstream modules key nodes by it.
pub type AgencyId = String;
