//! Independent-cascade diffusion with scheduled seeding.
//!
//! The crate builds undirected graphs ([`graph`], [`generate`]), ranks nodes
//! ([`centrality`]), runs stage-wise cascades ([`diffusion`]) under four seed
//! schedules ([`seeding`]), pairs every sequential schedule with its
//! single-stage reference ([`experiment`]) and summarises the pairs
//! ([`analysis`], [`wilcoxon`]).
//!
//! `no_std`; needs `alloc`.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod centrality;
pub mod diffusion;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod seeding;
pub mod wilcoxon;

pub use centrality::{rank_nodes, Ranking, Strategy};
pub use diffusion::{DiffusionState, EdgeCoins, LiveEdgeSample, RunResult};
pub use experiment::{coupled_pair, CellKey, PairMetrics, PairRecord};
pub use generate::{generate_ba, generate_ws, BaParams, WsParams};
pub use graph::{Graph, GraphError, NodeId};
pub use seeding::{run_strategy, SeedBudget, SeedingError, SeedingMode};
