//! Seed schedules: single stage, one per stage, revival and buffered.
//!
//! Every stage runs the natural sub-step first, then asks the schedule how
//! many seeds to inject given that stage's natural activations. Seeds are
//! always the highest-ranked nodes not yet active.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::Ranking;
use crate::diffusion::{DiffusionState, EdgeCoins, RunResult};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeedingMode {
    /// Whole budget at stage 0.
    #[serde(rename = "SS")]
    SingleStage,
    /// One seed every stage until the budget is spent.
    #[serde(rename = "OPS_Sq")]
    Sequential,
    /// One seed only on stages where contagion has stopped.
    #[serde(rename = "OPS_RSq")]
    Revival,
    /// One seed of credit per stage, all spent once contagion stops.
    #[serde(rename = "OPS_BSq")]
    Buffered,
}

impl SeedingMode {
    pub const ALL: [SeedingMode; 4] = [
        SeedingMode::SingleStage,
        SeedingMode::Sequential,
        SeedingMode::Revival,
        SeedingMode::Buffered,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SeedingMode::SingleStage => "SS",
            SeedingMode::Sequential => "OPS_Sq",
            SeedingMode::Revival => "OPS_RSq",
            SeedingMode::Buffered => "OPS_BSq",
        }
    }

    pub fn is_sequential(self) -> bool {
        self != SeedingMode::SingleStage
    }
}

impl fmt::Display for SeedingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown seeding mode (expected SS, OPS_Sq, OPS_RSq or OPS_BSq)")]
pub struct ParseModeError;

impl FromStr for SeedingMode {
    type Err = ParseModeError;

    /// Accepts the codes case-insensitively, with or without the `OPS_` prefix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s
            .strip_prefix("OPS_")
            .or_else(|| s.strip_prefix("ops_"))
            .unwrap_or(s);
        SeedingMode::ALL
            .into_iter()
            .find(|m| {
                let code = m.code();
                code.eq_ignore_ascii_case(s)
                    || code.strip_prefix("OPS_").is_some_and(|c| c.eq_ignore_ascii_case(bare))
            })
            .ok_or(ParseModeError)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeedingError {
    #[error("seeding percentage {0} outside (0, 1]")]
    BadFraction(f64),
    #[error("budget must be at least one seed")]
    ZeroBudget,
    #[error("budget of {budget} seeds exceeds the {node_count} nodes of the graph")]
    BudgetTooLarge { budget: u32, node_count: usize },
    #[error("ranking covers {ranking} nodes but the graph has {node_count}")]
    RankingMismatch { ranking: usize, node_count: usize },
}

/// Seed allowance of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedBudget {
    pub budget: u32,
    /// Budget as a fraction of the node count.
    pub sp: f64,
    /// Seeds accrued but not yet spent (buffered mode only).
    pub buffer_credit: u32,
    pub remaining: u32,
}

impl SeedBudget {
    /// `max(1, round(sp * node_count))` seeds.
    pub fn from_fraction(sp: f64, node_count: usize) -> Result<Self, SeedingError> {
        if !(sp > 0.0 && sp <= 1.0) {
            return Err(SeedingError::BadFraction(sp));
        }
        let budget = (libm::round(sp * node_count as f64) as u32).max(1);
        if budget as usize > node_count {
            return Err(SeedingError::BudgetTooLarge { budget, node_count });
        }
        Ok(SeedBudget { budget, sp, buffer_credit: 0, remaining: budget })
    }

    pub fn with_count(budget: u32, node_count: usize) -> Result<Self, SeedingError> {
        if budget == 0 {
            return Err(SeedingError::ZeroBudget);
        }
        if budget as usize > node_count {
            return Err(SeedingError::BudgetTooLarge { budget, node_count });
        }
        let sp = budget as f64 / node_count as f64;
        Ok(SeedBudget { budget, sp, buffer_credit: 0, remaining: budget })
    }

    /// Same allowance, nothing spent.
    pub fn fresh(&self) -> Self {
        SeedBudget { buffer_credit: 0, remaining: self.budget, ..self.clone() }
    }
}

/// Highest-ranked node for which `is_active` is false.
pub fn next_seed(ranking: &Ranking, is_active: impl Fn(NodeId) -> bool) -> Option<NodeId> {
    ranking.order.iter().copied().find(|&v| !is_active(v))
}

/// Number of seeds to inject in the current stage, decided after its
/// natural sub-step. Updates the buffered credit.
pub fn seeding_decision(mode: SeedingMode, natural_this_stage: usize, budget: &mut SeedBudget) -> u32 {
    let stalled = natural_this_stage == 0;
    match mode {
        SeedingMode::SingleStage => budget.remaining,
        SeedingMode::Sequential => u32::from(budget.remaining > 0),
        SeedingMode::Revival => u32::from(stalled && budget.remaining > 0),
        SeedingMode::Buffered => {
            budget.buffer_credit = (budget.buffer_credit + 1).min(budget.remaining);
            if stalled {
                core::mem::take(&mut budget.buffer_credit)
            } else {
                0
            }
        }
    }
}

/// Runs one schedule to termination and returns the final state, whose log
/// records every stage.
pub fn simulate<C: EdgeCoins>(
    g: &Graph,
    ranking: &Ranking,
    mode: SeedingMode,
    budget: &SeedBudget,
    mut coins: C,
) -> Result<DiffusionState, SeedingError> {
    let n = g.node_count();
    if ranking.len() != n {
        return Err(SeedingError::RankingMismatch { ranking: ranking.len(), node_count: n });
    }
    if budget.budget == 0 {
        return Err(SeedingError::ZeroBudget);
    }
    if budget.budget as usize > n {
        return Err(SeedingError::BudgetTooLarge { budget: budget.budget, node_count: n });
    }

    let mut state = DiffusionState::new(n);
    let mut budget = budget.fresh();
    let mut cursor = 0usize;
    loop {
        let natural = state.natural_step(g, &mut coins);
        let wanted = seeding_decision(mode, natural, &mut budget);
        for _ in 0..wanted {
            // the active set only grows, so skipped nodes stay skipped
            while cursor < ranking.order.len() && state.is_active(ranking.order[cursor]) {
                cursor += 1;
            }
            let Some(&v) = ranking.order.get(cursor) else { break };
            state.seed(v);
            budget.remaining -= 1;
        }
        budget.buffer_credit = budget.buffer_credit.min(budget.remaining);
        state.set_buffer_credit(budget.buffer_credit);

        let quiet = state.activated_this_stage().is_empty();
        state.end_stage();
        if state.all_active() || (quiet && (budget.remaining == 0 || cursor >= ranking.order.len())) {
            break;
        }
    }
    Ok(state)
}

/// Runs one schedule and reports its metrics.
pub fn run_strategy<C: EdgeCoins>(
    g: &Graph,
    ranking: &Ranking,
    mode: SeedingMode,
    budget: &SeedBudget,
    coins: C,
) -> Result<RunResult, SeedingError> {
    simulate(g, ranking, mode, budget, coins).map(|s| s.result())
}
