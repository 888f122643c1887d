//! Stage-wise independent cascade dynamics.
//!
//! A node activated at stage `t` (by contagion or by seeding) makes exactly
//! one attempt on each inactive neighbor at stage `t + 1`. Attempts are
//! addressed by graph slot so that the same coin flips can be replayed from
//! a pre-drawn [`LiveEdgeSample`].

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Source of outcomes for directed influence attempts.
pub trait EdgeCoins {
    /// Outcome of the attempt through `slot`. Called at most once per slot
    /// and run.
    fn attempt(&mut self, slot: usize) -> bool;
}

/// Fresh independent coin per attempt.
pub struct BernoulliCoins<'a, R: ?Sized> {
    pp: f64,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> BernoulliCoins<'a, R> {
    pub fn new(pp: f64, rng: &'a mut R) -> Self {
        debug_assert!((0.0..=1.0).contains(&pp));
        BernoulliCoins { pp, rng }
    }
}

impl<R: Rng + ?Sized> EdgeCoins for BernoulliCoins<'_, R> {
    #[inline]
    fn attempt(&mut self, _slot: usize) -> bool {
        self.rng.random::<f64>() < self.pp
    }
}

impl EdgeCoins for &LiveEdgeSample {
    #[inline]
    fn attempt(&mut self, slot: usize) -> bool {
        self.is_live(slot)
    }
}

/// Pre-flipped coins, one per directed slot of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeSample {
    bits: Vec<u64>,
    slots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{u} -> {v} is not an edge of the graph")]
pub struct NotAnEdge {
    pub u: NodeId,
    pub v: NodeId,
}

impl LiveEdgeSample {
    /// All slots dead.
    pub fn empty(g: &Graph) -> Self {
        let slots = g.slot_count();
        LiveEdgeSample { bits: vec![0; slots.div_ceil(64)], slots }
    }

    /// All slots live.
    pub fn full(g: &Graph) -> Self {
        let mut s = Self::empty(g);
        for slot in 0..s.slots {
            s.set(slot);
        }
        s
    }

    /// Sample in which exactly the listed directed attempts succeed.
    pub fn from_live_pairs(g: &Graph, live: &[(NodeId, NodeId)]) -> Result<Self, NotAnEdge> {
        let mut s = Self::empty(g);
        for &(u, v) in live {
            let slot = g.slot_of(u, v).ok_or(NotAnEdge { u, v })?;
            s.set(slot);
        }
        Ok(s)
    }

    fn set(&mut self, slot: usize) {
        self.bits[slot / 64] |= 1 << (slot % 64);
    }

    #[inline]
    pub fn is_live(&self, slot: usize) -> bool {
        self.bits[slot / 64] >> (slot % 64) & 1 == 1
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn live_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Draws every directed slot of `g` live independently with probability `pp`.
pub fn sample_live_edges<R: Rng + ?Sized>(g: &Graph, pp: f64, rng: &mut R) -> LiveEdgeSample {
    debug_assert!((0.0..=1.0).contains(&pp));
    let mut s = LiveEdgeSample::empty(g);
    for slot in 0..s.slots {
        if rng.random::<f64>() < pp {
            s.set(slot);
        }
    }
    s
}

/// Nodes reachable from `seeds` over live slots, seeds included, ascending.
pub fn reachable_coverage(g: &Graph, sample: &LiveEdgeSample, seeds: &[NodeId]) -> Vec<NodeId> {
    let mut seen = vec![false; g.node_count()];
    let mut stack = Vec::new();
    for &s in seeds {
        if !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for (slot, &v) in g.slot_range(u).zip(g.neighbors(u)) {
            if sample.is_live(slot) && !seen[v as usize] {
                seen[v as usize] = true;
                stack.push(v);
            }
        }
    }
    (0..g.node_count() as NodeId).filter(|&v| seen[v as usize]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Inactive,
    Natural,
    Seeded,
}

/// Activity of one stage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StageRecord {
    pub stage: u32,
    pub natural_count: u32,
    pub seeded_count: u32,
    pub seeded_ids: Vec<NodeId>,
    /// Buffered seeds still held after this stage's seeding decision.
    pub buffer_credit: u32,
}

/// Mutable record of a single run.
#[derive(Debug, Clone)]
pub struct DiffusionState {
    status: Vec<Activation>,
    active_count: usize,
    natural_count: usize,
    frontier: Vec<NodeId>,
    pending: Vec<NodeId>,
    stage: u32,
    log: Vec<StageRecord>,
}

impl DiffusionState {
    pub fn new(node_count: usize) -> Self {
        DiffusionState {
            status: vec![Activation::Inactive; node_count],
            active_count: 0,
            natural_count: 0,
            frontier: Vec::new(),
            pending: Vec::new(),
            stage: 0,
            log: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.status.len()
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn status(&self, v: NodeId) -> Activation {
        self.status[v as usize]
    }

    #[inline]
    pub fn is_active(&self, v: NodeId) -> bool {
        self.status[v as usize] != Activation::Inactive
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn natural_count(&self) -> usize {
        self.natural_count
    }

    pub fn all_active(&self) -> bool {
        self.active_count == self.status.len()
    }

    /// Nodes whose attempts are still pending.
    pub fn frontier(&self) -> &[NodeId] {
        &self.frontier
    }

    /// Nodes activated during the current stage so far.
    pub fn activated_this_stage(&self) -> &[NodeId] {
        &self.pending
    }

    pub fn log(&self) -> &[StageRecord] {
        &self.log
    }

    /// Active node ids, ascending.
    pub fn active_nodes(&self) -> Vec<NodeId> {
        (0..self.status.len() as NodeId).filter(|&v| self.is_active(v)).collect()
    }

    fn record(&mut self) -> &mut StageRecord {
        if self.log.last().is_none_or(|r| r.stage != self.stage) {
            self.log.push(StageRecord { stage: self.stage, ..Default::default() });
        }
        self.log.last_mut().expect("record just ensured")
    }

    /// Spends the frontier's attempts. Newly activated nodes are marked
    /// natural and join the frontier of the next stage.
    pub fn natural_step<C: EdgeCoins + ?Sized>(&mut self, g: &Graph, coins: &mut C) -> usize {
        let mut activated = 0;
        let frontier = core::mem::take(&mut self.frontier);
        for &u in &frontier {
            for (slot, &v) in g.slot_range(u).zip(g.neighbors(u)) {
                if self.status[v as usize] == Activation::Inactive && coins.attempt(slot) {
                    self.status[v as usize] = Activation::Natural;
                    self.pending.push(v);
                    activated += 1;
                }
            }
        }
        // keep the allocation around for the next swap
        self.frontier = frontier;
        self.frontier.clear();
        self.active_count += activated;
        self.natural_count += activated;
        self.record().natural_count += activated as u32;
        activated
    }

    /// Activates `v` as a seed in the current stage. No-op on active nodes.
    pub fn seed(&mut self, v: NodeId) -> bool {
        if self.is_active(v) {
            return false;
        }
        self.status[v as usize] = Activation::Seeded;
        self.pending.push(v);
        self.active_count += 1;
        let rec = self.record();
        rec.seeded_count += 1;
        rec.seeded_ids.push(v);
        true
    }

    pub fn set_buffer_credit(&mut self, credit: u32) {
        self.record().buffer_credit = credit;
    }

    /// Closes the stage: this stage's activations become the next frontier.
    pub fn end_stage(&mut self) {
        self.record();
        core::mem::swap(&mut self.frontier, &mut self.pending);
        self.stage += 1;
    }

    /// Final metrics. Stages after the last activation are not reported.
    pub fn result(&self) -> RunResult {
        let n = self.status.len().max(1) as f64;
        let duration = self
            .log
            .iter()
            .rev()
            .find(|r| r.natural_count + r.seeded_count > 0)
            .map_or(0, |r| r.stage);
        let mut cumulative = 0usize;
        let mut peak_stage = 0;
        for r in &self.log {
            cumulative += (r.natural_count + r.seeded_count) as usize;
            if cumulative == self.active_count {
                peak_stage = r.stage;
                break;
            }
        }
        let stages: Vec<StageRecord> =
            self.log.iter().take_while(|r| r.stage <= duration).cloned().collect();
        let seeds_used = stages
            .iter()
            .flat_map(|r| r.seeded_ids.iter().map(move |&v| (r.stage, v)))
            .collect();
        RunResult {
            node_count: self.status.len(),
            active_count: self.active_count,
            natural_count: self.natural_count,
            coverage_total: self.active_count as f64 / n,
            coverage_natural: self.natural_count as f64 / n,
            duration,
            peak_stage,
            seeds_used,
            stages,
        }
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub node_count: usize,
    pub active_count: usize,
    pub natural_count: usize,
    /// Fraction of nodes active at termination.
    pub coverage_total: f64,
    /// Fraction of nodes activated by contagion alone.
    pub coverage_natural: f64,
    /// Last stage with any activation.
    pub duration: u32,
    /// First stage at which the final activation count was reached.
    pub peak_stage: u32,
    /// `(stage, node)` for every seed, in injection order.
    pub seeds_used: Vec<(u32, NodeId)>,
    /// Per-stage log up to and including `duration`.
    pub stages: Vec<StageRecord>,
}

/// One natural sub-step with independent coins of probability `pp`.
pub fn ic_step<R: Rng + ?Sized>(g: &Graph, state: &mut DiffusionState, pp: f64, rng: &mut R) -> usize {
    state.natural_step(g, &mut BernoulliCoins::new(pp, rng))
}

/// One natural sub-step reading outcomes from `sample`.
pub fn ic_step_coupled(g: &Graph, state: &mut DiffusionState, sample: &LiveEdgeSample) -> usize {
    debug_assert_eq!(sample.slot_count(), g.slot_count());
    state.natural_step(g, &mut &*sample)
}

/// Seeds everything at stage 0 and iterates natural steps to the fixpoint.
pub fn cascade_from<C: EdgeCoins>(g: &Graph, seeds: &[NodeId], mut coins: C) -> DiffusionState {
    let mut state = DiffusionState::new(g.node_count());
    for &s in seeds {
        state.seed(s);
    }
    state.end_stage();
    while !state.frontier().is_empty() {
        state.natural_step(g, &mut coins);
        state.end_stage();
    }
    state
}
