//! Paired single-stage vs sequential comparisons.
//!
//! In the coupled protocol both runs read their coin flips from one shared
//! [`LiveEdgeSample`], so the difference between them is due to the seed
//! schedule alone.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{coverage_ref, duration_ref};
use crate::centrality::{Ranking, Strategy};
use crate::diffusion::{sample_live_edges, Activation, BernoulliCoins, DiffusionState, LiveEdgeSample};
use crate::graph::Graph;
use crate::seeding::{simulate, SeedBudget, SeedingError, SeedingMode};

/// Raw and relative outcome of one single-stage / sequential pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMetrics {
    pub mode: SeedingMode,
    pub node_count: usize,
    pub budget: u32,
    pub coverage_ss: f64,
    pub coverage_seq: f64,
    pub natural_ss: f64,
    pub natural_seq: f64,
    pub duration_ss: u32,
    pub duration_seq: u32,
    pub coverage_ref: Option<f64>,
    pub duration_ref: Option<f64>,
    /// Share of the single-stage seed set activated by contagion in the
    /// sequential run.
    pub seeds_saved: f64,
}

/// Identity of a record inside a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellKey {
    pub network: String,
    pub strategy: Strategy,
    pub mode: SeedingMode,
    pub pp: f64,
    pub sp: f64,
    pub replication: u32,
}

/// One row of a grid's output table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub network: String,
    pub strategy: Strategy,
    pub mode: SeedingMode,
    pub pp: f64,
    pub sp: f64,
    pub replication: u32,
    pub node_count: usize,
    pub budget: u32,
    pub coverage_ss: f64,
    pub coverage_seq: f64,
    pub natural_ss: f64,
    pub natural_seq: f64,
    pub duration_ss: u32,
    pub duration_seq: u32,
    pub coverage_ref: Option<f64>,
    pub duration_ref: Option<f64>,
    pub seeds_saved: f64,
}

impl PairRecord {
    pub fn new(key: CellKey, m: PairMetrics) -> Self {
        debug_assert_eq!(key.mode, m.mode);
        PairRecord {
            network: key.network,
            strategy: key.strategy,
            mode: key.mode,
            pp: key.pp,
            sp: key.sp,
            replication: key.replication,
            node_count: m.node_count,
            budget: m.budget,
            coverage_ss: m.coverage_ss,
            coverage_seq: m.coverage_seq,
            natural_ss: m.natural_ss,
            natural_seq: m.natural_seq,
            duration_ss: m.duration_ss,
            duration_seq: m.duration_seq,
            coverage_ref: m.coverage_ref,
            duration_ref: m.duration_ref,
            seeds_saved: m.seeds_saved,
        }
    }

    /// Whether the stored relative metrics agree with the raw values, up to
    /// a relative error of 1e-9.
    pub fn is_consistent(&self) -> bool {
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0),
            _ => false,
        };
        close(coverage_ref(self.coverage_seq, self.coverage_ss).ok(), self.coverage_ref)
            && close(duration_ref(self.duration_seq, self.duration_ss).ok(), self.duration_ref)
    }
}

fn metrics(
    ranking: &Ranking,
    mode: SeedingMode,
    budget: &SeedBudget,
    ss: &DiffusionState,
    seq: &DiffusionState,
) -> PairMetrics {
    let a = ss.result();
    let b = seq.result();
    let k = budget.budget as usize;
    let saved = ranking.order[..k]
        .iter()
        .filter(|&&v| seq.status(v) == Activation::Natural)
        .count();
    PairMetrics {
        mode,
        node_count: a.node_count,
        budget: budget.budget,
        coverage_ss: a.coverage_total,
        coverage_seq: b.coverage_total,
        natural_ss: a.coverage_natural,
        natural_seq: b.coverage_natural,
        duration_ss: a.duration,
        duration_seq: b.duration,
        coverage_ref: coverage_ref(b.coverage_total, a.coverage_total).ok(),
        duration_ref: duration_ref(b.duration, a.duration).ok(),
        seeds_saved: saved as f64 / k as f64,
    }
}

/// Runs single stage once and every mode in `modes` on the same sample.
pub fn coupled_runs(
    g: &Graph,
    ranking: &Ranking,
    modes: &[SeedingMode],
    budget: &SeedBudget,
    sample: &LiveEdgeSample,
) -> Result<Vec<PairMetrics>, SeedingError> {
    let ss = simulate(g, ranking, SeedingMode::SingleStage, budget, sample)?;
    modes
        .iter()
        .map(|&mode| {
            let seq = simulate(g, ranking, mode, budget, sample)?;
            Ok(metrics(ranking, mode, budget, &ss, &seq))
        })
        .collect()
}

/// Draws one live-edge sample and compares single stage with `mode` on it.
pub fn coupled_pair<R: Rng + ?Sized>(
    g: &Graph,
    ranking: &Ranking,
    mode: SeedingMode,
    budget: &SeedBudget,
    pp: f64,
    rng: &mut R,
) -> Result<PairMetrics, SeedingError> {
    let sample = sample_live_edges(g, pp, rng);
    let mut out = coupled_runs(g, ranking, &[mode], budget, &sample)?;
    Ok(out.remove(0))
}

/// Like [`coupled_pair`] but with independent coins for the two runs.
pub fn uncoupled_pair<R: Rng + ?Sized>(
    g: &Graph,
    ranking: &Ranking,
    mode: SeedingMode,
    budget: &SeedBudget,
    pp: f64,
    ss_rng: &mut R,
    seq_rng: &mut R,
) -> Result<PairMetrics, SeedingError> {
    let ss = simulate(g, ranking, SeedingMode::SingleStage, budget, BernoulliCoins::new(pp, ss_rng))?;
    let seq = simulate(g, ranking, mode, budget, BernoulliCoins::new(pp, seq_rng))?;
    Ok(metrics(ranking, mode, budget, &ss, &seq))
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive keyed mix of 64-bit words.
pub fn mix_key(master: u64, words: &[u64]) -> u64 {
    let mut h = splitmix(master.wrapping_add(GOLDEN));
    for &w in words {
        h = splitmix(h ^ splitmix(w.wrapping_add(GOLDEN)));
    }
    h
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Purposes of the independent streams derived for one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Live-edge sample, or the single-stage coins when uncoupled.
    Propagation,
    /// Random ranking.
    Ranking,
    /// Coins of an uncoupled sequential run.
    Sequential(SeedingMode),
}

impl StreamRole {
    fn stream_id(self) -> u64 {
        match self {
            StreamRole::Propagation => 0,
            StreamRole::Ranking => 1,
            StreamRole::Sequential(m) => 2 + m as u64,
        }
    }
}

/// Deterministic random stream for one replication of one cell.
///
/// The seeding mode is deliberately not part of the key: every mode of a
/// replication sees the same live-edge sample and the same single-stage
/// reference.
pub fn replication_rng(
    master_seed: u64,
    network: &str,
    strategy: Strategy,
    pp: f64,
    sp: f64,
    replication: u32,
    role: StreamRole,
) -> ChaCha8Rng {
    let key = mix_key(
        master_seed,
        &[
            fnv1a(network.as_bytes()),
            fnv1a(strategy.code().as_bytes()),
            pp.to_bits(),
            sp.to_bits(),
            replication as u64,
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(role.stream_id());
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use alloc::vec;

    fn ranking(order: Vec<NodeId>) -> Ranking {
        Ranking { strategy: Strategy::Degree, order, scores: None }
    }

    #[test]
    fn zero_probability_pair_is_even() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 3)], None).unwrap();
        let r = ranking(vec![1, 2, 0, 3]);
        let b = SeedBudget::with_count(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = coupled_pair(&g, &r, SeedingMode::Sequential, &b, 0.0, &mut rng).unwrap();
        assert_eq!(m.coverage_ref, Some(0.0));
        assert_eq!(m.coverage_ss, 0.5);
        // single stage never leaves stage 0
        assert_eq!(m.duration_ss, 0);
        assert_eq!(m.duration_ref, None);
    }

    #[test]
    fn saturated_pair_is_even() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4)], None).unwrap();
        let r = ranking(vec![2, 1, 3, 0, 4]);
        let b = SeedBudget::with_count(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for mode in [SeedingMode::Sequential, SeedingMode::Revival, SeedingMode::Buffered] {
            let m = coupled_pair(&g, &r, mode, &b, 1.0, &mut rng).unwrap();
            assert_eq!(m.coverage_ref, Some(0.0));
            assert!(m.duration_ref.unwrap() >= 0.0);
        }
    }

    #[test]
    fn sequential_reaches_second_component() {
        // component A = {0,1,2} fully live from 0; component B = {3,4,5}
        // linked only by dead slots. Ranking puts 0 and 1 on top, so single
        // stage wastes its second seed inside A.
        let g = Graph::from_edges([(0, 1), (0, 2), (2, 3), (3, 4), (4, 5)], None).unwrap();
        let s = LiveEdgeSample::from_live_pairs(&g, &[(0, 1), (0, 2), (3, 4), (4, 5)]).unwrap();
        let r = ranking(vec![0, 1, 2, 3, 4, 5]);
        let b = SeedBudget::with_count(2, 6).unwrap();
        let m = coupled_runs(&g, &r, &[SeedingMode::Sequential], &b, &s).unwrap().remove(0);
        assert_eq!(m.coverage_ss, 0.5);
        assert_eq!(m.coverage_seq, 1.0);
        assert_eq!(m.coverage_ref, Some(1.0));
        // node 1 came for free in the sequential run
        assert_eq!(m.seeds_saved, 0.5);
    }

    #[test]
    fn record_consistency() {
        let key = CellKey {
            network: "n".into(),
            strategy: Strategy::Degree,
            mode: SeedingMode::Revival,
            pp: 0.1,
            sp: 0.05,
            replication: 3,
        };
        let m = PairMetrics {
            mode: SeedingMode::Revival,
            node_count: 10,
            budget: 1,
            coverage_ss: 0.5,
            coverage_seq: 0.6,
            natural_ss: 0.4,
            natural_seq: 0.5,
            duration_ss: 10,
            duration_seq: 17,
            coverage_ref: coverage_ref(0.6, 0.5).ok(),
            duration_ref: Some(0.7),
            seeds_saved: 0.0,
        };
        let mut rec = PairRecord::new(key, m);
        assert!(rec.is_consistent());
        rec.duration_ref = Some(0.5);
        assert!(!rec.is_consistent());
    }

    #[test]
    fn streams_are_keyed() {
        let a = replication_rng(1, "net", Strategy::Degree, 0.1, 0.05, 0, StreamRole::Propagation);
        let b = replication_rng(1, "net", Strategy::Degree, 0.1, 0.05, 0, StreamRole::Propagation);
        let c = replication_rng(1, "net", Strategy::Degree, 0.1, 0.05, 1, StreamRole::Propagation);
        let d = replication_rng(1, "net", Strategy::Degree, 0.1, 0.05, 0, StreamRole::Ranking);
        let draw = |mut r: ChaCha8Rng| r.random::<u64>();
        assert_eq!(draw(a.clone()), draw(b));
        assert_ne!(draw(a.clone()), draw(c));
        assert_ne!(draw(a), draw(d));
        assert_ne!(mix_key(0, &[1, 2]), mix_key(0, &[2, 1]));
    }
}
