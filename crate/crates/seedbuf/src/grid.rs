//! Parallel execution of a [`GridConfig`].
//!
//! Every replication owns a random stream keyed by the master seed and the
//! cell it belongs to, so results do not depend on scheduling or on the
//! number of worker threads.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use seedbuf_core::diffusion::sample_live_edges;
use seedbuf_core::experiment::{coupled_runs, replication_rng, uncoupled_pair, StreamRole};
use seedbuf_core::{
    generate_ba, generate_ws, rank_nodes, BaParams, CellKey, Graph, PairMetrics, PairRecord, Ranking,
    SeedBudget, SeedingError, Strategy, WsParams,
};

use crate::config::{GridConfig, NetworkSource, NetworkSpec};
use crate::edgelist::load_edge_list_path;

/// Network that could not be built; its cells are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFailure {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct GridOutput {
    pub records: Vec<PairRecord>,
    pub failures: Vec<NetworkFailure>,
}

/// Generates or loads one configured network.
pub fn resolve_network(spec: &NetworkSpec) -> Result<Graph, String> {
    match &spec.source {
        NetworkSource::Ws { n, nei, rewire_p, seed } => {
            let p = WsParams { n: *n, nei: *nei, rewire_p: *rewire_p };
            generate_ws(&p, &mut ChaCha8Rng::seed_from_u64(*seed)).map_err(|e| e.to_string())
        }
        NetworkSource::Ba { n, m, power, seed } => {
            let p = BaParams { n: *n, m: *m, power: *power };
            generate_ba(&p, &mut ChaCha8Rng::seed_from_u64(*seed)).map_err(|e| e.to_string())
        }
        NetworkSource::File { path, .. } => {
            let opts = spec.source.load_options().expect("file source");
            load_edge_list_path(path, &opts)
                .map(|l| l.graph)
                .map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

/// Output order: network, strategy, mode, pp, sp, replication.
type OutputKey = (usize, usize, usize, usize, usize, u32);

struct Task {
    net: usize,
    strategy: usize,
    pp: usize,
    sp: usize,
    replication: u32,
}

/// Runs every cell of `cfg`. `threads = None` uses rayon's default pool.
pub fn run_grid(cfg: &GridConfig, threads: Option<usize>) -> Result<GridOutput, SeedingError> {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(|| run_in_pool(cfg)),
        None => run_in_pool(cfg),
    }
}

fn run_in_pool(cfg: &GridConfig) -> Result<GridOutput, SeedingError> {
    let resolved: Vec<Result<Graph, String>> = cfg.networks.par_iter().map(resolve_network).collect();
    let mut failures = Vec::new();
    let mut graphs: Vec<Option<Arc<Graph>>> = Vec::with_capacity(resolved.len());
    for (spec, r) in cfg.networks.iter().zip(resolved) {
        match r {
            Ok(g) => graphs.push(Some(Arc::new(g))),
            Err(message) => {
                failures.push(NetworkFailure { name: spec.name.clone(), message });
                graphs.push(None);
            }
        }
    }

    // static rankings are computed once per network and strategy
    let rank_jobs: Vec<(usize, usize)> = (0..graphs.len())
        .filter(|&i| graphs[i].is_some())
        .flat_map(|i| (0..cfg.strategies.len()).map(move |s| (i, s)))
        .filter(|&(_, s)| cfg.strategies[s] != Strategy::Random)
        .collect();
    let computed: Vec<Ranking> = rank_jobs
        .par_iter()
        .map(|&(i, s)| {
            let g = graphs[i].as_ref().expect("resolved");
            rank_nodes(g, cfg.strategies[s], &mut ChaCha8Rng::seed_from_u64(0))
        })
        .collect();
    let mut rankings: Vec<Vec<Option<Arc<Ranking>>>> = vec![vec![None; cfg.strategies.len()]; graphs.len()];
    for (&(i, s), r) in rank_jobs.iter().zip(computed) {
        rankings[i][s] = Some(Arc::new(r));
    }

    let mut tasks = Vec::new();
    for (net, g) in graphs.iter().enumerate() {
        if g.is_none() {
            continue;
        }
        for strategy in 0..cfg.strategies.len() {
            for pp in 0..cfg.pp_values.len() {
                for sp in 0..cfg.sp_values.len() {
                    for replication in 0..cfg.replications {
                        tasks.push(Task { net, strategy, pp, sp, replication });
                    }
                }
            }
        }
    }

    let results: Vec<Vec<PairMetrics>> = tasks
        .par_iter()
        .map(|t| run_task(cfg, t, graphs[t.net].as_ref().expect("resolved"), rankings[t.net][t.strategy].as_deref()))
        .collect::<Result<_, _>>()?;

    let mut keyed: Vec<(OutputKey, PairRecord)> = Vec::new();
    for (t, metrics) in tasks.iter().zip(results) {
        for (mode_idx, m) in metrics.into_iter().enumerate() {
            let key = CellKey {
                network: cfg.networks[t.net].name.clone(),
                strategy: cfg.strategies[t.strategy],
                mode: cfg.modes[mode_idx],
                pp: cfg.pp_values[t.pp],
                sp: cfg.sp_values[t.sp],
                replication: t.replication,
            };
            keyed.push(((t.net, t.strategy, mode_idx, t.pp, t.sp, t.replication), PairRecord::new(key, m)));
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(GridOutput { records: keyed.into_iter().map(|(_, r)| r).collect(), failures })
}

fn run_task(cfg: &GridConfig, t: &Task, g: &Graph, ranking: Option<&Ranking>) -> Result<Vec<PairMetrics>, SeedingError> {
    let name = &cfg.networks[t.net].name;
    let strategy = cfg.strategies[t.strategy];
    let (pp, sp) = (cfg.pp_values[t.pp], cfg.sp_values[t.sp]);
    let stream = |role| replication_rng(cfg.master_seed, name, strategy, pp, sp, t.replication, role);

    let random_ranking;
    let ranking = match ranking {
        Some(r) => r,
        None => {
            random_ranking = rank_nodes(g, strategy, &mut stream(StreamRole::Ranking));
            &random_ranking
        }
    };
    let budget = SeedBudget::from_fraction(sp, g.node_count())?;

    if cfg.coupled {
        let sample = sample_live_edges(g, pp, &mut stream(StreamRole::Propagation));
        coupled_runs(g, ranking, &cfg.modes, &budget, &sample)
    } else {
        cfg.modes
            .iter()
            .map(|&mode| {
                let mut ss_rng = stream(StreamRole::Propagation);
                let mut seq_rng = stream(StreamRole::Sequential(mode));
                uncoupled_pair(g, ranking, mode, &budget, pp, &mut ss_rng, &mut seq_rng)
            })
            .collect()
    }
}
