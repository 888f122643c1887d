use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seedbuf::config::GridConfig;
use seedbuf::edgelist::{load_edge_list_path, save_with_sidecar, LoadOptions, LoadedGraph};
use seedbuf::grid::run_grid;
use seedbuf::tables;
use seedbuf::CliError;
use seedbuf_core::analysis::{summarize, CoverageBasis, GroupKey};
use seedbuf_core::diffusion::BernoulliCoins;
use seedbuf_core::{
    generate_ba, generate_ws, rank_nodes, run_strategy, BaParams, SeedBudget, SeedingMode, Strategy, WsParams,
};

/// Sequential seeding experiments on independent-cascade diffusion.
///
/// Exit codes: 0 success, 1 input or config error, 2 runtime error.
#[derive(Parser)]
#[command(name = "seedbuf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network as an edge list plus `.meta` sidecar.
    #[command(subcommand)]
    Generate(Model),
    /// Rank the nodes of a network.
    Rank {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        /// Seed for the random ranking.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one diffusion and write its per-stage trace.
    Simulate {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, value_parser = parse_mode)]
        mode: SeedingMode,
        #[arg(long)]
        pp: f64,
        /// Seed budget as a fraction of the node count.
        #[arg(long, conflicts_with = "budget", required_unless_present = "budget")]
        sp: Option<f64>,
        /// Seed budget as an absolute count.
        #[arg(long)]
        budget: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured experiment grid and write pair records.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Aggregate pair records and emit plot series.
    Report {
        #[arg(long)]
        records: PathBuf,
        /// Comma-separated grouping columns: network, strategy, mode, pp, sp.
        #[arg(long, value_delimiter = ',', value_parser = parse_group)]
        group_by: Vec<GroupKey>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coverage-ref vs duration-ref scatter series.
        #[arg(long)]
        scatter: Option<PathBuf>,
        /// Per-record durations.
        #[arg(long)]
        durations: Option<PathBuf>,
        /// `total` or `natural`.
        #[arg(long, default_value = "total", value_parser = parse_basis)]
        basis: CoverageBasis,
    },
}

#[derive(Subcommand)]
enum Model {
    /// Watts-Strogatz small world.
    Ws {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        nei: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Barabasi-Albert preferential attachment.
    Ba {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        power: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct NetworkArgs {
    /// Edge-list file.
    #[arg(long)]
    network: PathBuf,
    /// Field delimiter; whitespace when omitted.
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long, default_value_t = 0)]
    index_base: u64,
}

impl NetworkArgs {
    fn load(&self) -> Result<LoadedGraph, CliError> {
        let opts = LoadOptions { delimiter: self.delimiter, index_base: self.index_base, ..Default::default() };
        load_edge_list_path(&self.network, &opts)
            .map_err(|e| CliError::Input(format!("{}: {e}", self.network.display())))
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_mode(s: &str) -> Result<SeedingMode, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_group(s: &str) -> Result<GroupKey, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_basis(s: &str) -> Result<CoverageBasis, String> {
    match s.to_ascii_lowercase().as_str() {
        "total" => Ok(CoverageBasis::Total),
        "natural" => Ok(CoverageBasis::Natural),
        _ => Err(format!("unknown coverage basis {s:?}")),
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Opens `path` for writing, or stdout when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
    }
}

fn generate(model: Model) -> Result<(), CliError> {
    let (g, out, meta) = match model {
        Model::Ws { n, nei, p, seed, out } => {
            let params = WsParams { n, nei, rewire_p: p };
            let g = generate_ws(&params, &mut ChaCha8Rng::seed_from_u64(seed))
                .map_err(|e| CliError::Input(e.to_string()))?;
            let meta = vec![
                ("model", "ws".to_string()),
                ("n", n.to_string()),
                ("nei", nei.to_string()),
                ("p", p.to_string()),
                ("seed", seed.to_string()),
            ];
            (g, out, meta)
        }
        Model::Ba { n, m, power, seed, out } => {
            let params = BaParams { n, m, power };
            let g = generate_ba(&params, &mut ChaCha8Rng::seed_from_u64(seed))
                .map_err(|e| CliError::Input(e.to_string()))?;
            let meta = vec![
                ("model", "ba".to_string()),
                ("n", n.to_string()),
                ("m", m.to_string()),
                ("power", power.to_string()),
                ("seed", seed.to_string()),
            ];
            (g, out, meta)
        }
    };
    save_with_sidecar(&out, &g, &meta).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(model) => generate(model),
        Command::Rank { network, strategy, seed, out } => {
            let loaded = network.load()?;
            let ranking = rank_nodes(&loaded.graph, strategy, &mut ChaCha8Rng::seed_from_u64(seed));
            tables::write_ranking(sink(out.as_deref())?, &ranking, &loaded.labels).map_err(runtime)
        }
        Command::Simulate { network, strategy, mode, pp, sp, budget, seed, out } => {
            if !(0.0..=1.0).contains(&pp) {
                return Err(CliError::Input("--pp must lie in [0, 1]".into()));
            }
            let loaded = network.load()?;
            let g = &loaded.graph;
            let budget = match (sp, budget) {
                (_, Some(k)) => SeedBudget::with_count(k, g.node_count()),
                (Some(sp), None) => SeedBudget::from_fraction(sp, g.node_count()),
                (None, None) => unreachable!("clap requires one of --sp/--budget"),
            }
            .map_err(|e| CliError::Input(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ranking = rank_nodes(g, strategy, &mut rng);
            let res = run_strategy(g, &ranking, mode, &budget, BernoulliCoins::new(pp, &mut rng)).map_err(runtime)?;
            tables::write_trace(sink(out.as_deref())?, &res).map_err(runtime)
        }
        Command::Grid { config, out, threads } => {
            let cfg = GridConfig::from_path(&config)?;
            let output = run_grid(&cfg, threads).map_err(runtime)?;
            for f in &output.failures {
                eprintln!("warning: network {} skipped: {}", f.name, f.message);
            }
            tables::write_records(sink(Some(&out))?, &output.records).map_err(runtime)?;
            if output.records.is_empty() {
                return Err(CliError::Input("no network could be loaded".into()));
            }
            Ok(())
        }
        Command::Report { records, group_by, out, scatter, durations, basis } => {
            let f = File::open(&records).map_err(|e| CliError::Input(format!("{}: {e}", records.display())))?;
            let table = tables::read_records(BufReader::new(f))
                .map_err(|e| CliError::Input(format!("{}: {e}", records.display())))?;
            let rows = summarize(&table, &group_by, basis);
            tables::write_summary(sink(out.as_deref())?, &rows).map_err(runtime)?;
            if let Some(p) = scatter {
                tables::write_scatter(sink(Some(&p))?, &table).map_err(runtime)?;
            }
            if let Some(p) = durations {
                tables::write_durations(sink(Some(&p))?, &table).map_err(runtime)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
