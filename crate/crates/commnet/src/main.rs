//! Command-line interface over the library: network generation, community
//! detection, centrality rankings, immunization plans, SIR simulation, and
//! the two experiment sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use commnet::centrality::{
    betweenness_centrality, commn_centrality, degree_centrality, mod_centrality, rank,
    CommnParams,
};
use commnet::community::{
    community_mu, detect_communities_label_propagation, global_mixing, load_partition, Partition,
};
use commnet::error::{Error, Result};
use commnet::experiment::{
    build_plan, emit_csv, sweep_infection, sweep_lcc, ExperimentConfig, Strategy,
};
use commnet::graph::{load_edge_list, EdgeListOptions, Graph, NodeId};
use commnet::lfr::{generate_lfr, LfrParams};
use commnet::plot::emit_svg_curves;
use commnet::sir::{run_sir, run_sir_ensemble, InitialInfected, SirParams};

#[derive(Parser)]
#[command(
    name = "commnet",
    version,
    about = "Community-aware centrality, immunization planning, and SIR simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an LFR benchmark network (edge list + community file)
    Generate(GenerateArgs),
    /// Detect communities by label propagation and emit per-community stats
    Detect(DetectArgs),
    /// Per-community size and cohesion for an existing partition
    PartitionStats(PartitionStatsArgs),
    /// Rank nodes by a centrality measure
    Centrality(CentralityArgs),
    /// Build an immunization (node removal) plan
    Immunize(ImmunizeArgs),
    /// Run SIR simulations, optionally after applying a removal plan
    Simulate(SimulateArgs),
    /// Sweep ensemble infection totals over strategies and removal fractions
    SweepInfection(SweepArgs),
    /// Sweep largest-connected-component sizes over strategies and fractions
    SweepLcc(SweepArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 7500)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 180)]
    max_degree: usize,
    /// Degree distribution exponent
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Community size distribution exponent
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Target mixing
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    #[arg(long, default_value_t = 5)]
    c_min: usize,
    #[arg(long, default_value_t = 180)]
    c_max: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.03)]
    mix_tolerance: f64,
    /// Edge list output path
    #[arg(long)]
    edges_out: PathBuf,
    /// Community file output path
    #[arg(long)]
    communities_out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Edge list path
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the detected partition (`node community` lines)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the per-community CSV (stdout when omitted)
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionStatsArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CentralityArgs {
    #[arg(long)]
    edges: PathBuf,
    /// One of: degree, betweenness, mod, commn
    #[arg(long)]
    measure: String,
    /// Partition file (required for mod and commn)
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Global override for Commn's scaling constant R
    #[arg(long)]
    r: Option<usize>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImmunizeArgs {
    #[arg(long)]
    edges: PathBuf,
    /// One of: degree, degree-seq, betweenness, betweenness-seq, mod,
    /// mod-seq, commn, acquaintance, cbf
    #[arg(long)]
    strategy: String,
    /// Fraction of nodes to remove (exclusive with --count)
    #[arg(long, conflicts_with = "count")]
    g: Option<f64>,
    /// Number of nodes to remove
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Removal plan CSV (`order,node`) applied before t = 0
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Initially infected fraction of active nodes
    #[arg(long, default_value_t = 0.01, conflicts_with = "initial_count")]
    initial_fraction: f64,
    /// Initially infected node count
    #[arg(long)]
    initial_count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Per-step `t,S,I,R` CSV of the first trial
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// Ensemble summary CSV (stdout when omitted)
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` config file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    edge_list: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    lfr_n: Option<usize>,
    #[arg(long)]
    lfr_mu: Option<f64>,
    #[arg(long)]
    lfr_avg_degree: Option<f64>,
    #[arg(long)]
    lfr_max_degree: Option<usize>,
    #[arg(long)]
    lfr_c_min: Option<usize>,
    #[arg(long)]
    lfr_c_max: Option<usize>,
    /// Comma-separated strategy list
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    g_min: Option<f64>,
    #[arg(long)]
    g_max: Option<f64>,
    #[arg(long)]
    g_step: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    initial_infected_fraction: Option<f64>,
    #[arg(long)]
    networks_per_setting: Option<usize>,
    #[arg(long)]
    trials_per_network: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::PartitionStats(args) => cmd_partition_stats(args),
        Command::Centrality(args) => cmd_centrality(args),
        Command::Immunize(args) => cmd_immunize(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::SweepInfection(args) => cmd_sweep(args, SweepKind::Infection),
        Command::SweepLcc(args) => cmd_sweep(args, SweepKind::Lcc),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                        path: parent.to_path_buf(),
                        source,
                    })?;
                }
            }
            std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let params = LfrParams {
        n: args.n,
        avg_degree: args.avg_degree,
        max_degree: args.max_degree,
        degree_exponent: args.gamma,
        community_exponent: args.beta,
        mu: args.mu,
        c_min: args.c_min,
        c_max: args.c_max,
        seed: args.seed,
        mix_tolerance: args.mix_tolerance,
    };
    let (graph, partition) = generate_lfr(&params)?;
    let realized = global_mixing(&graph, &partition)?;

    let mut edges = String::new();
    writeln!(
        edges,
        "# lfr n={} avg_degree={} max_degree={} gamma={} beta={} mu={} c_min={} c_max={} seed={} realized_mixing={:.4}",
        params.n,
        params.avg_degree,
        params.max_degree,
        params.degree_exponent,
        params.community_exponent,
        params.mu,
        params.c_min,
        params.c_max,
        params.seed,
        realized
    )
    .unwrap();
    for (a, b) in graph.edges() {
        writeln!(edges, "{} {}", graph.label(a), graph.label(b)).unwrap();
    }
    write_text(&edges, Some(&args.edges_out))?;

    let mut communities = String::new();
    for v in graph.active_nodes() {
        writeln!(communities, "{} {}", graph.label(v), partition.community_of(v)).unwrap();
    }
    write_text(&communities, Some(&args.communities_out))?;

    println!(
        "generated n={} m={} communities={} realized_mixing={:.4}",
        graph.active_node_count(),
        graph.edge_count(),
        partition.count(),
        realized
    );
    Ok(())
}

fn partition_stats_csv(graph: &Graph, partition: &Partition) -> Result<String> {
    let mut out = String::from("community,size,mu\n");
    for c in 0..partition.count() {
        let size = partition.active_size(graph, c);
        if size == 0 {
            continue;
        }
        let mu = community_mu(graph, partition, c)?;
        writeln!(out, "{c},{size},{mu:.6}").unwrap();
    }
    Ok(out)
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let graph = load_edge_list(&args.edges, EdgeListOptions::default())?;
    let partition = detect_communities_label_propagation(&graph, args.seed);
    if let Some(out) = &args.out {
        let mut text = String::new();
        for v in graph.active_nodes() {
            writeln!(text, "{} {}", graph.label(v), partition.community_of(v)).unwrap();
        }
        write_text(&text, Some(out))?;
    }
    let stats = partition_stats_csv(&graph, &partition)?;
    write_text(&stats, args.stats_out.as_deref())
}

fn cmd_partition_stats(args: PartitionStatsArgs) -> Result<()> {
    let graph = load_edge_list(&args.edges, EdgeListOptions::default())?;
    let partition = load_partition(&args.partition, &graph)?;
    let stats = partition_stats_csv(&graph, &partition)?;
    write_text(&stats, args.out.as_deref())
}

fn cmd_centrality(args: CentralityArgs) -> Result<()> {
    let graph = load_edge_list(&args.edges, EdgeListOptions::default())?;
    let partition = args
        .partition
        .as_ref()
        .map(|p| load_partition(p, &graph))
        .transpose()?;
    let need = |name: &str| -> Result<&Partition> {
        partition
            .as_ref()
            .ok_or_else(|| Error::PartitionRequired(name.to_string()))
    };
    let scores = match args.measure.as_str() {
        "degree" => degree_centrality(&graph),
        "betweenness" => betweenness_centrality(&graph),
        "mod" => mod_centrality(&graph, need("mod")?)?,
        "commn" => commn_centrality(&graph, need("commn")?, CommnParams { r: args.r })?,
        other => {
            return Err(Error::Config(format!("unknown measure `{other}`")));
        }
    };
    let order = rank(&scores);
    let mut csv = String::from("node,score,rank\n");
    let mut ranks = vec![0usize; graph.node_count()];
    for (i, v) in order.iter().enumerate() {
        ranks[v.index()] = i + 1;
    }
    for &(v, score) in scores.entries() {
        writeln!(csv, "{},{:.6},{}", graph.label(v), score, ranks[v.index()]).unwrap();
    }
    write_text(&csv, args.out.as_deref())
}

fn cmd_immunize(args: ImmunizeArgs) -> Result<()> {
    let graph = load_edge_list(&args.edges, EdgeListOptions::default())?;
    let partition = args
        .partition
        .as_ref()
        .map(|p| load_partition(p, &graph))
        .transpose()?;
    let strategy = Strategy::parse(&args.strategy)?;
    let count = match (args.count, args.g) {
        (Some(count), _) => count,
        (None, Some(g)) => (g * graph.active_node_count() as f64).round() as usize,
        (None, None) => {
            return Err(Error::Config("one of --g or --count is required".to_string()))
        }
    };
    let plan = build_plan(&graph, partition.as_ref(), strategy, count, args.seed)?;
    let mut csv = String::from("order,node\n");
    for (i, v) in plan.removal_order.iter().enumerate() {
        writeln!(csv, "{},{}", i + 1, graph.label(*v)).unwrap();
    }
    write_text(&csv, args.out.as_deref())
}

fn load_plan(path: &Path, graph: &Graph) -> Result<Vec<NodeId>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let label_map = graph.label_map();
    let mut nodes = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "order,node" {
            continue;
        }
        let label = line.rsplit(',').next().unwrap_or(line).trim();
        let v = label_map
            .get(label)
            .copied()
            .ok_or_else(|| Error::MalformedLine {
                path: path.to_path_buf(),
                line: line_no + 1,
                reason: format!("unknown node `{label}`"),
            })?;
        nodes.push(v);
    }
    Ok(nodes)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut graph = load_edge_list(&args.edges, EdgeListOptions::default())?;
    if let Some(plan_path) = &args.plan {
        let nodes = load_plan(plan_path, &graph)?;
        graph = graph.remove_nodes(&nodes)?;
    }
    let params = SirParams {
        lambda: args.lambda,
        sigma: args.sigma,
        initial_infected: match args.initial_count {
            Some(c) => InitialInfected::Count(c),
            None => InitialInfected::Fraction(args.initial_fraction),
        },
        seed: args.seed,
        max_steps: args.max_steps,
    };

    if let Some(trajectory_out) = &args.trajectory_out {
        let traj = run_sir(&graph, &params)?;
        let mut csv = String::from("t,S,I,R\n");
        for (t, &(s, i, r)) in traj.counts.iter().enumerate() {
            writeln!(csv, "{t},{s},{i},{r}").unwrap();
        }
        write_text(&csv, Some(trajectory_out))?;
    }

    let ensemble = run_sir_ensemble(&graph, &params, args.trials)?;
    let (mean_ti, std_ti) = ensemble.mean_std_total_infected();
    let (mean_rinf, std_rinf) = ensemble.mean_std_r_infinity();
    let mut csv = String::from("trials,mean_TI,std_TI,mean_Rinf,std_Rinf,mean_steady_time\n");
    writeln!(
        csv,
        "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
        args.trials,
        mean_ti,
        std_ti,
        mean_rinf,
        std_rinf,
        ensemble.mean_steady_state_time()
    )
    .unwrap();
    write_text(&csv, args.summary_out.as_deref())
}

enum SweepKind {
    Infection,
    Lcc,
}

fn cmd_sweep(args: SweepArgs, kind: SweepKind) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let mut setting = |key: &str, value: Option<String>| -> Result<()> {
        if let Some(value) = value {
            config.set(key, &value)?;
        }
        Ok(())
    };
    setting("edge_list", args.edge_list.map(|p| p.display().to_string()))?;
    setting("partition", args.partition.map(|p| p.display().to_string()))?;
    setting("lfr_n", args.lfr_n.map(|v| v.to_string()))?;
    setting("lfr_mu", args.lfr_mu.map(|v| v.to_string()))?;
    setting("lfr_avg_degree", args.lfr_avg_degree.map(|v| v.to_string()))?;
    setting("lfr_max_degree", args.lfr_max_degree.map(|v| v.to_string()))?;
    setting("lfr_c_min", args.lfr_c_min.map(|v| v.to_string()))?;
    setting("lfr_c_max", args.lfr_c_max.map(|v| v.to_string()))?;
    setting("strategies", args.strategies)?;
    setting("g_min", args.g_min.map(|v| v.to_string()))?;
    setting("g_max", args.g_max.map(|v| v.to_string()))?;
    setting("g_step", args.g_step.map(|v| v.to_string()))?;
    setting("lambda", args.lambda.map(|v| v.to_string()))?;
    setting("sigma", args.sigma.map(|v| v.to_string()))?;
    setting(
        "initial_infected_fraction",
        args.initial_infected_fraction.map(|v| v.to_string()),
    )?;
    setting(
        "networks_per_setting",
        args.networks_per_setting.map(|v| v.to_string()),
    )?;
    setting(
        "trials_per_network",
        args.trials_per_network.map(|v| v.to_string()),
    )?;
    setting("master_seed", args.master_seed.map(|v| v.to_string()))?;
    setting("output_dir", args.output_dir.map(|p| p.display().to_string()))?;
    setting("threads", args.threads.map(|v| v.to_string()))?;

    let (rows, stem, svg_metric) = match kind {
        SweepKind::Infection => (
            sweep_infection(&config)?,
            "infection",
            "total_infected_fraction",
        ),
        SweepKind::Lcc => (sweep_lcc(&config)?, "lcc", "lcc_size"),
    };
    let csv_path = config.output_dir.join(format!("{stem}.csv"));
    let svg_path = config.output_dir.join(format!("{stem}.svg"));
    emit_csv(&rows, &csv_path)?;
    emit_svg_curves(&rows, svg_metric, &svg_path)?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
