//! Declarative experiment sweeps: infected-total and largest-component
//! curves over a grid of removed fractions, across strategies and sample
//! networks, with deterministic hierarchical seeding and CSV output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::centrality::{
    betweenness_centrality, degree_centrality, mod_centrality, CommnParams,
};
use crate::community::{load_partition, Partition};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, EdgeListOptions, Graph};
use crate::immunization::{
    immunize_acquaintance, immunize_cbf, immunize_commn_count, immunize_sequential,
    immunize_static, ImmunizationPlan, Measure, StochasticParams,
};
use crate::lfr::{generate_lfr, LfrParams};
use crate::sir::{run_sir_ensemble, InitialInfected, SirParams};

/// Seed offsets for the master -> network -> strategy -> grid -> trial
/// hierarchy. Strategy ids are fixed per name, so adding a strategy to a
/// config never perturbs the others' seeds.
const PLAN_STRATEGY_STRIDE: u64 = 1_000_003;
const PLAN_GRID_STRIDE: u64 = 1_009;
const SIR_STRATEGY_STRIDE: u64 = 7_000_003;
const SIR_GRID_STRIDE: u64 = 70_009;

/// An immunization strategy selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Degree { sequential: bool },
    Betweenness { sequential: bool },
    Mod { sequential: bool },
    Commn,
    Acquaintance,
    Cbf,
}

impl Strategy {
    pub fn parse(name: &str) -> Result<Strategy> {
        match name {
            "degree" => Ok(Strategy::Degree { sequential: false }),
            "degree-seq" => Ok(Strategy::Degree { sequential: true }),
            "betweenness" => Ok(Strategy::Betweenness { sequential: false }),
            "betweenness-seq" => Ok(Strategy::Betweenness { sequential: true }),
            "mod" => Ok(Strategy::Mod { sequential: false }),
            "mod-seq" => Ok(Strategy::Mod { sequential: true }),
            "commn" => Ok(Strategy::Commn),
            "acquaintance" => Ok(Strategy::Acquaintance),
            "cbf" => Ok(Strategy::Cbf),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Degree { sequential: false } => "degree",
            Strategy::Degree { sequential: true } => "degree-seq",
            Strategy::Betweenness { sequential: false } => "betweenness",
            Strategy::Betweenness { sequential: true } => "betweenness-seq",
            Strategy::Mod { sequential: false } => "mod",
            Strategy::Mod { sequential: true } => "mod-seq",
            Strategy::Commn => "commn",
            Strategy::Acquaintance => "acquaintance",
            Strategy::Cbf => "cbf",
        }
    }

    /// Fixed id used by seed derivation; never reuse or renumber.
    fn id(&self) -> u64 {
        match self {
            Strategy::Degree { sequential: false } => 1,
            Strategy::Betweenness { sequential: false } => 2,
            Strategy::Mod { sequential: false } => 3,
            Strategy::Commn => 4,
            Strategy::Acquaintance => 5,
            Strategy::Cbf => 6,
            Strategy::Degree { sequential: true } => 7,
            Strategy::Betweenness { sequential: true } => 8,
            Strategy::Mod { sequential: true } => 9,
        }
    }

    pub fn requires_partition(&self) -> bool {
        matches!(self, Strategy::Mod { .. } | Strategy::Commn)
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Strategy::Acquaintance | Strategy::Cbf)
    }
}

/// Where the sweep's networks come from.
#[derive(Debug, Clone)]
pub enum NetworkSource {
    Lfr(LfrParams),
    Files {
        edge_list: PathBuf,
        partition: Option<PathBuf>,
    },
}

impl NetworkSource {
    fn realize(&self, seed: u64) -> Result<(Graph, Option<Partition>)> {
        match self {
            NetworkSource::Lfr(params) => {
                let params = LfrParams {
                    seed,
                    ..params.clone()
                };
                let (g, p) = generate_lfr(&params)?;
                Ok((g, Some(p)))
            }
            NetworkSource::Files {
                edge_list,
                partition,
            } => {
                let g = load_edge_list(edge_list, EdgeListOptions::default())?;
                let p = partition
                    .as_ref()
                    .map(|path| load_partition(path, &g))
                    .transpose()?;
                Ok((g, p))
            }
        }
    }
}

/// Sweep definition. `g_grid` holds the removed fractions to evaluate.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: NetworkSource,
    pub strategies: Vec<Strategy>,
    pub g_grid: Vec<f64>,
    pub lambda: f64,
    pub sigma: f64,
    pub initial_infected_fraction: f64,
    pub max_steps: usize,
    pub networks_per_setting: usize,
    pub trials_per_network: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads for the sweep grid; 0 uses the rayon default.
    pub threads: usize,
}

/// Evenly spaced grid from `min` to `max` inclusive.
pub fn g_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut i = 0usize;
    loop {
        let g = min + i as f64 * step;
        if g > max + 1e-9 {
            break;
        }
        grid.push(g);
        i += 1;
    }
    grid
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            source: NetworkSource::Lfr(LfrParams::default()),
            strategies: vec![
                Strategy::Degree { sequential: false },
                Strategy::Betweenness { sequential: false },
                Strategy::Mod { sequential: false },
                Strategy::Commn,
                Strategy::Acquaintance,
                Strategy::Cbf,
            ],
            g_grid: g_grid(0.0, 0.5, 0.05),
            lambda: 0.1,
            sigma: 0.1,
            initial_infected_fraction: 0.01,
            max_steps: 1_000_000,
            networks_per_setting: 10,
            trials_per_network: 20,
            master_seed: 42,
            output_dir: PathBuf::from("out"),
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::Config("strategy list is empty".to_string()));
        }
        if self.g_grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::Config("g values must lie in [0, 1]".to_string()));
        }
        if self.networks_per_setting == 0 || self.trials_per_network == 0 {
            return Err(Error::Config(
                "networks_per_setting and trials_per_network must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Apply one `key = value` setting; config files and command-line flags
    /// share this path (flags are applied last and win).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad =
            |what: &str| Error::Config(format!("invalid value `{value}` for `{what}`"));
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
        }
        fn lfr(source: &mut NetworkSource) -> &mut LfrParams {
            if !matches!(source, NetworkSource::Lfr(_)) {
                *source = NetworkSource::Lfr(LfrParams::default());
            }
            match source {
                NetworkSource::Lfr(p) => p,
                _ => unreachable!(),
            }
        }
        match key {
            "network" => match value {
                "lfr" => {
                    lfr(&mut self.source);
                }
                "files" => {
                    if !matches!(self.source, NetworkSource::Files { .. }) {
                        self.source = NetworkSource::Files {
                            edge_list: PathBuf::new(),
                            partition: None,
                        };
                    }
                }
                _ => return Err(bad("network")),
            },
            "edge_list" => match &mut self.source {
                NetworkSource::Files { edge_list, .. } => *edge_list = PathBuf::from(value),
                _ => {
                    self.source = NetworkSource::Files {
                        edge_list: PathBuf::from(value),
                        partition: None,
                    }
                }
            },
            "partition" => match &mut self.source {
                NetworkSource::Files { partition, .. } => {
                    *partition = Some(PathBuf::from(value))
                }
                _ => {
                    return Err(Error::Config(
                        "`partition` requires `network = files`".to_string(),
                    ))
                }
            },
            "lfr_n" => lfr(&mut self.source).n = num(key, value)?,
            "lfr_avg_degree" => lfr(&mut self.source).avg_degree = num(key, value)?,
            "lfr_max_degree" => lfr(&mut self.source).max_degree = num(key, value)?,
            "lfr_gamma" => lfr(&mut self.source).degree_exponent = num(key, value)?,
            "lfr_beta" => lfr(&mut self.source).community_exponent = num(key, value)?,
            "lfr_mu" => lfr(&mut self.source).mu = num(key, value)?,
            "lfr_c_min" => lfr(&mut self.source).c_min = num(key, value)?,
            "lfr_c_max" => lfr(&mut self.source).c_max = num(key, value)?,
            "lfr_mix_tolerance" => lfr(&mut self.source).mix_tolerance = num(key, value)?,
            "strategies" => {
                self.strategies = value
                    .split(',')
                    .map(|s| Strategy::parse(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
            }
            "g_min" => {
                let min: f64 = num(key, value)?;
                let max = *self.g_grid.last().unwrap_or(&0.5);
                let step = self.grid_step();
                self.g_grid = g_grid(min, max, step);
            }
            "g_max" => {
                let max: f64 = num(key, value)?;
                let min = *self.g_grid.first().unwrap_or(&0.0);
                let step = self.grid_step();
                self.g_grid = g_grid(min, max, step);
            }
            "g_step" => {
                let step: f64 = num(key, value)?;
                if step <= 0.0 {
                    return Err(bad("g_step"));
                }
                let min = *self.g_grid.first().unwrap_or(&0.0);
                let max = *self.g_grid.last().unwrap_or(&0.5);
                self.g_grid = g_grid(min, max, step);
            }
            "lambda" => self.lambda = num(key, value)?,
            "sigma" => self.sigma = num(key, value)?,
            "initial_infected_fraction" => {
                self.initial_infected_fraction = num(key, value)?
            }
            "max_steps" => self.max_steps = num(key, value)?,
            "networks_per_setting" => self.networks_per_setting = num(key, value)?,
            "trials_per_network" => self.trials_per_network = num(key, value)?,
            "master_seed" => self.master_seed = num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "threads" => self.threads = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn grid_step(&self) -> f64 {
        if self.g_grid.len() >= 2 {
            self.g_grid[1] - self.g_grid[0]
        } else {
            0.05
        }
    }

    /// Parse a flat `key = value` config file (`#` comments allowed) on top
    /// of the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = ExperimentConfig::default();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedLine {
                path: path.to_path_buf(),
                line: line_no + 1,
                reason: "expected `key = value`".to_string(),
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    fn effective_networks(&self) -> usize {
        match self.source {
            NetworkSource::Lfr(_) => self.networks_per_setting,
            // a file-backed network is a single fixed network
            NetworkSource::Files { .. } => 1,
        }
    }
}

/// One aggregated measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub network_id: usize,
    pub strategy: String,
    pub g: f64,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

/// Build one removal plan for `strategy` on `graph`.
pub fn build_plan(
    graph: &Graph,
    partition: Option<&Partition>,
    strategy: Strategy,
    count: usize,
    seed: u64,
) -> Result<ImmunizationPlan> {
    let need_partition = || {
        partition.ok_or_else(|| Error::PartitionRequired(strategy.name().to_string()))
    };
    match strategy {
        Strategy::Degree { sequential: false } => {
            immunize_static(graph, &degree_centrality(graph), count)
        }
        Strategy::Degree { sequential: true } => {
            immunize_sequential(graph, Measure::Degree, count)
        }
        Strategy::Betweenness { sequential: false } => {
            immunize_static(graph, &betweenness_centrality(graph), count)
        }
        Strategy::Betweenness { sequential: true } => {
            immunize_sequential(graph, Measure::Betweenness, count)
        }
        Strategy::Mod { sequential: false } => {
            immunize_static(graph, &mod_centrality(graph, need_partition()?)?, count)
        }
        Strategy::Mod { sequential: true } => {
            immunize_sequential(graph, Measure::Mod(need_partition()?), count)
        }
        Strategy::Commn => {
            immunize_commn_count(graph, need_partition()?, count, CommnParams::default())
        }
        Strategy::Acquaintance => immunize_acquaintance(
            graph,
            count,
            &StochasticParams {
                seed,
                ..StochasticParams::default()
            },
        ),
        Strategy::Cbf => immunize_cbf(
            graph,
            count,
            &StochasticParams {
                seed,
                ..StochasticParams::default()
            },
        ),
    }
}

fn removal_count(active: usize, g: f64) -> usize {
    (g * active as f64).round() as usize
}

/// Removal plans for every grid value, exploiting that static rankings are
/// g-independent and sequential orders are prefix-consistent.
fn plans_over_grid(
    graph: &Graph,
    partition: Option<&Partition>,
    strategy: Strategy,
    grid: &[f64],
    network_seed: u64,
) -> Result<Vec<ImmunizationPlan>> {
    let active = graph.active_node_count();
    let plan_seed = |g_idx: u64| {
        network_seed
            .wrapping_add(PLAN_STRATEGY_STRIDE.wrapping_mul(strategy.id()))
            .wrapping_add(PLAN_GRID_STRIDE.wrapping_mul(g_idx))
    };
    match strategy {
        Strategy::Degree { .. } | Strategy::Betweenness { .. } | Strategy::Mod { .. } => {
            // static rankings are g-independent and the first k picks of a
            // sequential run do not depend on the budget, so prefixes of the
            // longest plan are exact
            let max_count = grid
                .iter()
                .map(|&g| removal_count(active, g))
                .max()
                .unwrap_or(0);
            let full = build_plan(graph, partition, strategy, max_count, network_seed)?;
            Ok(grid
                .iter()
                .map(|&g| ImmunizationPlan {
                    strategy_name: full.strategy_name.clone(),
                    removal_order: full.removal_order[..removal_count(active, g)].to_vec(),
                    g,
                })
                .collect())
        }
        // Commn apportions budgets from the total, and the stochastic plans
        // draw fresh per grid value
        Strategy::Commn | Strategy::Acquaintance | Strategy::Cbf => grid
            .iter()
            .enumerate()
            .map(|(g_idx, &g)| {
                build_plan(
                    graph,
                    partition,
                    strategy,
                    removal_count(active, g),
                    plan_seed(g_idx as u64),
                )
            })
            .collect(),
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return job();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(job)
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.network_id
            .cmp(&b.network_id)
            .then_with(|| a.strategy.cmp(&b.strategy))
            .then_with(|| a.g.total_cmp(&b.g))
            .then_with(|| a.metric.cmp(&b.metric))
    });
}

/// Sweep total-infected outcomes over networks x strategies x g.
///
/// Emits two metrics per cell: `total_infected` (raw counts) and
/// `total_infected_fraction` (relative to the non-removed population).
pub fn sweep_infection(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    with_pool(config.threads, || {
        let mut rows: Vec<ResultRow> = (0..config.effective_networks())
            .into_par_iter()
            .map(|net_idx| infection_rows_for_network(config, net_idx))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        sort_rows(&mut rows);
        Ok(rows)
    })
}

fn infection_rows_for_network(
    config: &ExperimentConfig,
    net_idx: usize,
) -> Result<Vec<ResultRow>> {
    let network_seed = config.master_seed.wrapping_add(net_idx as u64);
    let (graph, partition) = config.source.realize(network_seed)?;
    let mut rows = Vec::new();

    for &strategy in &config.strategies {
        let plans = plans_over_grid(
            &graph,
            partition.as_ref(),
            strategy,
            &config.g_grid,
            network_seed,
        )?;
        let per_g: Vec<Vec<ResultRow>> = config
            .g_grid
            .par_iter()
            .zip(&plans)
            .enumerate()
            .map(|(g_idx, (&g, plan))| -> Result<Vec<ResultRow>> {
                let masked = plan.apply(&graph)?;
                let remaining = masked.active_node_count();
                let sir_seed = network_seed
                    .wrapping_add(SIR_STRATEGY_STRIDE.wrapping_mul(strategy.id()))
                    .wrapping_add(SIR_GRID_STRIDE.wrapping_mul(g_idx as u64));
                let (mean, std) = if remaining == 0 {
                    (0.0, 0.0)
                } else {
                    let params = SirParams {
                        lambda: config.lambda,
                        sigma: config.sigma,
                        initial_infected: InitialInfected::Fraction(
                            config.initial_infected_fraction,
                        ),
                        seed: sir_seed,
                        max_steps: config.max_steps,
                    };
                    let ensemble =
                        run_sir_ensemble(&masked, &params, config.trials_per_network)?;
                    ensemble.mean_std_total_infected()
                };
                let scale = if remaining == 0 {
                    0.0
                } else {
                    1.0 / remaining as f64
                };
                Ok(vec![
                    ResultRow {
                        network_id: net_idx,
                        strategy: strategy.name().to_string(),
                        g,
                        metric: "total_infected".to_string(),
                        mean,
                        std,
                        trials: config.trials_per_network,
                    },
                    ResultRow {
                        network_id: net_idx,
                        strategy: strategy.name().to_string(),
                        g,
                        metric: "total_infected_fraction".to_string(),
                        mean: mean * scale,
                        std: std * scale,
                        trials: config.trials_per_network,
                    },
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(per_g.into_iter().flatten());
    }
    Ok(rows)
}

/// Sweep largest-connected-component sizes over strategies x g.
///
/// Deterministic strategies are evaluated once per cell; stochastic ones
/// average `trials_per_network` independently seeded plans.
pub fn sweep_lcc(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    with_pool(config.threads, || {
        let mut rows: Vec<ResultRow> = (0..config.effective_networks())
            .into_par_iter()
            .map(|net_idx| lcc_rows_for_network(config, net_idx))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        sort_rows(&mut rows);
        Ok(rows)
    })
}

fn lcc_rows_for_network(config: &ExperimentConfig, net_idx: usize) -> Result<Vec<ResultRow>> {
    let network_seed = config.master_seed.wrapping_add(net_idx as u64);
    let (graph, partition) = config.source.realize(network_seed)?;
    let active = graph.active_node_count();
    let mut rows = Vec::new();

    for &strategy in &config.strategies {
        let plan_seed_base =
            network_seed.wrapping_add(PLAN_STRATEGY_STRIDE.wrapping_mul(strategy.id()));
        if strategy.is_stochastic() {
            let cells: Vec<ResultRow> = config
                .g_grid
                .par_iter()
                .enumerate()
                .map(|(g_idx, &g)| -> Result<ResultRow> {
                    let count = removal_count(active, g);
                    let mut values = Vec::with_capacity(config.trials_per_network);
                    for trial in 0..config.trials_per_network {
                        let seed = plan_seed_base
                            .wrapping_add(PLAN_GRID_STRIDE.wrapping_mul(g_idx as u64))
                            .wrapping_add(trial as u64);
                        let plan = build_plan(&graph, partition.as_ref(), strategy, count, seed)?;
                        let lcc = plan.apply(&graph)?.largest_connected_component_size();
                        values.push(lcc as f64);
                    }
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / values.len() as f64;
                    Ok(ResultRow {
                        network_id: net_idx,
                        strategy: strategy.name().to_string(),
                        g,
                        metric: "lcc_size".to_string(),
                        mean,
                        std: var.sqrt(),
                        trials: config.trials_per_network,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(cells);
        } else {
            let plans = plans_over_grid(
                &graph,
                partition.as_ref(),
                strategy,
                &config.g_grid,
                network_seed,
            )?;
            for (&g, plan) in config.g_grid.iter().zip(&plans) {
                let lcc = plan.apply(&graph)?.largest_connected_component_size();
                rows.push(ResultRow {
                    network_id: net_idx,
                    strategy: strategy.name().to_string(),
                    g,
                    metric: "lcc_size".to_string(),
                    mean: lcc as f64,
                    std: 0.0,
                    trials: 1,
                });
            }
        }
    }
    Ok(rows)
}

/// Render rows to CSV with the fixed header
/// `network_id,strategy,g,metric,mean,std,trials`.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::from("network_id,strategy,g,metric,mean,std,trials\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{:.4},{},{:.6},{:.6},{}",
            row.network_id, row.strategy, row.g, row.metric, row.mean, row.std, row.trials
        )
        .unwrap();
    }
    out
}

/// Write rows as CSV to `path`.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(csv_string(rows).as_bytes())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            source: NetworkSource::Lfr(LfrParams {
                n: 120,
                avg_degree: 6.0,
                max_degree: 15,
                mu: 0.2,
                c_min: 5,
                c_max: 30,
                mix_tolerance: 0.05,
                ..LfrParams::default()
            }),
            strategies: vec![
                Strategy::Degree { sequential: false },
                Strategy::Commn,
                Strategy::Acquaintance,
            ],
            g_grid: g_grid(0.0, 0.2, 0.1),
            networks_per_setting: 2,
            trials_per_network: 3,
            master_seed: seed,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn grid_construction() {
        let grid = g_grid(0.0, 0.5, 0.05);
        assert_eq!(grid.len(), 11);
        assert!((grid[10] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn strategy_names_roundtrip() {
        for name in [
            "degree",
            "degree-seq",
            "betweenness",
            "betweenness-seq",
            "mod",
            "mod-seq",
            "commn",
            "acquaintance",
            "cbf",
        ] {
            assert_eq!(Strategy::parse(name).unwrap().name(), name);
        }
        assert!(Strategy::parse("pagerank").is_err());
    }

    #[test]
    fn infection_sweep_shape_and_baseline() {
        let config = tiny_config(5);
        let rows = sweep_infection(&config).unwrap();
        // networks x strategies x grid, two metrics each
        assert_eq!(rows.len(), 2 * 3 * 3 * 2);
        // g = 0 rows are the no-immunization baseline over the full graph
        for row in rows.iter().filter(|r| r.g == 0.0) {
            assert!(row.mean >= 1.0 || row.metric == "total_infected_fraction");
        }
    }

    #[test]
    fn infection_sweep_full_removal_is_zero() {
        let mut config = tiny_config(6);
        config.g_grid = vec![1.0];
        config.strategies = vec![Strategy::Degree { sequential: false }];
        let rows = sweep_infection(&config).unwrap();
        for row in &rows {
            assert_eq!(row.mean, 0.0);
            assert_eq!(row.std, 0.0);
        }
    }

    #[test]
    fn sweeps_are_deterministic_across_thread_counts() {
        let base = sweep_infection(&tiny_config(7)).unwrap();
        for threads in [1, 4] {
            let mut config = tiny_config(7);
            config.threads = threads;
            let rows = sweep_infection(&config).unwrap();
            assert_eq!(csv_string(&rows), csv_string(&base));
        }
    }

    #[test]
    fn lcc_sweep_shape() {
        let config = tiny_config(8);
        let rows = sweep_lcc(&config).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 3);
        // g = 0 equals the intact LCC and shrinks monotonically for the
        // deterministic strategy
        let degree_rows: Vec<_> = rows
            .iter()
            .filter(|r| r.network_id == 0 && r.strategy == "degree")
            .collect();
        assert!(degree_rows.windows(2).all(|w| w[0].mean >= w[1].mean));
    }

    #[test]
    fn csv_fixed_header_and_rows() {
        let rows = vec![ResultRow {
            network_id: 0,
            strategy: "degree".to_string(),
            g: 0.1,
            metric: "lcc_size".to_string(),
            mean: 12.0,
            std: 0.0,
            trials: 1,
        }];
        let text = csv_string(&rows);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "network_id,strategy,g,metric,mean,std,trials");
        assert_eq!(lines[1], "0,degree,0.1000,lcc_size,12.000000,0.000000,1");
    }

    #[test]
    fn config_file_and_overrides() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write;
        write!(
            file,
            "# sweep config\nlfr_n = 200\nlfr_mu = 0.3\nstrategies = degree,commn\n\
             g_min = 0.0\ng_max = 0.3\ng_step = 0.1\nlambda = 0.5\nmaster_seed = 9\n"
        )
        .unwrap();
        let mut config = ExperimentConfig::from_file(file.path()).unwrap();
        assert_eq!(config.strategies.len(), 2);
        assert_eq!(config.g_grid.len(), 4);
        assert_eq!(config.lambda, 0.5);
        match &config.source {
            NetworkSource::Lfr(p) => {
                assert_eq!(p.n, 200);
                assert_eq!(p.mu, 0.3);
            }
            _ => panic!("expected LFR source"),
        }
        // a later flag wins
        config.set("lambda", "0.9").unwrap();
        assert_eq!(config.lambda, 0.9);
        assert!(config.set("unknown_key", "1").is_err());
    }

    #[test]
    fn partition_requiring_strategy_without_partition_errors() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.txt");
        std::fs::write(&edges, "0 1\n1 2\n2 0\n").unwrap();
        let mut config = tiny_config(3);
        config.source = NetworkSource::Files {
            edge_list: edges,
            partition: None,
        };
        config.strategies = vec![Strategy::Commn];
        assert!(matches!(
            sweep_infection(&config),
            Err(Error::PartitionRequired(_))
        ));
    }
}
