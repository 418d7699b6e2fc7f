//! Node-removal planning: static top-k ranking, sequential recalculation,
//! proportional per-community Commn removal, random acquaintance, and the
//! community bridge finder walk.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::centrality::{
    betweenness_centrality, commn_centrality, degree_centrality, mod_centrality, rank,
    CentralityScores, CommnParams,
};
use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Ordered removal plan. `removal_order` is the execution order; `g` is the
/// planned fraction of active nodes.
#[derive(Debug, Clone)]
pub struct ImmunizationPlan {
    pub strategy_name: String,
    pub removal_order: Vec<NodeId>,
    pub g: f64,
}

impl ImmunizationPlan {
    fn new(strategy_name: &str, removal_order: Vec<NodeId>, active_nodes: usize) -> Self {
        let g = if active_nodes == 0 {
            0.0
        } else {
            removal_order.len() as f64 / active_nodes as f64
        };
        ImmunizationPlan {
            strategy_name: strategy_name.to_string(),
            removal_order,
            g,
        }
    }

    /// Apply the plan, returning the masked graph.
    pub fn apply(&self, graph: &Graph) -> Result<Graph> {
        graph.remove_nodes(&self.removal_order)
    }
}

/// Parameters for the stochastic strategies.
#[derive(Debug, Clone, Copy)]
pub struct StochasticParams {
    pub seed: u64,
    /// Times a node must be picked as an acquaintance before it is planned.
    pub acquaintance_threshold: usize,
    /// Walk-length cap for the bridge finder; `None` means `10 * n` steps.
    pub cbf_max_walk: Option<usize>,
}

impl Default for StochasticParams {
    fn default() -> Self {
        StochasticParams {
            seed: 0,
            acquaintance_threshold: 1,
            cbf_max_walk: None,
        }
    }
}

/// Centrality measure selector for sequential-recalculation planning.
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    Degree,
    Betweenness,
    Mod(&'a Partition),
    Commn(&'a Partition, CommnParams),
}

impl Measure<'_> {
    pub fn compute(&self, graph: &Graph) -> Result<CentralityScores> {
        match self {
            Measure::Degree => Ok(degree_centrality(graph)),
            Measure::Betweenness => Ok(betweenness_centrality(graph)),
            Measure::Mod(p) => mod_centrality(graph, p),
            Measure::Commn(p, params) => commn_centrality(graph, p, *params),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::Betweenness => "betweenness",
            Measure::Mod(_) => "mod",
            Measure::Commn(..) => "commn",
        }
    }
}

fn check_count(graph: &Graph, count: usize) -> Result<()> {
    let active = graph.active_node_count();
    if count > active {
        return Err(Error::RemovalCountTooLarge {
            requested: count,
            active,
        });
    }
    Ok(())
}

/// Plan the top `count` nodes of a precomputed ranking.
pub fn immunize_static(
    graph: &Graph,
    scores: &CentralityScores,
    count: usize,
) -> Result<ImmunizationPlan> {
    check_count(graph, count)?;
    let order: Vec<NodeId> = rank(scores).into_iter().take(count).collect();
    Ok(ImmunizationPlan::new(
        scores.measure(),
        order,
        graph.active_node_count(),
    ))
}

/// Remove `count` nodes one at a time, recomputing the measure on the
/// masked graph before each pick.
pub fn immunize_sequential(
    graph: &Graph,
    measure: Measure<'_>,
    count: usize,
) -> Result<ImmunizationPlan> {
    check_count(graph, count)?;
    let mut current = graph.clone();
    let mut order = Vec::with_capacity(count);
    for _ in 0..count {
        let scores = measure.compute(&current)?;
        let top = scores.top().ok_or(Error::EmptyGraph)?;
        current = current.remove_nodes(&[top])?;
        order.push(top);
    }
    Ok(ImmunizationPlan::new(
        &format!("{}-seq", measure.name()),
        order,
        graph.active_node_count(),
    ))
}

/// Largest-remainder apportionment of `total` over `sizes`, ties between
/// equal remainders going to the lower index.
pub fn largest_remainder_budgets(sizes: &[usize], total: usize) -> Vec<usize> {
    let population: usize = sizes.iter().sum();
    if population == 0 || total == 0 {
        return vec![0; sizes.len()];
    }
    let mut budgets: Vec<usize> = Vec::with_capacity(sizes.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(sizes.len());
    let mut assigned = 0usize;
    for (c, &size) in sizes.iter().enumerate() {
        let quota = total as f64 * size as f64 / population as f64;
        let floor = quota.floor() as usize;
        budgets.push(floor);
        assigned += floor;
        remainders.push((c, quota - floor as f64));
    }
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(c, _) in remainders.iter().take(total - assigned) {
        budgets[c] += 1;
    }
    budgets
}

/// Proportional per-community Commn removal: community budgets come from
/// largest-remainder apportionment of `round(g * n)` over active community
/// sizes; removal proceeds by global best Commn score among communities
/// with budget left, recomputing scores on the masked graph after each
/// removal.
pub fn immunize_commn(
    graph: &Graph,
    partition: &Partition,
    g: f64,
    params: CommnParams,
) -> Result<ImmunizationPlan> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidParameter {
            name: "g".to_string(),
            reason: format!("must lie in [0, 1], got {g}"),
        });
    }
    let total = (g * graph.active_node_count() as f64).round() as usize;
    immunize_commn_count(graph, partition, total, params)
}

/// [`immunize_commn`] with an explicit node count instead of a fraction.
pub fn immunize_commn_count(
    graph: &Graph,
    partition: &Partition,
    total: usize,
    params: CommnParams,
) -> Result<ImmunizationPlan> {
    check_count(graph, total)?;
    let active = graph.active_node_count();
    let sizes: Vec<usize> = (0..partition.count())
        .map(|c| partition.active_size(graph, c))
        .collect();
    let mut budgets = largest_remainder_budgets(&sizes, total);

    let mut current = graph.clone();
    let mut order = Vec::with_capacity(total);
    for _ in 0..total {
        let scores = commn_centrality(&current, partition, params)?;
        let pick = scores
            .entries()
            .iter()
            .filter(|&&(v, _)| budgets[partition.community_of(v)] > 0)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|&(v, _)| v)
            .ok_or(Error::EmptyGraph)?;
        budgets[partition.community_of(pick)] -= 1;
        current = current.remove_nodes(&[pick])?;
        order.push(pick);
    }
    Ok(ImmunizationPlan::new("commn", order, active))
}

/// Random acquaintance: draw a random node, then a random neighbor, and
/// plan the neighbor once it has been drawn `acquaintance_threshold` times.
/// Returns a truncated plan (with a warning) when the graph cannot supply
/// `count` acquaintances.
pub fn immunize_acquaintance(
    graph: &Graph,
    count: usize,
    params: &StochasticParams,
) -> Result<ImmunizationPlan> {
    check_count(graph, count)?;
    if graph.edge_count() == 0 && count > 0 {
        return Err(Error::EdgelessGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let active: Vec<NodeId> = graph.active_nodes().collect();
    let mut picks = vec![0usize; graph.node_count()];
    let mut planned = vec![false; graph.node_count()];
    let mut order = Vec::with_capacity(count);

    let max_draws = 200 * active.len().max(1) * params.acquaintance_threshold.max(1);
    let mut draws = 0usize;
    while order.len() < count {
        if draws >= max_draws {
            log::warn!(
                "acquaintance plan truncated at {} of {count} after {draws} draws",
                order.len()
            );
            break;
        }
        draws += 1;
        let v0 = active[rng.gen_range(0..active.len())];
        let degree = graph.degree_unchecked(v0);
        if degree == 0 {
            continue;
        }
        let nth = rng.gen_range(0..degree);
        let v1 = graph.neighbors(v0).nth(nth).unwrap();
        picks[v1.index()] += 1;
        if picks[v1.index()] >= params.acquaintance_threshold && !planned[v1.index()] {
            planned[v1.index()] = true;
            order.push(v1);
        }
    }
    Ok(ImmunizationPlan::new(
        "acquaintance",
        order,
        graph.active_node_count(),
    ))
}

/// Community bridge finder: random walks (uniform steps, no immediate
/// backtracking when the current node has other neighbors) that plan the
/// first node, from the second step on, with at most one edge back into
/// the walk's visited set, then restart. Walks abandon after the step cap.
/// Returns a truncated plan (with a warning) when walks stop producing
/// candidates.
pub fn immunize_cbf(
    graph: &Graph,
    count: usize,
    params: &StochasticParams,
) -> Result<ImmunizationPlan> {
    check_count(graph, count)?;
    if graph.edge_count() == 0 && count > 0 {
        return Err(Error::EdgelessGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let active: Vec<NodeId> = graph.active_nodes().collect();
    let max_walk = params.cbf_max_walk.unwrap_or(10 * active.len().max(1));
    let max_walks = 500 * count.max(1) + 1000;

    let mut planned = vec![false; graph.node_count()];
    let mut order = Vec::with_capacity(count);
    let mut visited: Vec<NodeId> = Vec::new();

    let mut walks = 0usize;
    'outer: while order.len() < count {
        if walks >= max_walks {
            log::warn!(
                "bridge finder truncated at {} of {count} after {walks} walks",
                order.len()
            );
            break;
        }
        walks += 1;

        let start = active[rng.gen_range(0..active.len())];
        if graph.degree_unchecked(start) == 0 {
            continue;
        }
        visited.clear();
        visited.push(start);
        let mut current = start;
        let mut previous: Option<NodeId> = None;

        for step in 0..max_walk {
            let degree = graph.degree_unchecked(current);
            let candidate = if degree == 1 {
                graph.neighbors(current).next().unwrap()
            } else {
                // exclude the node we just came from
                loop {
                    let nth = rng.gen_range(0..degree);
                    let c = graph.neighbors(current).nth(nth).unwrap();
                    if Some(c) != previous {
                        break c;
                    }
                }
            };

            // from the second step on, a candidate connecting back to at
            // most one visited node is taken as a community bridge
            if step >= 1 {
                let back_edges = visited
                    .iter()
                    .filter(|&&v| graph.has_edge(candidate, v))
                    .count();
                if back_edges <= 1 {
                    if !planned[candidate.index()] {
                        planned[candidate.index()] = true;
                        order.push(candidate);
                    }
                    continue 'outer;
                }
            }

            if !visited.contains(&candidate) {
                visited.push(candidate);
            }
            previous = Some(current);
            current = candidate;
        }
    }
    Ok(ImmunizationPlan::new(
        "cbf",
        order,
        graph.active_node_count(),
    ))
}
