//! LFR-style benchmark generator: power-law degrees via the configuration
//! model, power-law community sizes, capacity-constrained assignment, and
//! degree-preserving rewiring toward a target mixing value.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::community::{mu_limit, Partition};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Allowed relative gap between the sampled sequence mean and `avg_degree`.
const MEAN_DEGREE_TOLERANCE: f64 = 0.05;
/// Whole-sequence redraws before declaring the mean unreachable.
const DEGREE_SAMPLING_ATTEMPTS: usize = 100;
/// Residual-stub reshuffle rounds in the configuration model.
const STUB_RESHUFFLE_ROUNDS: usize = 100;
/// Community size list redraws before giving up.
const COMMUNITY_SIZE_ATTEMPTS: usize = 1000;
/// Assignment step budget per node.
const ASSIGNMENT_STEPS_PER_NODE: usize = 50;
/// Rewiring attempt budget per edge.
const REWIRE_ATTEMPTS_PER_EDGE: usize = 200;

/// Parameters for LFR network generation.
#[derive(Debug, Clone)]
pub struct LfrParams {
    pub n: usize,
    /// Target mean degree.
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Degree distribution exponent (gamma).
    pub degree_exponent: f64,
    /// Community size distribution exponent (beta).
    pub community_exponent: f64,
    /// Target mixing.
    pub mu: f64,
    pub c_min: usize,
    pub c_max: usize,
    pub seed: u64,
    /// Allowed |realized - target| mixing after rewiring.
    pub mix_tolerance: f64,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n: 7500,
            avg_degree: 10.0,
            max_degree: 180,
            degree_exponent: 3.0,
            community_exponent: 2.0,
            mu: 0.2,
            c_min: 5,
            c_max: 180,
            seed: 42,
            mix_tolerance: 0.03,
        }
    }
}

impl LfrParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |name: &str, reason: String| {
            Err(Error::InvalidParameter {
                name: name.to_string(),
                reason,
            })
        };
        if self.n == 0 {
            return fail("n", "must be positive".into());
        }
        if self.c_min < 1 || self.c_max > self.n || self.c_min > self.c_max {
            return fail(
                "c_min/c_max",
                format!("need 1 <= c_min <= c_max <= n, got [{}, {}]", self.c_min, self.c_max),
            );
        }
        if self.degree_exponent <= 1.0 {
            return fail("degree_exponent", "must exceed 1".into());
        }
        if self.community_exponent <= 1.0 {
            return fail("community_exponent", "must exceed 1".into());
        }
        if self.max_degree < 1 || self.max_degree >= self.n {
            return fail("max_degree", format!("need 1 <= k_max < n, got {}", self.max_degree));
        }
        let limit = mu_limit(self.n, self.c_max)?;
        // mu = 0 stays valid even when one community may span the network
        // (mu_limit = 0); zero mixing is trivially attainable there
        if !(0.0..=1.0).contains(&self.mu) || (self.mu > 0.0 && self.mu >= limit) {
            return fail("mu", format!("need 0 <= mu < mu_limit = {limit:.4}"));
        }
        if self.mix_tolerance <= 0.0 {
            return fail("mix_tolerance", "must be positive".into());
        }
        Ok(())
    }
}

/// Cumulative weights of `k^-exponent` over `1..=k_max`, for inverse-CDF
/// sampling on any lower-truncated range.
struct PowerLawTable {
    cumulative: Vec<f64>,
}

impl PowerLawTable {
    fn new(k_max: usize, exponent: f64) -> PowerLawTable {
        let mut cumulative = Vec::with_capacity(k_max + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 1..=k_max {
            acc += (k as f64).powf(-exponent);
            cumulative.push(acc);
        }
        PowerLawTable { cumulative }
    }

    /// Expected value of the distribution truncated to `[lo, k_max]`.
    fn truncated_mean(&self, lo: usize, exponent: f64) -> f64 {
        let k_max = self.cumulative.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in lo..=k_max {
            let w = (k as f64).powf(-exponent);
            num += k as f64 * w;
            den += w;
        }
        num / den
    }

    /// Draw one value from the distribution truncated to `[lo, k_max]`.
    fn sample(&self, lo: usize, rng: &mut impl Rng) -> usize {
        let base = self.cumulative[lo - 1];
        let top = *self.cumulative.last().unwrap();
        let target = base + rng.gen::<f64>() * (top - base);
        // first k with cumulative[k] > target
        match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&target).unwrap())
        {
            Ok(i) => (i + 1).min(self.cumulative.len() - 1).max(lo),
            Err(i) => i.max(lo).min(self.cumulative.len() - 1),
        }
    }
}

/// Draw `n` degrees from `P(k) ~ k^-gamma` on `[cutoff, k_max]`, with the
/// lower cutoff blended between two adjacent values so the expected mean
/// matches `avg_degree`, redrawing until the sample mean is within 5%.
/// The sum is made even by incrementing the smallest entry.
pub fn sample_power_law_degrees(params: &LfrParams) -> Result<Vec<usize>> {
    params.validate()?;
    let k_max = params.max_degree;
    let gamma = params.degree_exponent;
    let target = params.avg_degree;
    let table = PowerLawTable::new(k_max, gamma);

    let infeasible = || Error::InfeasibleDegreeSequence {
        target,
        k_max,
    };
    if table.truncated_mean(1, gamma) > target * (1.0 + MEAN_DEGREE_TOLERANCE)
        || (k_max as f64) < target * (1.0 - MEAN_DEGREE_TOLERANCE)
    {
        return Err(infeasible());
    }

    // Largest cutoff whose truncated mean still sits at or below the target,
    // and the probability of bumping to cutoff+1 that centers the blend.
    let mut lo = 1;
    while lo < k_max && table.truncated_mean(lo + 1, gamma) <= target {
        lo += 1;
    }
    let mean_lo = table.truncated_mean(lo, gamma);
    let bump_prob = if lo == k_max {
        0.0
    } else {
        let mean_hi = table.truncated_mean(lo + 1, gamma);
        ((target - mean_lo) / (mean_hi - mean_lo)).clamp(0.0, 1.0)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..DEGREE_SAMPLING_ATTEMPTS {
        let mut degrees: Vec<usize> = (0..params.n)
            .map(|_| {
                let cutoff = if rng.gen::<f64>() < bump_prob { lo + 1 } else { lo };
                table.sample(cutoff, &mut rng)
            })
            .collect();
        let mean = degrees.iter().sum::<usize>() as f64 / params.n as f64;
        if (mean - target).abs() <= MEAN_DEGREE_TOLERANCE * target {
            if degrees.iter().sum::<usize>() % 2 == 1 {
                let at = degrees
                    .iter()
                    .enumerate()
                    .min_by_key(|&(_, &d)| d)
                    .map(|(i, _)| i)
                    .unwrap();
                degrees[at] += 1;
            }
            return Ok(degrees);
        }
    }
    Err(infeasible())
}

/// Realize a degree sequence as a simple graph by stub matching, reshuffling
/// residual stubs that would form self-loops or duplicates, and dropping
/// whatever remains after 100 rounds (logged, not fatal).
pub fn configuration_model(degrees: &[usize], seed: u64) -> Result<Graph> {
    if degrees.iter().sum::<usize>() % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "degrees".to_string(),
            reason: "degree sum must be even".to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat(v).take(d))
        .collect();

    let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    for _ in 0..STUB_RESHUFFLE_ROUNDS {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(&mut rng);
        let mut residual = Vec::new();
        for pair in stubs.chunks(2) {
            if pair.len() < 2 {
                residual.push(pair[0]);
                continue;
            }
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !edges.insert((a, b)) {
                residual.push(pair[0]);
                residual.push(pair[1]);
            }
        }
        stubs = residual;
    }
    if !stubs.is_empty() {
        log::warn!(
            "configuration model dropped {} residual stubs of {}",
            stubs.len(),
            degrees.iter().sum::<usize>()
        );
    }
    Ok(Graph::from_edges(degrees.len(), edges))
}

/// Draw community sizes from `P(s) ~ s^-beta` on `[c_min, c_max]` until they
/// cover `n` nodes, shrinking the last draw to land exactly on `n`; the whole
/// list is redrawn when that adjustment would leave the bounds.
pub fn sample_community_sizes(params: &LfrParams) -> Result<Vec<usize>> {
    params.validate()?;
    let table = PowerLawTable::new(params.c_max, params.community_exponent);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(2));

    for _ in 0..COMMUNITY_SIZE_ATTEMPTS {
        let mut sizes = Vec::new();
        let mut total = 0usize;
        while total < params.n {
            let s = table.sample(params.c_min, &mut rng);
            sizes.push(s);
            total += s;
        }
        let excess = total - params.n;
        let last = *sizes.last().unwrap();
        if last > excess && last - excess >= params.c_min {
            *sizes.last_mut().unwrap() = last - excess;
            return Ok(sizes);
        }
    }
    Err(Error::CommunitySizesExhausted {
        n: params.n,
        c_min: params.c_min,
        c_max: params.c_max,
        attempts: COMMUNITY_SIZE_ATTEMPTS,
    })
}

/// Place each node in a random community large enough to host its internal
/// degree target `ceil((1 - mu) * k)`, evicting a random member when every
/// eligible community is full. Errors when a node fits nowhere or the step
/// budget runs out.
pub fn assign_nodes_to_communities(
    degrees: &[usize],
    sizes: &[usize],
    mu: f64,
    seed: u64,
) -> Result<Partition> {
    let n = degrees.len();
    assert_eq!(sizes.iter().sum::<usize>(), n, "sizes must cover all nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let targets: Vec<usize> = degrees
        .iter()
        .map(|&k| ((1.0 - mu) * k as f64).ceil() as usize)
        .collect();

    let mut queue: VecDeque<usize> = {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        order.into()
    };
    let mut community_of: Vec<Option<usize>> = vec![None; n];
    let mut occupancy: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];

    let mut steps = 0usize;
    let budget = ASSIGNMENT_STEPS_PER_NODE * n;
    let mut eligible = Vec::new();
    while let Some(v) = queue.pop_front() {
        steps += 1;
        if steps > budget {
            return Err(Error::AssignmentDeadlock {
                node: NodeId(v),
                degree: degrees[v],
                target: targets[v],
            });
        }
        eligible.clear();
        eligible.extend(
            sizes
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s >= targets[v])
                .map(|(c, _)| c),
        );
        if eligible.is_empty() {
            return Err(Error::AssignmentDeadlock {
                node: NodeId(v),
                degree: degrees[v],
                target: targets[v],
            });
        }
        let open: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&c| occupancy[c].len() < sizes[c])
            .collect();
        let c = match open.as_slice() {
            [] => {
                // evict a random member of a random eligible community
                let c = *eligible.choose(&mut rng).unwrap();
                let slot = rng.gen_range(0..occupancy[c].len());
                let evicted = occupancy[c].swap_remove(slot);
                community_of[evicted] = None;
                queue.push_back(evicted);
                c
            }
            open => *open.choose(&mut rng).unwrap(),
        };
        occupancy[c].push(v);
        community_of[v] = Some(c);
    }

    Ok(Partition::from_community_indices(
        community_of.into_iter().map(Option::unwrap).collect(),
    ))
}

/// Degree-preserving double-edge swaps, accepted only when they strictly
/// shrink `|mixing - mu|`, until within `tolerance` or the attempt budget of
/// `200 * m` runs out (best effort, achieved value logged).
pub fn rewire_to_mixing(
    graph: &Graph,
    partition: &Partition,
    mu: f64,
    tolerance: f64,
    seed: u64,
) -> Graph {
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .map(|(a, b)| (a.index(), b.index()))
        .collect();
    let m = edges.len();
    if m < 2 {
        return graph.clone();
    }
    let mut edge_set: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let is_inter =
        |a: usize, b: usize| partition.community_of(NodeId(a)) != partition.community_of(NodeId(b));
    let mut inter = edges.iter().filter(|&&(a, b)| is_inter(a, b)).count() as i64;
    let target = mu * m as f64;
    let error = |inter: i64| (inter as f64 - target).abs() / m as f64;

    if error(inter) <= tolerance {
        return graph.clone();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = |a: usize, b: usize| (a.min(b), a.max(b));
    for _ in 0..REWIRE_ATTEMPTS_PER_EDGE * m {
        // only (inter, inter) pairs can lower the inter count and only
        // (intra, intra) pairs can raise it, so draw candidates on the
        // side of the current error (bounded rejection sampling)
        let want_inter = (inter as f64) > target;
        let mut draw = || {
            for _ in 0..50 {
                let i = rng.gen_range(0..m);
                let (a, b) = edges[i];
                if is_inter(a, b) == want_inter {
                    return i;
                }
            }
            rng.gen_range(0..m)
        };
        let i = draw();
        let j = draw();
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        // two rewirings preserve all four degrees: (a,c)+(b,d) or (a,d)+(b,c)
        let proposals = [[norm(a, c), norm(b, d)], [norm(a, d), norm(b, c)]];
        let mut applied = false;
        for [e1, e2] in proposals {
            if e1.0 == e1.1 || e2.0 == e2.1 || e1 == e2 {
                continue;
            }
            if edge_set.contains(&e1) || edge_set.contains(&e2) {
                continue;
            }
            let new_inter = inter - is_inter(a, b) as i64 - is_inter(c, d) as i64
                + is_inter(e1.0, e1.1) as i64
                + is_inter(e2.0, e2.1) as i64;
            if error(new_inter) < error(inter) {
                edge_set.remove(&norm(a, b));
                edge_set.remove(&norm(c, d));
                edge_set.insert(e1);
                edge_set.insert(e2);
                edges[i] = e1;
                edges[j] = e2;
                inter = new_inter;
                applied = true;
                break;
            }
        }
        if applied && error(inter) <= tolerance {
            break;
        }
    }

    if error(inter) > tolerance {
        log::warn!(
            "rewiring stopped at mixing {:.4} (target {mu}, tolerance {tolerance})",
            inter as f64 / m as f64
        );
    }
    Graph::build(graph.labels().to_vec(), edges)
}

/// Generate an LFR benchmark network: degrees, configuration model,
/// community sizes, assignment, rewiring. Deterministic for a fixed seed
/// (each stage derives its stream from `params.seed` by a fixed offset).
pub fn generate_lfr(params: &LfrParams) -> Result<(Graph, Partition)> {
    params.validate()?;
    let degrees = sample_power_law_degrees(params)?;
    let graph = configuration_model(&degrees, params.seed.wrapping_add(1))?;
    let sizes = sample_community_sizes(params)?;
    let realized: Vec<usize> = (0..graph.node_count())
        .map(|v| graph.degree_unchecked(NodeId(v)))
        .collect();
    let partition = assign_nodes_to_communities(
        &realized,
        &sizes,
        params.mu,
        params.seed.wrapping_add(3),
    )?;
    let rewired = rewire_to_mixing(
        &graph,
        &partition,
        params.mu,
        params.mix_tolerance,
        params.seed.wrapping_add(4),
    );
    Ok((rewired, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::global_mixing;

    fn small_params(n: usize, mu: f64, seed: u64) -> LfrParams {
        LfrParams {
            n,
            avg_degree: 10.0,
            max_degree: 45,
            mu,
            c_min: 5,
            c_max: 45,
            seed,
            ..LfrParams::default()
        }
    }

    #[test]
    fn degree_sequence_hits_target_mean() {
        let params = small_params(2000, 0.2, 11);
        let degrees = sample_power_law_degrees(&params).unwrap();
        assert_eq!(degrees.len(), 2000);
        let mean = degrees.iter().sum::<usize>() as f64 / 2000.0;
        assert!((mean - 10.0).abs() <= 0.5, "mean {mean}");
        assert!(degrees.iter().all(|&d| (1..=45).contains(&d)));
        assert_eq!(degrees.iter().sum::<usize>() % 2, 0);
    }

    #[test]
    fn degree_sequence_degenerate_support() {
        let params = LfrParams {
            n: 10,
            avg_degree: 1.0,
            max_degree: 1,
            c_min: 1,
            c_max: 5,
            mu: 0.1,
            seed: 5,
            ..LfrParams::default()
        };
        let degrees = sample_power_law_degrees(&params).unwrap();
        assert_eq!(degrees, vec![1; 10]);
    }

    #[test]
    fn degree_sequence_infeasible() {
        let params = LfrParams {
            n: 100,
            avg_degree: 50.0,
            max_degree: 5,
            c_min: 5,
            c_max: 20,
            mu: 0.1,
            seed: 5,
            ..LfrParams::default()
        };
        assert!(matches!(
            sample_power_law_degrees(&params),
            Err(Error::InfeasibleDegreeSequence { .. })
        ));
    }

    #[test]
    fn configuration_model_forced_cases() {
        let g = configuration_model(&[1, 1], 1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(NodeId(0), NodeId(1)));

        let g = configuration_model(&[2, 2, 2], 1).unwrap();
        assert_eq!(g.edge_count(), 3);
        for v in g.active_nodes() {
            assert_eq!(g.degree(v).unwrap(), 2);
        }
    }

    #[test]
    fn configuration_model_rejects_odd_sum() {
        assert!(configuration_model(&[1, 1, 1], 1).is_err());
    }

    #[test]
    fn configuration_model_simple_at_scale() {
        let params = small_params(1000, 0.2, 3);
        let degrees = sample_power_law_degrees(&params).unwrap();
        let g = configuration_model(&degrees, 7).unwrap();
        // simple graph: realized degrees never exceed requests
        let mut matched = 0;
        for (v, &want) in degrees.iter().enumerate() {
            let got = g.degree(NodeId(v)).unwrap();
            assert!(got <= want);
            if got == want {
                matched += 1;
            }
        }
        assert!(matched as f64 >= 0.99 * degrees.len() as f64);
    }

    #[test]
    fn community_sizes_forced_and_bounded() {
        let forced = LfrParams {
            n: 20,
            c_min: 5,
            c_max: 5,
            max_degree: 4,
            avg_degree: 2.0,
            mu: 0.1,
            seed: 9,
            ..LfrParams::default()
        };
        assert_eq!(sample_community_sizes(&forced).unwrap(), vec![5, 5, 5, 5]);

        let single = LfrParams {
            n: 5,
            c_min: 5,
            c_max: 5,
            max_degree: 4,
            avg_degree: 2.0,
            mu: 0.0,
            seed: 9,
            ..LfrParams::default()
        };
        assert_eq!(sample_community_sizes(&single).unwrap(), vec![5]);

        let params = small_params(1000, 0.2, 21);
        let sizes = sample_community_sizes(&params).unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), 1000);
        assert!(sizes.iter().all(|&s| (5..=45).contains(&s)));
    }

    #[test]
    fn community_sizes_impossible_total() {
        let params = LfrParams {
            n: 22,
            c_min: 5,
            c_max: 5,
            max_degree: 4,
            avg_degree: 2.0,
            mu: 0.1,
            seed: 9,
            ..LfrParams::default()
        };
        assert!(matches!(
            sample_community_sizes(&params),
            Err(Error::CommunitySizesExhausted { .. })
        ));
    }

    #[test]
    fn assignment_respects_size_threshold() {
        // one node of degree 4 at mu = 0.5 needs a community of size >= 2
        let degrees = vec![4, 1, 1, 1];
        let sizes = vec![1, 3];
        let p = assign_nodes_to_communities(&degrees, &sizes, 0.5, 17).unwrap();
        assert_eq!(p.community_of(NodeId(0)), 1);

        // at mu = 0 the community must hold the full degree: impossible here
        let err = assign_nodes_to_communities(&degrees, &sizes, 0.0, 17);
        assert!(matches!(err, Err(Error::AssignmentDeadlock { .. })));
    }

    #[test]
    fn assignment_all_degree_one_any_placement() {
        let degrees = vec![1; 12];
        let sizes = vec![4, 4, 4];
        let p = assign_nodes_to_communities(&degrees, &sizes, 0.0, 23).unwrap();
        let mut counts = vec![0usize; 3];
        for v in 0..12 {
            counts[p.community_of(NodeId(v))] += 1;
        }
        assert_eq!(counts, vec![4, 4, 4]);
    }

    #[test]
    fn rewire_preserves_degrees_and_reaches_target() {
        let params = small_params(600, 0.2, 31);
        let degrees = sample_power_law_degrees(&params).unwrap();
        let g0 = configuration_model(&degrees, 32).unwrap();
        let sizes = sample_community_sizes(&params).unwrap();
        let realized: Vec<usize> = (0..600).map(|v| g0.degree_unchecked(NodeId(v))).collect();
        let p = assign_nodes_to_communities(&realized, &sizes, 0.2, 33).unwrap();
        let g = rewire_to_mixing(&g0, &p, 0.2, 0.03, 34);
        for v in 0..600 {
            assert_eq!(
                g.degree(NodeId(v)).unwrap(),
                g0.degree(NodeId(v)).unwrap()
            );
        }
        let mixing = global_mixing(&g, &p).unwrap();
        assert!((mixing - 0.2).abs() <= 0.03, "mixing {mixing}");
    }

    #[test]
    fn rewire_already_at_target_is_identity() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let p = Partition::from_assignment(&g, vec![0, 0, 1, 1]);
        let mixing = global_mixing(&g, &p).unwrap();
        let rewired = rewire_to_mixing(&g, &p, mixing, 0.01, 5);
        let before: Vec<_> = g.edges().collect();
        let after: Vec<_> = rewired.edges().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn generate_is_deterministic() {
        let params = small_params(300, 0.3, 77);
        let (g1, p1) = generate_lfr(&params).unwrap();
        let (g2, p2) = generate_lfr(&params).unwrap();
        let e1: Vec<_> = g1.edges().collect();
        let e2: Vec<_> = g2.edges().collect();
        assert_eq!(e1, e2);
        for v in 0..300 {
            assert_eq!(p1.community_of(NodeId(v)), p2.community_of(NodeId(v)));
        }
    }

    #[test]
    fn generate_meets_mixing_targets() {
        for (mu, seed) in [(0.2, 1u64), (0.5, 2u64)] {
            let params = small_params(1000, mu, seed);
            let (g, p) = generate_lfr(&params).unwrap();
            let mixing = global_mixing(&g, &p).unwrap();
            assert!(
                (mixing - mu).abs() <= params.mix_tolerance,
                "mu {mu}: realized {mixing}"
            );
        }
    }
}
