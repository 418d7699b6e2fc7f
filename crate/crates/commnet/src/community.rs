//! Community partitions and the degree split they induce.
//!
//! A node's degree splits into intra-community and inter-community parts;
//! the per-community cohesion `mu_c` and the network-wide mixing fraction
//! both derive from that split. The community-weighted quotient network
//! (communities as nodes, shared-link counts as weights) feeds the Mod
//! centrality computation.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

const LABEL_PROPAGATION_MAX_SWEEPS: usize = 100;

/// Non-overlapping community assignment over a graph's node slots.
///
/// Community ids are dense integers in first-seen order. Member lists may
/// contain nodes that were masked out of a graph later; all computations in
/// this module filter on the graph's active mask.
#[derive(Debug, Clone)]
pub struct Partition {
    community_of: Vec<usize>,
    members: Vec<Vec<NodeId>>,
}

impl Partition {
    /// Build a partition from a per-node community index.
    ///
    /// Panics if `community_of.len()` differs from the graph's node count;
    /// community indices must be dense (`0..count`).
    pub fn from_assignment(graph: &Graph, community_of: Vec<usize>) -> Partition {
        assert_eq!(community_of.len(), graph.node_count());
        Partition::from_community_indices(community_of)
    }

    /// Build a partition from dense community indices alone.
    pub fn from_community_indices(community_of: Vec<usize>) -> Partition {
        let count = community_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); count];
        for (i, &c) in community_of.iter().enumerate() {
            members[c].push(NodeId(i));
        }
        Partition {
            community_of,
            members,
        }
    }

    /// Number of communities.
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Community id of node `v`.
    pub fn community_of(&self, v: NodeId) -> usize {
        self.community_of[v.index()]
    }

    /// All members assigned to community `c`, including masked-out nodes.
    pub fn members(&self, c: usize) -> &[NodeId] {
        &self.members[c]
    }

    /// Members of community `c` that are active in `graph`.
    pub fn active_members<'a>(
        &'a self,
        graph: &'a Graph,
        c: usize,
    ) -> impl Iterator<Item = NodeId> + 'a {
        self.members[c].iter().copied().filter(|&v| graph.is_active(v))
    }

    /// Size of community `c` counting only nodes active in `graph`.
    pub fn active_size(&self, graph: &Graph, c: usize) -> usize {
        self.active_members(graph, c).count()
    }
}

/// Intra-community degree `k_in`: active same-community neighbors of `i`.
pub fn intra_degree(graph: &Graph, partition: &Partition, i: NodeId) -> Result<usize> {
    let d = graph.degree(i)?; // validates activity
    let c = partition.community_of(i);
    let k_in = graph
        .neighbors(i)
        .filter(|&j| partition.community_of(j) == c)
        .count();
    debug_assert!(k_in <= d);
    Ok(k_in)
}

/// Inter-community degree `k_out = degree - k_in`.
pub fn inter_degree(graph: &Graph, partition: &Partition, i: NodeId) -> Result<usize> {
    Ok(graph.degree(i)? - intra_degree(graph, partition, i)?)
}

/// Community cohesion `mu_c`: mean over members of `k_out / k`.
///
/// Degree-0 members contribute 0 to the sum (the ratio is undefined at
/// `k = 0` and an isolated node has no outer connections). The denominator
/// is the active member count.
pub fn community_mu(graph: &Graph, partition: &Partition, c: usize) -> Result<f64> {
    let mut size = 0usize;
    let mut sum = 0.0;
    for v in partition.active_members(graph, c) {
        size += 1;
        let k = graph.degree_unchecked(v);
        if k > 0 {
            let k_out = inter_degree(graph, partition, v)?;
            sum += k_out as f64 / k as f64;
        }
    }
    if size == 0 {
        return Err(Error::EmptyCommunity(c));
    }
    Ok(sum / size as f64)
}

/// Network-wide mixing: fraction of degree endpoints that cross communities.
pub fn global_mixing(graph: &Graph, partition: &Partition) -> Result<f64> {
    let mut total = 0usize;
    let mut inter = 0usize;
    for v in graph.active_nodes() {
        let c = partition.community_of(v);
        for u in graph.neighbors(v) {
            total += 1;
            if partition.community_of(u) != c {
                inter += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EdgelessGraph);
    }
    Ok(inter as f64 / total as f64)
}

/// Mixing value above which an `n`-node network with largest community
/// `n_c_max` has no community structure: `(n - n_c_max) / n`.
pub fn mu_limit(n: usize, n_c_max: usize) -> Result<f64> {
    if n == 0 || n_c_max == 0 || n_c_max > n {
        return Err(Error::InvalidParameter {
            name: "n_c_max".to_string(),
            reason: format!("need 0 < n_c_max <= n, got n_c_max={n_c_max}, n={n}"),
        });
    }
    Ok((n - n_c_max) as f64 / n as f64)
}

/// Quotient network over communities: weights count links shared between
/// community pairs, and `d[k]` lists node `k`'s link counts into each
/// community it touches (its own included).
#[derive(Debug, Clone)]
pub struct CommunityWeightedNetwork {
    /// Symmetric inter-community link counts, zero diagonal.
    pub weights: Vec<Vec<f64>>,
    /// Per node: `(community, link count)` pairs sorted by community id.
    pub node_links: Vec<Vec<(usize, usize)>>,
}

impl CommunityWeightedNetwork {
    pub fn community_count(&self) -> usize {
        self.weights.len()
    }

    /// Link count between communities `a` and `b` (zero when `a == b`).
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a][b]
    }

    /// Node `k`'s link count into community `c`.
    pub fn links_into(&self, k: NodeId, c: usize) -> usize {
        self.node_links[k.index()]
            .iter()
            .find(|&&(cc, _)| cc == c)
            .map_or(0, |&(_, w)| w)
    }

    /// Whether any inter-community link remains.
    pub fn has_inter_links(&self) -> bool {
        self.weights
            .iter()
            .any(|row| row.iter().any(|&w| w > 0.0))
    }
}

/// Build the community-weighted quotient network over active nodes.
pub fn build_community_weighted_network(
    graph: &Graph,
    partition: &Partition,
) -> CommunityWeightedNetwork {
    let c = partition.count();
    let mut weights = vec![vec![0.0; c]; c];
    let mut node_links = vec![Vec::new(); graph.node_count()];
    for v in graph.active_nodes() {
        let cv = partition.community_of(v);
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for u in graph.neighbors(v) {
            let cu = partition.community_of(u);
            match counts.iter_mut().find(|(cc, _)| *cc == cu) {
                Some((_, n)) => *n += 1,
                None => counts.push((cu, 1)),
            }
            if cu != cv && v < u {
                weights[cv][cu] += 1.0;
                weights[cu][cv] += 1.0;
            }
        }
        counts.sort_unstable();
        node_links[v.index()] = counts;
    }
    CommunityWeightedNetwork {
        weights,
        node_links,
    }
}

/// Label propagation community detection: each sweep visits nodes in a
/// seed-shuffled order and adopts the most frequent label among active
/// neighbors (ties to the smallest label), until a fixpoint or 100 sweeps.
///
/// This is plumbing for networks without a known partition; it does not
/// reproduce any particular published detector.
pub fn detect_communities_label_propagation(graph: &Graph, seed: u64) -> Partition {
    let n = graph.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = graph.active_nodes().map(NodeId::index).collect();

    for _ in 0..LABEL_PROPAGATION_MAX_SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = false;
        let mut freq: HashMap<usize, usize> = HashMap::new();
        for &v in &order {
            freq.clear();
            for u in graph.neighbors(NodeId(v)) {
                *freq.entry(labels[u.index()]).or_insert(0) += 1;
            }
            if freq.is_empty() {
                continue;
            }
            let mut best = labels[v];
            let mut best_count = 0;
            for (&label, &count) in freq.iter() {
                if count > best_count || (count == best_count && label < best) {
                    best = label;
                    best_count = count;
                }
            }
            if best != labels[v] {
                labels[v] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Compact labels to dense community ids in first-seen (ascending node) order.
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let mut community_of = vec![0usize; n];
    for v in 0..n {
        let next = dense.len();
        let id = *dense.entry(labels[v]).or_insert(next);
        community_of[v] = id;
    }
    Partition::from_assignment(graph, community_of)
}

/// Load a partition from a `node_label community_id` file.
///
/// Every active graph node must appear exactly once. Community ids map to
/// dense indices in first-seen order.
pub fn load_partition(path: impl AsRef<Path>, graph: &Graph) -> Result<Partition> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let label_map = graph.label_map();
    let mut community_ids: HashMap<String, usize> = HashMap::new();
    let mut community_of: Vec<Option<usize>> = vec![None; graph.node_count()];

    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (node, comm) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::MalformedLine {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    reason: "expected `node_label community_id`".to_string(),
                })
            }
        };
        let v = label_map
            .get(node)
            .copied()
            .ok_or_else(|| Error::UnknownNodeLabel(node.to_string()))?;
        if community_of[v.index()].is_some() {
            return Err(Error::DuplicatePartitionEntry(node.to_string()));
        }
        let next = community_ids.len();
        let c = *community_ids.entry(comm.to_string()).or_insert(next);
        community_of[v.index()] = Some(c);
    }

    let mut assignment = vec![0usize; graph.node_count()];
    for v in graph.active_nodes() {
        match community_of[v.index()] {
            Some(c) => assignment[v.index()] = c,
            None => return Err(Error::MissingPartitionEntry(graph.label(v).to_string())),
        }
    }
    Ok(Partition::from_assignment(graph, assignment))
}
