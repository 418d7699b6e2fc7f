//! Centrality measures: degree, betweenness, Mod, and Commn.
//!
//! Degree and betweenness are the global reference measures. Mod scores a
//! node by its community's leading-eigenvector weight on the quotient
//! network times its connectivity into other communities. Commn combines a
//! node's normalized intra-community degree with the square of its
//! normalized inter-community degree, weighted by community cohesion, so
//! both local hubs and bridges rank highly.

use std::collections::VecDeque;

use crate::community::{
    build_community_weighted_network, community_mu, intra_degree, CommunityWeightedNetwork,
    Partition,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

const POWER_ITERATION_TOLERANCE: f64 = 1e-10;
const POWER_ITERATION_MAX_ROUNDS: usize = 100_000;

/// Per-node scores for one measure. Every active node has exactly one
/// finite score; the ordering is total (ties broken by ascending id).
#[derive(Debug, Clone)]
pub struct CentralityScores {
    measure: String,
    entries: Vec<(NodeId, f64)>,
}

impl CentralityScores {
    pub fn new(measure: impl Into<String>, mut entries: Vec<(NodeId, f64)>) -> CentralityScores {
        entries.sort_unstable_by_key(|&(v, _)| v);
        debug_assert!(entries.iter().all(|&(_, s)| s.is_finite()));
        CentralityScores {
            measure: measure.into(),
            entries,
        }
    }

    pub fn measure(&self) -> &str {
        &self.measure
    }

    /// `(node, score)` pairs in ascending node order.
    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn score(&self, v: NodeId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Highest-scoring node, ties to the lowest id.
    pub fn top(&self) -> Option<NodeId> {
        self.entries
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(v, _)| v)
    }
}

/// Nodes in descending score order, ties broken by ascending id.
pub fn rank(scores: &CentralityScores) -> Vec<NodeId> {
    let mut order: Vec<(NodeId, f64)> = scores.entries.clone();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(v, _)| v).collect()
}

/// Degree centrality: score is the node's active degree.
pub fn degree_centrality(graph: &Graph) -> CentralityScores {
    let entries = graph
        .active_nodes()
        .map(|v| (v, graph.degree_unchecked(v) as f64))
        .collect();
    CentralityScores::new("degree", entries)
}

/// Betweenness centrality over unordered node pairs, endpoints excluded,
/// unnormalized: `BC(u) = sum over pairs {a,b} of sigma_ab(u) / sigma_ab`.
/// Unreachable pairs contribute 0.
///
/// Computed with Brandes' dependency accumulation, which yields exactly the
/// pair-ratio sums (each unordered pair is visited from both endpoints, so
/// the accumulated total is halved).
pub fn betweenness_centrality(graph: &Graph) -> CentralityScores {
    let n = graph.node_count();
    let mut score = vec![0.0f64; n];

    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut queue: VecDeque<usize> = VecDeque::new();

    for s in graph.active_nodes() {
        let s = s.index();
        for v in graph.active_nodes() {
            let v = v.index();
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
            preds[v].clear();
        }
        stack.clear();
        queue.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for w in graph.neighbors(NodeId(v)) {
                let w = w.index();
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }

    let entries = graph
        .active_nodes()
        .map(|v| (v, score[v.index()] / 2.0))
        .collect();
    CentralityScores::new("betweenness", entries)
}

/// Leading eigenvector of a symmetric nonnegative matrix by power iteration
/// from the uniform vector, unit L2 norm, nonnegative orientation.
///
/// Iterates on `W + cI` with a small positive shift: bipartite quotient
/// networks (community paths, trees) have a symmetric spectrum on which
/// unshifted iteration oscillates, and the shift makes the top eigenvalue
/// strictly dominant without changing its eigenvector.
fn leading_eigenvector(weights: &[Vec<f64>]) -> Vec<f64> {
    let c = weights.len();
    let max_row_sum = weights
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0f64, f64::max);
    if max_row_sum == 0.0 {
        // all-zero matrix; callers handle this via the isolated fallback
        return vec![1.0 / (c as f64).sqrt(); c];
    }
    let shift = 0.1 * max_row_sum;
    let apply = |v: &[f64], out: &mut [f64]| {
        for (i, row) in weights.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + shift * v[i];
        }
    };

    let mut v = vec![1.0 / (c as f64).sqrt(); c];
    let mut next = vec![0.0; c];
    for _ in 0..POWER_ITERATION_MAX_ROUNDS {
        apply(&v, &mut next);
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return v;
        }
        for x in next.iter_mut() {
            *x /= norm;
        }
        // residual ||(W + cI)v - lambda v||_inf at the new iterate
        let lambda = norm; // v was unit norm, so ||(W + cI)v|| estimates lambda
        let mut wv = vec![0.0; c];
        apply(&next, &mut wv);
        let residual = wv
            .iter()
            .zip(&next)
            .map(|(&wvi, &vi)| (wvi - lambda * vi).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut v, &mut next);
        if residual <= POWER_ITERATION_TOLERANCE * lambda.max(1.0) {
            break;
        }
    }
    v
}

/// Mod centrality scores from a prebuilt quotient network.
///
/// With inter-community links present, `score(k) = 2 u[K] * sum over I != K
/// of d_kI * u[I]` where `u` is the quotient network's leading eigenvector
/// and `K` is `k`'s community. With all communities isolated the score
/// falls back to the node's intra-community degree.
pub fn mod_scores_from_quotient(
    graph: &Graph,
    partition: &Partition,
    quotient: &CommunityWeightedNetwork,
) -> Result<CentralityScores> {
    if partition.count() == 0 {
        return Err(Error::InvalidParameter {
            name: "partition".to_string(),
            reason: "no communities".to_string(),
        });
    }

    if !quotient.has_inter_links() {
        let entries = graph
            .active_nodes()
            .map(|v| {
                (
                    v,
                    quotient.links_into(v, partition.community_of(v)) as f64,
                )
            })
            .collect();
        return Ok(CentralityScores::new("mod", entries));
    }

    let u = leading_eigenvector(&quotient.weights);
    let entries = graph
        .active_nodes()
        .map(|v| {
            let own = partition.community_of(v);
            let connectivity: f64 = quotient.node_links[v.index()]
                .iter()
                .filter(|&&(c, _)| c != own)
                .map(|&(c, links)| links as f64 * u[c])
                .sum();
            (v, 2.0 * u[own] * connectivity)
        })
        .collect();
    Ok(CentralityScores::new("mod", entries))
}

/// Mod centrality: community importance (leading eigenvector of the
/// community-weighted network) times connectivity into other communities.
pub fn mod_centrality(graph: &Graph, partition: &Partition) -> Result<CentralityScores> {
    let quotient = build_community_weighted_network(graph, partition);
    mod_scores_from_quotient(graph, partition, &quotient)
}

/// Parameters for Commn centrality.
#[derive(Debug, Clone, Copy, Default)]
pub struct CommnParams {
    /// Scaling constant bringing both degree terms into `[0, R]`. `None`
    /// uses each community's maximum intra-community degree (at least 1).
    pub r: Option<usize>,
}

/// The Commn scoring formula for one node, exposed for direct evaluation:
/// `(1 + mu_c) * (k_in / max_in * r) + (1 - mu_c) * (k_out / max_out * r)^2`.
/// A ratio with zero denominator evaluates to 0.
pub fn commn_score(
    k_in: usize,
    k_out: usize,
    mu_c: f64,
    max_in: usize,
    max_out: usize,
    r: usize,
) -> f64 {
    let in_term = if max_in == 0 {
        0.0
    } else {
        k_in as f64 / max_in as f64 * r as f64
    };
    let out_term = if max_out == 0 {
        0.0
    } else {
        k_out as f64 / max_out as f64 * r as f64
    };
    (1.0 + mu_c) * in_term + (1.0 - mu_c) * out_term * out_term
}

/// Commn centrality: per community `C`, each member `i` scores
/// `(1 + mu_C) * (k_i_in / max_in * R) + (1 - mu_C) * (k_i_out / max_out * R)^2`,
/// where `max_in`/`max_out` are the community's maxima and `R` defaults to
/// `max_in` (clamped to at least 1). Communities with no active members are
/// skipped; all their nodes are masked out anyway.
pub fn commn_centrality(
    graph: &Graph,
    partition: &Partition,
    params: CommnParams,
) -> Result<CentralityScores> {
    if let Some(r) = params.r {
        if r == 0 {
            return Err(Error::InvalidParameter {
                name: "r".to_string(),
                reason: "R must be at least 1".to_string(),
            });
        }
    }
    let mut entries = Vec::with_capacity(graph.active_node_count());
    for c in 0..partition.count() {
        let members: Vec<NodeId> = partition.active_members(graph, c).collect();
        if members.is_empty() {
            continue;
        }
        let mu_c = community_mu(graph, partition, c)?;
        let mut splits = Vec::with_capacity(members.len());
        let mut max_in = 0usize;
        let mut max_out = 0usize;
        for &v in &members {
            let k_in = intra_degree(graph, partition, v)?;
            let k_out = graph.degree_unchecked(v) - k_in;
            max_in = max_in.max(k_in);
            max_out = max_out.max(k_out);
            splits.push((v, k_in, k_out));
        }
        let r = params.r.unwrap_or_else(|| max_in.max(1));
        for (v, k_in, k_out) in splits {
            entries.push((v, commn_score(k_in, k_out, mu_c, max_in, max_out, r)));
        }
    }
    Ok(CentralityScores::new("commn", entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridged_cliques() -> (Graph, Partition) {
        let g = Graph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        );
        let p = Partition::from_assignment(&g, vec![0, 0, 0, 1, 1, 1]);
        (g, p)
    }

    #[test]
    fn degree_scores() {
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s = degree_centrality(&star);
        assert_eq!(s.score(NodeId(0)), Some(4.0));
        assert_eq!(s.score(NodeId(1)), Some(1.0));

        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert!(degree_centrality(&tri)
            .entries()
            .iter()
            .all(|&(_, s)| s == 2.0));

        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let s = degree_centrality(&path);
        assert_eq!(
            (s.score(NodeId(0)), s.score(NodeId(1)), s.score(NodeId(2))),
            (Some(1.0), Some(2.0), Some(1.0))
        );
    }

    #[test]
    fn betweenness_path() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let s = betweenness_centrality(&g);
        assert_eq!(s.score(NodeId(1)), Some(1.0));
        assert_eq!(s.score(NodeId(0)), Some(0.0));
        assert_eq!(s.score(NodeId(2)), Some(0.0));
    }

    #[test]
    fn betweenness_star() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s = betweenness_centrality(&g);
        assert_eq!(s.score(NodeId(0)), Some(6.0));
        assert_eq!(s.score(NodeId(1)), Some(0.0));
    }

    #[test]
    fn betweenness_four_cycle() {
        // every node carries half of the single opposite pair routed through it
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let s = betweenness_centrality(&g);
        for v in g.active_nodes() {
            assert!((s.score(v).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn betweenness_ignores_masked_nodes() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let h = g.remove_nodes(&[NodeId(3)]).unwrap();
        let s = betweenness_centrality(&h);
        assert_eq!(s.score(NodeId(1)), Some(1.0));
        assert_eq!(s.score(NodeId(3)), None);
    }

    #[test]
    fn mod_single_community_falls_back_to_in_degree() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]);
        let p = Partition::from_assignment(&g, vec![0; 4]);
        let s = mod_centrality(&g, &p).unwrap();
        for v in g.active_nodes() {
            assert_eq!(s.score(v).unwrap(), g.degree(v).unwrap() as f64);
        }
    }

    #[test]
    fn mod_zero_out_degree_scores_zero() {
        let (g, p) = bridged_cliques();
        let s = mod_centrality(&g, &p).unwrap();
        assert_eq!(s.score(NodeId(0)), Some(0.0));
        assert_eq!(s.score(NodeId(1)), Some(0.0));
        assert!(s.score(NodeId(2)).unwrap() > 0.0);
    }

    #[test]
    fn mod_symmetric_two_communities() {
        // two 3-cliques with two symmetric bridges: quotient weight matrix
        // [[0, 2], [2, 0]], leading eigenvector (1/sqrt2, 1/sqrt2), so a
        // bridge node k scores 2 * (1/sqrt2) * d_kI * (1/sqrt2) = d_kI
        let g = Graph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3), (1, 4)],
        );
        let p = Partition::from_assignment(&g, vec![0, 0, 0, 1, 1, 1]);
        let s = mod_centrality(&g, &p).unwrap();
        assert!((s.score(NodeId(2)).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.score(NodeId(1)).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(s.score(NodeId(0)), Some(0.0));
    }

    #[test]
    fn mod_on_bipartite_community_path() {
        // communities A={0,1}, B={2,3}, C={4,5} in a path with quotient
        // weights A-B = 2, B-C = 3; the quotient spectrum is symmetric
        // (bipartite), leading eigenvalue sqrt(13) with eigenvector
        // (2, sqrt 13, 3)/sqrt(26)
        let g = Graph::from_edges(
            6,
            [(0, 1), (2, 3), (4, 5), (0, 2), (1, 3), (2, 4), (2, 5), (3, 4)],
        );
        let p = Partition::from_assignment(&g, vec![0, 0, 1, 1, 2, 2]);
        let s = mod_centrality(&g, &p).unwrap();
        let root26 = 26.0f64.sqrt();
        let (u_a, u_b, u_c) = (2.0 / root26, 13.0f64.sqrt() / root26, 3.0 / root26);
        let expect_0 = 2.0 * u_a * u_b; // one link into B
        let expect_2 = 2.0 * u_b * (u_a + 2.0 * u_c); // one into A, two into C
        assert!((s.score(NodeId(0)).unwrap() - expect_0).abs() < 1e-8);
        assert!((s.score(NodeId(2)).unwrap() - expect_2).abs() < 1e-8);
    }

    #[test]
    fn mod_ordering_invariant_under_weight_scaling() {
        let (g, p) = bridged_cliques();
        let mut quotient = build_community_weighted_network(&g, &p);
        let base = mod_scores_from_quotient(&g, &p, &quotient).unwrap();
        for row in quotient.weights.iter_mut() {
            for w in row.iter_mut() {
                *w *= 37.5;
            }
        }
        let scaled = mod_scores_from_quotient(&g, &p, &quotient).unwrap();
        assert_eq!(rank(&base), rank(&scaled));
    }

    #[test]
    fn commn_bridged_cliques_hand_values() {
        let (g, p) = bridged_cliques();
        let s = commn_centrality(&g, &p, CommnParams::default()).unwrap();
        assert!((s.score(NodeId(0)).unwrap() - 20.0 / 9.0).abs() < 1e-12);
        assert!((s.score(NodeId(1)).unwrap() - 20.0 / 9.0).abs() < 1e-12);
        assert!((s.score(NodeId(2)).unwrap() - 52.0 / 9.0).abs() < 1e-12);
        // bridge endpoints outrank the pure hubs
        let order = rank(&s);
        assert!(order[0] == NodeId(2) || order[0] == NodeId(3));
    }

    #[test]
    fn commn_isolated_community_ranks_by_in_degree() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]);
        let p = Partition::from_assignment(&g, vec![0; 4]);
        let s = commn_centrality(&g, &p, CommnParams::default()).unwrap();
        // mu_C = 0, max_in = 3, R = 3: score = k_in
        for v in g.active_nodes() {
            assert_eq!(s.score(v).unwrap(), g.degree(v).unwrap() as f64);
        }
    }

    #[test]
    fn commn_case_three_comparator() {
        // shared normalizers, mu = 0, max_in = max_out = R: node j with
        // (in 4, out 2) must outrank node i with (in 5, out 1) because
        // 5 - 4 <= 2^2 - 1^2
        let r = 5;
        let i = commn_score(5, 1, 0.0, r, r, r);
        let j = commn_score(4, 2, 0.0, r, r, r);
        assert!(j > i);
    }

    #[test]
    fn commn_respects_r_override() {
        let (g, p) = bridged_cliques();
        let s = commn_centrality(&g, &p, CommnParams { r: Some(10) }).unwrap();
        // CC(0) = (10/9) * (2/2*10) = 100/9
        assert!((s.score(NodeId(0)).unwrap() - 100.0 / 9.0).abs() < 1e-12);
        assert!(commn_centrality(&g, &p, CommnParams { r: Some(0) }).is_err());
    }

    #[test]
    fn rank_tie_breaks_by_id() {
        let s = CentralityScores::new(
            "test",
            vec![(NodeId(0), 3.0), (NodeId(1), 5.0), (NodeId(2), 3.0)],
        );
        assert_eq!(rank(&s), vec![NodeId(1), NodeId(0), NodeId(2)]);

        let equal = CentralityScores::new(
            "test",
            vec![(NodeId(2), 1.0), (NodeId(0), 1.0), (NodeId(1), 1.0)],
        );
        assert_eq!(rank(&equal), vec![NodeId(0), NodeId(1), NodeId(2)]);

        let empty = CentralityScores::new("test", vec![]);
        assert!(rank(&empty).is_empty());
    }
}
