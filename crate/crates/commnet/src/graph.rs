//! Undirected simple graph with dense node ids and mask-based node removal.
//!
//! The adjacency structure is immutable and shared; removing nodes produces a
//! logically new [`Graph`] that masks them out without renumbering survivors,
//! so node ids stay stable across a graph's lifetime.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense node index, stable across removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Options for [`load_edge_list`].
///
/// Edge direction is always ignored on load; `directed_input` only records
/// that the source file was directed, for provenance.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeListOptions {
    pub directed_input: bool,
}

/// Immutable undirected simple graph.
///
/// Neighbor lists are sorted, enabling `O(log d)` adjacency tests. The
/// active mask supports removal without renumbering: `degree`, `neighbors`
/// and traversals only ever see active nodes.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Arc<Vec<Vec<NodeId>>>,
    labels: Arc<Vec<String>>,
    active: Vec<bool>,
    active_degree: Vec<usize>,
    active_nodes: usize,
    active_edges: usize,
}

impl Graph {
    /// Build a graph over nodes `0..n` from an edge iterator. Self-loops and
    /// duplicate edges are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Graph::build(labels, edges)
    }

    /// Build a graph with explicit node labels (one per dense id).
    pub fn build<I>(labels: Vec<String>, edges: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge endpoint out of range");
            if a == b {
                continue;
            }
            adjacency[a].push(NodeId(b));
            adjacency[b].push(NodeId(a));
        }
        let mut edge_count = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        let active_degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
        Graph {
            adjacency: Arc::new(adjacency),
            labels: Arc::new(labels),
            active: vec![true; n],
            active_degree,
            active_nodes: n,
            active_edges: edge_count / 2,
        }
    }

    /// Total node slots, active or not.
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of active (non-removed) nodes.
    pub fn active_node_count(&self) -> usize {
        self.active_nodes
    }

    /// Number of edges between active nodes.
    pub fn edge_count(&self) -> usize {
        self.active_edges
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        v.index() < self.active.len() && self.active[v.index()]
    }

    fn check_active(&self, v: NodeId) -> Result<()> {
        if v.index() >= self.adjacency.len() {
            Err(Error::NodeOutOfRange(v))
        } else if !self.active[v.index()] {
            Err(Error::NodeRemoved(v))
        } else {
            Ok(())
        }
    }

    /// Degree of `v` counting only active neighbors.
    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.check_active(v)?;
        Ok(self.active_degree[v.index()])
    }

    /// Degree without the activity check; `v` must be active.
    #[inline]
    pub(crate) fn degree_unchecked(&self, v: NodeId) -> usize {
        self.active_degree[v.index()]
    }

    /// Active neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[v.index()]
            .iter()
            .copied()
            .filter(|u| self.active[u.index()])
    }

    /// Whether active nodes `a` and `b` are directly connected.
    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.is_active(a)
            && self.is_active(b)
            && self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Active node ids in ascending order.
    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adjacency.len())
            .filter(|&i| self.active[i])
            .map(NodeId)
    }

    /// Edges between active nodes as `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.active_nodes()
            .flat_map(move |a| self.neighbors(a).filter(move |&b| a < b).map(move |b| (a, b)))
    }

    /// Original label of node `v`.
    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    /// All labels, indexed by dense id.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Dense id for an original label, if present.
    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        // Labels are unique by construction; linear scan is fine for CLI-sized
        // lookups, callers doing bulk resolution should build their own map.
        self.labels.iter().position(|l| l == label).map(NodeId)
    }

    /// Label-to-id mapping table.
    pub fn label_map(&self) -> HashMap<&str, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), NodeId(i)))
            .collect()
    }

    /// Mask out `nodes`, returning a new graph. The receiver is unchanged.
    ///
    /// Errors if any node is out of range, already removed, or listed twice.
    pub fn remove_nodes(&self, nodes: &[NodeId]) -> Result<Graph> {
        let mut out = self.clone();
        for &v in nodes {
            out.check_active(v)?;
            out.active[v.index()] = false;
            out.active_nodes -= 1;
            let lost = out.active_degree[v.index()];
            out.active_edges -= lost;
            out.active_degree[v.index()] = 0;
            for &u in &out.adjacency[v.index()] {
                if out.active[u.index()] {
                    out.active_degree[u.index()] -= 1;
                }
            }
        }
        Ok(out)
    }

    /// Node count of the largest connected component over active nodes.
    pub fn largest_connected_component_size(&self) -> usize {
        let n = self.adjacency.len();
        let mut seen = vec![false; n];
        let mut best = 0;
        let mut queue = Vec::new();
        for start in 0..n {
            if !self.active[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push(start);
            let mut size = 0;
            while let Some(v) = queue.pop() {
                size += 1;
                for u in self.neighbors(NodeId(v)) {
                    if !seen[u.index()] {
                        seen[u.index()] = true;
                        queue.push(u.index());
                    }
                }
            }
            best = best.max(size);
        }
        best
    }
}

/// Load an undirected simple graph from an edge-list file.
///
/// One edge per line, two whitespace-separated labels; `#`-prefixed lines are
/// comments. Duplicate edges, reversed duplicates and self-loops are dropped.
/// Labels map to dense ids in first-seen order (retrievable via
/// [`Graph::label`] / [`Graph::label_map`]).
pub fn load_edge_list(path: impl AsRef<Path>, _options: EdgeListOptions) -> Result<Graph> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut intern = |token: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&id) = ids.get(token) {
            id
        } else {
            let id = labels.len();
            labels.push(token.to_string());
            ids.insert(token.to_string(), id);
            id
        }
    };

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
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::MalformedLine {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    reason: "expected exactly two node labels".to_string(),
                })
            }
        };
        let a = intern(a, &mut labels);
        let b = intern(b, &mut labels);
        edges.push((a, b));
    }

    Ok(Graph::build(labels, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn triangle_from_file() {
        let f = write_temp("0 1\n1 2\n2 0\n");
        let g = load_edge_list(f.path(), EdgeListOptions::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        for v in g.active_nodes() {
            assert_eq!(g.degree(v).unwrap(), 2);
        }
    }

    #[test]
    fn dedupe_and_self_loop_drop() {
        let f = write_temp("1 2\n2 1\n2 2\n");
        let g = load_edge_list(f.path(), EdgeListOptions::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_and_labels() {
        let f = write_temp("# header\nalice bob\nbob carol\n");
        let g = load_edge_list(f.path(), EdgeListOptions::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.label(NodeId(0)), "alice");
        assert_eq!(g.node_by_label("carol"), Some(NodeId(2)));
    }

    #[test]
    fn malformed_line_reports_number() {
        let f = write_temp("0 1\n0 1 2\n");
        let err = load_edge_list(f.path(), EdgeListOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "got: {msg}");
    }

    #[test]
    fn load_is_deterministic() {
        let f = write_temp("b a\na c\nc b\nd a\n");
        let g1 = load_edge_list(f.path(), EdgeListOptions::default()).unwrap();
        let g2 = load_edge_list(f.path(), EdgeListOptions::default()).unwrap();
        for v in g1.active_nodes() {
            let n1: Vec<_> = g1.neighbors(v).collect();
            let n2: Vec<_> = g2.neighbors(v).collect();
            assert_eq!(n1, n2);
        }
    }

    #[test]
    fn degree_examples() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(path.degree(NodeId(1)).unwrap(), 2);
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(star.degree(NodeId(0)).unwrap(), 4);
    }

    #[test]
    fn degree_errors() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(matches!(
            g.degree(NodeId(9)),
            Err(Error::NodeOutOfRange(_))
        ));
        let h = g.remove_nodes(&[NodeId(1)]).unwrap();
        assert!(matches!(h.degree(NodeId(1)), Err(Error::NodeRemoved(_))));
    }

    #[test]
    fn remove_from_triangle() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        let h = g.remove_nodes(&[NodeId(0)]).unwrap();
        assert_eq!(h.degree(NodeId(1)).unwrap(), 1);
        assert_eq!(h.degree(NodeId(2)).unwrap(), 1);
        assert_eq!(h.edge_count(), 1);
        // original untouched
        assert_eq!(g.degree(NodeId(0)).unwrap(), 2);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn remove_nothing_is_identity() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let h = g.remove_nodes(&[]).unwrap();
        assert_eq!(h.active_node_count(), 4);
        assert_eq!(h.edge_count(), 3);
    }

    #[test]
    fn remove_splits_path() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let h = g.remove_nodes(&[NodeId(2)]).unwrap();
        assert_eq!(h.largest_connected_component_size(), 2);
    }

    #[test]
    fn remove_twice_errors() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(g.remove_nodes(&[NodeId(1), NodeId(1)]).is_err());
        let h = g.remove_nodes(&[NodeId(1)]).unwrap();
        assert!(h.remove_nodes(&[NodeId(1)]).is_err());
    }

    #[test]
    fn lcc_examples() {
        let k5 = Graph::from_edges(
            5,
            (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))),
        );
        assert_eq!(k5.largest_connected_component_size(), 5);

        let cliques = Graph::from_edges(
            7,
            [(0, 1), (1, 2), (2, 0), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)],
        );
        assert_eq!(cliques.largest_connected_component_size(), 4);

        let empty = Graph::from_edges(0, []);
        assert_eq!(empty.largest_connected_component_size(), 0);
    }
}
