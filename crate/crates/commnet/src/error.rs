use std::path::PathBuf;

use crate::graph::NodeId;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed line: {reason}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("node {0} is out of range")]
    NodeOutOfRange(NodeId),

    #[error("node {0} has been removed")]
    NodeRemoved(NodeId),

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("graph has no active nodes")]
    EmptyGraph,

    #[error("community {0} is empty")]
    EmptyCommunity(usize),

    #[error("partition does not cover node {0}")]
    MissingPartitionEntry(String),

    #[error("partition file assigns node {0} more than once")]
    DuplicatePartitionEntry(String),

    #[error("partition file references unknown node label {0}")]
    UnknownNodeLabel(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("degree sequence infeasible: cannot reach mean degree {target} within [1, {k_max}]")]
    InfeasibleDegreeSequence { target: f64, k_max: usize },

    #[error("could not partition {n} nodes into community sizes within [{c_min}, {c_max}] after {attempts} attempts")]
    CommunitySizesExhausted {
        n: usize,
        c_min: usize,
        c_max: usize,
        attempts: usize,
    },

    #[error("community assignment deadlocked on node {node} (degree {degree}, internal target {target})")]
    AssignmentDeadlock {
        node: NodeId,
        degree: usize,
        target: usize,
    },

    #[error("removal count {requested} exceeds {active} active nodes")]
    RemovalCountTooLarge { requested: usize, active: usize },

    #[error("simulation did not halt within {0} steps")]
    SirDidNotHalt(usize),

    #[error("mean-field integration unstable at dt={dt}: {reason}")]
    UnstableIntegration { dt: f64, reason: String },

    #[error("strategy {0} requires a community partition")]
    PartitionRequired(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("nothing to plot: empty result set")]
    EmptyPlot,
}

pub type Result<T> = std::result::Result<T, Error>;
