//! Community-aware node ranking for targeted immunization, evaluated by SIR
//! epidemic simulation.
//!
//! The crate covers the full pipeline:
//!
//! - [`graph`]: undirected simple graphs with stable ids and mask-based
//!   removal, plus edge-list ingestion.
//! - [`community`]: partitions, the intra/inter degree split, community
//!   cohesion, mixing, the community-weighted quotient network, and a label
//!   propagation detector for networks without a known partition.
//! - [`lfr`]: LFR-style benchmark generation (power-law degrees and
//!   community sizes, rewiring to a target mixing).
//! - [`centrality`]: degree, betweenness, Mod, and Commn centrality.
//! - [`immunization`]: removal planning from centrality rankings, sequential
//!   recalculation, proportional per-community Commn removal, random
//!   acquaintance, and the community bridge finder.
//! - [`sir`]: stochastic SIR simulation, ensembles, the epidemic threshold,
//!   and degree-class mean-field integration.
//! - [`experiment`]: declarative sweeps of infection totals and largest
//!   connected components over removed-fraction grids, with CSV output.
//! - [`plot`]: SVG curve rendering for sweep results.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `commnet` binary for the command-line interface.

pub mod centrality;
pub mod community;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod immunization;
pub mod lfr;
pub mod plot;
pub mod sir;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
