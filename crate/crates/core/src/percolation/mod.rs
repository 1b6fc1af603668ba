//! Grand-coupled bond percolation: environments, clusters, cutsets, dual lattice and crossings.

mod cluster;
mod crossings;
mod cutset;
mod dual;
mod one_arm;

use std::sync::Arc;

use thiserror::Error;

use crate::coupling::{self, domain};
use crate::graph::EdgeId;

pub use cluster::{cluster_of, Cluster};
pub use crossings::{count_annulus_circuits_lower, count_edge_disjoint_crossings, max_flow_unit, BoxSpec, Direction};
pub use cutset::{extract_closed_cutset, greedy_closed_cutsets, separates, Cutset};
pub use dual::{dual_config, DualLattice};
pub use one_arm::estimate_one_arm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PercolationError {
    #[error("invalid radii: r_in={r_in}, r_out={r_out}, graph radius {radius}")]
    InvalidRadii { r_in: usize, r_out: usize, radius: usize },
    #[error("degenerate box: {0}")]
    DegenerateBox(String),
    #[error("graph is not a planar square-lattice region: {0}")]
    NotPlanar(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Per-edge uniforms `U_e`.
#[derive(Clone, Debug, PartialEq)]
pub enum Environment {
    /// `U_e` hashed from `(seed, e)`.
    Hashed { seed: u64 },
    /// Explicit table, indexed by edge id.
    Table(Arc<Vec<f64>>),
}

impl Environment {
    pub fn new(seed: u64) -> Environment {
        Environment::Hashed { seed }
    }

    pub fn from_table(values: Vec<f64>) -> Environment {
        Environment::Table(Arc::new(values))
    }

    #[inline]
    pub fn uniform(&self, e: EdgeId) -> f64 {
        match self {
            Environment::Hashed { seed } => coupling::uniform(*seed, domain::EDGE, e as u64),
            Environment::Table(t) => t[e],
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Environment::Hashed { seed } => Some(*seed),
            Environment::Table(_) => None,
        }
    }

    pub fn at(&self, p: f64) -> PercConfig {
        PercConfig { env: self.clone(), p }
    }
}

/// Anything that says which edges are open.
pub trait OpenEdges {
    fn is_open(&self, e: EdgeId) -> bool;
}

/// Bernoulli-p configuration realized from an environment: `e` is open iff `U_e <= p`
/// (and `p > 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct PercConfig {
    pub env: Environment,
    pub p: f64,
}

impl PercConfig {
    pub fn new(env: Environment, p: f64) -> PercConfig {
        PercConfig { env, p }
    }
}

impl OpenEdges for PercConfig {
    #[inline]
    fn is_open(&self, e: EdgeId) -> bool {
        // p = 0 closes everything, including the measure-zero draw U_e = 0
        self.p > 0.0 && self.env.uniform(e) <= self.p
    }
}

/// Explicit open/closed table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStates(pub Vec<bool>);

impl OpenEdges for EdgeStates {
    #[inline]
    fn is_open(&self, e: EdgeId) -> bool {
        self.0[e]
    }
}

impl<T: OpenEdges + ?Sized> OpenEdges for &T {
    fn is_open(&self, e: EdgeId) -> bool {
        (**self).is_open(e)
    }
}

/// Every edge open.
pub struct AllOpen;

impl OpenEdges for AllOpen {
    fn is_open(&self, _: EdgeId) -> bool {
        true
    }
}
