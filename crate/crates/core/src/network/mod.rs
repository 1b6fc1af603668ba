//! Conductances, potentials, flows and effective resistance.

mod bounds;
mod profile;
mod solve;
mod tree;
mod weight;

use thiserror::Error;

use crate::graph::{EdgeId, Quotient, RootedGraph, VertexId};
use crate::percolation::{OpenEdges, PercConfig};

pub use bounds::{dirichlet_energy, escape_probability, flow_energy, nash_williams_bound, potential_level_cutsets};
pub use profile::{resistance_profile, ProfileFamily, ProfileRequest, ProfileRow, ResistanceProfile};
pub use solve::{effective_resistance, Solution};
pub use tree::{lazy_tree_profile, tree_resistance_exact, LazyTreeLevel, TreeLaw};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("terminal sets must be nonempty and disjoint")]
    InvalidTerminals,
    #[error("A and Z are not joined by positive conductances: resistance is infinite")]
    Disconnected,
    #[error("solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("edge {edge}: conductance {value} is not a nonnegative finite number")]
    BadConductance { edge: EdgeId, value: f64 },
    #[error("conductance table has {got} entries, graph has {need} edges")]
    MissingTableEntries { got: usize, need: usize },
    #[error("bias must be positive, got {0}")]
    BadBias(f64),
    #[error("flow uses zero-conductance edge {0}: energy is infinite")]
    InfiniteEnergy(EdgeId),
    #[error("conductances span e^{0:.0}: outside double range for this method, use elimination")]
    OutOfRange(f64),
    #[error("input graph is not a tree")]
    NotATree,
    #[error("invalid cutsets: {0}")]
    InvalidCutsets(String),
    #[error("profile check failed: {0}")]
    Profile(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Per-edge conductance law.
#[derive(Clone, Debug, PartialEq)]
pub enum ConductanceSpec {
    /// `lambda^(-|e|)`.
    Biased { lambda: f64 },
    /// Explicit values by edge id.
    Table(Vec<f64>),
    /// `open` on open edges of `cfg`, `closed` elsewhere.
    Disordered { open: Box<ConductanceSpec>, closed: Box<ConductanceSpec>, cfg: PercConfig },
}

impl ConductanceSpec {
    pub fn disordered(open: ConductanceSpec, closed: ConductanceSpec, cfg: PercConfig) -> ConductanceSpec {
        ConductanceSpec::Disordered { open: Box::new(open), closed: Box::new(closed), cfg }
    }

    fn validate(&self, g: &RootedGraph) -> Result<(), NetworkError> {
        match self {
            ConductanceSpec::Biased { lambda } if !(*lambda > 0.0 && lambda.is_finite()) => Err(NetworkError::BadBias(*lambda)),
            ConductanceSpec::Biased { .. } => Ok(()),
            ConductanceSpec::Table(t) => {
                if t.len() < g.edge_count() {
                    return Err(NetworkError::MissingTableEntries { got: t.len(), need: g.edge_count() });
                }
                match t.iter().position(|&c| !(c >= 0.0 && c.is_finite())) {
                    Some(edge) => Err(NetworkError::BadConductance { edge, value: t[edge] }),
                    None => Ok(()),
                }
            }
            ConductanceSpec::Disordered { open, closed, .. } => {
                open.validate(g)?;
                closed.validate(g)
            }
        }
    }

    /// Direct value; may underflow or overflow where the log form does not.
    fn conductance(&self, g: &RootedGraph, e: EdgeId) -> f64 {
        match self {
            ConductanceSpec::Biased { lambda } => match i32::try_from(g.edge_distance(e)) {
                Ok(k) => lambda.powi(-k),
                Err(_) => (-(g.edge_distance(e) as f64) * lambda.ln()).exp(),
            },
            ConductanceSpec::Table(t) => t[e],
            ConductanceSpec::Disordered { open, closed, cfg } => {
                if cfg.is_open(e) {
                    open.conductance(g, e)
                } else {
                    closed.conductance(g, e)
                }
            }
        }
    }

    fn log_conductance(&self, g: &RootedGraph, e: EdgeId) -> f64 {
        match self {
            ConductanceSpec::Biased { lambda } => -(g.edge_distance(e) as f64) * lambda.ln(),
            ConductanceSpec::Table(t) => t[e].ln(),
            ConductanceSpec::Disordered { open, closed, cfg } => {
                if cfg.is_open(e) {
                    open.log_conductance(g, e)
                } else {
                    closed.log_conductance(g, e)
                }
            }
        }
    }
}

/// Graph with a nonnegative conductance per edge, stored as natural logarithms so that
/// biased laws far outside double range remain representable.
#[derive(Clone, Debug)]
pub struct Network<'g> {
    graph: &'g RootedGraph,
    log_c: Vec<f64>,
    /// Plain values, kept so that representable conductances are reported exactly.
    c: Vec<f64>,
}

pub fn make_network<'g>(g: &'g RootedGraph, spec: &ConductanceSpec) -> Result<Network<'g>, NetworkError> {
    spec.validate(g)?;
    let log_c = (0..g.edge_count()).map(|e| spec.log_conductance(g, e)).collect();
    let c = (0..g.edge_count()).map(|e| spec.conductance(g, e)).collect();
    Ok(Network { graph: g, log_c, c })
}

/// Network on a quotient graph: each quotient edge carries the summed conductance of
/// the source edges in its provenance list.
pub fn make_quotient_network<'g>(q: &'g Quotient, source: &Network<'_>) -> Network<'g> {
    let log_c = q.provenance.iter().map(|edges| log_sum_exp(edges.iter().map(|&e| source.log_c[e]))).collect();
    let c = q.provenance.iter().map(|edges| edges.iter().map(|&e| source.c[e]).sum()).collect();
    Network { graph: &q.graph, log_c, c }
}

pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl<'g> Network<'g> {
    pub fn from_log_conductances(graph: &'g RootedGraph, log_c: Vec<f64>) -> Network<'g> {
        assert_eq!(log_c.len(), graph.edge_count());
        let c = log_c.iter().map(|l: &f64| l.exp()).collect();
        Network { graph, log_c, c }
    }

    pub fn graph(&self) -> &'g RootedGraph {
        self.graph
    }

    pub fn conductance(&self, e: EdgeId) -> f64 {
        let c = self.c[e];
        if c.is_finite() && (c > 0.0 || self.log_c[e] == f64::NEG_INFINITY) {
            c
        } else {
            self.log_c[e].exp()
        }
    }

    pub fn log_conductance(&self, e: EdgeId) -> f64 {
        self.log_c[e]
    }

    pub fn log_conductances(&self) -> &[f64] {
        &self.log_c
    }

    pub fn resistance(&self, e: EdgeId) -> f64 {
        let c = self.c[e];
        if c.is_finite() && c > 0.0 {
            1.0 / c
        } else {
            (-self.log_c[e]).exp()
        }
    }

    /// `pi(v)`: total conductance of edges at `v`, a loop counted once.
    pub fn pi(&self, v: VertexId) -> f64 {
        self.log_pi(v).exp()
    }

    pub fn log_pi(&self, v: VertexId) -> f64 {
        log_sum_exp(self.graph.neighbors(v).iter().map(|&(_, e)| self.log_c[e]))
    }

    /// Copy with one conductance replaced.
    pub fn with_conductance(&self, e: EdgeId, c: f64) -> Network<'g> {
        let mut log_c = self.log_c.clone();
        log_c[e] = c.ln();
        let mut plain = self.c.clone();
        plain[e] = c;
        Network { graph: self.graph, log_c, c: plain }
    }
}

/// Solver choice for [`effective_resistance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Jacobi-preconditioned conjugate gradient.
    Iterative,
    /// Dense Gaussian elimination with partial pivoting.
    Dense,
    /// Sparse star-mesh elimination with minimum-degree ordering. Only sums, products and
    /// quotients of positive numbers occur, so accuracy does not degrade with the
    /// conductance range; very wide ranges run in log arithmetic.
    Elimination,
}

/// Node potentials with their boundary sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub values: Vec<f64>,
    pub a: Vec<VertexId>,
    pub z: Vec<VertexId>,
}

/// Edge flow in the orientation `endpoints(e)[0] -> endpoints(e)[1]`; the reverse
/// orientation carries the negated value.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub values: Vec<f64>,
    pub sources: Vec<VertexId>,
    pub sinks: Vec<VertexId>,
}

impl Flow {
    /// Net flow out of each vertex.
    pub fn divergence(&self, g: &RootedGraph) -> Vec<f64> {
        let mut div = vec![0.0; g.vertex_count()];
        for (e, &[u, v]) in g.edges().iter().enumerate() {
            div[u] += self.values[e];
            div[v] -= self.values[e];
        }
        div
    }

    pub fn strength(&self, g: &RootedGraph) -> f64 {
        let div = self.divergence(g);
        self.sources.iter().map(|&a| div[a]).sum()
    }
}
