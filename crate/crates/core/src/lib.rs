//! Disordered random electrical networks.
//!
//! Graph families with canonical edge ids, grand-coupled Bernoulli environments,
//! effective resistance with lower and upper certificates, random walks, Galton-Watson
//! cluster statistics and finite-scale recurrence/transience threshold estimation.

pub mod coupling;
pub mod estimation;
pub mod graph;
pub mod network;
pub mod percolation;
pub mod report;
pub mod trees;
pub mod walks;

pub use estimation::{Classification, DecisionRule, ThresholdEstimate, Verdict};
pub use graph::{FamilySpec, GraphError, RootedGraph};
pub use network::{ConductanceSpec, Flow, Method, Network, NetworkError, Potential, ResistanceProfile};
pub use percolation::{Cutset, EdgeStates, Environment, OpenEdges, PercConfig};
pub use walks::WalkSummary;

/// Mean and binomial/sample standard error of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, se: f64::NAN, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, se, samples: n }
    }

    pub fn from_hits(hits: usize, trials: usize) -> Estimate {
        let mean = hits as f64 / trials as f64;
        let se = (mean * (1.0 - mean) / trials as f64).sqrt();
        Estimate { mean, se, samples: trials }
    }
}
