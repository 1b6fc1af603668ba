use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EstimationError;
use crate::coupling::sub_seed;
use crate::graph::{build_graph, FamilySpec};
use crate::percolation::{cluster_of, Environment};
use crate::trees::gw_statistics;
use crate::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFamily {
    Tree { d: usize },
    Lattice { d: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub family: GrowthFamily,
    pub p: f64,
    pub depth: usize,
    /// `|B_n ∩ K|^{1/n}` over replicas whose cluster reaches distance `n`.
    pub root: Estimate,
    /// `(|B_n ∩ K| / |B_{n/2} ∩ K|)^{1/(n - n/2)}` over the same replicas; free of the
    /// constant prefactor that biases the root estimate at moderate depth.
    pub ratio: Estimate,
    pub survivors: usize,
    pub replicas: usize,
    /// `(d - 1) p` on trees; none on lattices.
    pub reference: Option<f64>,
}

/// Volume growth of the open cluster of the root, from cumulative ball counts
/// `|B_k ∩ K|` for `k = 0..=depth`.
pub fn estimate_cluster_growth(
    family: GrowthFamily,
    p: f64,
    depth: usize,
    replicas: usize,
    seed: u64,
) -> Result<GrowthEstimate, EstimationError> {
    if depth < 2 || replicas == 0 || !(0.0..=1.0).contains(&p) {
        return Err(EstimationError::Config("need depth >= 2, replicas >= 1 and p in [0, 1]".into()));
    }
    let volumes: Vec<Vec<u64>> = match family {
        GrowthFamily::Tree { d } => (0..replicas)
            .into_par_iter()
            .map(|r| {
                let s = gw_statistics(d, p, depth, sub_seed(seed, r as u64))?;
                Ok(s.counts.iter().scan(0, |acc, &c| {
                    *acc += c;
                    Some(*acc)
                }).collect())
            })
            .collect::<Result<_, EstimationError>>()?,
        GrowthFamily::Lattice { d } => {
            let g = build_graph(&FamilySpec::ZdBall { d, radius: depth })?;
            (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let c = cluster_of(&g, &Environment::new(sub_seed(seed, r as u64)).at(p), g.root());
                    let mut shell = vec![0u64; depth + 1];
                    for &v in &c.vertices {
                        shell[g.vertex_distance(v)] += 1;
                    }
                    shell.iter().scan(0, |acc, &c| {
                        *acc += c;
                        Some(*acc)
                    }).collect()
                })
                .collect()
        }
    };
    let half = depth / 2;
    let survivors: Vec<&Vec<u64>> = volumes.iter().filter(|b| b[depth] > b[depth - 1]).collect();
    let root: Vec<f64> = survivors.iter().map(|b| (b[depth] as f64).powf(1.0 / depth as f64)).collect();
    let ratio: Vec<f64> =
        survivors.iter().map(|b| (b[depth] as f64 / b[half] as f64).powf(1.0 / (depth - half) as f64)).collect();
    Ok(GrowthEstimate {
        family,
        p,
        depth,
        root: Estimate::from_samples(&root),
        ratio: Estimate::from_samples(&ratio),
        survivors: survivors.len(),
        replicas,
        reference: match family {
            GrowthFamily::Tree { d } => Some((d - 1) as f64 * p),
            GrowthFamily::Lattice { .. } => None,
        },
    })
}
