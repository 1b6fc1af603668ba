use std::collections::VecDeque;

use rayon::prelude::*;

use super::{OpenEdges, PercolationError};
use crate::coupling::sub_seed;
use crate::graph::{build_graph, FamilySpec, RootedGraph};
use crate::percolation::Environment;
use crate::Estimate;

fn reaches_sphere<S: OpenEdges>(g: &RootedGraph, states: &S, n: usize, seen: &mut [bool]) -> bool {
    let mut visited = vec![g.root()];
    let mut queue = VecDeque::from([g.root()]);
    seen[g.root()] = true;
    let mut hit = g.vertex_distance(g.root()) >= n;
    while let Some(x) = queue.pop_front() {
        if hit {
            break;
        }
        for &(y, e) in g.neighbors(x) {
            if !seen[y] && states.is_open(e) {
                if g.vertex_distance(y) >= n {
                    hit = true;
                    break;
                }
                seen[y] = true;
                visited.push(y);
                queue.push_back(y);
            }
        }
    }
    for v in visited {
        seen[v] = false;
    }
    hit
}

/// Frequency with which the open cluster of the origin in Z^d reaches distance `n`.
pub fn estimate_one_arm(d: usize, p: f64, n: usize, replicas: usize, seed: u64) -> Result<Estimate, PercolationError> {
    let g = build_graph(&FamilySpec::ZdBall { d, radius: n })?;
    let hits: usize = (0..replicas)
        .into_par_iter()
        .map_init(
            || vec![false; g.vertex_count()],
            |seen, r| {
                let cfg = Environment::new(sub_seed(seed, r as u64)).at(p);
                usize::from(reaches_sphere(&g, &cfg, n, seen))
            },
        )
        .sum();
    Ok(Estimate::from_hits(hits, replicas))
}
