use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::WalkError;
use crate::coupling::sub_seed;
use crate::graph::VertexId;
use crate::network::Network;
use crate::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WalkSummary {
    pub steps: usize,
    /// Visits to the start after time 0.
    pub returns: usize,
    pub max_distance: usize,
    pub final_distance: usize,
    /// The walk stopped on the stop set.
    pub hit_boundary: bool,
    /// Steps that decreased the graph distance to the root.
    pub inward_steps: usize,
    pub final_vertex: VertexId,
}

/// Runs the walk with `p(x, y) = c({x, y}) / pi(x)` from `start` until it enters
/// `stop_set` or takes `max_steps` steps. Distances are graph distances to the root.
pub fn simulate_walk(
    net: &Network<'_>,
    start: VertexId,
    max_steps: usize,
    stop_set: &[VertexId],
    seed: u64,
) -> Result<WalkSummary, WalkError> {
    let g = net.graph();
    let n = g.vertex_count();
    if start >= n {
        return Err(WalkError::VertexOutOfRange(start));
    }
    let mut stop = vec![false; n];
    for &v in stop_set {
        if v >= n {
            return Err(WalkError::VertexOutOfRange(v));
        }
        stop[v] = true;
    }
    if net.log_pi(start) == f64::NEG_INFINITY {
        return Err(WalkError::StuckStart(start));
    }
    // cumulative transition probabilities, built lazily per visited vertex
    let mut cdf: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = start;
    let mut s = WalkSummary {
        steps: 0,
        returns: 0,
        max_distance: g.vertex_distance(start),
        final_distance: g.vertex_distance(start),
        hit_boundary: stop[start],
        inward_steps: 0,
        final_vertex: start,
    };
    while !s.hit_boundary && s.steps < max_steps {
        let table = cdf[x].get_or_insert_with(|| {
            let lp = net.log_pi(x);
            let mut acc = 0.0;
            g.neighbors(x)
                .iter()
                .map(|&(_, e)| {
                    acc += (net.log_conductance(e) - lp).exp();
                    acc
                })
                .collect()
        });
        let u: f64 = rng.gen::<f64>() * table.last().copied().unwrap_or(0.0);
        let k = table.partition_point(|&c| c <= u).min(table.len() - 1);
        let y = g.neighbors(x)[k].0;
        if g.vertex_distance(y) < g.vertex_distance(x) {
            s.inward_steps += 1;
        }
        x = y;
        s.steps += 1;
        s.returns += usize::from(x == start);
        s.max_distance = s.max_distance.max(g.vertex_distance(x));
        s.hit_boundary = stop[x];
    }
    s.final_distance = g.vertex_distance(x);
    s.final_vertex = x;
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeedEstimate {
    /// Mean of `|X_n|_1 / n` over replicas.
    pub speed: Estimate,
    /// Attempted steps past the reflecting guard, summed over replicas.
    pub guard_hits: usize,
    pub guard_radius: u64,
}

/// Monte Carlo speed of the walk with conductances `lambda^{-|e|}` on Z^d, simulated
/// without materializing a ball. From `x`, each outward neighbor has weight 1 and each
/// inward neighbor weight `lambda`.
pub fn estimate_speed(d: usize, lambda: f64, steps: usize, replicas: usize, seed: u64) -> Result<SpeedEstimate, WalkError> {
    if d == 0 || !(lambda > 0.0 && lambda < 1.0) || steps == 0 || replicas == 0 {
        return Err(WalkError::Parameter(format!(
            "speed needs d >= 1, lambda in (0, 1), steps and replicas positive; got d={d} lambda={lambda}"
        )));
    }
    let drift = (1.0 - lambda) / (1.0 + lambda);
    let reach = (drift * steps as f64).max((steps as f64).sqrt());
    let guard = (4.0 * reach).ceil() as u64;
    let runs: Vec<(f64, usize)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, r as u64));
            let mut x = vec![0i64; d];
            let mut norm: u64 = 0;
            let mut hits = 0;
            for _ in 0..steps {
                let zeros = x.iter().filter(|&&c| c == 0).count();
                let inward = d - zeros;
                let outward = 2 * zeros + inward;
                let total = outward as f64 + lambda * inward as f64;
                let u = rng.gen::<f64>() * total;
                let (axis, dir) = if u < outward as f64 {
                    // k-th outward move: two per zero axis, one per nonzero axis
                    let mut k = u as usize;
                    let mut pick = (0, 1);
                    for (i, &c) in x.iter().enumerate() {
                        let m = if c == 0 { 2 } else { 1 };
                        if k < m {
                            pick = (i, if c == 0 { if k == 0 { 1 } else { -1 } } else { c.signum() });
                            break;
                        }
                        k -= m;
                    }
                    pick
                } else {
                    let mut k = ((u - outward as f64) / lambda) as usize;
                    let mut pick = None;
                    for (i, &c) in x.iter().enumerate() {
                        if c != 0 {
                            if k == 0 {
                                pick = Some((i, -c.signum()));
                                break;
                            }
                            k -= 1;
                        }
                    }
                    pick.unwrap_or_else(|| {
                        let i = x.iter().rposition(|&c| c != 0).unwrap();
                        (i, -x[i].signum())
                    })
                };
                let next = x[axis] + dir;
                let next_norm = norm - x[axis].unsigned_abs() + next.unsigned_abs();
                if next_norm > guard {
                    hits += 1;
                    continue;
                }
                x[axis] = next;
                norm = next_norm;
            }
            (norm as f64 / steps as f64, hits)
        })
        .collect();
    let speeds: Vec<f64> = runs.iter().map(|r| r.0).collect();
    Ok(SpeedEstimate {
        speed: Estimate::from_samples(&speeds),
        guard_hits: runs.iter().map(|r| r.1).sum(),
        guard_radius: guard,
    })
}
