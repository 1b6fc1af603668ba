//! Percolation clusters of the root on the d-regular tree, sampled level by level from
//! the same per-edge uniforms as the materialized tree.


use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coupling::{domain, sub_seed, uniform};
use crate::graph::tree_level_start;
use crate::percolation::Environment;
use crate::Estimate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no cluster survived to depth {depth} in {tried} attempts")]
    NoSurvivor { depth: usize, tried: usize },
    #[error("cluster p_c estimate must be positive, got {0}")]
    ZeroEstimate(f64),
}

/// Canonical ids of the d-regular tree: children of the root are `1..=d`, children of a
/// vertex at level `k >= 1` follow the breadth-first order, and the edge above vertex
/// `v` has id `v - 1`.
#[derive(Clone, Debug)]
struct TreeIds {
    d: u64,
    starts: Vec<u64>,
}

impl TreeIds {
    fn new(d: usize, depth: usize) -> Result<TreeIds, TreeError> {
        let fits = (0..=depth + 1).try_fold(1u64, |acc, k| {
            let size = if k == 0 { Some(1) } else { (d as u64).checked_mul((d as u64 - 1).checked_pow(k as u32 - 1)?) };
            acc.checked_add(size?)
        });
        if fits.is_none() || fits.unwrap() > 1 << 62 {
            return Err(TreeError::Parameter(format!("depth {depth} too large for d = {d}")));
        }
        Ok(TreeIds { d: d as u64, starts: (0..=depth + 1).map(|k| tree_level_start(d, k) as u64).collect() })
    }

    fn children(&self, level: usize, v: u64) -> std::ops::Range<u64> {
        if level == 0 {
            1..self.d + 1
        } else {
            let first = self.starts[level + 1] + (v - self.starts[level]) * (self.d - 1);
            first..first + self.d - 1
        }
    }
}

fn check(d: usize, p: f64, depth: usize) -> Result<(), TreeError> {
    if d < 3 || !(0.0..=1.0).contains(&p) || depth == 0 {
        return Err(TreeError::Parameter(format!("need d >= 3, p in [0, 1], depth >= 1; got d={d} p={p} depth={depth}")));
    }
    Ok(())
}

/// Generation sizes of the open cluster of the root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GwClusterStats {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    /// `|T_n|` for `n = 0..=depth`.
    pub counts: Vec<u64>,
    /// `|T_n| / (d (d-1)^{n-1} p^n)`, a mean-one martingale.
    pub ratios: Vec<f64>,
    pub survived: bool,
    /// `|T_depth|^{1/depth}` on surviving clusters.
    pub growth: Option<f64>,
}

fn expected_count(d: usize, p: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        d as f64 * ((d - 1) as f64).powi(n as i32 - 1) * p.powi(n as i32)
    }
}

/// Samples the open cluster of the root generation by generation; edge `e` is open iff
/// its uniform under `seed` is at most `p`.
pub fn gw_statistics(d: usize, p: f64, depth: usize, seed: u64) -> Result<GwClusterStats, TreeError> {
    check(d, p, depth)?;
    let ids = TreeIds::new(d, depth)?;
    let cfg = Environment::new(seed).at(p);
    let mut counts = vec![1u64];
    let mut frontier = vec![0u64];
    for level in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &v in &frontier {
            for c in ids.children(level, v) {
                if crate::percolation::OpenEdges::is_open(&cfg, (c - 1) as usize) {
                    next.push(c);
                }
            }
        }
        counts.push(next.len() as u64);
        frontier = next;
        if frontier.is_empty() {
            counts.resize(depth + 1, 0);
            break;
        }
    }
    let ratios = counts.iter().enumerate().map(|(n, &c)| c as f64 / expected_count(d, p, n)).collect();
    let survived = counts[depth] > 0;
    let growth = survived.then(|| (counts[depth] as f64).powf(1.0 / depth as f64));
    Ok(GwClusterStats { d, p, seed, counts, ratios, survived, growth })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GwSummary {
    pub d: usize,
    pub p: f64,
    pub depth: usize,
    pub replicas: usize,
    pub survivors: usize,
    /// Mean martingale ratio per generation.
    pub ratio: Vec<Estimate>,
    /// `|T_depth|^{1/depth}` over surviving replicas.
    pub growth: Estimate,
}

/// [`gw_statistics`] over `replicas` independent sub-seeds of `seed`.
pub fn gw_replicas(d: usize, p: f64, depth: usize, replicas: usize, seed: u64) -> Result<(GwSummary, Vec<GwClusterStats>), TreeError> {
    check(d, p, depth)?;
    if replicas == 0 {
        return Err(TreeError::Parameter("replicas must be at least 1".into()));
    }
    let runs: Vec<GwClusterStats> = (0..replicas)
        .into_par_iter()
        .map(|r| gw_statistics(d, p, depth, sub_seed(seed, r as u64)))
        .collect::<Result<_, _>>()?;
    let ratio = (0..=depth).map(|n| Estimate::from_samples(&runs.iter().map(|s| s.ratios[n]).collect::<Vec<_>>())).collect();
    let growth: Vec<f64> = runs.iter().filter_map(|s| s.growth).collect();
    let summary = GwSummary { d, p, depth, replicas, survivors: growth.len(), ratio, growth: Estimate::from_samples(&growth) };
    Ok((summary, runs))
}

/// Does the open cluster under `cfg` reach `depth`? Depth-first with early exit.
fn survives(ids: &TreeIds, seed: u64, p: f64, depth: usize) -> bool {
    let mut stack = vec![(0usize, 0u64)];
    while let Some((level, v)) = stack.pop() {
        if level == depth {
            return true;
        }
        for c in ids.children(level, v) {
            if p > 0.0 && uniform(seed, domain::EDGE, c - 1) <= p {
                stack.push((level + 1, c));
            }
        }
    }
    false
}

/// Deepest level reached, capped at `depth`, by the open cluster under `(seed, p)` after
/// thinning at `q`: edge `e` is kept when its independent second uniform is at most `q`.
/// Depth-first with early exit, so a surviving cluster costs little more than one path.
fn thinned_reach(ids: &TreeIds, seed: u64, p: f64, q: f64, depth: usize) -> usize {
    let mut reach = 0;
    let mut stack = vec![(0usize, 0u64)];
    while let Some((level, v)) = stack.pop() {
        reach = reach.max(level);
        if level == depth {
            break;
        }
        for c in ids.children(level, v) {
            let e = c - 1;
            if p > 0.0 && uniform(seed, domain::EDGE, e) <= p && uniform(seed, domain::THIN, e) <= q {
                stack.push((level + 1, c));
            }
        }
    }
    reach
}

/// How the finite-depth survival curves are turned into a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum CrossingRule {
    /// Zero of `D S_D(q) - (D/2) S_{D/2}(q)`: the scaled survival `n S_n` is flat in `n`
    /// exactly at criticality, grows above it and decays below it.
    ScaledSurvival,
    /// `S_D(q) = 1/2` from a logistic fit.
    HalfSurvival,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterPcEstimate {
    pub d: usize,
    pub p: f64,
    pub depth: usize,
    pub rule: CrossingRule,
    pub estimate: f64,
    /// Grid points with survival frequency to depth and to half depth.
    pub grid: Vec<(f64, f64, f64)>,
    pub clusters: usize,
    /// Samples discarded because the cluster died before the depth.
    pub discarded: usize,
}

/// Finite-size proxy for the percolation threshold of the open cluster of the root,
/// conditioned to reach `depth`. Each replica samples a cluster, then Bernoulli-q
/// thinning of its edges for every grid value `q` at once through the survival thresholds.
pub fn estimate_cluster_pc(
    d: usize,
    p: f64,
    depth: usize,
    replicas: usize,
    grid: &[f64],
    rule: CrossingRule,
    seed: u64,
) -> Result<ClusterPcEstimate, TreeError> {
    check(d, p, depth)?;
    if p <= 1.0 / (d - 1) as f64 {
        return Err(TreeError::Parameter(format!("p = {p} is not supercritical on T^{d}")));
    }
    if depth < 2 || replicas == 0 || grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TreeError::Parameter("need depth >= 2, replicas >= 1 and an increasing grid".into()));
    }
    let ids = TreeIds::new(d, depth)?;
    let budget = 100 * replicas;
    // attempt k uses sub-seed k; keep the first `replicas` surviving clusters
    let chunk = replicas.max(64);
    let mut kept: Vec<u64> = Vec::with_capacity(replicas);
    let mut tried = 0;
    while kept.len() < replicas && tried < budget {
        let batch: Vec<(u64, bool)> = (tried..tried + chunk)
            .into_par_iter()
            .map(|k| {
                let s = sub_seed(seed, k as u64);
                (s, survives(&ids, s, p, depth))
            })
            .collect();
        tried += chunk;
        kept.extend(batch.into_iter().filter(|b| b.1).map(|b| b.0).take(replicas - kept.len()));
    }
    if kept.len() < replicas {
        return Err(TreeError::NoSurvivor { depth, tried });
    }
    let discarded = tried - replicas;
    // reach[k][j]: level reached by cluster k thinned at grid[j]
    let reach: Vec<Vec<usize>> =
        kept.par_iter().map(|&s| grid.iter().map(|&q| thinned_reach(&ids, s, p, q, depth)).collect()).collect();
    let half = depth / 2;
    let freq = |n: usize, j: usize| reach.iter().filter(|r| r[j] >= n).count() as f64 / replicas as f64;
    let table: Vec<(f64, f64, f64)> = grid.iter().enumerate().map(|(j, &q)| (q, freq(depth, j), freq(half, j))).collect();
    let estimate = match rule {
        CrossingRule::ScaledSurvival => {
            let g: Vec<f64> = table.iter().map(|&(_, s, sh)| depth as f64 * s - half as f64 * sh).collect();
            zero_crossing(grid, &g)
        }
        CrossingRule::HalfSurvival => logistic_half(&table, replicas),
    };
    Ok(ClusterPcEstimate { d, p, depth, rule, estimate, grid: table, clusters: replicas, discarded })
}

/// First upward sign change of `g` on the grid, linearly interpolated; the grid edge
/// when there is none.
fn zero_crossing(x: &[f64], g: &[f64]) -> f64 {
    for i in 0..x.len() - 1 {
        if g[i] <= 0.0 && g[i + 1] > 0.0 {
            return x[i] + (x[i + 1] - x[i]) * (-g[i]) / (g[i + 1] - g[i]);
        }
    }
    if g[0] > 0.0 {
        x[0]
    } else {
        x[x.len() - 1]
    }
}

/// Maximum-likelihood logistic fit of the survival frequencies; returns the q with fitted
/// probability one half.
fn logistic_half(table: &[(f64, f64, f64)], n: usize) -> f64 {
    let (mut a, mut b) = (0.0f64, 0.0f64);
    let m = table.iter().map(|t| t.0).sum::<f64>() / table.len() as f64;
    for _ in 0..100 {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(q, s, _) in table {
            let x = q - m;
            let mu = 1.0 / (1.0 + (-(a + b * x)).exp());
            let w = n as f64 * mu * (1.0 - mu);
            ga += n as f64 * (s - mu);
            gb += n as f64 * (s - mu) * x;
            haa += w;
            hab += w * x;
            hbb += w * x * x;
        }
        let det = haa * hbb - hab * hab;
        if !(det.abs() > 1e-300) {
            break;
        }
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        a += da;
        b += db;
        if da.abs() + db.abs() < 1e-12 {
            break;
        }
    }
    m - a / b
}

/// `br = 1 / p_c` for a tree.
pub fn branching_number_of_cluster(pc_estimate: f64) -> Result<f64, TreeError> {
    if !(pc_estimate > 0.0 && pc_estimate <= 1.0) {
        return Err(TreeError::ZeroEstimate(pc_estimate));
    }
    Ok(1.0 / pc_estimate)
}

/// Grid `start, start + step, ...` up to `end` inclusive.
pub fn q_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, FamilySpec};
    use crate::percolation::cluster_of;

    #[test]
    fn full_and_empty_clusters() {
        let s = gw_statistics(3, 1.0, 8, 1).unwrap();
        for n in 1..=8 {
            assert_eq!(s.counts[n], 3 * 2u64.pow(n as u32 - 1));
            assert_eq!(s.ratios[n], 1.0);
        }
        let e = gw_statistics(3, 0.0, 8, 1).unwrap();
        assert_eq!(e.counts[1], 0);
        assert!(!e.survived && e.growth.is_none());
    }

    #[test]
    fn matches_materialized_cluster() {
        let g = build_graph(&FamilySpec::RegularTree { d: 3, depth: 9 }).unwrap();
        for seed in 0..20 {
            let s = gw_statistics(3, 0.7, 9, seed).unwrap();
            let c = cluster_of(&g, &Environment::new(seed).at(0.7), 0);
            for n in 0..=9 {
                let k = c.vertices.iter().filter(|&&v| g.vertex_distance(v) == n).count() as u64;
                assert_eq!(k, s.counts[n]);
            }
            assert!(s.counts.windows(2).skip(1).all(|w| w[1] <= 2 * w[0]));
        }
    }

    #[test]
    fn reach_agrees_with_direct_thinning() {
        let ids = TreeIds::new(3, 8).unwrap();
        for seed in 0..30 {
            let mut last = 0;
            for &q in &[0.3, 0.5, 0.7, 1.0] {
                let got = thinned_reach(&ids, seed, 0.8, q, 8);
                assert!(got >= last);
                last = got;
                // thinned cluster: open at p and thin-uniform at most q
                let mut frontier = vec![0u64];
                let mut reach = 0;
                for level in 0..8 {
                    frontier = frontier
                        .iter()
                        .flat_map(|&v| ids.children(level, v))
                        .filter(|&c| uniform(seed, domain::EDGE, c - 1) <= 0.8 && uniform(seed, domain::THIN, c - 1) <= q)
                        .collect();
                    if frontier.is_empty() {
                        break;
                    }
                    reach = level + 1;
                }
                assert_eq!(got, reach, "seed {seed} q {q}");
            }
        }
    }

    #[test]
    fn full_thinning_keeps_survivors() {
        let est = estimate_cluster_pc(3, 0.8, 10, 50, &[0.5, 1.0], CrossingRule::ScaledSurvival, 3).unwrap();
        assert_eq!(est.grid[1].1, 1.0);
        assert!(estimate_cluster_pc(3, 0.4, 10, 50, &[0.5, 1.0], CrossingRule::ScaledSurvival, 3).is_err());
    }

    #[test]
    fn reciprocal_branching() {
        assert_eq!(branching_number_of_cluster(0.5).unwrap(), 2.0);
        assert!(branching_number_of_cluster(0.0).is_err());
        assert_eq!(q_grid(0.3, 1.0, 0.02).len(), 36);
    }

    #[test]
    fn zero_crossing_and_logistic() {
        assert!((zero_crossing(&[0.0, 1.0, 2.0], &[-1.0, -0.5, 0.5]) - 1.5).abs() < 1e-12);
        let table: Vec<(f64, f64, f64)> =
            q_grid(0.0, 1.0, 0.1).into_iter().map(|q| (q, 1.0 / (1.0 + (-(q - 0.4) * 20.0).exp()), 0.0)).collect();
        assert!((logistic_half(&table, 500) - 0.4).abs() < 1e-6);
    }
}
