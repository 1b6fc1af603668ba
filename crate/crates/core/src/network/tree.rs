use super::{Network, NetworkError};
use crate::graph::{geodesic_spanning_tree, tree_level_start};
use crate::percolation::{OpenEdges, PercConfig};

/// `R(o <-> level n)` on a materialized tree by the leaf-to-root series/parallel
/// recursion `C_v = sum_u 1 / (r(v,u) + R_u)`.
pub fn tree_resistance_exact(net: &Network<'_>, depth: usize) -> Result<f64, NetworkError> {
    let g = net.graph();
    if !g.is_tree() {
        return Err(NetworkError::NotATree);
    }
    let t = geodesic_spanning_tree(g);
    let mut order: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.vertex_distance(v) <= depth).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.vertex_distance(v)));
    let mut conductance_below = vec![0.0f64; g.vertex_count()];
    for v in order {
        let r_v = if g.vertex_distance(v) == depth { 0.0 } else { 1.0 / conductance_below[v] };
        if let (Some(p), Some(e)) = (t.parent[v], t.parent_edge[v]) {
            let branch = net.resistance(e) + r_v;
            if branch.is_finite() {
                conductance_below[p] += 1.0 / branch;
            }
        } else if !(r_v.is_finite()) {
            return Err(NetworkError::Disconnected);
        } else {
            return Ok(r_v);
        }
    }
    Err(NetworkError::Disconnected)
}

/// Disordered biased law on the d-regular tree, evaluated lazily from canonical edge ids.
#[derive(Clone, Debug)]
pub struct TreeLaw {
    pub d: usize,
    pub open_lambda: f64,
    pub closed_lambda: f64,
    pub cfg: PercConfig,
}

/// Values at truncation depth `n` for the lazily generated tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LazyTreeLevel {
    pub n: usize,
    pub resistance: f64,
    /// Nash-Williams bound from the level cutsets `{e : |e| = k}`, `k < n`.
    pub nw_lower: f64,
    /// Energy of the harmonic unit flow, computed by its own recursion.
    pub flow_energy: f64,
}

struct Walker<'a> {
    law: &'a TreeLaw,
    depth: usize,
    starts: Vec<usize>,
    level_sum: Vec<f64>,
    /// Per level: accumulated branch conductances and energy terms, then the results.
    s1: Vec<Vec<f64>>,
    s2: Vec<Vec<f64>>,
    res: Vec<Vec<f64>>,
    energy: Vec<Vec<f64>>,
    /// Conductances of open and closed edges by level.
    c_open: Vec<f64>,
    c_closed: Vec<f64>,
}

impl Walker<'_> {
    /// Fills `res[k]` and `energy[k]` (index `n - k - 1`) for the vertex `id` at level `k`.
    fn visit(&mut self, k: usize, id: usize) {
        let width = self.depth - k;
        self.s1[k][..width].fill(0.0);
        self.s2[k][..width].fill(0.0);
        let (first, count) = if k == 0 {
            (1, self.law.d)
        } else {
            (self.starts[k + 1] + (id - self.starts[k]) * (self.law.d - 1), self.law.d - 1)
        };
        for child in first..first + count {
            let c = if self.law.cfg.is_open(child - 1) { self.c_open[k] } else { self.c_closed[k] };
            let r = 1.0 / c;
            self.level_sum[k] += c;
            self.s1[k][0] += c;
            self.s2[k][0] += c;
            if width > 1 {
                self.visit(k + 1, child);
                for j in 1..width {
                    let (ru, eu) = (self.res[k + 1][j - 1], self.energy[k + 1][j - 1]);
                    let b = 1.0 / (r + ru);
                    if b > 0.0 {
                        self.s1[k][j] += b;
                        self.s2[k][j] += b * b * (r + eu);
                    }
                }
            }
        }
        for j in 0..width {
            let s1 = self.s1[k][j];
            self.res[k][j] = 1.0 / s1;
            self.energy[k][j] = self.s2[k][j] / (s1 * s1);
        }
    }
}

/// Resistance from the root to every level `1..=depth` of the d-regular tree under a
/// disordered biased law, without materializing the tree. Edge ids agree with
/// [`crate::graph::build_graph`] for `regular_tree`, so results match the materialized
/// network edge for edge.
pub fn lazy_tree_profile(law: &TreeLaw, depth: usize) -> Result<Vec<LazyTreeLevel>, NetworkError> {
    if law.d < 2 || !(law.open_lambda > 0.0) || !(law.closed_lambda > 0.0) {
        return Err(NetworkError::Profile("tree law needs d >= 2 and positive biases".into()));
    }
    let worst = law.open_lambda.ln().abs().max(law.closed_lambda.ln().abs()) * depth as f64;
    if worst > 600.0 {
        return Err(NetworkError::OutOfRange(worst));
    }
    if depth == 0 {
        return Ok(Vec::new());
    }
    let mut w = Walker {
        law,
        depth,
        starts: (0..=depth + 1).map(|k| tree_level_start(law.d, k)).collect(),
        level_sum: vec![0.0; depth],
        s1: (0..depth).map(|k| vec![0.0; depth - k]).collect(),
        s2: (0..depth).map(|k| vec![0.0; depth - k]).collect(),
        res: (0..depth).map(|k| vec![0.0; depth - k]).collect(),
        energy: (0..depth).map(|k| vec![0.0; depth - k]).collect(),
        c_open: (0..depth).map(|k| law.open_lambda.powi(-(k as i32))).collect(),
        c_closed: (0..depth).map(|k| law.closed_lambda.powi(-(k as i32))).collect(),
    };
    w.visit(0, 0);
    let mut nw = 0.0;
    Ok((1..=depth)
        .map(|n| {
            nw += 1.0 / w.level_sum[n - 1];
            LazyTreeLevel { n, resistance: w.res[0][n - 1], nw_lower: nw, flow_energy: w.energy[0][n - 1] }
        })
        .collect())
}
