use serde::Serialize;

use super::EstimationError;
use crate::graph::{build_graph, FamilySpec, FamilyTag, RootedGraph};
use crate::network::{effective_resistance, make_network, ConductanceSpec, Method};
use crate::percolation::Environment;

/// Resistance diameter of the shell `W_n = {e : |e| = n}` of Z^2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellRd {
    pub n: usize,
    pub rd: f64,
    /// `4 (n + 1)`.
    pub bound: f64,
    /// `lambda1 < lambda2 <= 1`, where the bound is guaranteed.
    pub in_regime: bool,
    pub vertices: usize,
    pub edges: usize,
}

struct Shell {
    graph: RootedGraph,
    conductance: Vec<f64>,
}

fn shell(n: usize, env: &Environment, p: f64, l1: f64, l2: f64) -> Result<Shell, EstimationError> {
    if n == 0 {
        return Err(EstimationError::Config("shell index must be at least 1".into()));
    }
    if !(l1 > 0.0 && l2 > 0.0) || !(0.0..=1.0).contains(&p) {
        return Err(EstimationError::Config("biases must be positive and p in [0, 1]".into()));
    }
    let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: n + 1 })?;
    let spec = ConductanceSpec::disordered(
        ConductanceSpec::Biased { lambda: l1 },
        ConductanceSpec::Biased { lambda: l2 },
        env.at(p),
    );
    let net = make_network(&g, &spec)?;
    let mut local = vec![usize::MAX; g.vertex_count()];
    let mut count = 0;
    let mut edges = Vec::new();
    let mut conductance = Vec::new();
    for e in (0..g.edge_count()).filter(|&e| g.edge_distance(e) == n) {
        let [u, v] = g.endpoints(e);
        for x in [u, v] {
            if local[x] == usize::MAX {
                local[x] = count;
                count += 1;
            }
        }
        edges.push([local[u], local[v]]);
        conductance.push(net.conductance(e));
    }
    // l1 shells of Z^2 are connected; from_edges rejects anything else
    let graph = RootedGraph::from_edges(count, 0, edges, FamilyTag::Custom, None)?;
    Ok(Shell { graph, conductance })
}

/// Inverse of a dense row-major `k x k` matrix by Gauss-Jordan with partial pivoting.
fn invert(mut a: Vec<f64>, k: usize) -> Vec<f64> {
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs())).unwrap();
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let d = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= d;
            inv[col * k + j] /= d;
        }
        for i in 0..k {
            if i != col {
                let f = a[i * k + col];
                if f != 0.0 {
                    for j in 0..k {
                        a[i * k + j] -= f * a[col * k + j];
                        inv[i * k + j] -= f * inv[col * k + j];
                    }
                }
            }
        }
    }
    inv
}

/// `max_{x,y} R(x <-> y)` inside the shell subnetwork, from one grounded inverse:
/// `R(x, y) = G(x,x) + G(y,y) - 2 G(x,y)`.
pub fn shell_rd(n: usize, env: &Environment, p: f64, l1: f64, l2: f64) -> Result<ShellRd, EstimationError> {
    let s = shell(n, env, p, l1, l2)?;
    let m = s.graph.vertex_count();
    // Laplacian with vertex 0 grounded: rows and columns 1..m
    let k = m - 1;
    let mut lap = vec![0.0; k * k];
    for (e, &[u, v]) in s.graph.edges().iter().enumerate() {
        let c = s.conductance[e];
        for (a, b) in [(u, v), (v, u)] {
            if a > 0 {
                lap[(a - 1) * k + (a - 1)] += c;
                if b > 0 {
                    lap[(a - 1) * k + (b - 1)] -= c;
                }
            }
        }
    }
    let g = invert(lap, k);
    let green = |x: usize, y: usize| if x == 0 || y == 0 { 0.0 } else { g[(x - 1) * k + (y - 1)] };
    let mut rd: f64 = 0.0;
    for x in 0..m {
        for y in x + 1..m {
            rd = rd.max(green(x, x) + green(y, y) - 2.0 * green(x, y));
        }
    }
    Ok(ShellRd {
        n,
        rd,
        bound: 4.0 * (n + 1) as f64,
        in_regime: l1 < l2 && l2 <= 1.0,
        vertices: m,
        edges: s.graph.edge_count(),
    })
}

/// Same quantity by one solve per vertex pair; an oracle for small shells.
pub fn shell_rd_pairwise(n: usize, env: &Environment, p: f64, l1: f64, l2: f64) -> Result<f64, EstimationError> {
    let s = shell(n, env, p, l1, l2)?;
    let net = make_network(&s.graph, &ConductanceSpec::Table(s.conductance.clone()))?;
    let m = s.graph.vertex_count();
    let mut rd: f64 = 0.0;
    for x in 0..m {
        for y in x + 1..m {
            rd = rd.max(effective_resistance(&net, &[x], &[y], Method::Dense)?.resistance);
        }
    }
    Ok(rd)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdSum {
    pub shells: Vec<ShellRd>,
    /// `sum_{n <= n_max} 1 / RD(W_n)`.
    pub sum: f64,
    /// `sum_{n <= n_max} 1 / (4 (n + 1))`.
    pub bound_sum: f64,
}

pub fn rd_sum(n_max: usize, env: &Environment, p: f64, l1: f64, l2: f64) -> Result<RdSum, EstimationError> {
    let shells: Vec<ShellRd> = (1..=n_max).map(|n| shell_rd(n, env, p, l1, l2)).collect::<Result<_, _>>()?;
    let sum = shells.iter().map(|s| 1.0 / s.rd).sum();
    let bound_sum = shells.iter().map(|s| 1.0 / s.bound).sum();
    Ok(RdSum { shells, sum, bound_sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_shell_one() {
        let s = shell_rd(1, &Environment::new(0), 0.5, 1.0, 1.0).unwrap();
        assert_eq!((s.vertices, s.edges), (12, 12));
        assert!(s.rd <= 8.0);
        // W_1 is a 12-cycle with four pendant pairs... check against pairwise solves
        let b = shell_rd_pairwise(1, &Environment::new(0), 0.5, 1.0, 1.0).unwrap();
        assert!((s.rd - b).abs() < 1e-10 * b);
    }

    #[test]
    fn matches_pairwise_oracle() {
        for n in 1..=4 {
            for seed in 0..3 {
                let env = Environment::new(seed);
                let a = shell_rd(n, &env, 0.5, 0.5, 1.0).unwrap();
                let b = shell_rd_pairwise(n, &env, 0.5, 0.5, 1.0).unwrap();
                assert!((a.rd - b).abs() < 1e-9 * b, "n={n}: {} vs {b}", a.rd);
                assert!(a.rd <= a.bound);
            }
        }
    }

    #[test]
    fn partial_sum_dominates_bound_sum() {
        let s = rd_sum(8, &Environment::new(4), 0.5, 0.5, 1.0).unwrap();
        assert!(s.sum >= s.bound_sum);
    }
}
