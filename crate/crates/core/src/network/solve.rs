use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, VecDeque};

use rustc_hash::FxHashMap;

use super::weight::{LogW, Weight};
use super::{log_sum_exp, Flow, Method, Network, NetworkError, Potential};
use crate::graph::VertexId;

pub const CG_TOLERANCE: f64 = 1e-10;
/// Conjugate gradient keeps iterating toward this scaled residual while it makes progress;
/// only `CG_TOLERANCE` is required.
const CG_TARGET: f64 = 1e-14;

/// Output of a boundary-value solve with `v = 1` on `A` and `v = 0` on `Z`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub resistance: f64,
    pub log_resistance: f64,
    pub potential: Potential,
    /// Harmonic current normalized to unit strength.
    pub flow: Flow,
    /// Largest harmonicity defect `|sum_y c(x,y)(v(x) - v(y))| / pi(x)` off `A` and `Z`.
    pub residual: f64,
    /// Conjugate-gradient iterations; zero for the direct methods.
    pub iterations: usize,
    /// Vertices not joined to `A` or `Z` by positive conductances; their potential is 0.
    pub outside_support: Vec<VertexId>,
}

/// Terminal-merged problem on the positive-conductance component of `A`: node 0 is `A`,
/// node 1 is `Z`, interior nodes follow.
struct Reduced {
    node_of: Vec<Option<usize>>,
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    outside: Vec<VertexId>,
}

fn reduce(net: &Network<'_>, a: &[VertexId], z: &[VertexId]) -> Result<Reduced, NetworkError> {
    let g = net.graph();
    let n = g.vertex_count();
    if a.is_empty() || z.is_empty() || a.iter().chain(z).any(|&v| v >= n) {
        return Err(NetworkError::InvalidTerminals);
    }
    let mut node_of = vec![None; n];
    for &v in a {
        node_of[v] = Some(0);
    }
    for &v in z {
        if node_of[v] == Some(0) {
            return Err(NetworkError::InvalidTerminals);
        }
        node_of[v] = Some(1);
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<VertexId> = a.iter().copied().collect();
    for &v in a {
        seen[v] = true;
    }
    let mut hit_z = false;
    while let Some(x) = queue.pop_front() {
        for &(y, e) in g.neighbors(x) {
            if !seen[y] && net.log_conductance(e) > f64::NEG_INFINITY {
                seen[y] = true;
                hit_z |= node_of[y] == Some(1);
                queue.push_back(y);
            }
        }
    }
    if !hit_z {
        return Err(NetworkError::Disconnected);
    }
    let mut nodes = 2;
    let mut outside = Vec::new();
    for v in 0..n {
        if node_of[v].is_none() {
            if seen[v] {
                node_of[v] = Some(nodes);
                nodes += 1;
            } else {
                outside.push(v);
            }
        }
    }
    let mut edges = Vec::new();
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        let l = net.log_conductance(e);
        if l == f64::NEG_INFINITY {
            continue;
        }
        if let (Some(i), Some(j)) = (node_of[u], node_of[v]) {
            if i != j && (seen[u] || seen[v]) {
                edges.push((i, j, l));
            }
        }
    }
    Ok(Reduced { node_of, nodes, edges, outside })
}

/// Effective resistance between `A` and `Z` with the potential and unit current.
pub fn effective_resistance(
    net: &Network<'_>,
    a: &[VertexId],
    z: &[VertexId],
    method: Method,
) -> Result<Solution, NetworkError> {
    let red = reduce(net, a, z)?;
    let (lo, hi) = red.edges.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.2), hi.max(e.2)));
    let (log_ceff, v, iterations) = match method {
        Method::Elimination => {
            let mid = 0.5 * (lo + hi);
            let shifted: Vec<(usize, usize, f64)> = red.edges.iter().map(|&(i, j, l)| (i, j, l - mid)).collect();
            let (l, v) = if hi - lo <= 600.0 {
                eliminate::<f64>(red.nodes, &shifted)
            } else {
                eliminate::<LogW>(red.nodes, &shifted)
            };
            (l + mid, v, 0)
        }
        Method::Iterative | Method::Dense => {
            if hi > 700.0 || lo < -700.0 {
                return Err(NetworkError::OutOfRange(hi - lo));
            }
            let edges: Vec<(usize, usize, f64)> = red.edges.iter().map(|&(i, j, l)| (i, j, l.exp())).collect();
            let (v, iters) = if method == Method::Iterative {
                conjugate_gradient(red.nodes, &edges, 50 * net.graph().vertex_count().max(1))?
            } else {
                (dense_solve(red.nodes, &edges), 0)
            };
            let ceff: f64 = edges
                .iter()
                .map(|&(i, j, c)| match (i, j) {
                    (0, k) | (k, 0) => c * (1.0 - v[k]),
                    _ => 0.0,
                })
                .sum();
            (ceff.ln(), v, iters)
        }
    };
    if !(log_ceff > f64::NEG_INFINITY) || log_ceff.is_nan() {
        return Err(NetworkError::Disconnected);
    }
    let log_r = -log_ceff;
    let g = net.graph();
    let values: Vec<f64> = (0..g.vertex_count()).map(|x| red.node_of[x].map_or(0.0, |k| v[k])).collect();
    let flow_values = (0..g.edge_count())
        .map(|e| {
            let [x, y] = g.endpoints(e);
            let dv = values[x] - values[y];
            let l = net.log_conductance(e);
            if dv == 0.0 || l == f64::NEG_INFINITY {
                0.0
            } else {
                dv.signum() * (l + dv.abs().ln() + log_r).exp()
            }
        })
        .collect();
    let residual = harmonic_residual(red.nodes, &red.edges, &v);
    Ok(Solution {
        resistance: log_r.exp(),
        log_resistance: log_r,
        potential: Potential { values, a: a.to_vec(), z: z.to_vec() },
        flow: Flow { values: flow_values, sources: a.to_vec(), sinks: z.to_vec() },
        residual,
        iterations,
        outside_support: red.outside,
    })
}

fn harmonic_residual(nodes: usize, edges: &[(usize, usize, f64)], v: &[f64]) -> f64 {
    let mut incident: Vec<Vec<f64>> = vec![Vec::new(); nodes];
    for &(i, j, l) in edges {
        incident[i].push(l);
        incident[j].push(l);
    }
    let log_pi: Vec<f64> = incident.into_iter().map(log_sum_exp).collect();
    let mut defect = vec![0.0; nodes];
    for &(i, j, l) in edges {
        let dv = v[i] - v[j];
        defect[i] += (l - log_pi[i]).exp() * dv;
        defect[j] -= (l - log_pi[j]).exp() * dv;
    }
    defect.iter().skip(2).fold(0.0, |m, d| m.max(d.abs()))
}

/// Star-mesh elimination of every interior node in minimum-degree order, returning the
/// log conductance left between nodes 0 and 1 and the node potentials recovered by
/// back-substitution.
fn eliminate<W: Weight>(nodes: usize, edges: &[(usize, usize, f64)]) -> (f64, Vec<f64>) {
    let mut adj: Vec<FxHashMap<u32, W>> = vec![FxHashMap::default(); nodes];
    fn bump<W: Weight>(map: &mut FxHashMap<u32, W>, key: u32, w: W) {
        match map.entry(key) {
            Entry::Occupied(mut o) => {
                let s = o.get().add(w);
                *o.get_mut() = s;
            }
            Entry::Vacant(slot) => {
                slot.insert(w);
            }
        }
    }
    for &(i, j, l) in edges {
        let w = W::from_log(l);
        bump(&mut adj[i], j as u32, w);
        bump(&mut adj[j], i as u32, w);
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (2..nodes).map(|x| Reverse((adj[x].len(), x as u32))).collect();
    let mut done = vec![false; nodes];
    let mut records: Vec<(u32, Vec<(u32, f64)>)> = Vec::with_capacity(nodes.saturating_sub(2));
    while let Some(Reverse((deg, x))) = heap.pop() {
        let xi = x as usize;
        if done[xi] || adj[xi].len() != deg {
            continue;
        }
        let mut nbrs: Vec<(u32, W)> = adj[xi].drain().collect();
        nbrs.sort_unstable_by_key(|&(y, _)| y);
        done[xi] = true;
        if nbrs.is_empty() {
            records.push((x, Vec::new()));
            continue;
        }
        let total = nbrs.iter().skip(1).fold(nbrs[0].1, |s, &(_, w)| s.add(w));
        for &(y, _) in &nbrs {
            adj[y as usize].remove(&x);
        }
        for i in 0..nbrs.len() {
            let (yi, wi) = nbrs[i];
            for &(yj, wj) in &nbrs[i + 1..] {
                let fill = wi.mul(wj.div(total));
                bump(&mut adj[yi as usize], yj, fill);
                bump(&mut adj[yj as usize], yi, fill);
            }
        }
        for &(y, _) in &nbrs {
            if y >= 2 {
                heap.push(Reverse((adj[y as usize].len(), y)));
            }
        }
        records.push((x, nbrs.iter().map(|&(y, w)| (y, w.ratio(total))).collect()));
    }
    let log_c01 = adj[0].get(&1).map_or(f64::NEG_INFINITY, |w| w.log());
    let mut v = vec![0.0; nodes];
    v[0] = 1.0;
    for (x, weights) in records.iter().rev() {
        v[*x as usize] = weights.iter().map(|&(y, r)| r * v[y as usize]).sum();
    }
    (log_c01, v)
}

/// Interior block of the Laplacian as compressed rows plus the right-hand side.
struct Interior {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

fn interior_system(nodes: usize, edges: &[(usize, usize, f64)]) -> Interior {
    let k = nodes - 2;
    let mut diag = vec![0.0; k];
    let mut rows = vec![Vec::new(); k];
    let mut rhs = vec![0.0; k];
    for &(i, j, c) in edges {
        for (s, t) in [(i, j), (j, i)] {
            if s < 2 {
                continue;
            }
            diag[s - 2] += c;
            match t {
                0 => rhs[s - 2] += c,
                1 => {}
                _ => rows[s - 2].push((t - 2, c)),
            }
        }
    }
    Interior { diag, rows, rhs }
}

fn conjugate_gradient(nodes: usize, edges: &[(usize, usize, f64)], cap: usize) -> Result<(Vec<f64>, usize), NetworkError> {
    let sys = interior_system(nodes, edges);
    let k = nodes - 2;
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..k {
            out[i] = sys.diag[i] * x[i] - sys.rows[i].iter().map(|&(j, c)| c * x[j]).sum::<f64>();
        }
    };
    let scaled_max = |r: &[f64]| (0..k).fold(0.0f64, |m, i| m.max(r[i].abs() / sys.diag[i]));
    let mut x = vec![0.0; k];
    let mut r = sys.rhs.clone();
    let mut ap = vec![0.0; k];
    let mut iters = 0;
    let mut residual = scaled_max(&r);
    while residual > CG_TARGET {
        // restart from the true residual of the current iterate
        apply(&x, &mut ap);
        for i in 0..k {
            r[i] = sys.rhs[i] - ap[i];
        }
        let restart = scaled_max(&r);
        if restart <= CG_TARGET {
            residual = restart;
            break;
        }
        let mut zv: Vec<f64> = (0..k).map(|i| r[i] / sys.diag[i]).collect();
        let mut p = zv.clone();
        let mut rz: f64 = (0..k).map(|i| r[i] * zv[i]).sum();
        let before = iters;
        while iters < cap {
            apply(&p, &mut ap);
            let pap: f64 = (0..k).map(|i| p[i] * ap[i]).sum();
            if !(pap > 0.0) {
                break;
            }
            let alpha = rz / pap;
            for i in 0..k {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iters += 1;
            if scaled_max(&r) <= CG_TARGET {
                break;
            }
            for i in 0..k {
                zv[i] = r[i] / sys.diag[i];
            }
            let rz_new: f64 = (0..k).map(|i| r[i] * zv[i]).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..k {
                p[i] = zv[i] + beta * p[i];
            }
        }
        apply(&x, &mut ap);
        let fresh = (0..k).fold(0.0f64, |m, i| m.max((sys.rhs[i] - ap[i]).abs() / sys.diag[i]));
        // stagnation at rounding level: stop once a restart no longer halves the residual
        let stalled = fresh > 0.5 * restart;
        residual = fresh;
        if iters >= cap || iters == before || stalled {
            break;
        }
    }
    if residual > CG_TOLERANCE {
        return Err(NetworkError::NotConverged { residual, iterations: iters });
    }
    let mut v = vec![1.0, 0.0];
    v.extend(x);
    Ok((v, iters))
}

fn dense_solve(nodes: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let sys = interior_system(nodes, edges);
    let k = nodes - 2;
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] = sys.diag[i];
        for &(j, c) in &sys.rows[i] {
            m[i * k + j] -= c;
        }
    }
    let mut b = sys.rhs;
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| m[r * k + col].abs().total_cmp(&m[s * k + col].abs())).unwrap();
        if piv != col {
            for c in 0..k {
                m.swap(col * k + c, piv * k + c);
            }
            b.swap(col, piv);
        }
        let d = m[col * k + col];
        for r in col + 1..k {
            let f = m[r * k + col] / d;
            if f != 0.0 {
                for c in col..k {
                    m[r * k + c] -= f * m[col * k + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| m[r * k + c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r * k + r];
    }
    let mut v = vec![1.0, 0.0];
    v.extend(x);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FamilyTag, RootedGraph};
    use crate::network::{make_network, ConductanceSpec};

    fn custom(n: usize, edges: Vec<[usize; 2]>) -> RootedGraph {
        RootedGraph::from_edges(n, 0, edges, FamilyTag::Custom, None).unwrap()
    }

    const ALL: [Method; 3] = [Method::Iterative, Method::Dense, Method::Elimination];

    #[test]
    fn series_path() {
        let g = custom(4, vec![[0, 1], [1, 2], [2, 3]]);
        let net = make_network(&g, &ConductanceSpec::Table(vec![1.0; 3])).unwrap();
        for m in ALL {
            let s = effective_resistance(&net, &[0], &[3], m).unwrap();
            assert!((s.resistance - 3.0).abs() < 1e-12, "{m:?}");
            assert!((s.potential.values[1] - 2.0 / 3.0).abs() < 1e-10);
            for e in 0..3 {
                assert!((s.flow.values[e] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn four_cycle() {
        let g = custom(4, vec![[0, 1], [1, 2], [2, 3], [3, 0]]);
        let net = make_network(&g, &ConductanceSpec::Table(vec![1.0; 4])).unwrap();
        for m in ALL {
            let s = effective_resistance(&net, &[0], &[2], m).unwrap();
            assert!((s.resistance - 1.0).abs() < 1e-12);
            assert!((s.flow.strength(&g) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_half_line() {
        let n = 60;
        let g = custom(n + 1, (0..n).map(|i| [i, i + 1]).collect());
        let net = make_network(&g, &ConductanceSpec::Table((0..n).map(|i| 2f64.powi(i as i32)).collect())).unwrap();
        let expect: f64 = (0..n).map(|i| 2f64.powi(-(i as i32))).sum();
        for m in [Method::Dense, Method::Elimination] {
            let s = effective_resistance(&net, &[0], &[n], m).unwrap();
            assert!((s.resistance - expect).abs() < 1e-12 * expect, "{m:?}");
        }
    }

    #[test]
    fn log_domain_handles_huge_ranges() {
        // path with conductances 2^(±k) up to k = 3000: R is dominated by the weakest edge
        let n = 3000;
        let g = custom(n + 1, (0..n).map(|i| [i, i + 1]).collect());
        let log_c: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { i as f64 } else { -(i as f64) } * 2f64.ln()).collect();
        let net = Network::from_log_conductances(&g, log_c.clone());
        let s = effective_resistance(&net, &[0], &[n], Method::Elimination).unwrap();
        let expect = log_sum_exp(log_c.iter().map(|l| -l));
        assert!((s.log_resistance - expect).abs() < 1e-9);
        assert!(matches!(effective_resistance(&net, &[0], &[n], Method::Iterative), Err(NetworkError::OutOfRange(_))));
    }

    #[test]
    fn disconnected_and_bad_terminals() {
        let g = custom(3, vec![[0, 1], [1, 2]]);
        let net = make_network(&g, &ConductanceSpec::Table(vec![1.0, 0.0])).unwrap();
        for m in ALL {
            assert_eq!(effective_resistance(&net, &[0], &[2], m).unwrap_err(), NetworkError::Disconnected);
        }
        assert_eq!(effective_resistance(&net, &[0], &[0], Method::Dense).unwrap_err(), NetworkError::InvalidTerminals);
        assert_eq!(effective_resistance(&net, &[], &[2], Method::Dense).unwrap_err(), NetworkError::InvalidTerminals);
    }

    #[test]
    fn isolated_support_vertices_are_reported() {
        // vertex 3 hangs off by a zero-conductance edge
        let g = custom(4, vec![[0, 1], [1, 2], [1, 3]]);
        let net = make_network(&g, &ConductanceSpec::Table(vec![1.0, 1.0, 0.0])).unwrap();
        for m in ALL {
            let s = effective_resistance(&net, &[0], &[2], m).unwrap();
            assert_eq!(s.outside_support, vec![3]);
            assert!((s.resistance - 2.0).abs() < 1e-12);
        }
    }
}
