use super::{effective_resistance, log_sum_exp, Flow, Method, Network, NetworkError, Potential};
use crate::graph::{EdgeId, VertexId};
use crate::percolation::separates;

/// Thomson energy `sum_e theta(e)^2 r(e)` over unordered edges.
pub fn flow_energy(net: &Network<'_>, flow: &Flow) -> Result<f64, NetworkError> {
    let mut terms = Vec::with_capacity(flow.values.len());
    for (e, &t) in flow.values.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let l = net.log_conductance(e);
        if l == f64::NEG_INFINITY {
            return Err(NetworkError::InfiniteEnergy(e));
        }
        terms.push(2.0 * t.abs().ln() - l);
    }
    Ok(log_sum_exp(terms).exp())
}

/// Dirichlet energy `sum_e c(e) (dv(e))^2`.
pub fn dirichlet_energy(net: &Network<'_>, v: &Potential) -> f64 {
    let g = net.graph();
    let terms = (0..g.edge_count()).filter_map(|e| {
        let [x, y] = g.endpoints(e);
        let dv = v.values[x] - v.values[y];
        let l = net.log_conductance(e);
        (dv != 0.0 && l > f64::NEG_INFINITY).then(|| l + 2.0 * dv.abs().ln())
    });
    log_sum_exp(terms).exp()
}

/// Probability that the walk from `a` reaches `Z` before returning to `a`.
pub fn escape_probability(net: &Network<'_>, a: VertexId, z: &[VertexId], method: Method) -> Result<f64, NetworkError> {
    let s = effective_resistance(net, &[a], z, method)?;
    Ok((-s.log_resistance - net.log_pi(a)).exp())
}

/// `sum_k (sum_{e in cut_k} c(e))^{-1}` over pairwise disjoint cutsets separating `A`
/// from `Z`; a lower bound on `R(A <-> Z)`.
pub fn nash_williams_bound(
    net: &Network<'_>,
    cutsets: &[Vec<EdgeId>],
    a: &[VertexId],
    z: &[VertexId],
) -> Result<f64, NetworkError> {
    let g = net.graph();
    let mut owner = vec![usize::MAX; g.edge_count()];
    for (k, cut) in cutsets.iter().enumerate() {
        for &e in cut {
            if e >= g.edge_count() {
                return Err(NetworkError::InvalidCutsets(format!("edge {e} out of range")));
            }
            if owner[e] != usize::MAX && owner[e] != k {
                return Err(NetworkError::InvalidCutsets(format!("edge {e} lies in cutsets {} and {k}", owner[e])));
            }
            owner[e] = k;
        }
        if !separates(g, cut, a, z) {
            return Err(NetworkError::InvalidCutsets(format!("cutset {k} does not separate A from Z")));
        }
    }
    Ok(cutsets.iter().map(|cut| (-log_sum_exp(cut.iter().map(|&e| net.log_conductance(e)))).exp()).fold(0.0, |a, b| a + b))
}

/// Pairwise disjoint cutsets read off an ordering of the vertices by potential.
///
/// With vertices sorted so that `Z` comes first and `A` last, every gap of the order
/// splits them into a set containing `Z` and one containing `A`, so the edges spanning it
/// form a separating cutset. Two gaps give disjoint cutsets when no edge spans both. A
/// dynamic program picks the disjoint family maximizing the Nash-Williams sum; with the
/// harmonic potential this tracks the resistance closely because every level cut carries
/// the whole unit current.
pub fn potential_level_cutsets(net: &Network<'_>, v: &[f64], a: &[VertexId], z: &[VertexId]) -> Vec<Vec<EdgeId>> {
    let g = net.graph();
    let n = g.vertex_count();
    if n < 2 || a.is_empty() || z.is_empty() {
        return Vec::new();
    }
    let mut class = vec![1u8; n];
    for &x in z {
        class[x] = 0;
    }
    for &x in a {
        class[x] = 2;
    }
    let mut order: Vec<VertexId> = (0..n).collect();
    order.sort_by(|&x, &y| class[x].cmp(&class[y]).then(v[x].total_cmp(&v[y])).then(x.cmp(&y)));
    let mut pos = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    let gaps = n - 1;
    let first = z.len() - 1;
    let last = n - a.len() - 1;
    if first > last {
        return Vec::new();
    }
    // range updates with point queries: a tag per tree node, combined along the leaf path
    let size = gaps.next_power_of_two();
    let mut min_lo = vec![usize::MAX; 2 * size];
    let mut log_c = vec![f64::NEG_INFINITY; 2 * size];
    let lse = |x: f64, y: f64| {
        if x == f64::NEG_INFINITY {
            y
        } else if y == f64::NEG_INFINITY {
            x
        } else {
            x.max(y) + (-(x - y).abs()).exp().ln_1p()
        }
    };
    let mut spans = Vec::with_capacity(g.edge_count());
    for (e, &[x, y]) in g.edges().iter().enumerate() {
        let (lo, hi) = (pos[x].min(pos[y]), pos[x].max(pos[y]));
        let l = net.log_conductance(e);
        if lo == hi || l == f64::NEG_INFINITY {
            spans.push(None);
            continue;
        }
        spans.push(Some((lo, hi - 1)));
        let (mut i, mut j) = (lo + size, hi - 1 + size + 1);
        while i < j {
            if i & 1 == 1 {
                min_lo[i] = min_lo[i].min(lo);
                log_c[i] = lse(log_c[i], l);
                i += 1;
            }
            if j & 1 == 1 {
                j -= 1;
                min_lo[j] = min_lo[j].min(lo);
                log_c[j] = lse(log_c[j], l);
            }
            i >>= 1;
            j >>= 1;
        }
    }
    let point = |gap: usize| {
        let (mut i, mut m, mut c) = (gap + size, usize::MAX, f64::NEG_INFINITY);
        while i >= 1 {
            m = m.min(min_lo[i]);
            c = lse(c, log_c[i]);
            i >>= 1;
        }
        (m, c)
    };
    // best[k]: largest sum over disjoint families whose highest gap is `first + k`
    let mut best = vec![0.0f64; last - first + 1];
    let mut prev = vec![usize::MAX; last - first + 1];
    // prefix maximum of best with its argmax
    let mut pmax: Vec<(f64, usize)> = Vec::with_capacity(last - first + 1);
    for gap in first..=last {
        let k = gap - first;
        let (lo, c) = point(gap);
        let w = if c == f64::NEG_INFINITY { 0.0 } else { (-c).exp() };
        // an earlier gap h is compatible when no edge spanning `gap` starts at or below h
        let limit = lo.min(gap);
        let (carry, from) = if limit > first { pmax[limit - 1 - first] } else { (0.0, usize::MAX) };
        best[k] = w + carry;
        prev[k] = from;
        let top = pmax.last().copied().unwrap_or((f64::NEG_INFINITY, usize::MAX));
        pmax.push(if best[k] > top.0 { (best[k], k) } else { top });
    }
    let mut chosen = Vec::new();
    let mut k = pmax.last().map(|t| t.1).unwrap_or(usize::MAX);
    while k != usize::MAX {
        chosen.push(first + k);
        k = prev[k];
    }
    chosen.reverse();
    let mut cuts = vec![Vec::new(); chosen.len()];
    for (e, span) in spans.iter().enumerate() {
        if let Some((lo, hi)) = *span {
            let i = chosen.partition_point(|&c| c < lo);
            if i < chosen.len() && chosen[i] <= hi {
                cuts[i].push(e);
            }
        }
    }
    cuts.retain(|c| !c.is_empty());
    cuts
}

/// Nash-Williams sum of cutsets already known to be disjoint and separating.
pub(crate) fn nash_williams_unchecked(net: &Network<'_>, cutsets: &[Vec<EdgeId>]) -> f64 {
    cutsets
        .iter()
        .map(|cut| (-log_sum_exp(cut.iter().map(|&e| net.log_conductance(e)))).exp())
        .fold(0.0, |a, b| a + b)
}
