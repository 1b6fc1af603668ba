use std::collections::VecDeque;

use super::{OpenEdges, PercolationError};
use crate::graph::{EdgeId, RootedGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cutset {
    pub edges: Vec<EdgeId>,
    pub inner: usize,
    pub outer: usize,
}

/// True when removing `cut` leaves no path from `sources` to any vertex in `targets`.
pub fn separates(g: &RootedGraph, cut: &[EdgeId], sources: &[VertexId], targets: &[VertexId]) -> bool {
    let mut removed = vec![false; g.edge_count()];
    for &e in cut {
        removed[e] = true;
    }
    let mut is_target = vec![false; g.vertex_count()];
    for &t in targets {
        is_target[t] = true;
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        if is_target[x] {
            return false;
        }
        for &(y, e) in g.neighbors(x) {
            if !removed[e] && !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    true
}

/// Vertices of the annulus `r_in <= |x| <= r_out` reachable from sphere `r_in` by open
/// paths inside the annulus, together with the largest distance reached.
fn reach_in_annulus<S: OpenEdges>(g: &RootedGraph, states: &S, r_in: usize, r_out: usize, seen: &mut [bool]) -> (Vec<VertexId>, usize) {
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    let mut reached = Vec::new();
    for v in 0..g.vertex_count() {
        if g.vertex_distance(v) == r_in {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let mut far = r_in;
    while let Some(x) = queue.pop_front() {
        reached.push(x);
        far = far.max(g.vertex_distance(x));
        for &(y, e) in g.neighbors(x) {
            let dy = g.vertex_distance(y);
            if !seen[y] && dy >= r_in && dy <= r_out && states.is_open(e) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    (reached, far)
}

fn boundary_of(g: &RootedGraph, reached: &[VertexId], seen: &[bool], r_in: usize) -> Vec<EdgeId> {
    let mut edges: Vec<EdgeId> = reached
        .iter()
        .flat_map(|&x| g.neighbors(x).iter())
        .filter(|&&(y, _)| !seen[y] && g.vertex_distance(y) > r_in)
        .map(|&(_, e)| e)
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Closed edge boundary of the open-reachable part of the annulus, or `None` when the
/// two spheres are open-connected inside it.
pub fn extract_closed_cutset<S: OpenEdges>(
    g: &RootedGraph,
    states: &S,
    r_in: usize,
    r_out: usize,
) -> Result<Option<Cutset>, PercolationError> {
    let radius = g.radius();
    if r_in >= r_out || r_out > radius {
        return Err(PercolationError::InvalidRadii { r_in, r_out, radius });
    }
    let mut seen = vec![false; g.vertex_count()];
    let (reached, far) = reach_in_annulus(g, states, r_in, r_out, &mut seen);
    if far >= r_out {
        return Ok(None);
    }
    let edges = boundary_of(g, &reached, &seen, r_in);
    debug_assert!(separates(g, &edges, &[g.root()], &g.sphere(r_out)));
    Ok(Some(Cutset { edges, inner: r_in, outer: r_out }))
}

/// Pairwise disjoint closed cutsets between the root and sphere `r_max`, found greedily
/// from the inside out: each one is the boundary of what sphere `a` reaches, and the next
/// search starts just beyond the farthest vertex reached.
pub fn greedy_closed_cutsets<S: OpenEdges>(g: &RootedGraph, states: &S, r_max: usize) -> Vec<Cutset> {
    let mut out = Vec::new();
    let mut seen = vec![false; g.vertex_count()];
    let mut a = 0;
    while a < r_max {
        let (reached, far) = reach_in_annulus(g, states, a, r_max, &mut seen);
        if far >= r_max {
            break;
        }
        let edges = boundary_of(g, &reached, &seen, a);
        for &x in &reached {
            seen[x] = false;
        }
        out.push(Cutset { edges, inner: a, outer: far + 1 });
        a = far + 1;
    }
    out
}
