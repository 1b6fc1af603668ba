use std::collections::HashMap;

use super::{EdgeStates, OpenEdges, PercolationError};
use crate::graph::{EdgeId, Embedding, FamilyTag, RootedGraph};

/// Planar dual of a square-lattice region.
///
/// Dual edge `e*` carries the same id as the primal edge `e` it crosses and is open
/// exactly when `e` is closed.
#[derive(Clone, Debug)]
pub struct DualLattice {
    pub graph: RootedGraph,
    pub states: EdgeStates,
    /// Primal edge crossed by each dual edge.
    pub primal_edge: Vec<EdgeId>,
}

pub fn dual_config<S: OpenEdges>(g: &RootedGraph, states: &S) -> Result<DualLattice, PercolationError> {
    let emb = g.embedding().ok_or_else(|| PercolationError::NotPlanar("no coordinates".into()))?;
    if emb.dim != 2 {
        return Err(PercolationError::NotPlanar(format!("dimension {}", emb.dim)));
    }
    // work in units where every edge has even length so face centres are integral
    let mut step = None;
    for &[u, v] in g.edges() {
        let (p, q) = (emb.point(u), emb.point(v));
        let (dx, dy) = ((q[0] - p[0]).abs(), (q[1] - p[1]).abs());
        let len = dx.max(dy);
        if dx.min(dy) != 0 || len != emb.scale || u == v {
            return Err(PercolationError::NotPlanar("edge is not a unit lattice step".into()));
        }
        step = Some(len);
    }
    let factor = match step {
        Some(len) if len % 2 == 0 => 1,
        _ => 2,
    };
    let pt = |v: usize| [emb.point(v)[0] * factor, emb.point(v)[1] * factor];

    let mut dual_ends = Vec::with_capacity(g.edge_count());
    for &[u, v] in g.edges() {
        let (p, q) = (pt(u), pt(v));
        let m = [(p[0] + q[0]) / 2, (p[1] + q[1]) / 2];
        let h = [(q[0] - p[0]) / 2, (q[1] - p[1]) / 2];
        let r = [-h[1], h[0]];
        dual_ends.push(([m[0] - r[0], m[1] - r[1]], [m[0] + r[0], m[1] + r[1]]));
    }
    let mut points: Vec<[i64; 2]> = dual_ends.iter().flat_map(|&(a, b)| [a, b]).collect();
    points.sort();
    points.dedup();
    let index: HashMap<[i64; 2], usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let edges = dual_ends.iter().map(|(a, b)| [index[a].min(index[b]), index[a].max(index[b])]).collect();

    let o = pt(g.root());
    let root = (0..points.len())
        .min_by_key(|&i| ((points[i][0] - o[0]).abs() + (points[i][1] - o[1]).abs(), i))
        .unwrap_or(0);
    let coords = points.iter().flatten().copied().collect();
    let embedding = Embedding { dim: 2, scale: emb.scale * factor, coords };
    let graph = RootedGraph::from_edges(points.len(), root, edges, FamilyTag::Custom, Some(embedding))?;
    let states = EdgeStates((0..g.edge_count()).map(|e| !states.is_open(e)).collect());
    Ok(DualLattice { graph, states, primal_edge: (0..g.edge_count()).collect() })
}
