use std::collections::VecDeque;

use super::OpenEdges;
use crate::graph::{EdgeId, RootedGraph, VertexId};

/// Open cluster: sorted vertex ids and the open edges with both ends inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

pub fn cluster_of<S: OpenEdges>(g: &RootedGraph, states: &S, v: VertexId) -> Cluster {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::from([v]);
    seen[v] = true;
    let mut vertices = vec![v];
    let mut edges = Vec::new();
    while let Some(x) = queue.pop_front() {
        for &(y, e) in g.neighbors(x) {
            if !states.is_open(e) {
                continue;
            }
            // each open edge is collected from its smaller endpoint (or once for loops)
            if x <= y {
                edges.push(e);
            }
            if !seen[y] {
                seen[y] = true;
                vertices.push(y);
                queue.push_back(y);
            }
        }
    }
    vertices.sort_unstable();
    edges.sort_unstable();
    Cluster { vertices, edges }
}
