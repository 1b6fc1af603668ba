use super::{EdgeId, FamilyTag, GraphError, RootedGraph, VertexId};

#[derive(Clone, Debug)]
pub struct GeodesicTree {
    pub root: VertexId,
    /// `parent[v]` is `None` only for the root.
    pub parent: Vec<Option<VertexId>>,
    /// Edge of the source graph joining `v` to its parent.
    pub parent_edge: Vec<Option<EdgeId>>,
    pub distance: Vec<usize>,
}

impl GeodesicTree {
    pub fn tree_distance(&self, mut v: VertexId) -> usize {
        let mut steps = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            steps += 1;
        }
        steps
    }
}

/// Parent of `x` is its smallest-id neighbor one step closer to the root.
pub fn geodesic_spanning_tree(g: &RootedGraph) -> GeodesicTree {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut parent_edge = vec![None; n];
    for x in 0..n {
        let dx = g.vertex_distance(x);
        if dx == 0 {
            continue;
        }
        let best = g
            .neighbors(x)
            .iter()
            .filter(|&&(y, _)| g.vertex_distance(y) + 1 == dx)
            .min_by_key(|&&(y, e)| (y, e))
            .copied()
            .expect("connected graph has a neighbor closer to the root");
        parent[x] = Some(best.0);
        parent_edge[x] = Some(best.1);
    }
    GeodesicTree { root: g.root(), parent, parent_edge, distance: (0..n).map(|v| g.vertex_distance(v)).collect() }
}

/// Result of identifying a vertex set to a single vertex.
#[derive(Clone, Debug)]
pub struct Contracted {
    pub graph: RootedGraph,
    /// Old vertex id to new vertex id.
    pub vertex_map: Vec<VertexId>,
    /// Old edge id to new edge id; `None` for edges that became loops.
    pub edge_map: Vec<Option<EdgeId>>,
    /// Old edge id of every new edge.
    pub source_edge: Vec<EdgeId>,
    /// The merged vertex.
    pub z: VertexId,
}

/// Merges `boundary` into one vertex `z` (the last id), dropping loops and keeping
/// parallel edges.
pub fn contract_boundary(g: &RootedGraph, boundary: &[VertexId]) -> Result<Contracted, GraphError> {
    if boundary.is_empty() {
        return Err(GraphError::EmptyBoundary);
    }
    let n = g.vertex_count();
    let mut in_boundary = vec![false; n];
    for &b in boundary {
        if b >= n {
            return Err(GraphError::VertexOutOfRange(b));
        }
        if b == g.root() {
            return Err(GraphError::BoundaryContainsRoot);
        }
        in_boundary[b] = true;
    }
    let mut vertex_map = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        if !in_boundary[v] {
            vertex_map[v] = next;
            next += 1;
        }
    }
    let z = next;
    for v in 0..n {
        if in_boundary[v] {
            vertex_map[v] = z;
        }
    }
    let mut edges = Vec::new();
    let mut edge_map = vec![None; g.edge_count()];
    let mut source_edge = Vec::new();
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        let (a, b) = (vertex_map[u], vertex_map[v]);
        if a == b {
            continue;
        }
        edge_map[e] = Some(edges.len());
        source_edge.push(e);
        edges.push([a.min(b), a.max(b)]);
    }
    let graph = RootedGraph::from_edges(z + 1, vertex_map[g.root()], edges, FamilyTag::Derived, None)?;
    Ok(Contracted { graph, vertex_map, edge_map, source_edge, z })
}

/// Quotient multigraph with per-edge provenance.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: RootedGraph,
    /// Source edge ids merged into each quotient edge.
    pub provenance: Vec<Vec<EdgeId>>,
    /// Source edges that became loops and were dropped.
    pub dropped_loops: Vec<EdgeId>,
}

/// Identifies each fiber to its base vertex. `fiber_of` must map onto `0..n_base`;
/// the quotient root is the image of the source root.
pub fn collapse_fibers(g: &RootedGraph, fiber_of: &[VertexId], n_base: usize) -> Result<Quotient, GraphError> {
    if fiber_of.len() != g.vertex_count() {
        return Err(GraphError::FiberMap(format!(
            "map covers {} of {} vertices",
            fiber_of.len(),
            g.vertex_count()
        )));
    }
    let mut hit = vec![false; n_base];
    for &b in fiber_of {
        if b >= n_base {
            return Err(GraphError::FiberMap(format!("base vertex {b} outside 0..{n_base}")));
        }
        hit[b] = true;
    }
    if let Some(missing) = hit.iter().position(|h| !h) {
        return Err(GraphError::FiberMap(format!("base vertex {missing} has an empty fiber")));
    }
    let mut edges = Vec::new();
    let mut provenance = Vec::new();
    let mut dropped_loops = Vec::new();
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        let (a, b) = (fiber_of[u], fiber_of[v]);
        if a == b {
            dropped_loops.push(e);
            continue;
        }
        edges.push([a.min(b), a.max(b)]);
        provenance.push(vec![e]);
    }
    let graph = RootedGraph::from_edges(n_base, fiber_of[g.root()], edges, FamilyTag::Derived, None)?;
    Ok(Quotient { graph, provenance, dropped_loops })
}
