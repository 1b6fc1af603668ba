//! Rooted graph families with canonical, prefix-stable edge ids.

mod derived;
mod dump;
mod families;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use derived::{collapse_fibers, contract_boundary, geodesic_spanning_tree, Contracted, GeodesicTree, Quotient};
pub use dump::write_dump;
pub use families::{build_graph, tree_level_start};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid family parameters: {0}")]
    InvalidSpec(String),
    #[error("graph is not connected ({unreached} vertices unreachable from the root)")]
    Disconnected { unreached: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("boundary set contains the root")]
    BoundaryContainsRoot,
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("fiber map: {0}")]
    FiberMap(String),
    #[error("graph has no {0}")]
    MissingEmbedding(&'static str),
}

/// Family parameters accepted by [`build_graph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    ZdBall { d: usize, radius: usize },
    RegularTree { d: usize, depth: usize },
    ZCayley { generators: Vec<i64>, radius: usize },
    Ladder { rung_size: usize, length: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    Built(FamilySpec),
    Derived,
    Custom,
}

impl FamilyTag {
    pub fn describe(&self) -> String {
        match self {
            FamilyTag::Built(FamilySpec::ZdBall { d, radius }) => format!("zd_ball d={d} radius={radius}"),
            FamilyTag::Built(FamilySpec::RegularTree { d, depth }) => format!("regular_tree d={d} depth={depth}"),
            FamilyTag::Built(FamilySpec::ZCayley { generators, radius }) => {
                let g: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                format!("z_cayley generators={} radius={radius}", g.join(","))
            }
            FamilyTag::Built(FamilySpec::Ladder { rung_size, length }) => {
                format!("ladder rung_size={rung_size} length={length}")
            }
            FamilyTag::Derived => "derived".to_string(),
            FamilyTag::Custom => "custom".to_string(),
        }
    }
}

/// Integer coordinates of vertices; the real position is `coords / scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub dim: usize,
    pub scale: i64,
    pub coords: Vec<i64>,
}

impl Embedding {
    pub fn point(&self, v: VertexId) -> &[i64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }
}

#[derive(Clone, Debug)]
pub struct RootedGraph {
    root: VertexId,
    endpoints: Vec<[VertexId; 2]>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    vertex_distance: Vec<u32>,
    family: FamilyTag,
    embedding: Option<Embedding>,
}

impl RootedGraph {
    /// Builds a graph from an edge list whose order fixes the canonical edge ids.
    /// Distances are breadth-first from `root`; the graph must be connected.
    pub fn from_edges(
        n_vertices: usize,
        root: VertexId,
        edges: Vec<[VertexId; 2]>,
        family: FamilyTag,
        embedding: Option<Embedding>,
    ) -> Result<RootedGraph, GraphError> {
        if root >= n_vertices {
            return Err(GraphError::VertexOutOfRange(root));
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (e, &[u, v]) in edges.iter().enumerate() {
            if u >= n_vertices {
                return Err(GraphError::VertexOutOfRange(u));
            }
            if v >= n_vertices {
                return Err(GraphError::VertexOutOfRange(v));
            }
            adjacency[u].push((v, e));
            if u != v {
                adjacency[v].push((u, e));
            }
        }
        let vertex_distance = bfs_distances(&adjacency, root);
        let unreached = vertex_distance.iter().filter(|&&d| d == u32::MAX).count();
        if unreached > 0 {
            return Err(GraphError::Disconnected { unreached });
        }
        Ok(RootedGraph { root, endpoints: edges, adjacency, vertex_distance, family, embedding })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.endpoints[e]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.endpoints
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let [u, v] = self.endpoints[e];
        u == v
    }

    /// `(neighbor, edge id)` pairs; a loop appears once.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn vertex_distance(&self, v: VertexId) -> usize {
        self.vertex_distance[v] as usize
    }

    pub fn edge_distance(&self, e: EdgeId) -> usize {
        let [u, v] = self.endpoints[e];
        self.vertex_distance(u).min(self.vertex_distance(v))
    }

    pub fn radius(&self) -> usize {
        self.vertex_distance.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn sphere(&self, r: usize) -> Vec<VertexId> {
        (0..self.vertex_count()).filter(|&v| self.vertex_distance(v) == r).collect()
    }

    pub fn family(&self) -> &FamilyTag {
        &self.family
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    /// Lookup of a vertex by its embedded coordinates (linear scan).
    pub fn vertex_at(&self, point: &[i64]) -> Option<VertexId> {
        let emb = self.embedding.as_ref()?;
        (0..self.vertex_count()).find(|&v| emb.point(v) == point)
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.vertex_count() && self.endpoints.iter().all(|[u, v]| u != v)
    }
}

pub(crate) fn bfs_distances(adjacency: &[Vec<(VertexId, EdgeId)>], root: VertexId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adjacency.len()];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        for &(y, _) in &adjacency[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}
