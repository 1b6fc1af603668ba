use std::collections::{HashMap, VecDeque};

use super::{OpenEdges, PercolationError};
use crate::graph::RootedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Left column to right column.
    Horizontal,
    /// Bottom row to top row.
    Vertical,
}

/// Vertex box `[x0, x0 + width) x [y0, y0 + height)` of a planar lattice region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxSpec {
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
}

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, back: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(back);
    }

    fn levels(&self, s: usize) -> Vec<i32> {
        let mut level = vec![-1; self.head.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &a in &self.head[x] {
                let y = self.to[a];
                if self.cap[a] > 0 && level[y] < 0 {
                    level[y] = level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        level
    }

    fn push(&mut self, x: usize, t: usize, f: i64, level: &[i32], it: &mut [usize]) -> i64 {
        if x == t {
            return f;
        }
        while it[x] < self.head[x].len() {
            let a = self.head[x][it[x]];
            let y = self.to[a];
            if self.cap[a] > 0 && level[y] == level[x] + 1 {
                let got = self.push(y, t, f.min(self.cap[a]), level, it);
                if got > 0 {
                    self.cap[a] -= got;
                    self.cap[a ^ 1] += got;
                    return got;
                }
            }
            it[x] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return flow;
            }
            let mut it = vec![0; self.head.len()];
            loop {
                let f = self.push(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

/// Maximum number of edge-disjoint paths between vertex sets `sources` and `sinks` in the
/// undirected multigraph on `0..n` with the given edges.
pub fn max_flow_unit(n: usize, edges: &[(usize, usize)], sources: &[usize], sinks: &[usize]) -> usize {
    let (s, t) = (n, n + 1);
    let mut net = Dinic::new(n + 2);
    for &(u, v) in edges {
        if u != v {
            net.add(u, v, 1, 1);
        }
    }
    let big = edges.len() as i64 + 1;
    for &x in sources {
        net.add(s, x, big, 0);
    }
    for &x in sinks {
        net.add(x, t, big, 0);
    }
    net.run(s, t) as usize
}

/// Maximum number of edge-disjoint open crossings of the box in the given direction,
/// via unit-capacity max-flow between the two contracted sides.
pub fn count_edge_disjoint_crossings<S: OpenEdges>(
    g: &RootedGraph,
    states: &S,
    bx: BoxSpec,
    direction: Direction,
) -> Result<usize, PercolationError> {
    let (across, along) = match direction {
        Direction::Horizontal => (bx.width, bx.height),
        Direction::Vertical => (bx.height, bx.width),
    };
    if across < 2 || along < 1 {
        return Err(PercolationError::DegenerateBox(format!("{}x{} vertex box", bx.width, bx.height)));
    }
    let emb = g.embedding().filter(|e| e.dim == 2 && e.scale == 1).ok_or_else(|| {
        PercolationError::NotPlanar("crossings need integer planar coordinates".into())
    })?;
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut by_point: HashMap<[i64; 2], usize> = HashMap::new();
    for v in 0..g.vertex_count() {
        by_point.insert([emb.point(v)[0], emb.point(v)[1]], v);
    }
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for i in 0..bx.width as i64 {
        for j in 0..bx.height as i64 {
            let v = *by_point.get(&[bx.x0 + i, bx.y0 + j]).ok_or_else(|| {
                PercolationError::DegenerateBox(format!("point ({}, {}) is outside the graph", bx.x0 + i, bx.y0 + j))
            })?;
            let id = local.len();
            local.insert(v, id);
            let (pos, last) = match direction {
                Direction::Horizontal => (i, bx.width as i64 - 1),
                Direction::Vertical => (j, bx.height as i64 - 1),
            };
            if pos == 0 {
                sources.push(id);
            }
            if pos == last {
                sinks.push(id);
            }
        }
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| states.is_open(e))
        .filter_map(|(_, &[u, v])| Some((*local.get(&u)?, *local.get(&v)?)))
        .collect();
    Ok(max_flow_unit(local.len(), &edges, &sources, &sinks))
}

/// Lower bound on disjoint open circuits in the square annulus between half-widths
/// `r_in` and `r_out` around the origin: the smallest crossing count among its four
/// sides, each side crossed along its long direction.
pub fn count_annulus_circuits_lower<S: OpenEdges>(
    g: &RootedGraph,
    states: &S,
    r_in: usize,
    r_out: usize,
) -> Result<usize, PercolationError> {
    if r_in >= r_out {
        return Err(PercolationError::InvalidRadii { r_in, r_out, radius: g.radius() });
    }
    let (a, b) = (r_in as i64, r_out as i64);
    let long = (2 * b + 1) as usize;
    let short = (b - a + 1) as usize;
    let sides = [
        (BoxSpec { x0: -b, y0: a, width: long, height: short }, Direction::Horizontal),
        (BoxSpec { x0: -b, y0: -b, width: long, height: short }, Direction::Horizontal),
        (BoxSpec { x0: -b, y0: -b, width: short, height: long }, Direction::Vertical),
        (BoxSpec { x0: a, y0: -b, width: short, height: long }, Direction::Vertical),
    ];
    let mut best = usize::MAX;
    for (bx, dir) in sides {
        best = best.min(count_edge_disjoint_crossings(g, states, bx, dir)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, FamilySpec};
    use crate::percolation::Environment;

    #[test]
    fn open_and_closed_boxes() {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: 12 }).unwrap();
        let bx = BoxSpec { x0: -3, y0: -2, width: 6, height: 4 };
        assert_eq!(count_edge_disjoint_crossings(&g, &Environment::new(0).at(1.0), bx, Direction::Horizontal).unwrap(), 4);
        assert_eq!(count_edge_disjoint_crossings(&g, &Environment::new(0).at(1.0), bx, Direction::Vertical).unwrap(), 6);
        assert_eq!(count_edge_disjoint_crossings(&g, &Environment::new(0).at(0.0), bx, Direction::Horizontal).unwrap(), 0);
        let thin = BoxSpec { x0: 0, y0: 0, width: 1, height: 4 };
        assert!(count_edge_disjoint_crossings(&g, &Environment::new(0).at(1.0), thin, Direction::Horizontal).is_err());
        let outside = BoxSpec { x0: 10, y0: 10, width: 3, height: 3 };
        assert!(count_edge_disjoint_crossings(&g, &Environment::new(0).at(1.0), outside, Direction::Horizontal).is_err());
    }

    #[test]
    fn annulus_lower_bound_on_open_lattice() {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: 12 }).unwrap();
        assert_eq!(count_annulus_circuits_lower(&g, &Environment::new(0).at(1.0), 2, 5).unwrap(), 4);
        assert_eq!(count_annulus_circuits_lower(&g, &Environment::new(0).at(0.0), 2, 5).unwrap(), 0);
    }
}
