use std::collections::HashMap;

use super::{Embedding, FamilySpec, FamilyTag, GraphError, RootedGraph, VertexId};

/// Builds a family member.
///
/// Vertex ids are ordered by a radius-like shell index with an intrinsic tie-break, and
/// edges by (outer shell, smaller endpoint, larger endpoint). Growing the radius therefore
/// only appends ids: every edge keeps its id in all larger members of the family, which is
/// what lets one environment seed describe a single infinite configuration.
pub fn build_graph(spec: &FamilySpec) -> Result<RootedGraph, GraphError> {
    match spec {
        FamilySpec::ZdBall { d, radius } => zd_ball(*d, *radius, spec),
        FamilySpec::RegularTree { d, depth } => regular_tree(*d, *depth, spec),
        FamilySpec::ZCayley { generators, radius } => z_cayley(generators, *radius, spec),
        FamilySpec::Ladder { rung_size, length } => ladder(*rung_size, *length, spec),
    }
}

fn finish(
    n: usize,
    shell: &[usize],
    mut edges: Vec<[VertexId; 2]>,
    spec: &FamilySpec,
    embedding: Option<Embedding>,
) -> Result<RootedGraph, GraphError> {
    for e in edges.iter_mut() {
        if e[0] > e[1] {
            e.swap(0, 1);
        }
    }
    edges.sort_by_key(|&[u, v]| (shell[u].max(shell[v]), u, v));
    RootedGraph::from_edges(n, 0, edges, FamilyTag::Built(spec.clone()), embedding)
}

fn zd_ball(d: usize, radius: usize, spec: &FamilySpec) -> Result<RootedGraph, GraphError> {
    if d == 0 {
        return Err(GraphError::InvalidSpec("zd_ball needs d >= 1".into()));
    }
    let r = radius as i64;
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; d];
    enumerate_ball(&mut cur, 0, r, &mut points);
    points.sort_by(|a, b| {
        let da: i64 = a.iter().map(|x| x.abs()).sum();
        let db: i64 = b.iter().map(|x| x.abs()).sum();
        da.cmp(&db).then_with(|| a.cmp(b))
    });
    let index: HashMap<&[i64], usize> = points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let shell: Vec<usize> = points.iter().map(|p| p.iter().map(|x| x.unsigned_abs() as usize).sum()).collect();
    let mut edges = Vec::new();
    let mut nb = vec![0i64; d];
    for (i, p) in points.iter().enumerate() {
        for axis in 0..d {
            nb.copy_from_slice(p);
            nb[axis] += 1;
            if let Some(&j) = index.get(nb.as_slice()) {
                edges.push([i, j]);
            }
        }
    }
    let coords = points.iter().flatten().copied().collect();
    let emb = Embedding { dim: d, scale: 1, coords };
    finish(points.len(), &shell, edges, spec, Some(emb))
}

fn enumerate_ball(cur: &mut Vec<i64>, axis: usize, budget: i64, out: &mut Vec<Vec<i64>>) {
    if axis == cur.len() {
        out.push(cur.clone());
        return;
    }
    for x in -budget..=budget {
        cur[axis] = x;
        enumerate_ball(cur, axis + 1, budget - x.abs(), out);
    }
    cur[axis] = 0;
}

/// Number of vertices at `level` of the d-regular tree.
pub(crate) fn tree_level_size(d: usize, level: usize) -> Option<usize> {
    if level == 0 {
        return Some(1);
    }
    let mut size = d;
    for _ in 1..level {
        size = size.checked_mul(d - 1)?;
    }
    Some(size)
}

/// Breadth-first id of the first vertex at `level`.
pub fn tree_level_start(d: usize, level: usize) -> usize {
    (0..level).map(|k| tree_level_size(d, k).expect("tree too large")).sum()
}

fn regular_tree(d: usize, depth: usize, spec: &FamilySpec) -> Result<RootedGraph, GraphError> {
    if d == 0 {
        return Err(GraphError::InvalidSpec("regular_tree needs d >= 1".into()));
    }
    let mut sizes = Vec::with_capacity(depth + 1);
    let mut total: usize = 0;
    for k in 0..=depth {
        let s = tree_level_size(d, k)
            .filter(|&s| s <= 1 << 28)
            .ok_or_else(|| GraphError::InvalidSpec(format!("regular_tree d={d} depth={depth} too large to materialize")))?;
        sizes.push(s);
        total += s;
    }
    let mut edges = Vec::with_capacity(total.saturating_sub(1));
    let mut shell = vec![0usize; total];
    let mut start = 0;
    for (k, &s) in sizes.iter().enumerate() {
        for i in 0..s {
            let child = start + i;
            shell[child] = k;
            if k == 1 {
                edges.push([0, child]);
            } else if k >= 2 {
                let parent_start = start - sizes[k - 1];
                edges.push([parent_start + i / (d - 1), child]);
            }
        }
        start += s;
    }
    finish(total, &shell, edges, spec, None)
}

fn symmetric_generators(generators: &[i64]) -> Result<Vec<i64>, GraphError> {
    if generators.is_empty() {
        return Err(GraphError::InvalidSpec("z_cayley needs a nonempty generator set".into()));
    }
    if generators.contains(&0) {
        return Err(GraphError::InvalidSpec("z_cayley generators must be nonzero".into()));
    }
    let mut g: Vec<i64> = generators.iter().map(|x| x.abs()).collect();
    g.sort();
    g.dedup();
    Ok(g)
}

/// Position of `x` in the order 0, -1, 1, -2, 2, ...
fn interval_rank(x: i64) -> usize {
    if x <= 0 {
        (2 * -x - if x < 0 { 1 } else { 0 }) as usize
    } else {
        (2 * x) as usize
    }
}

fn z_cayley(generators: &[i64], radius: usize, spec: &FamilySpec) -> Result<RootedGraph, GraphError> {
    let gens = symmetric_generators(generators)?;
    let r = radius as i64;
    let n = 2 * radius + 1;
    let mut coords = vec![0i64; n];
    let mut shell = vec![0usize; n];
    for x in -r..=r {
        coords[interval_rank(x)] = x;
        shell[interval_rank(x)] = x.unsigned_abs() as usize;
    }
    let mut edges = Vec::new();
    for x in -r..=r {
        for &g in &gens {
            if x + g <= r {
                edges.push([interval_rank(x), interval_rank(x + g)]);
            }
        }
    }
    finish(n, &shell, edges, spec, Some(Embedding { dim: 1, scale: 1, coords }))
}

fn ladder(k: usize, length: usize, spec: &FamilySpec) -> Result<RootedGraph, GraphError> {
    if k < 3 {
        return Err(GraphError::InvalidSpec("ladder rung cycle needs rung_size >= 3".into()));
    }
    let r = length as i64;
    let n = (2 * length + 1) * k;
    let id = |x: i64, y: usize| interval_rank(x) * k + y;
    let mut coords = vec![0i64; 2 * n];
    let mut shell = vec![0usize; n];
    let mut edges = Vec::new();
    for x in -r..=r {
        for y in 0..k {
            let v = id(x, y);
            coords[2 * v] = x;
            coords[2 * v + 1] = y as i64;
            shell[v] = x.unsigned_abs() as usize;
            edges.push([v, id(x, (y + 1) % k)]);
            if x < r {
                edges.push([v, id(x + 1, y)]);
            }
        }
    }
    finish(n, &shell, edges, spec, Some(Embedding { dim: 2, scale: 1, coords }))
}
