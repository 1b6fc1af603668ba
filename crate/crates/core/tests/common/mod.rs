#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use disnet::graph::{FamilyTag, VertexId};
use disnet::{ConductanceSpec, Environment, RootedGraph};

/// Connected multigraph on at most `max_n` vertices with a mixed conductance law, plus
/// terminals `A = {root}` and `Z` = the farthest sphere.
pub struct RandomNetwork {
    pub graph: RootedGraph,
    pub spec: ConductanceSpec,
    pub a: Vec<VertexId>,
    pub z: Vec<VertexId>,
}

fn log_uniform_table(rng: &mut ChaCha8Rng, m: usize, span: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-span..span).exp()).collect()
}

pub fn random_network(seed: u64, max_n: usize) -> RandomNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let mut edges: Vec<[usize; 2]> = (1..n).map(|i| [rng.gen_range(0..i), i]).collect();
    let extra = rng.gen_range(0..=2 * n);
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        edges.push([u.min(v), u.max(v)]);
    }
    let graph = RootedGraph::from_edges(n, 0, edges, FamilyTag::Custom, None).unwrap();
    let m = graph.edge_count();
    let spec = match rng.gen_range(0..4) {
        0 => ConductanceSpec::Table(log_uniform_table(&mut rng, m, 4.0)),
        1 => ConductanceSpec::Biased { lambda: rng.gen_range(0.5..2.0) },
        2 => ConductanceSpec::disordered(
            ConductanceSpec::Biased { lambda: rng.gen_range(0.5..1.0) },
            ConductanceSpec::Biased { lambda: rng.gen_range(1.0..2.5) },
            Environment::new(rng.gen()).at(rng.gen_range(0.0..1.0)),
        ),
        _ => ConductanceSpec::disordered(
            ConductanceSpec::Table(log_uniform_table(&mut rng, m, 2.0)),
            ConductanceSpec::Table(log_uniform_table(&mut rng, m, 6.0)),
            Environment::new(rng.gen()).at(rng.gen_range(0.0..1.0)),
        ),
    };
    let z = graph.sphere(graph.radius());
    RandomNetwork { a: vec![graph.root()], z, graph, spec }
}

/// Edge sets `{e : e joins distance k to distance k + 1}` for `k < radius`; pairwise
/// disjoint and each separates the root from the farthest sphere.
pub fn layer_cutsets(g: &RootedGraph) -> Vec<Vec<usize>> {
    let r = g.radius();
    (0..r)
        .map(|k| {
            (0..g.edge_count())
                .filter(|&e| {
                    let [u, v] = g.endpoints(e);
                    let (du, dv) = (g.vertex_distance(u), g.vertex_distance(v));
                    du.min(dv) == k && du.max(dv) == k + 1
                })
                .collect()
        })
        .collect()
}
