use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use disnet::graph::{build_graph, contract_boundary};
use disnet::network::{effective_resistance, lazy_tree_profile, make_network, resistance_profile, ProfileFamily, ProfileRequest, TreeLaw};
use disnet::{ConductanceSpec, Environment, FamilySpec, Method};

fn wired_ball(c: &mut Criterion) {
    let mut group = c.benchmark_group("wired_ball_z2");
    for radius in [8usize, 16, 32] {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius }).unwrap();
        let w = contract_boundary(&g, &g.sphere(radius)).unwrap();
        let spec = ConductanceSpec::disordered(
            ConductanceSpec::Biased { lambda: 0.9 },
            ConductanceSpec::Biased { lambda: 1.2 },
            Environment::new(1).at(0.5),
        );
        let net = make_network(&w.graph, &spec).unwrap();
        let methods: &[Method] = if radius <= 16 {
            &[Method::Iterative, Method::Dense, Method::Elimination]
        } else {
            &[Method::Iterative, Method::Elimination]
        };
        for &m in methods {
            group.bench_with_input(BenchmarkId::new(format!("{m:?}"), radius), &radius, |b, _| {
                b.iter(|| effective_resistance(black_box(&net), &[w.graph.root()], &[w.z], m).unwrap())
            });
        }
    }
    group.finish();
}

fn profiles(c: &mut Criterion) {
    let req = ProfileRequest {
        family: ProfileFamily::Lattice { d: 2 },
        lambda_open: 0.5,
        lambda_closed: 2.0,
        p: 0.5,
        radii: vec![6, 12, 24, 48],
        method: Method::Elimination,
    };
    c.bench_function("profile_z2_r48", |b| b.iter(|| resistance_profile(black_box(&req), &Environment::new(3)).unwrap()));
    let law = TreeLaw { d: 3, open_lambda: 1.5, closed_lambda: 4.0, cfg: Environment::new(3).at(0.75) };
    c.bench_function("lazy_tree_t3_depth16", |b| b.iter(|| lazy_tree_profile(black_box(&law), 16).unwrap()));
}

criterion_group!(benches, wired_ball, profiles);
criterion_main!(benches);
