//! Structural invariants of every module as property tests.

mod common;

use proptest::prelude::*;

use disnet::estimation::{classify_transience, shell_rd, shell_rd_pairwise, DecisionRule};
use disnet::graph::{build_graph, collapse_fibers, geodesic_spanning_tree};
use disnet::network::{
    effective_resistance, escape_probability, flow_energy, make_network, nash_williams_bound, potential_level_cutsets,
    resistance_profile, ProfileFamily, ProfileRequest,
};
use disnet::percolation::{cluster_of, count_edge_disjoint_crossings, dual_config, extract_closed_cutset, BoxSpec, Direction};
use disnet::trees::{estimate_cluster_pc, gw_statistics, q_grid, CrossingRule};
use disnet::walks::{harmonic_log_profile, tree_drw_threshold, tree_drw_threshold_numeric, z_drw_threshold, Side, ZDrwEnvironment};
use disnet::{ConductanceSpec, EdgeStates, Environment, FamilySpec, Method, OpenEdges, Verdict};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn family_spec() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (1usize..=3, 0usize..=5).prop_map(|(d, radius)| FamilySpec::ZdBall { d, radius }),
        (3usize..=5, 0usize..=4).prop_map(|(d, depth)| FamilySpec::RegularTree { d, depth }),
        prop::collection::vec(1i64..=5, 1..=3)
            .prop_filter("generators must generate Z", |g| g.iter().fold(0, |a, &b| gcd(a, b)) == 1)
            // the interval [-r, r] is only connected once r reaches the largest step
            .prop_flat_map(|g| {
                let lo = *g.iter().max().unwrap() as usize;
                (Just(g), lo..=12)
            })
            .prop_map(|(generators, radius)| FamilySpec::ZCayley { generators, radius }),
        (3usize..=5, 0usize..=6).prop_map(|(rung_size, length)| FamilySpec::Ladder { rung_size, length }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_graphs_are_canonical(spec in family_spec()) {
        let g = build_graph(&spec).unwrap();
        for e in 0..g.edge_count() {
            let [u, v] = g.endpoints(e);
            prop_assert_eq!(g.edge_distance(e), g.vertex_distance(u).min(g.vertex_distance(v)));
        }
        let again = build_graph(&spec).unwrap();
        prop_assert_eq!(g.edges(), again.edges());
        let t = geodesic_spanning_tree(&g);
        let mut tree_edges = 0;
        for v in 0..g.vertex_count() {
            prop_assert_eq!(t.tree_distance(v), g.vertex_distance(v));
            if let Some(p) = t.parent[v] {
                tree_edges += 1;
                prop_assert_eq!(g.vertex_distance(p) + 1, g.vertex_distance(v));
            }
        }
        // n - 1 parent links with every vertex reaching the root: a spanning tree
        prop_assert_eq!(tree_edges, g.vertex_count() - 1);
    }

    #[test]
    fn fiber_provenance_partitions_non_loop_edges(rung in 3usize..=5, length in 1usize..=6) {
        let g = build_graph(&FamilySpec::Ladder { rung_size: rung, length }).unwrap();
        let emb = g.embedding().unwrap().clone();
        let fiber: Vec<usize> = (0..g.vertex_count()).map(|v| (emb.point(v)[0] + length as i64) as usize).collect();
        let q = collapse_fibers(&g, &fiber, 2 * length + 1).unwrap();
        let mut prov: Vec<usize> = q.provenance.iter().flatten().copied().collect();
        prov.sort_unstable();
        let non_loops: Vec<usize> = (0..g.edge_count()).filter(|&e| {
            let [u, v] = g.endpoints(e);
            fiber[u] != fiber[v]
        }).collect();
        prop_assert_eq!(prov, non_loops);
    }

    #[test]
    fn coupling_and_dual(seed in any::<u64>(), p in 0.0f64..1.0, dq in 0.0f64..0.5) {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: 6 }).unwrap();
        let env = Environment::new(seed);
        let (lo, hi) = (env.at(p), env.at((p + dq).min(1.0)));
        for e in 0..g.edge_count() {
            prop_assert!(!lo.is_open(e) || hi.is_open(e));
        }
        let dual = dual_config(&g, &lo).unwrap();
        for (k, &e) in dual.primal_edge.iter().enumerate() {
            prop_assert!(lo.is_open(e) != dual.states.is_open(k));
        }
    }

    #[test]
    fn closed_cutset_iff_no_open_crossing(seed in any::<u64>(), p in 0.2f64..0.8, r_in in 1usize..4, gap in 1usize..4) {
        let r_out = r_in + gap;
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: r_out }).unwrap();
        let cfg = Environment::new(seed).at(p);
        let inside = |e: usize| {
            let [u, v] = g.endpoints(e);
            g.vertex_distance(u).min(g.vertex_distance(v)) >= r_in
        };
        let masked = EdgeStates((0..g.edge_count()).map(|e| inside(e) && cfg.is_open(e)).collect());
        let connected = g.sphere(r_in).iter().any(|&v| {
            cluster_of(&g, &masked, v).vertices.iter().any(|&x| g.vertex_distance(x) >= r_out)
        });
        let cut = extract_closed_cutset(&g, &cfg, r_in, r_out).unwrap();
        prop_assert_eq!(cut.is_none(), connected);
        if let Some(c) = cut {
            prop_assert!(c.edges.iter().all(|&e| !cfg.is_open(e)));
            prop_assert!(disnet::percolation::separates(&g, &c.edges, &[g.root()], &g.sphere(r_out)));
        }
    }

    #[test]
    fn crossings_monotone_in_p(seed in any::<u64>(), w in 2usize..6, h in 1usize..5) {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: 12 }).unwrap();
        let env = Environment::new(seed);
        let bx = BoxSpec { x0: -2, y0: -2, width: w, height: h };
        let mut last = 0;
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let c = count_edge_disjoint_crossings(&g, &env.at(p), bx, Direction::Horizontal).unwrap();
            prop_assert!(c >= last);
            last = c;
        }
        prop_assert_eq!(last, h);
    }

    #[test]
    fn electrical_sandwich(seed in any::<u64>()) {
        let rn = common::random_network(seed, 80);
        let net = make_network(&rn.graph, &rn.spec).unwrap();
        let it = effective_resistance(&net, &rn.a, &rn.z, Method::Iterative).unwrap();
        let dense = effective_resistance(&net, &rn.a, &rn.z, Method::Dense).unwrap();
        let elim = effective_resistance(&net, &rn.a, &rn.z, Method::Elimination).unwrap();
        let r = it.resistance;
        prop_assert!((r - dense.resistance).abs() <= 1e-8 * dense.resistance, "{} vs {}", r, dense.resistance);
        prop_assert!((elim.resistance - dense.resistance).abs() <= 1e-8 * dense.resistance);
        prop_assert!(it.residual <= 1e-10);
        let nw = nash_williams_bound(&net, &common::layer_cutsets(&rn.graph), &rn.a, &rn.z).unwrap();
        let level = potential_level_cutsets(&net, &dense.potential.values, &rn.a, &rn.z);
        let nw_level = nash_williams_bound(&net, &level, &rn.a, &rn.z).unwrap();
        prop_assert!(nw <= r * (1.0 + 1e-9) && nw_level <= r * (1.0 + 1e-9));
        prop_assert!(flow_energy(&net, &it.flow).unwrap() >= r * (1.0 - 1e-8));
        let esc = escape_probability(&net, rn.a[0], &rn.z, Method::Dense).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&esc));
        prop_assert!((esc - 1.0 / (r * net.pi(rn.a[0]))).abs() <= 1e-8 * esc);
    }

    #[test]
    fn rayleigh_single_edge(seed in any::<u64>(), pick in any::<prop::sample::Index>(), factor in 1.0f64..10.0) {
        let rn = common::random_network(seed, 60);
        let net = make_network(&rn.graph, &rn.spec).unwrap();
        let e = pick.index(rn.graph.edge_count());
        let up = net.with_conductance(e, net.conductance(e) * factor);
        let c0 = 1.0 / effective_resistance(&net, &rn.a, &rn.z, Method::Elimination).unwrap().resistance;
        let c1 = 1.0 / effective_resistance(&up, &rn.a, &rn.z, Method::Elimination).unwrap().resistance;
        prop_assert!(c1 >= c0 * (1.0 - 1e-12), "{} < {}", c1, c0);
    }

    #[test]
    fn conductance_monotone_in_p(seed in any::<u64>(), l1 in 0.3f64..1.0, l2 in 1.0f64..3.0) {
        let g = build_graph(&FamilySpec::ZdBall { d: 2, radius: 5 }).unwrap();
        let w = disnet::graph::contract_boundary(&g, &g.sphere(5)).unwrap();
        let mut last = 0.0;
        for p in [0.0, 0.3, 0.6, 1.0] {
            let spec = ConductanceSpec::disordered(
                ConductanceSpec::Biased { lambda: l1 },
                ConductanceSpec::Biased { lambda: l2 },
                Environment::new(seed).at(p),
            );
            let full = make_network(&g, &spec).unwrap();
            let log_c: Vec<f64> = w.source_edge.iter().map(|&e| full.log_conductance(e)).collect();
            let net = disnet::Network::from_log_conductances(&w.graph, log_c);
            let c = 1.0 / effective_resistance(&net, &[w.graph.root()], &[w.z], Method::Dense).unwrap().resistance;
            prop_assert!(c >= last * (1.0 - 1e-12));
            last = c;
        }
    }

    #[test]
    fn harmonic_profile_shape_and_monotonicity(seed in any::<u64>(), l1 in 0.2f64..1.0, l2 in 1.0f64..5.0) {
        let mut prev: Option<Vec<f64>> = None;
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let env = ZDrwEnvironment { lambda_open: l1, lambda_closed: l2, p, seed };
            for side in [Side::Left, Side::Right] {
                let lf = harmonic_log_profile(&env, side, 300);
                prop_assert_eq!(lf[0], f64::NEG_INFINITY);
                prop_assert_eq!(lf[1], 0.0);
                prop_assert!(lf.windows(2).all(|w| w[1] >= w[0]));
                if side == Side::Right {
                    if let Some(pr) = &prev {
                        prop_assert!(lf.iter().zip(pr).skip(1).all(|(a, b)| *a <= *b + 1e-9 * b.abs().max(1.0)));
                    }
                    prev = Some(lf);
                }
            }
        }
    }

    #[test]
    fn thresholds_monotone(a in 0.1f64..0.9, b in 1.1f64..5.0, da in 0.0f64..0.1, db in 0.0f64..1.0) {
        prop_assert!(z_drw_threshold(a + da, b).unwrap() >= z_drw_threshold(a, b).unwrap());
        prop_assert!(z_drw_threshold(a, b + db).unwrap() >= z_drw_threshold(a, b).unwrap());
        let (l1, l2) = (1.0 + a, 2.0 + b);
        prop_assert!(tree_drw_threshold(3, l1 + da, l2).unwrap() >= tree_drw_threshold(3, l1, l2).unwrap());
        let closed = tree_drw_threshold(3, l1, l2).unwrap();
        let numeric = tree_drw_threshold_numeric(3, l1, l2).unwrap();
        prop_assert!((closed - numeric).abs() < 1e-8, "{} vs {}", closed, numeric);
    }

    #[test]
    fn gw_level_counts(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let s = gw_statistics(3, p, 12, seed).unwrap();
        for n in 1..12 {
            prop_assert!(s.counts[n + 1] <= 2 * s.counts[n]);
        }
        let q = gw_statistics(3, (p + 0.2).min(1.0), 12, seed).unwrap();
        prop_assert!(s.counts.iter().zip(&q.counts).all(|(a, b)| a <= b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_monotone_over_coupling(seed in any::<u64>()) {
        let rank = |v: Verdict| match v {
            Verdict::Recurrent => 0,
            Verdict::Undecided => 1,
            Verdict::Transient => 2,
        };
        let rule = DecisionRule::default();
        for (family, radii, l1, l2) in [
            (ProfileFamily::Lattice { d: 2 }, vec![4, 8, 16, 32], 0.5, 2.0),
            (ProfileFamily::Tree { d: 3 }, (1..=14).collect::<Vec<_>>(), 0.5, 2.0),
            (ProfileFamily::Tree { d: 3 }, (1..=14).collect::<Vec<_>>(), 1.5, 4.0),
        ] {
            let mut seen_transient = false;
            for p in [0.1, 0.3, 0.5, 0.7, 0.72, 0.74, 0.76, 0.78, 0.9] {
                let req = ProfileRequest {
                    family: family.clone(), lambda_open: l1, lambda_closed: l2, p, radii: radii.clone(), method: Method::Elimination,
                };
                let v = classify_transience(&resistance_profile(&req, &Environment::new(seed)).unwrap(), &rule).unwrap().verdict;
                prop_assert!(!(seen_transient && rank(v) == 0), "{:?}: recurrent at p={} after transient", family, p);
                seen_transient |= v == Verdict::Transient;
            }
        }
    }

    #[test]
    fn rd_matches_pairwise_oracle(seed in any::<u64>(), n in 1usize..=4, p in 0.0f64..=1.0) {
        let env = Environment::new(seed);
        let s = shell_rd(n, &env, p, 0.5, 1.0).unwrap();
        let brute = shell_rd_pairwise(n, &env, p, 0.5, 1.0).unwrap();
        prop_assert!((s.rd - brute).abs() <= 1e-9 * brute);
    }
}

#[test]
fn cluster_pc_antitone_in_p() {
    let grid = q_grid(0.3, 1.0, 0.02);
    let est: Vec<f64> = [0.7, 0.8, 0.9]
        .iter()
        .map(|&p| estimate_cluster_pc(3, p, 20, 1500, &grid, CrossingRule::ScaledSurvival, 17).unwrap().estimate)
        .collect();
    assert!(est[0] > est[1] && est[1] > est[2], "{est:?}");
}
