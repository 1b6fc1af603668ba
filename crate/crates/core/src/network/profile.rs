use serde::{Deserialize, Serialize};

use super::tree::{lazy_tree_profile, TreeLaw};
use super::bounds::nash_williams_unchecked;
use super::{
    effective_resistance, flow_energy, potential_level_cutsets, log_sum_exp, make_network, make_quotient_network, nash_williams_bound,
    ConductanceSpec, Method, Network, NetworkError,
};
use crate::graph::{build_graph, collapse_fibers, contract_boundary, EdgeId, FamilySpec, VertexId};
use crate::percolation::{greedy_closed_cutsets, Environment, PercConfig};

/// Graph family a profile is computed on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileFamily {
    Lattice { d: usize },
    Tree { d: usize },
    ZCayley { generators: Vec<i64> },
    Ladder { rung: usize },
}

impl ProfileFamily {
    /// Short name as used on the command line.
    pub fn label(&self) -> String {
        match self {
            ProfileFamily::Lattice { d } => format!("z{d}"),
            ProfileFamily::Tree { d } => format!("t{d}"),
            ProfileFamily::ZCayley { generators } => {
                format!("zcayley[{}]", generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","))
            }
            ProfileFamily::Ladder { rung } => format!("ladder{rung}"),
        }
    }
}

/// Disordered biased network: `lambda_open^{-|e|}` on open edges, `lambda_closed^{-|e|}`
/// on closed ones, at retention `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRequest {
    pub family: ProfileFamily,
    pub lambda_open: f64,
    pub lambda_closed: f64,
    pub p: f64,
    pub radii: Vec<usize>,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    pub r: f64,
    pub nw_lower: f64,
    /// Energy of the harmonic unit flow at this radius.
    pub flow_upper: f64,
    pub residual: f64,
    pub iters: usize,
}

/// Wired resistances `R_n = R(o <-> z_n)` for one environment.
#[derive(Clone, Debug, PartialEq)]
pub struct ResistanceProfile {
    pub seed: Option<u64>,
    pub p: f64,
    pub rows: Vec<ProfileRow>,
}

impl ResistanceProfile {
    pub fn radii(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }
}

fn spec_for(req: &ProfileRequest, cfg: PercConfig) -> ConductanceSpec {
    ConductanceSpec::disordered(
        ConductanceSpec::Biased { lambda: req.lambda_open },
        ConductanceSpec::Biased { lambda: req.lambda_closed },
        cfg,
    )
}

/// Resistance profile of one environment over increasing radii.
pub fn resistance_profile(req: &ProfileRequest, env: &Environment) -> Result<ResistanceProfile, NetworkError> {
    if req.radii.is_empty() || req.radii.windows(2).any(|w| w[0] >= w[1]) || req.radii[0] == 0 {
        return Err(NetworkError::Profile("radii must be positive and strictly increasing".into()));
    }
    if !(0.0..=1.0).contains(&req.p) {
        return Err(NetworkError::Profile(format!("p = {} outside [0, 1]", req.p)));
    }
    let cfg = env.at(req.p);
    let rows = match &req.family {
        ProfileFamily::Tree { d } => {
            let law = TreeLaw { d: *d, open_lambda: req.lambda_open, closed_lambda: req.lambda_closed, cfg };
            let levels = lazy_tree_profile(&law, *req.radii.last().unwrap())?;
            req.radii
                .iter()
                .map(|&n| {
                    let lv = levels[n - 1];
                    ProfileRow { n, r: lv.resistance, nw_lower: lv.nw_lower, flow_upper: lv.flow_energy, residual: 0.0, iters: 0 }
                })
                .collect()
        }
        family => {
            let spec = spec_for(req, cfg.clone());
            let mut rows = Vec::with_capacity(req.radii.len());
            for &n in &req.radii {
                rows.push(match family {
                    ProfileFamily::Lattice { d } => lattice_row(*d, n, &spec, &cfg, req.method)?,
                    ProfileFamily::ZCayley { generators } => cayley_row(generators, n, &spec, req.method)?,
                    ProfileFamily::Ladder { rung } => ladder_row(*rung, n, &spec, req.method)?,
                    ProfileFamily::Tree { .. } => unreachable!(),
                });
            }
            rows
        }
    };
    for w in rows.windows(2) {
        if w[1].r < w[0].r * (1.0 - 1e-9) {
            return Err(NetworkError::Profile(format!(
                "wired resistance decreased from {} at n={} to {} at n={}",
                w[0].r, w[0].n, w[1].r, w[1].n
            )));
        }
    }
    Ok(ResistanceProfile { seed: env.seed(), p: req.p, rows })
}

/// Solves `R(root <-> boundary)` on the wired network and fills a row. The lower bound
/// is the better of `nw_family`, from the family's own cutsets, and the bound from
/// cutsets along the level sets of the computed potential.
fn wired_row(net: &Network<'_>, boundary: &[VertexId], n: usize, nw_family: f64, method: Method) -> Result<ProfileRow, NetworkError> {
    let g = net.graph();
    let c = contract_boundary(g, boundary)?;
    let log_c = c.source_edge.iter().map(|&e| net.log_conductance(e)).collect();
    let cnet = Network::from_log_conductances(&c.graph, log_c);
    let a = [c.vertex_map[g.root()]];
    let sol = effective_resistance(&cnet, &a, &[c.z], method)?;
    let energy = flow_energy(&cnet, &sol.flow)?;
    let levels = potential_level_cutsets(&cnet, &sol.potential.values, &a, &[c.z]);
    let nw_levels = nash_williams_unchecked(&cnet, &levels);
    Ok(ProfileRow {
        n,
        r: sol.resistance,
        nw_lower: nw_family.max(nw_levels),
        flow_upper: energy,
        residual: sol.residual,
        iters: sol.iterations,
    })
}

fn lattice_row(d: usize, n: usize, spec: &ConductanceSpec, cfg: &PercConfig, method: Method) -> Result<ProfileRow, NetworkError> {
    let g = build_graph(&FamilySpec::ZdBall { d, radius: n })?;
    let net = make_network(&g, spec)?;
    let sphere = g.sphere(n);
    let cuts: Vec<Vec<EdgeId>> = greedy_closed_cutsets(&g, cfg, n).into_iter().map(|c| c.edges).collect();
    let nw = nash_williams_bound(&net, &cuts, &[g.root()], &sphere)?;
    wired_row(&net, &sphere, n, nw, method)
}

/// Nash-Williams bound from pairs of position cuts `{e : min x(e) <= t < max x(e)}` on the
/// right and their mirror images on the left, spaced `span` apart so that they are
/// pairwise disjoint. Positions start at `span / 2`: an edge crossing both a right cut
/// and a left cut would need length at least `2 * (span / 2) + 2 > span`.
/// Cheapest cuts on each side are paired with each other.
fn line_cut_bound(net: &Network<'_>, x: &dyn Fn(VertexId) -> i64, span: i64, last: i64, boundary: &[VertexId]) -> Result<f64, NetworkError> {
    let g = net.graph();
    let positions: Vec<i64> = (0..).map(|k| span / 2 + k * span).take_while(|&t| t <= last).collect();
    let side = |sign: i64| -> Vec<(f64, Vec<EdgeId>)> {
        positions
            .iter()
            .map(|&t| {
                let cut: Vec<EdgeId> = (0..g.edge_count())
                    .filter(|&e| {
                        let [u, v] = g.endpoints(e);
                        let (a, b) = (sign * x(u), sign * x(v));
                        a.min(b) <= t && t < a.max(b)
                    })
                    .collect();
                (log_sum_exp(cut.iter().map(|&e| net.log_conductance(e))), cut)
            })
            .collect()
    };
    let (mut right, mut left) = (side(1), side(-1));
    right.sort_by(|a, b| a.0.total_cmp(&b.0));
    left.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cuts: Vec<Vec<EdgeId>> = right.into_iter().zip(left).map(|(r, l)| [r.1, l.1].concat()).collect();
    nash_williams_bound(net, &cuts, &[g.root()], boundary)
}

fn cayley_row(generators: &[i64], n: usize, spec: &ConductanceSpec, method: Method) -> Result<ProfileRow, NetworkError> {
    let g = build_graph(&FamilySpec::ZCayley { generators: generators.to_vec(), radius: n })?;
    let span = generators.iter().map(|s| s.abs()).max().unwrap_or(1);
    if n as i64 <= span {
        return Err(NetworkError::Profile(format!("radius {n} must exceed the longest generator {span}")));
    }
    let net = make_network(&g, spec)?;
    let emb = g.embedding().expect("cayley graphs carry coordinates").clone();
    let x = |v: VertexId| emb.point(v)[0];
    let r = n as i64;
    let boundary: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| x(v).abs() > r - span).collect();
    let nw = line_cut_bound(&net, &x, span, r - span, &boundary)?;
    wired_row(&net, &boundary, n, nw, method)
}

fn ladder_row(rung: usize, n: usize, spec: &ConductanceSpec, method: Method) -> Result<ProfileRow, NetworkError> {
    let g = build_graph(&FamilySpec::Ladder { rung_size: rung, length: n })?;
    let net = make_network(&g, spec)?;
    let emb = g.embedding().expect("ladders carry coordinates").clone();
    let fiber: Vec<VertexId> = (0..g.vertex_count()).map(|v| (emb.point(v)[0] + n as i64) as usize).collect();
    let q = collapse_fibers(&g, &fiber, 2 * n + 1)?;
    let qnet = make_quotient_network(&q, &net);
    let x = |b: VertexId| b as i64 - n as i64;
    let boundary = vec![0, 2 * n];
    let nw = line_cut_bound(&qnet, &x, 1, n as i64 - 1, &boundary)?;
    wired_row(&qnet, &boundary, n, nw, method)
}
