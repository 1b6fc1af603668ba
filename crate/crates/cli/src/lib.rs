//! Batch experiment runner: configuration, validation, execution and report emission.
//!
//! Every experiment is a thin composition of library calls from `disnet`; this crate adds
//! only argument handling, the worker pool and file output.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use disnet::coupling::sub_seed;
use disnet::estimation::{
    bisect_pc_star, classify_transience, rd_sum, BisectRequest, EstimationError, GrowthFamily, ThresholdReport,
};
use disnet::graph::write_dump;
use disnet::network::{resistance_profile, ProfileFamily, ProfileRequest};
use disnet::percolation::{count_edge_disjoint_crossings, estimate_one_arm, BoxSpec, Direction, PercolationError};
use disnet::report::{self, Cell, Table};
use disnet::trees::{gw_replicas, TreeError};
use disnet::walks::{classify_z_drw, estimate_speed, tree_drw_threshold, tree_drw_threshold_numeric, WalkError, ZDrwEnvironment};
use disnet::{DecisionRule, Environment, FamilySpec, GraphError, Method, NetworkError, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Config(m) => CliError::Config(m),
            EstimationError::Network(n) => n.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::BadBias(_) | NetworkError::InvalidTerminals | NetworkError::Graph(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Parameter(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Parameter(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PercolationError> for CliError {
    fn from(e: PercolationError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    #[default]
    Resist,
    Sweep,
    Bisect,
    DrwZ,
    DrwTree,
    TreeStats,
    Crossings,
    CurrentUniq,
    Speed,
    OneArm,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Resist => "resist",
            Kind::Sweep => "sweep",
            Kind::Bisect => "bisect",
            Kind::DrwZ => "drw-z",
            Kind::DrwTree => "drw-tree",
            Kind::TreeStats => "tree-stats",
            Kind::Crossings => "crossings",
            Kind::CurrentUniq => "current-uniq",
            Kind::Speed => "speed",
            Kind::OneArm => "one-arm",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully merged experiment description. Unset optional fields take per-kind defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// `z<d>`, `t<d>`, `zcayley` or `ladder`.
    pub family: Option<String>,
    pub generators: Vec<i64>,
    pub rung: Option<usize>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub p: Option<f64>,
    pub p_grid: Vec<f64>,
    pub radii: Vec<usize>,
    pub depth: Option<usize>,
    pub range: Option<usize>,
    pub seeds: Vec<u64>,
    pub replicas: Option<usize>,
    pub steps: Option<usize>,
    pub lambda: Option<f64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub delta: Option<f64>,
    pub rule: Option<DecisionRule>,
    pub method: Option<Method>,
    pub max_undecided: Option<f64>,
    /// Graph dump of the largest ball, for `resist`.
    pub dump: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
}

/// Flags shared by all subcommands; each overrides the same field of `--config`.
#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct Flags {
    /// JSON config file; flags override its fields
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// z<d>, t<d>, zcayley or ladder
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Cayley generators for zcayley, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<i64>>,
    /// Rung size for ladder
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rung: Option<usize>,
    /// Bias on open edges (or sites)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    /// Bias on closed edges (or sites)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Retention grid, comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Radii, comma separated and increasing
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Half-width L of the window for drw-z
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<usize>,
    /// First seed
    #[arg(long)]
    #[serde(skip)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds starting at --seed
    #[arg(long)]
    #[serde(skip)]
    pub seeds: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Bias of the homogeneous walk for speed
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    /// Target bracket width for bisect
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// gates or tail-trend
    #[arg(long)]
    #[serde(skip)]
    pub rule: Option<String>,
    /// Slope margin of the tail-trend rule
    #[arg(long)]
    #[serde(skip)]
    pub margin: Option<f64>,
    #[arg(long, value_parser = parse_method)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_undecided: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
    /// Data file; a manifest is written next to it. Standard output when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "iterative" => Ok(Method::Iterative),
        "dense" => Ok(Method::Dense),
        "elimination" => Ok(Method::Elimination),
        _ => Err(format!("expected iterative, dense or elimination, got '{s}'")),
    }
}

#[derive(Parser, Debug)]
#[command(name = "disnet", version, about = "Experiments on disordered random electrical networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Wired resistance profiles with certificates
    Resist(Flags),
    /// Verdicts over a p grid
    Sweep(Flags),
    /// Bracket the recurrence threshold
    Bisect(Flags),
    /// Disordered walk on Z
    DrwZ(Flags),
    /// Disordered walk threshold on a regular tree
    DrwTree(Flags),
    /// Galton-Watson cluster statistics on a regular tree
    TreeStats(Flags),
    /// Edge-disjoint open crossings of a box in Z^2
    Crossings(Flags),
    /// Shell diameters for current uniqueness on Z^2
    CurrentUniq(Flags),
    /// Speed of the biased walk on Z^d
    Speed(Flags),
    /// One-arm frequency on Z^d
    OneArm(Flags),
}

impl Command {
    fn split(self) -> (Kind, Flags) {
        match self {
            Command::Resist(f) => (Kind::Resist, f),
            Command::Sweep(f) => (Kind::Sweep, f),
            Command::Bisect(f) => (Kind::Bisect, f),
            Command::DrwZ(f) => (Kind::DrwZ, f),
            Command::DrwTree(f) => (Kind::DrwTree, f),
            Command::TreeStats(f) => (Kind::TreeStats, f),
            Command::Crossings(f) => (Kind::Crossings, f),
            Command::CurrentUniq(f) => (Kind::CurrentUniq, f),
            Command::Speed(f) => (Kind::Speed, f),
            Command::OneArm(f) => (Kind::OneArm, f),
        }
    }
}

/// Merges the optional config file with the flags; flags win.
pub fn resolve(kind: Kind, flags: &Flags) -> Result<ExperimentConfig, CliError> {
    let mut base = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config(format!("config: cannot read {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text).map_err(|e| config(format!("config: {e}")))? {
                Value::Object(m) => m,
                _ => return Err(config("config: expected a JSON object")),
            }
        }
        None => Map::new(),
    };
    base.insert("kind".into(), serde_json::to_value(kind).expect("kind serializes"));
    if let Value::Object(over) = serde_json::to_value(flags).expect("flags serialize") {
        base.extend(over);
    }
    match (flags.seed, flags.seeds) {
        (s, Some(n)) => {
            let first = s.unwrap_or(0);
            base.insert("seeds".into(), json!((first..first.saturating_add(n)).collect::<Vec<u64>>()));
        }
        (Some(s), None) => {
            base.insert("seeds".into(), json!([s]));
        }
        (None, None) => {
            base.entry("seeds").or_insert(json!([0]));
        }
    }
    if let Some(rule) = &flags.rule {
        let r = match rule.as_str() {
            "gates" => DecisionRule::default(),
            "tail-trend" | "tail_trend" => DecisionRule::TailTrend { margin: flags.margin.unwrap_or(0.0) },
            other => return Err(config(format!("rule: expected gates or tail-trend, got '{other}'"))),
        };
        base.insert("rule".into(), serde_json::to_value(r).expect("rule serializes"));
    } else if let Some(m) = flags.margin {
        base.insert("rule".into(), serde_json::to_value(DecisionRule::TailTrend { margin: m }).expect("rule serializes"));
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| config(format!("config: {e}")))
}

/// Parses `z<d>`, `t<d>`, `zcayley` or `ladder`.
pub fn parse_family(cfg: &ExperimentConfig) -> Result<ProfileFamily, CliError> {
    let name = cfg.family.as_deref().ok_or_else(|| config(format!("family: required for {}", cfg.kind.name())))?;
    let bad = || config(format!("family: expected z<d>, t<d>, zcayley or ladder, got '{name}'"));
    let family = if let Some(d) = name.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()) {
        if d == 0 {
            return Err(config("family: lattice dimension must be at least 1"));
        }
        ProfileFamily::Lattice { d }
    } else if let Some(d) = name.strip_prefix('t').and_then(|d| d.parse::<usize>().ok()) {
        if d < 3 {
            return Err(config("family: tree degree must be at least 3"));
        }
        ProfileFamily::Tree { d }
    } else if name == "zcayley" {
        if cfg.generators.is_empty() {
            return Err(config("generators: required for zcayley"));
        }
        ProfileFamily::ZCayley { generators: cfg.generators.clone() }
    } else if name == "ladder" {
        match cfg.rung {
            Some(r) if r >= 1 => ProfileFamily::Ladder { rung: r },
            _ => return Err(config("rung: ladder needs a rung size of at least 1")),
        }
    } else {
        return Err(bad());
    };
    Ok(family)
}

fn need<T: Copy>(v: Option<T>, field: &str, kind: Kind) -> Result<T, CliError> {
    v.ok_or_else(|| config(format!("{field}: required for {}", kind.name())))
}

fn check_prob(p: f64, field: &str) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(config(format!("{field}: must lie in [0, 1], got {p}")))
    }
}

fn check_bias(v: Option<f64>, field: &str, kind: Kind) -> Result<f64, CliError> {
    let x = need(v, field, kind)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(config(format!("{field}: must be a positive number, got {x}")))
    }
}

fn check_count(v: Option<usize>, field: &str, kind: Kind) -> Result<usize, CliError> {
    match need(v, field, kind)? {
        0 => Err(config(format!("{field}: must be at least 1"))),
        n => Ok(n),
    }
}

impl ExperimentConfig {
    /// `p_grid` when given, otherwise the single `p`.
    fn probabilities(&self) -> Result<Vec<f64>, CliError> {
        let ps = if self.p_grid.is_empty() { vec![need(self.p, "p", self.kind)?] } else { self.p_grid.clone() };
        for &p in &ps {
            check_prob(p, if self.p_grid.is_empty() { "p" } else { "p_grid" })?;
        }
        Ok(ps)
    }

    fn lattice_dim(&self) -> Result<usize, CliError> {
        match parse_family(self)? {
            ProfileFamily::Lattice { d } => Ok(d),
            _ => Err(config(format!("family: {} needs a lattice family z<d>", self.kind.name()))),
        }
    }

    fn tree_degree(&self) -> Result<usize, CliError> {
        match parse_family(self)? {
            ProfileFamily::Tree { d } => Ok(d),
            _ => Err(config(format!("family: {} needs a tree family t<d>", self.kind.name()))),
        }
    }

    /// Radii from `radii`, else `1..=depth` on trees and `depth/8, depth/4, depth/2, depth`
    /// elsewhere.
    fn profile_radii(&self, family: &ProfileFamily) -> Result<Vec<usize>, CliError> {
        let radii = if !self.radii.is_empty() {
            self.radii.clone()
        } else {
            let depth = check_count(self.depth, "radii", self.kind)?;
            match family {
                ProfileFamily::Tree { .. } => (1..=depth).collect(),
                _ => {
                    let mut r: Vec<usize> = [depth / 8, depth / 4, depth / 2, depth].into_iter().filter(|&n| n > 0).collect();
                    r.dedup();
                    r
                }
            }
        };
        if radii[0] == 0 || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config("radii: must be positive and strictly increasing"));
        }
        Ok(radii)
    }

    fn decision_rule(&self, family: &ProfileFamily) -> DecisionRule {
        self.rule.unwrap_or(match family {
            ProfileFamily::Tree { .. } => DecisionRule::TailTrend { margin: 0.0 },
            _ => DecisionRule::default(),
        })
    }

    fn profile_request(&self, p: f64) -> Result<ProfileRequest, CliError> {
        let family = parse_family(self)?;
        Ok(ProfileRequest {
            radii: self.profile_radii(&family)?,
            family,
            lambda_open: check_bias(self.l1, "l1", self.kind)?,
            lambda_closed: check_bias(self.l2, "l2", self.kind)?,
            p,
            method: self.method.unwrap_or(Method::Elimination),
        })
    }

    /// Field-level checks common to all kinds; kind-specific requirements are checked
    /// when the experiment runs, before any output is written.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(config("seeds: must contain at least one seed"));
        }
        if self.jobs == Some(0) {
            return Err(config("jobs: must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one experiment: a table for CSV and a document for JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Results {
    pub kind: Kind,
    pub table: Table,
    pub json: Value,
}

fn table_rows(t: &Table) -> Value {
    let rows = t
        .rows
        .iter()
        .map(|r| {
            let obj: Map<String, Value> = t
                .header
                .iter()
                .zip(r)
                .map(|(h, c)| {
                    let v = match c {
                        Cell::Int(i) => json!(*i as i64),
                        Cell::Float(x) => report::json_float(*x),
                        Cell::Text(s) => json!(s),
                    };
                    (h.to_string(), v)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    Value::Array(rows)
}

fn fractions(verdicts: &[Verdict]) -> Value {
    let n = verdicts.len() as f64;
    let f = |v: Verdict| verdicts.iter().filter(|&&x| x == v).count() as f64 / n;
    json!({
        "recurrent": f(Verdict::Recurrent),
        "undecided": f(Verdict::Undecided),
        "transient": f(Verdict::Transient),
    })
}

fn cells(ps: &[f64], seeds: &[u64]) -> Vec<(f64, u64)> {
    ps.iter().flat_map(|&p| seeds.iter().map(move |&s| (p, s))).collect()
}

/// Runs the experiment described by `cfg` on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Results, CliError> {
    cfg.validate()?;
    let kind = cfg.kind;
    let (table, json) = match kind {
        Kind::Resist => {
            let req = cfg.profile_request(check_prob(need(cfg.p, "p", kind)?, "p")?)?;
            if let Some(path) = &cfg.dump {
                dump_graph(&req, path)?;
            }
            let profiles = cfg
                .seeds
                .par_iter()
                .map(|&s| resistance_profile(&req, &Environment::new(s)))
                .collect::<Result<Vec<_>, _>>()?;
            let t = report::profile_table(&profiles);
            let j = json!({
                "family": req.family.label(),
                "lambda1": req.lambda_open,
                "lambda2": req.lambda_closed,
                "p": req.p,
                "rows": table_rows(&t),
            });
            (t, j)
        }
        Kind::Sweep => {
            let ps = cfg.probabilities()?;
            let base = cfg.profile_request(ps[0])?;
            let rule = cfg.decision_rule(&base.family);
            let rows = cells(&ps, &cfg.seeds)
                .par_iter()
                .map(|&(p, s)| {
                    let req = ProfileRequest { p, ..base.clone() };
                    let prof = resistance_profile(&req, &Environment::new(s))?;
                    Ok((s, p, classify_transience(&prof, &rule)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let t = report::classification_table(&rows);
            let per_p: Vec<Value> = ps
                .iter()
                .map(|&p| {
                    let v: Vec<Verdict> = rows.iter().filter(|r| r.1 == p).map(|r| r.2.verdict).collect();
                    json!({"p": p, "fractions": fractions(&v)})
                })
                .collect();
            let j = json!({
                "family": base.family.label(),
                "lambda1": base.lambda_open,
                "lambda2": base.lambda_closed,
                "rule": rule,
                "probes": per_p,
                "rows": table_rows(&t),
            });
            (t, j)
        }
        Kind::Bisect => {
            let base = cfg.profile_request(0.5)?;
            let req = BisectRequest {
                rule: cfg.decision_rule(&base.family),
                family: base.family,
                lambda_open: base.lambda_open,
                lambda_closed: base.lambda_closed,
                radii: base.radii,
                seeds: cfg.seeds.clone(),
                delta: cfg.delta.unwrap_or(0.04),
                method: base.method,
                max_undecided: cfg.max_undecided.unwrap_or(0.3),
            };
            let rep: ThresholdReport = bisect_pc_star(&req)?.report();
            let mut t = Table::new(&["p", "recurrent", "undecided", "transient", "median"]);
            for pr in &rep.probes {
                t.push(vec![
                    pr.p.into(),
                    pr.fractions.recurrent.into(),
                    pr.fractions.undecided.into(),
                    pr.fractions.transient.into(),
                    pr.median.as_str().into(),
                ]);
            }
            (t, serde_json::to_value(&rep).expect("report serializes"))
        }
        Kind::DrwZ => {
            let ps = cfg.probabilities()?;
            let (l1, l2) = (check_bias(cfg.l1, "l1", kind)?, check_bias(cfg.l2, "l2", kind)?);
            let range = need(cfg.range, "range", kind)?;
            let rows = cells(&ps, &cfg.seeds)
                .par_iter()
                .map(|&(p, seed)| {
                    let env = ZDrwEnvironment { lambda_open: l1, lambda_closed: l2, p, seed };
                    Ok((seed, p, classify_z_drw(&env, range, Default::default())?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let t = report::drw_table(&rows);
            let per_p: Vec<Value> = ps
                .iter()
                .map(|&p| {
                    let v: Vec<Verdict> = rows.iter().filter(|r| r.1 == p).map(|r| r.2.verdict).collect();
                    json!({"p": p, "fractions": fractions(&v)})
                })
                .collect();
            let j = json!({
                "lambda1": l1,
                "lambda2": l2,
                "range": range,
                "threshold": disnet::walks::z_drw_threshold(l1, l2).ok(),
                "probes": per_p,
                "rows": table_rows(&t),
            });
            (t, j)
        }
        Kind::DrwTree => {
            let d = cfg.tree_degree()?;
            let (l1, l2) = (check_bias(cfg.l1, "l1", kind)?, check_bias(cfg.l2, "l2", kind)?);
            let closed = tree_drw_threshold(d, l1, l2)?;
            let numeric = tree_drw_threshold_numeric(d, l1, l2)?;
            let mut t = Table::new(&["d", "l1", "l2", "threshold", "numeric"]);
            t.push(vec![d.into(), l1.into(), l2.into(), closed.into(), numeric.into()]);
            let j = json!({"d": d, "lambda1": l1, "lambda2": l2, "threshold": closed, "numeric": numeric});
            (t, j)
        }
        Kind::TreeStats => {
            let d = cfg.tree_degree()?;
            let p = check_prob(need(cfg.p, "p", kind)?, "p")?;
            let depth = check_count(cfg.depth, "depth", kind)?;
            let replicas = check_count(cfg.replicas, "replicas", kind)?;
            let mut runs = Vec::new();
            let mut summaries = Vec::new();
            for &s in &cfg.seeds {
                let (summary, r) = gw_replicas(d, p, depth, replicas, s)?;
                runs.extend(r);
                summaries.push(json!({"seed": s, "summary": summary}));
            }
            let growth = cfg
                .seeds
                .iter()
                .map(|&s| disnet::estimation::estimate_cluster_growth(GrowthFamily::Tree { d }, p, depth, replicas, s))
                .collect::<Result<Vec<_>, _>>()?;
            let t = report::gw_table(&runs);
            (t, json!({"d": d, "p": p, "depth": depth, "gw": summaries, "growth": growth}))
        }
        Kind::Crossings => {
            let ps = cfg.probabilities()?;
            let (w, h) = (check_count(cfg.width, "width", kind)?, check_count(cfg.height, "height", kind)?);
            if w < 2 {
                return Err(config("width: a horizontal crossing needs at least 2 columns"));
            }
            let g = disnet::graph::build_graph(&FamilySpec::ZdBall { d: 2, radius: w + h })?;
            let bx = BoxSpec { x0: -(w as i64 / 2), y0: -(h as i64 / 2), width: w, height: h };
            let rows = cells(&ps, &cfg.seeds)
                .par_iter()
                .map(|&(p, s)| Ok((s, p, count_edge_disjoint_crossings(&g, &Environment::new(s).at(p), bx, Direction::Horizontal)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut t = Table::new(&["seed", "p", "width", "height", "count"]);
            for (s, p, c) in rows {
                t.push(vec![s.into(), p.into(), w.into(), h.into(), c.into()]);
            }
            let j = json!({"width": w, "height": h, "direction": "horizontal", "rows": table_rows(&t)});
            (t, j)
        }
        Kind::CurrentUniq => {
            let ps = cfg.probabilities()?;
            let (l1, l2) = (check_bias(cfg.l1, "l1", kind)?, check_bias(cfg.l2, "l2", kind)?);
            let n_max = check_count(cfg.depth, "depth", kind)?;
            let sums = cells(&ps, &cfg.seeds)
                .par_iter()
                .map(|&(p, s)| Ok((s, p, rd_sum(n_max, &Environment::new(s), p, l1, l2)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut t = Table::new(&["seed", "p", "n", "rd", "bound"]);
            let mut summary = Vec::new();
            for (s, p, r) in &sums {
                for sh in &r.shells {
                    t.push(vec![(*s).into(), (*p).into(), sh.n.into(), sh.rd.into(), sh.bound.into()]);
                }
                summary.push(json!({"seed": s, "p": p, "sum": r.sum, "bound_sum": r.bound_sum}));
            }
            let j = json!({"lambda1": l1, "lambda2": l2, "n_max": n_max, "sums": summary, "rows": table_rows(&t)});
            (t, j)
        }
        Kind::Speed => {
            let d = cfg.lattice_dim()?;
            let lambda = need(cfg.lambda, "lambda", kind)?;
            let steps = check_count(cfg.steps, "steps", kind)?;
            let replicas = check_count(cfg.replicas, "replicas", kind)?;
            let mut t = Table::new(&["seed", "d", "lambda", "steps", "replicas", "speed", "se", "guard_hits"]);
            for &s in &cfg.seeds {
                let e = estimate_speed(d, lambda, steps, replicas, s)?;
                t.push(vec![
                    s.into(),
                    d.into(),
                    lambda.into(),
                    steps.into(),
                    replicas.into(),
                    e.speed.mean.into(),
                    e.speed.se.into(),
                    e.guard_hits.into(),
                ]);
            }
            let j = json!({"d": d, "lambda": lambda, "rows": table_rows(&t)});
            (t, j)
        }
        Kind::OneArm => {
            let d = cfg.lattice_dim()?;
            let p = check_prob(need(cfg.p, "p", kind)?, "p")?;
            let replicas = check_count(cfg.replicas, "replicas", kind)?;
            if cfg.radii.is_empty() {
                return Err(config("radii: required for one-arm"));
            }
            let mut t = Table::new(&["seed", "d", "p", "n", "estimate", "se", "bound"]);
            for &s in &cfg.seeds {
                for &n in &cfg.radii {
                    let e = estimate_one_arm(d, p, n, replicas, sub_seed(s, n as u64))?;
                    t.push(vec![s.into(), d.into(), p.into(), n.into(), e.mean.into(), e.se.into(), (0.5 / n as f64).into()]);
                }
            }
            let j = json!({"d": d, "p": p, "rows": table_rows(&t)});
            (t, j)
        }
    };
    Ok(Results { kind, table, json })
}

fn dump_graph(req: &ProfileRequest, path: &Path) -> Result<(), CliError> {
    let radius = *req.radii.last().expect("validated radii");
    let spec = match &req.family {
        ProfileFamily::Lattice { d } => FamilySpec::ZdBall { d: *d, radius },
        ProfileFamily::Tree { d } => FamilySpec::RegularTree { d: *d, depth: radius },
        ProfileFamily::ZCayley { generators } => FamilySpec::ZCayley { generators: generators.clone(), radius },
        ProfileFamily::Ladder { rung } => FamilySpec::Ladder { rung_size: *rung, length: radius },
    };
    let g = disnet::graph::build_graph(&spec)?;
    let file = fs::File::create(path).map_err(|e| CliError::Io(format!("dump: cannot write {}: {e}", path.display())))?;
    write_dump(&g, std::io::BufWriter::new(file)).map_err(|e| CliError::Io(format!("dump: {e}")))
}

/// Serialized results in the requested format.
pub fn emit_report(results: &Results, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => results.table.to_csv().into_bytes(),
        Format::Json => {
            let doc = json!({"kind": results.kind.name(), "result": results.json});
            report::to_json(&doc).expect("report serializes").into_bytes()
        }
    }
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Runs `cfg` on a pool of `cfg.jobs` threads and writes the data file and its manifest,
/// or the data alone to standard output.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Io(format!("jobs: {e}")))?;
    let results = pool.install(|| run_experiment(cfg))?;
    let bytes = emit_report(&results, cfg.format);
    if let Some(out) = &cfg.out {
        fs::write(out, &bytes).map_err(|e| CliError::Io(format!("out: cannot write {}: {e}", out.display())))?;
        let manifest = json!({
            "tool": "disnet",
            "version": env!("CARGO_PKG_VERSION"),
            "data": out.file_name().map(|f| f.to_string_lossy().into_owned()),
            "format": cfg.format,
            "config": cfg,
        });
        let m = manifest_path(out);
        fs::write(&m, report::to_json(&manifest).expect("manifest serializes"))
            .map_err(|e| CliError::Io(format!("out: cannot write {}: {e}", m.display())))?;
    }
    Ok(bytes)
}

/// Entry point shared by the binary and the tests; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, flags) = cli.command.split();
    let outcome = resolve(kind, &flags).and_then(|cfg| {
        let bytes = execute(&cfg)?;
        if cfg.out.is_none() {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
