use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_transience, pc_star_closed_forms, DecisionRule, EstimationError, Verdict};
use crate::network::{resistance_profile, Method, ProfileFamily, ProfileRequest};
use crate::percolation::Environment;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectRequest {
    pub family: ProfileFamily,
    pub lambda_open: f64,
    pub lambda_closed: f64,
    pub radii: Vec<usize>,
    /// One environment per seed; the same environments are reused at every probe.
    pub seeds: Vec<u64>,
    pub delta: f64,
    pub rule: DecisionRule,
    pub method: Method,
    /// Largest undecided fraction at which a probe may still move the bracket.
    pub max_undecided: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub p: f64,
    /// Verdict per seed, in seed order.
    pub verdicts: Vec<Verdict>,
    pub recurrent: f64,
    pub undecided: f64,
    pub transient: f64,
    pub median: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    Bracketed,
    /// A probe was too undecided to move the bracket.
    Refused,
    /// No probe was transient.
    NoTransition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub family: String,
    pub lambda_open: f64,
    pub lambda_closed: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub status: BracketStatus,
    pub message: String,
    pub probes: Vec<Probe>,
    pub closed_form: Option<f64>,
    pub delta: f64,
    pub seeds: usize,
}

impl ThresholdEstimate {
    pub fn contains(&self, p: f64) -> bool {
        self.p_lo <= p && p <= self.p_hi
    }

    pub fn width(&self) -> f64 {
        self.p_hi - self.p_lo
    }
}

/// Verdict fractions of one probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fractions {
    pub recurrent: f64,
    pub undecided: f64,
    pub transient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub p: f64,
    pub verdicts: Vec<Verdict>,
    pub fractions: Fractions,
    pub median: Verdict,
}

/// Serialized form of a [`ThresholdEstimate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub family: String,
    pub lambda1: f64,
    pub lambda2: f64,
    pub probes: Vec<ProbeReport>,
    pub bracket: [f64; 2],
    pub status: BracketStatus,
    pub message: String,
    pub closed_form: Option<f64>,
    pub delta: f64,
    pub seeds: usize,
}

impl ThresholdEstimate {
    pub fn report(&self) -> ThresholdReport {
        ThresholdReport {
            family: self.family.clone(),
            lambda1: self.lambda_open,
            lambda2: self.lambda_closed,
            probes: self
                .probes
                .iter()
                .map(|p| ProbeReport {
                    p: p.p,
                    verdicts: p.verdicts.clone(),
                    fractions: Fractions { recurrent: p.recurrent, undecided: p.undecided, transient: p.transient },
                    median: p.median,
                })
                .collect(),
            bracket: [self.p_lo, self.p_hi],
            status: self.status,
            message: self.message.clone(),
            closed_form: self.closed_form,
            delta: self.delta,
            seeds: self.seeds,
        }
    }
}

fn validate(req: &BisectRequest) -> Result<(), EstimationError> {
    if !(req.delta >= 0.02 && req.delta < 1.0) {
        return Err(EstimationError::Config(format!("delta must lie in [0.02, 1), got {}", req.delta)));
    }
    if req.seeds.len() < 30 {
        return Err(EstimationError::Config(format!("seeds: need at least 30, got {}", req.seeds.len())));
    }
    if req.radii.len() < 4 {
        return Err(EstimationError::Config(format!("radii: need at least 4, got {}", req.radii.len())));
    }
    if !(0.0..1.0).contains(&req.max_undecided) {
        return Err(EstimationError::Config("max_undecided must lie in [0, 1)".into()));
    }
    Ok(())
}

/// Verdicts of every seed at retention `p`.
pub(crate) fn probe(req: &BisectRequest, p: f64) -> Result<Probe, EstimationError> {
    let preq = ProfileRequest {
        family: req.family.clone(),
        lambda_open: req.lambda_open,
        lambda_closed: req.lambda_closed,
        p,
        radii: req.radii.clone(),
        method: req.method,
    };
    let verdicts: Vec<Verdict> = req
        .seeds
        .par_iter()
        .map(|&s| {
            let prof = resistance_profile(&preq, &Environment::new(s))?;
            Ok(classify_transience(&prof, &req.rule)?.verdict)
        })
        .collect::<Result<_, EstimationError>>()?;
    let n = verdicts.len() as f64;
    let frac = |v: Verdict| verdicts.iter().filter(|&&x| x == v).count() as f64 / n;
    let mut sorted = verdicts.clone();
    sorted.sort();
    Ok(Probe {
        p,
        recurrent: frac(Verdict::Recurrent),
        undecided: frac(Verdict::Undecided),
        transient: frac(Verdict::Transient),
        median: sorted[sorted.len() / 2],
        verdicts,
    })
}

/// Bisects `[0, 1]` on the median verdict over seeds until the bracket is at most `delta`
/// wide. Stops early, without moving the bracket, when a probe is too undecided.
pub fn bisect_pc_star(req: &BisectRequest) -> Result<ThresholdEstimate, EstimationError> {
    validate(req)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = Vec::new();
    let mut status = BracketStatus::Bracketed;
    let mut message = String::new();
    let mut saw_transient = false;
    while hi - lo > req.delta {
        let p = 0.5 * (lo + hi);
        let pr = probe(req, p)?;
        let (undecided, median) = (pr.undecided, pr.median);
        probes.push(pr);
        if undecided > req.max_undecided || median == Verdict::Undecided {
            status = BracketStatus::Refused;
            message = format!(
                "probe p={p} is {:.0}% undecided; not bracketing below width {}",
                100.0 * undecided,
                hi - lo
            );
            break;
        }
        if median == Verdict::Transient {
            saw_transient = true;
            hi = p;
        } else {
            lo = p;
        }
    }
    if status == BracketStatus::Bracketed && !saw_transient {
        status = BracketStatus::NoTransition;
        message = "no transition in (0,1) at this scale".into();
    }
    Ok(ThresholdEstimate {
        family: req.family.label(),
        lambda_open: req.lambda_open,
        lambda_closed: req.lambda_closed,
        p_lo: lo,
        p_hi: hi,
        status,
        message,
        probes,
        closed_form: pc_star_closed_forms(&req.family, req.lambda_open, req.lambda_closed),
        delta: req.delta,
        seeds: req.seeds.len(),
    })
}
