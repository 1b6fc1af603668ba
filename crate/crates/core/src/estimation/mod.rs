//! Verdicts from resistance profiles, threshold bisection, closed-form thresholds, the
//! shell resistance-diameter criterion and cluster growth.

mod bisect;
mod closed;
mod growth;
mod rd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{NetworkError, ResistanceProfile};

pub use bisect::{bisect_pc_star, BisectRequest, BracketStatus, Fractions, Probe, ProbeReport, ThresholdEstimate, ThresholdReport};
pub use closed::pc_star_closed_forms;
pub use growth::{estimate_cluster_growth, GrowthEstimate, GrowthFamily};
pub use rd::{rd_sum, shell_rd, shell_rd_pairwise, RdSum, ShellRd};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed profile: {0}")]
    Profile(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tree(#[from] crate::trees::TreeError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Ordered so that the median of a sample is meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Recurrent,
    Undecided,
    Transient,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Recurrent => "recurrent",
            Verdict::Undecided => "undecided",
            Verdict::Transient => "transient",
        }
    }
}

/// Maps a finite profile to a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DecisionRule {
    /// Recurrent when the Nash-Williams bound at the largest radius exceeds `divergence_gate`
    /// and grew by `growth` over the last doubling; transient when
    /// `(R_max - R_half) / R_half <= plateau`. Both firing is a conflict.
    Gates { plateau: f64, divergence_gate: f64, growth: f64 },
    /// Sign of the least-squares slope of `ln` of the per-unit resistance increments
    /// against the radius, over the upper half of the radii: below `-margin` is transient,
    /// above `margin` recurrent. A vanishing increment counts as transient.
    TailTrend { margin: f64 },
}

impl Default for DecisionRule {
    fn default() -> Self {
        DecisionRule::Gates { plateau: 0.05, divergence_gate: 10.0, growth: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Both gates fired.
    pub conflict: bool,
    pub rule: DecisionRule,
    pub radii: Vec<usize>,
    pub resistance: Vec<f64>,
    pub nw_lower: Vec<f64>,
    pub flow_upper: Vec<f64>,
    /// `R_{n_{k+1}} - R_{n_k}`.
    pub increments: Vec<f64>,
    pub recurrent_gate: bool,
    pub transient_gate: bool,
    pub nw_max: f64,
    pub nw_half: f64,
    pub relative_increment: f64,
    pub trend_slope: Option<f64>,
}

fn half_index(radii: &[usize]) -> usize {
    let target = radii[radii.len() - 1] / 2;
    radii.iter().rposition(|&n| n <= target).unwrap_or(0)
}

/// Least-squares slope of `y` on `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn classify_transience(profile: &ResistanceProfile, rule: &DecisionRule) -> Result<Classification, EstimationError> {
    let rows = &profile.rows;
    if rows.len() < 4 {
        return Err(EstimationError::Profile(format!("need at least 4 radii, got {}", rows.len())));
    }
    if rows.windows(2).any(|w| w[0].n >= w[1].n) || rows.iter().any(|r| r.r.is_nan() || r.nw_lower.is_nan()) {
        return Err(EstimationError::Profile("radii must increase and values must be numbers".into()));
    }
    let radii: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let resistance: Vec<f64> = rows.iter().map(|r| r.r).collect();
    let nw_lower: Vec<f64> = rows.iter().map(|r| r.nw_lower).collect();
    let increments: Vec<f64> = resistance.windows(2).map(|w| w[1] - w[0]).collect();
    let h = half_index(&radii);
    let last = rows.len() - 1;
    let (nw_max, nw_half) = (nw_lower[last], nw_lower[h]);
    let relative_increment = (resistance[last] - resistance[h]) / resistance[h];
    let mut out = Classification {
        verdict: Verdict::Undecided,
        conflict: false,
        rule: *rule,
        radii: radii.clone(),
        resistance,
        nw_lower,
        flow_upper: rows.iter().map(|r| r.flow_upper).collect(),
        increments,
        recurrent_gate: false,
        transient_gate: false,
        nw_max,
        nw_half,
        relative_increment,
        trend_slope: None,
    };
    match *rule {
        DecisionRule::Gates { plateau, divergence_gate, growth } => {
            out.recurrent_gate = nw_max > divergence_gate && nw_max >= growth * nw_half;
            out.transient_gate = relative_increment <= plateau;
            out.conflict = out.recurrent_gate && out.transient_gate;
            out.verdict = match (out.recurrent_gate, out.transient_gate) {
                (true, false) => Verdict::Recurrent,
                (false, true) => Verdict::Transient,
                _ => Verdict::Undecided,
            };
        }
        DecisionRule::TailTrend { margin } => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut vanished = false;
            for k in h..last {
                let inc = (out.resistance[k + 1] - out.resistance[k]) / (radii[k + 1] - radii[k]) as f64;
                if inc <= 0.0 {
                    vanished = true;
                    break;
                }
                xs.push(0.5 * (radii[k] + radii[k + 1]) as f64);
                ys.push(inc.ln());
            }
            if vanished {
                out.transient_gate = true;
                out.verdict = Verdict::Transient;
            } else if xs.len() < 3 {
                return Err(EstimationError::Profile(format!(
                    "trend rule needs at least 3 increments over the upper half of the radii, got {}",
                    xs.len()
                )));
            } else {
                let s = slope(&xs, &ys);
                out.trend_slope = Some(s);
                out.transient_gate = s < -margin;
                out.recurrent_gate = s > margin;
                out.verdict = if out.transient_gate {
                    Verdict::Transient
                } else if out.recurrent_gate {
                    Verdict::Recurrent
                } else {
                    Verdict::Undecided
                };
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{resistance_profile, Method, ProfileFamily, ProfileRequest, ProfileRow};
    use crate::percolation::Environment;

    fn synthetic(radii: &[usize], r: impl Fn(f64) -> f64, nw: impl Fn(f64) -> f64) -> ResistanceProfile {
        let rows = radii
            .iter()
            .map(|&n| ProfileRow { n, r: r(n as f64), nw_lower: nw(n as f64), flow_upper: r(n as f64), residual: 0.0, iters: 0 })
            .collect();
        ResistanceProfile { seed: None, p: 0.0, rows }
    }

    #[test]
    fn pure_networks() {
        let z = resistance_profile(
            &ProfileRequest {
                family: ProfileFamily::Lattice { d: 1 },
                lambda_open: 0.5,
                lambda_closed: 2.0,
                p: 0.0,
                radii: vec![6, 12, 24, 48],
                method: Method::Elimination,
            },
            &Environment::new(1),
        )
        .unwrap();
        let c = classify_transience(&z, &DecisionRule::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Recurrent);
        let t = resistance_profile(
            &ProfileRequest {
                family: ProfileFamily::Tree { d: 3 },
                lambda_open: 0.5,
                lambda_closed: 4.0,
                p: 1.0,
                radii: vec![3, 6, 12, 24],
                method: Method::Elimination,
            },
            &Environment::new(1),
        )
        .unwrap();
        assert_eq!(classify_transience(&t, &DecisionRule::default()).unwrap().verdict, Verdict::Transient);
        let fine = ResistanceProfile { rows: t.rows.clone(), ..t.clone() };
        assert!(classify_transience(&fine, &DecisionRule::TailTrend { margin: 0.0 }).is_err());
        let dense = resistance_profile(
            &ProfileRequest {
                family: ProfileFamily::Tree { d: 3 },
                lambda_open: 0.5,
                lambda_closed: 4.0,
                p: 1.0,
                radii: (1..=24).collect(),
                method: Method::Elimination,
            },
            &Environment::new(1),
        )
        .unwrap();
        assert_eq!(classify_transience(&dense, &DecisionRule::TailTrend { margin: 0.0 }).unwrap().verdict, Verdict::Transient);
    }

    #[test]
    fn logarithmic_profile_is_borderline() {
        let small: Vec<usize> = (0..8).map(|k| 8 << k).collect();
        let c = classify_transience(&synthetic(&small, f64::ln, f64::ln), &DecisionRule::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Undecided);
        assert!(!c.recurrent_gate && !c.transient_gate);
        // past the gate the doubling test still refuses a logarithm
        let large: Vec<usize> = (0..8).map(|k| 512 << k).collect();
        let d = classify_transience(&synthetic(&large, f64::ln, f64::ln), &DecisionRule::default()).unwrap();
        assert!(d.nw_max > 10.0);
        assert_eq!(d.verdict, Verdict::Undecided);
        let relaxed = DecisionRule::Gates { plateau: 0.05, divergence_gate: 10.0, growth: 1.0 };
        assert_eq!(classify_transience(&synthetic(&small, f64::ln, f64::ln), &relaxed).unwrap().verdict, Verdict::Undecided);
        assert_eq!(classify_transience(&synthetic(&large, f64::ln, f64::ln), &relaxed).unwrap().verdict, Verdict::Recurrent);
    }

    #[test]
    fn conflict_and_malformed() {
        let flat_but_big = synthetic(&[6, 12, 24, 48], |_| 100.0, |n| n);
        let c = classify_transience(&flat_but_big, &DecisionRule::default()).unwrap();
        assert!(c.conflict);
        assert_eq!(c.verdict, Verdict::Undecided);
        assert!(classify_transience(&synthetic(&[1, 2, 3], |n| n, |n| n), &DecisionRule::default()).is_err());
    }

    #[test]
    fn trend_signs() {
        let radii: Vec<usize> = (1..=24).collect();
        let grow = synthetic(&radii, |n| 1.2f64.powf(n), |_| 0.0);
        let shrink = synthetic(&radii, |n| 2.0 - 0.8f64.powf(n), |_| 0.0);
        let rule = DecisionRule::TailTrend { margin: 0.0 };
        assert_eq!(classify_transience(&grow, &rule).unwrap().verdict, Verdict::Recurrent);
        assert_eq!(classify_transience(&shrink, &rule).unwrap().verdict, Verdict::Transient);
    }
}
