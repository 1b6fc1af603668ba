use serde::Serialize;

use super::WalkError;
use crate::coupling::{domain, uniform, zigzag};
use crate::estimation::Verdict;

/// Site-disordered walk on Z: at `x != 0` the walk steps toward 0 with probability
/// `lambda / (1 + lambda)`, with `lambda_open` on open sites and `lambda_closed` on closed ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZDrwEnvironment {
    pub lambda_open: f64,
    pub lambda_closed: f64,
    pub p: f64,
    pub seed: u64,
}

impl ZDrwEnvironment {
    pub fn site_open(&self, x: i64) -> bool {
        self.p > 0.0 && uniform(self.seed, domain::SITE, zigzag(x)) <= self.p
    }

    /// `ln(p_x / q_x)`, the log ratio of the inward and outward step probabilities.
    pub fn log_ratio(&self, x: i64) -> f64 {
        if self.site_open(x) {
            self.lambda_open.ln()
        } else {
            self.lambda_closed.ln()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }
}

/// `ln f(k)` for `k = 0..=range` along one side, where `f` is the harmonic function with
/// `f(0) = 0`, `f(±1) = 1` and `f(x + 1) = 1 + sum_{1 <= i <= x} exp(S_i)`, `S_i` the
/// partial sums of the log ratios. Accumulated in log form, so it never overflows.
pub fn harmonic_log_profile(env: &ZDrwEnvironment, side: Side, range: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(range + 1);
    out.push(f64::NEG_INFINITY);
    if range == 0 {
        return out;
    }
    out.push(0.0);
    let mut s = 0.0;
    let mut lse = f64::NEG_INFINITY;
    for i in 1..range {
        s += env.log_ratio(side.sign() * i as i64);
        lse = if lse == f64::NEG_INFINITY { s } else { lse.max(s) + (-(lse - s).abs()).exp().ln_1p() };
        // ln(1 + e^lse); the running max absorbs rounding wobble once lse dominates
        let v = lse.max(0.0) + (-lse.abs()).exp().ln_1p();
        out.push(v.max(out[out.len() - 1]));
    }
    out
}

/// Finite-range gates for the harmonic-function classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZDrwCriteria {
    /// "Diverges": `f` on the outer tenth exceeds this multiple of `f(L/10)`.
    pub divergence_factor: f64,
    /// "Bounded": `(f(L) - f(L/10)) / f(L)` below this.
    pub bounded_tolerance: f64,
}

impl Default for ZDrwCriteria {
    fn default() -> Self {
        ZDrwCriteria { divergence_factor: 10.0, bounded_tolerance: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideStats {
    /// `log10(f(0.9 L) / f(L / 10))`; `f` is monotone so this is the outer-window minimum.
    pub log10_window_ratio: f64,
    /// Relative growth of `f` over `[L/10, L]`.
    pub tail_increment: f64,
    /// `S_L / L`.
    pub drift: f64,
    pub diverges: bool,
    pub bounded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZDrwClassification {
    pub verdict: Verdict,
    pub left: SideStats,
    pub right: SideStats,
    pub range: usize,
    pub criteria: ZDrwCriteria,
}

fn side_stats(env: &ZDrwEnvironment, side: Side, range: usize, c: &ZDrwCriteria) -> SideStats {
    let lf = harmonic_log_profile(env, side, range);
    let (lo, hi) = (range / 10, (9 * range).div_ceil(10));
    let log_ratio = lf[hi] - lf[lo];
    let tail = -(lf[lo] - lf[range]).exp_m1();
    let s_l: f64 = (1..=range as i64).map(|i| env.log_ratio(side.sign() * i)).sum();
    SideStats {
        log10_window_ratio: log_ratio / std::f64::consts::LN_10,
        tail_increment: tail,
        drift: s_l / range as f64,
        diverges: log_ratio > c.divergence_factor.ln(),
        bounded: tail < c.bounded_tolerance,
    }
}

/// Transient when `f` is bounded on both sides, recurrent when it diverges on both,
/// undecided otherwise.
pub fn classify_z_drw(env: &ZDrwEnvironment, range: usize, criteria: ZDrwCriteria) -> Result<ZDrwClassification, WalkError> {
    if range < 1000 {
        return Err(WalkError::Parameter(format!("range must be at least 1000, got {range}")));
    }
    if !(env.lambda_open > 0.0 && env.lambda_closed > 0.0) || !(0.0..=1.0).contains(&env.p) {
        return Err(WalkError::Parameter("biases must be positive and p in [0, 1]".into()));
    }
    let left = side_stats(env, Side::Left, range, &criteria);
    let right = side_stats(env, Side::Right, range, &criteria);
    let verdict = if left.bounded && right.bounded {
        Verdict::Transient
    } else if left.diverges && right.diverges {
        Verdict::Recurrent
    } else {
        Verdict::Undecided
    };
    Ok(ZDrwClassification { verdict, left, right, range, criteria })
}

fn check_biases(l1: f64, l2: f64) -> Result<(), WalkError> {
    if !(l1 > 0.0 && l1 < l2 && l2.is_finite()) {
        return Err(WalkError::Parameter(format!("need 0 < lambda1 < lambda2, got {l1}, {l2}")));
    }
    Ok(())
}

/// `(ln l2 / (ln l2 - ln l1))` clamped to `[0, 1]`.
pub fn z_drw_threshold(l1: f64, l2: f64) -> Result<f64, WalkError> {
    check_biases(l1, l2)?;
    let (a, b) = (l1.ln(), l2.ln());
    Ok((b / (b - a)).clamp(0.0, 1.0))
}

/// Threshold of the disordered biased walk on the d-regular tree.
pub fn tree_drw_threshold(d: usize, l1: f64, l2: f64) -> Result<f64, WalkError> {
    check_biases(l1, l2)?;
    if d < 3 {
        return Err(WalkError::Parameter(format!("tree degree must be at least 3, got {d}")));
    }
    let m = (d - 1) as f64;
    if l1 >= m {
        Ok(1.0)
    } else if l2 < m {
        Ok(0.0)
    } else if l1 >= 1.0 && l2 > m {
        Ok((1.0 / m - 1.0 / l2) / (1.0 / l1 - 1.0 / l2))
    } else {
        tree_drw_threshold_numeric(d, l1, l2)
    }
}

/// `min_{x in [0, 1]} (p l1^{-x} + (1 - p) l2^{-x})` by ternary search; the objective is convex in x.
fn tree_branch_rate(p: f64, l1: f64, l2: f64) -> f64 {
    let f = |x: f64| p * l1.powf(-x) + (1.0 - p) * l2.powf(-x);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    while b - a > 1e-10 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    f(0.5 * (a + b)).min(f(0.0)).min(f(1.0))
}

/// Root in `p` of `min_x (p l1^{-x} + (1 - p) l2^{-x}) = 1 / (d - 1)`, found by bisection;
/// the left side is nondecreasing in `p`.
pub fn tree_drw_threshold_numeric(d: usize, l1: f64, l2: f64) -> Result<f64, WalkError> {
    check_biases(l1, l2)?;
    if d < 3 {
        return Err(WalkError::Parameter(format!("tree degree must be at least 3, got {d}")));
    }
    let target = 1.0 / (d - 1) as f64;
    if tree_branch_rate(0.0, l1, l2) >= target {
        return Ok(0.0);
    }
    if tree_branch_rate(1.0, l1, l2) <= target {
        return Ok(1.0);
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        if tree_branch_rate(m, l1, l2) < target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
