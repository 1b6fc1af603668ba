//! Bit-stable CSV and JSON serialization: fixed column order, 17 significant digits,
//! line-feed newlines.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::estimation::Classification;
use crate::network::ResistanceProfile;
use crate::trees::GwClusterStats;
use crate::walks::ZDrwClassification;

/// `x` with 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number with 17 significant digits, or `null` when not finite.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_float(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

/// Rewrites every non-integer number in `v` to 17 significant digits.
pub fn normalize_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                if let Ok(x) = s.parse::<f64>() {
                    *v = json_float(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(normalize_floats),
        Value::Object(o) => o.values_mut().for_each(normalize_floats),
        _ => {}
    }
}

/// Pretty JSON of any report with normalized floats and a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(report)?;
    normalize_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(t) => t.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Cell {
        Cell::Int(x as i128)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Cell {
        Cell::Int(x as i128)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Cell {
        Cell::Text(x.into())
    }
}

/// Header plus rows; rendered without quoting since no cell contains a comma.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

pub const PROFILE_HEADER: [&str; 8] = ["seed", "p", "n", "R", "nw_lower", "flow_upper", "residual", "iters"];

fn seed_cell(seed: Option<u64>) -> Cell {
    seed.map_or(Cell::Text(String::new()), Cell::from)
}

pub fn profile_table(profiles: &[ResistanceProfile]) -> Table {
    let mut t = Table::new(&PROFILE_HEADER);
    for prof in profiles {
        for r in &prof.rows {
            t.push(vec![
                seed_cell(prof.seed),
                prof.p.into(),
                r.n.into(),
                r.r.into(),
                r.nw_lower.into(),
                r.flow_upper.into(),
                r.residual.into(),
                r.iters.into(),
            ]);
        }
    }
    t
}

pub const DRW_HEADER: [&str; 6] = ["seed", "p", "verdict", "f_window_ratio", "S_drift_left", "S_drift_right"];

/// One row per replica. `f_window_ratio` is the base-10 logarithm of the smaller of the
/// two sides' `f(0.9 L) / f(L / 10)`.
pub fn drw_table(rows: &[(u64, f64, ZDrwClassification)]) -> Table {
    let mut t = Table::new(&DRW_HEADER);
    for (seed, p, c) in rows {
        t.push(vec![
            (*seed).into(),
            (*p).into(),
            c.verdict.as_str().into(),
            c.left.log10_window_ratio.min(c.right.log10_window_ratio).into(),
            c.left.drift.into(),
            c.right.drift.into(),
        ]);
    }
    t
}

pub const SWEEP_HEADER: [&str; 8] =
    ["seed", "p", "verdict", "conflict", "R_max", "nw_max", "relative_increment", "trend_slope"];

/// One row per `(seed, p)` cell of a sweep.
pub fn classification_table(rows: &[(u64, f64, Classification)]) -> Table {
    let mut t = Table::new(&SWEEP_HEADER);
    for (seed, p, c) in rows {
        t.push(vec![
            (*seed).into(),
            (*p).into(),
            c.verdict.as_str().into(),
            usize::from(c.conflict).into(),
            c.resistance.last().copied().unwrap_or(f64::NAN).into(),
            c.nw_max.into(),
            c.relative_increment.into(),
            c.trend_slope.unwrap_or(f64::NAN).into(),
        ]);
    }
    t
}

pub const GW_HEADER: [&str; 4] = ["seed", "n", "count", "ratio"];

pub fn gw_table(runs: &[GwClusterStats]) -> Table {
    let mut t = Table::new(&GW_HEADER);
    for s in runs {
        for (n, (&c, &m)) in s.counts.iter().zip(&s.ratios).enumerate() {
            t.push(vec![s.seed.into(), n.into(), c.into(), m.into()]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ProfileRow;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(json_float(f64::NAN), Value::Null);
        assert_eq!(json_float(0.5).to_string(), "5.0000000000000000e-1");
        for x in [0.1, 1.0 / 3.0, 2e-300, 6.02e23] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn profile_csv_header_and_rows() {
        let prof = ResistanceProfile {
            seed: Some(7),
            p: 0.5,
            rows: vec![ProfileRow { n: 3, r: 1.5, nw_lower: 1.0, flow_upper: 1.5, residual: 0.0, iters: 0 }],
        };
        let csv = profile_table(&[prof]).to_csv();
        assert_eq!(
            csv,
            "seed,p,n,R,nw_lower,flow_upper,residual,iters\n7,5.0000000000000000e-1,3,1.5000000000000000e0,1.0000000000000000e0,1.5000000000000000e0,0.0000000000000000e0,0\n"
        );
    }

    #[test]
    fn json_normalizes_nested_floats() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            b: Vec<f64>,
            n: usize,
        }
        let s = to_json(&R { a: 0.25, b: vec![1.0, f64::NAN], n: 3 }).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].to_string(), "2.5000000000000000e-1");
        assert_eq!(v["b"][1], Value::Null);
        assert_eq!(v["n"].to_string(), "3");
        assert!(s.ends_with("}\n") && !s.contains('\r'));
    }
}
