//! Grid sweeps of the analytic conditions over (a, p, m) at fixed delta.
//!
//! b is not swept: each grid point takes `b = p(a+1)^2 - m(k+2) - delta`
//! so that every row sits on the requested delta slice.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsp::{check_conditions, ConditionSet, Mode};
use crate::model::DimensionlessParams;
use crate::simulate::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub const fn new(min: f64, max: f64, count: usize) -> Self {
        Range { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 }).collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParams(format!("{name} range is empty (count = 0)")));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::InvalidParams(format!(
                "{name} range needs finite min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    /// Passing rows only.
    Region,
    /// Every grid point.
    #[default]
    Full,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "region" => Ok(Emit::Region),
            "full" => Ok(Emit::Full),
            _ => Err(Error::Parse(format!("unknown emit mode '{s}' (expected region|full)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub a: Range,
    pub p: Range,
    pub m: Range,
    pub delta: f64,
    pub r: f64,
    pub k: f64,
    pub lambda: f64,
    /// Only used when rows are turned back into full parameter sets.
    pub epsilon: f64,
    pub mode: Mode,
    pub emit: Emit,
    /// Require only (a)-(d), (g), (h).
    pub subset: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            a: Range::new(-1.0, 1.0, 50),
            p: Range::new(0.12, 6.0, 50),
            m: Range::new(0.6, 0.6, 1),
            delta: 1.3,
            r: 0.3,
            k: 4.0,
            lambda: 1.0,
            epsilon: 0.01,
            mode: Mode::Strict,
            emit: Emit::Full,
            subset: false,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.a.validate("a")?;
        self.p.validate("p")?;
        self.m.validate("m")?;
        for (name, v) in [("delta", self.delta), ("r", self.r), ("k", self.k), ("lambda", self.lambda)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParams(format!("r must be > 0, got {}", self.r)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn condition_set(&self) -> ConditionSet {
        if self.subset {
            ConditionSet::NoFunnel
        } else {
            ConditionSet::Full
        }
    }

    /// Full parameter set at one grid point.
    pub fn params_at(&self, a: f64, p: f64, m: f64) -> DimensionlessParams {
        DimensionlessParams {
            k: self.k,
            p,
            a,
            b: p * (a + 1.0).powi(2) - m * (self.k + 2.0) - self.delta,
            m,
            lambda: self.lambda,
            r: self.r,
            epsilon: self.epsilon,
        }
    }
}

/// Parses `AxPxM` grid counts such as `50x50x1`.
pub fn parse_grid(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid '{s}' must look like 50x50x1")));
    }
    let mut out = [0; 3];
    for (o, part) in out.iter_mut().zip(&parts) {
        *o = part.trim().parse().map_err(|_| Error::Parse(format!("grid '{s}': '{part}' is not a count")))?;
        if *o == 0 {
            return Err(Error::Parse(format!("grid '{s}': counts must be >= 1")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub a: f64,
    pub p: f64,
    pub m: f64,
    pub delta: f64,
    /// Pass flags for (a)..(i) in the sweep's mode.
    pub conditions: [bool; 9],
    pub r_max: f64,
    pub verdict: bool,
}

/// Rows in grid order: a outermost, then p, then m.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RegionRow>> {
    spec.validate()?;
    let (av, pv, mv) = (spec.a.values(), spec.p.values(), spec.m.values());
    let (np, nm) = (pv.len(), mv.len());
    let total = av.len() * np * nm;
    let set = spec.condition_set();
    let rows: Vec<RegionRow> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (a, p, m) = (av[idx / (np * nm)], pv[(idx / nm) % np], mv[idx % nm]);
            let pr = spec.params_at(a, p, m);
            let rep = check_conditions(&pr, spec.mode);
            RegionRow {
                a,
                p,
                m,
                delta: spec.delta,
                conditions: rep.letters().map(|(_, c)| c.pass),
                r_max: rep.r_max,
                verdict: rep.verdict(set),
            }
        })
        .collect();
    Ok(match spec.emit {
        Emit::Full => rows,
        Emit::Region => rows.into_iter().filter(|r| r.verdict).collect(),
    })
}

pub const REGION_HEADER: [&str; 15] = [
    "a", "p", "m", "delta", "cond_a", "cond_b", "cond_c", "cond_d", "cond_e", "cond_f", "cond_g", "cond_h", "cond_i",
    "r_max", "verdict",
];

pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REGION_HEADER)?;
    for r in rows {
        let mut rec = vec![fmt_f64(r.a), fmt_f64(r.p), fmt_f64(r.m), fmt_f64(r.delta)];
        rec.extend(r.conditions.iter().map(|c| c.to_string()));
        rec.push(fmt_f64(r.r_max));
        rec.push(r.verdict.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsp::delta;

    fn point_spec(a: f64, p: f64, m: f64, delta: f64, r: f64, k: f64, mode: Mode) -> SweepSpec {
        SweepSpec {
            a: Range::new(a, a, 1),
            p: Range::new(p, p, 1),
            m: Range::new(m, m, 1),
            delta,
            r,
            k,
            mode,
            ..Default::default()
        }
    }

    #[test]
    fn single_points_match_reference_sets() {
        let p2 = DimensionlessParams::P2;
        let spec = point_spec(p2.a, p2.p, p2.m, delta(&p2), p2.r, p2.k, Mode::Sharp);
        assert!(run_sweep(&spec).unwrap()[0].verdict);
        let p1 = DimensionlessParams::P1;
        let spec = point_spec(p1.a, p1.p, p1.m, delta(&p1), p1.r, p1.k, Mode::Sharp);
        assert!(!run_sweep(&spec).unwrap()[0].verdict);
    }

    #[test]
    fn b_inversion_hits_requested_delta() {
        let spec = SweepSpec { a: Range::new(-0.9, 0.9, 7), p: Range::new(0.5, 6.0, 5), ..Default::default() };
        for row in run_sweep(&spec).unwrap() {
            let pr = spec.params_at(row.a, row.p, row.m);
            assert!((delta(&pr) - spec.delta).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_order_and_size() {
        let spec = SweepSpec {
            a: Range::new(0.0, 1.0, 3),
            p: Range::new(1.0, 2.0, 2),
            m: Range::new(0.1, 0.3, 2),
            ..Default::default()
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!((rows[0].a, rows[0].p, rows[0].m), (0.0, 1.0, 0.1));
        assert_eq!((rows[1].a, rows[1].p, rows[1].m), (0.0, 1.0, 0.3));
        assert_eq!((rows[2].a, rows[2].p, rows[2].m), (0.0, 2.0, 0.1));
        assert_eq!(rows[4].a, 0.5);
    }

    #[test]
    fn empty_grid_is_usage_error() {
        let spec = SweepSpec { p: Range::new(1.0, 2.0, 0), ..Default::default() };
        let err = run_sweep(&spec).unwrap_err();
        assert!(err.is_usage());
        let spec = SweepSpec { a: Range::new(1.0, 0.0, 3), ..Default::default() };
        assert!(run_sweep(&spec).unwrap_err().is_usage());
    }

    #[test]
    fn emit_region_filters() {
        let full = run_sweep(&SweepSpec::default()).unwrap();
        let region = run_sweep(&SweepSpec { emit: Emit::Region, ..Default::default() }).unwrap();
        assert_eq!(region.len(), full.iter().filter(|r| r.verdict).count());
        assert!(!region.is_empty());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("50x50x1").unwrap(), [50, 50, 1]);
        assert_eq!(parse_grid(" 3X4x5 ").unwrap(), [3, 4, 5]);
        for bad in ["50x50", "0x1x1", "ax1x1", "", "1x1x1x1", "-1x2x2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let rows =
            run_sweep(&SweepSpec { a: Range::new(0.5, 0.5, 1), p: Range::new(2.0, 2.0, 1), ..Default::default() })
                .unwrap();
        let mut buf = Vec::new();
        write_region_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REGION_HEADER.join(","));
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("0.5,2.0,0.6,1.3,true,true,true,"));
    }
}
