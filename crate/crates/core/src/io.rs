//! Config and data file formats.
//!
//! Parameter files are JSON objects with the field names of
//! [`DimensionlessParams`] or [`PhysicalParams`]. Trajectory files are CSV
//! with header `t,x,y,z`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DimensionlessParams, PhysicalParams};
use crate::sweep::SweepSpec;

/// Named parameter sets.
pub fn preset(name: &str) -> Result<DimensionlessParams> {
    match name {
        "p1" => Ok(DimensionlessParams::P1),
        "p2" => Ok(DimensionlessParams::P2),
        "three-timescale" => Ok(DimensionlessParams::THREE_TIMESCALE),
        _ => Err(Error::InvalidParams(format!("unknown preset '{name}' (expected p1, p2 or three-timescale)"))),
    }
}

pub const PRESETS: [&str; 3] = ["p1", "p2", "three-timescale"];

pub fn parse_dimensionless_json(text: &str) -> Result<DimensionlessParams> {
    let pr: DimensionlessParams = serde_json::from_str(text)?;
    pr.validate()?;
    Ok(pr)
}

pub fn parse_physical_json(text: &str) -> Result<PhysicalParams> {
    let pr: PhysicalParams = serde_json::from_str(text)?;
    pr.validate()?;
    Ok(pr)
}

pub fn parse_sweep_spec_json(text: &str) -> Result<SweepSpec> {
    let spec: SweepSpec = serde_json::from_str(text)?;
    spec.validate()?;
    Ok(spec)
}

/// Per-field replacements applied on top of a base parameter set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub m: Option<f64>,
    pub lambda: Option<f64>,
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, base: DimensionlessParams) -> Result<DimensionlessParams> {
        let pr = DimensionlessParams {
            k: self.k.unwrap_or(base.k),
            p: self.p.unwrap_or(base.p),
            a: self.a.unwrap_or(base.a),
            b: self.b.unwrap_or(base.b),
            m: self.m.unwrap_or(base.m),
            lambda: self.lambda.unwrap_or(base.lambda),
            r: self.r.unwrap_or(base.r),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
        };
        pr.validate()?;
        Ok(pr)
    }
}

/// Columns of a `t,x,y,z` trajectory file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryTable {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl TrajectoryTable {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Reads a trajectory CSV. Columns are located by header name, so extra
/// columns and any column order are accepted.
pub fn parse_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("trajectory CSV lacks a '{name}' column")))
    };
    let idx = [col("t")?, col("x")?, col("y")?, col("z")?];
    let mut table = TrajectoryTable::default();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut vals = [0.0; 4];
        for (v, &i) in vals.iter_mut().zip(&idx) {
            let field = rec.get(i).unwrap_or("");
            *v = field.parse().map_err(|_| Error::Parse(format!("row {}: '{field}' is not a number", line + 2)))?;
        }
        if let Some(&prev) = table.t.last() {
            if !(vals[0] > prev) {
                return Err(Error::Parse(format!("row {}: time does not increase", line + 2)));
            }
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("row {}: non-finite value", line + 2)));
        }
        table.t.push(vals[0]);
        table.x.push(vals[1]);
        table.y.push(vals[2]);
        table.z.push(vals[3]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensionless_round_trip() {
        let text = serde_json::to_string(&DimensionlessParams::P2).unwrap();
        assert_eq!(parse_dimensionless_json(&text).unwrap(), DimensionlessParams::P2);
    }

    #[test]
    fn dimensionless_rejects_bad_input() {
        assert!(parse_dimensionless_json("{}").unwrap_err().is_usage());
        let mut v = serde_json::to_value(DimensionlessParams::P1).unwrap();
        v["epsilon"] = serde_json::json!(-1.0);
        assert!(parse_dimensionless_json(&v.to_string()).unwrap_err().is_usage());
        v["epsilon"] = serde_json::json!(0.1);
        v["extra"] = serde_json::json!(1.0);
        assert!(parse_dimensionless_json(&v.to_string()).is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let o = Overrides { a: Some(0.83), epsilon: Some(0.01), ..Default::default() };
        let pr = o.apply(DimensionlessParams::P1).unwrap();
        assert_eq!(pr.a, 0.83);
        assert_eq!(pr.epsilon, 0.01);
        assert_eq!(pr.p, DimensionlessParams::P1.p);
        assert!(Overrides { r: Some(0.0), ..Default::default() }.apply(pr).is_err());
    }

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            preset(name).unwrap();
        }
        assert!(preset("p3").is_err());
    }

    #[test]
    fn sweep_spec_defaults_fill_in() {
        let spec = parse_sweep_spec_json(r#"{"delta": 1.0, "mode": "sharp"}"#).unwrap();
        assert_eq!(spec.delta, 1.0);
        assert_eq!(spec.a, SweepSpec::default().a);
        assert!(parse_sweep_spec_json(r#"{"a": {"min": 0, "max": 1, "count": 0}}"#).is_err());
        assert!(parse_sweep_spec_json(r#"{"grid": 3}"#).is_err());
    }

    #[test]
    fn trajectory_csv() {
        let text = "z,t,x,y,extra\n3,0,1,2,9\n6, 0.5 ,4,5,9\n";
        let t = parse_trajectory_csv(text.as_bytes()).unwrap();
        assert_eq!(t.t, vec![0.0, 0.5]);
        assert_eq!(t.x, vec![1.0, 4.0]);
        assert_eq!(t.z, vec![3.0, 6.0]);
        for bad in [
            "t,x,y\n0,1,2\n",
            "t,x,y,z\n0,1,2,nope\n",
            "t,x,y,z\n1,1,2,3\n1,1,2,3\n",
            "t,x,y,z\n0,1,2\n",
            "t,x,y,z\n0,NaN,2,3\n",
        ] {
            assert!(parse_trajectory_csv(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }
}
