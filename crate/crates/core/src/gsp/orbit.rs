//! Singular periodic orbit: fast jump off `L-`, slow drift on `M_A+` to
//! `L+`, fast jump back to `M_A-`, and a test of whether the landing point
//! sits in the funnel of the folded node.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::canard::strong_canard_checked;
use super::folded::require_stable_node;
use super::{desingularized_vf, z_minus, z_plus};
use crate::error::{Error, Result};
use crate::model::DimensionlessParams;
use crate::simulate::{fmt_f64, integrate_with_events, Direction, EventSpec, IntegratorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunnelMethod {
    /// Tangent-line bound `z < z*`.
    Linear,
    /// Strong canard evaluated at x = -2.
    #[default]
    Numeric,
}

impl FromStr for FunnelMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FunnelMethod::Linear),
            "numeric" => Ok(FunnelMethod::Numeric),
            _ => Err(Error::Parse(format!("unknown funnel method '{s}' (expected linear|numeric)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    FastJump,
    SlowArc,
}

impl SegmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentKind::FastJump => "fast_jump",
            SegmentKind::SlowArc => "slow_arc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub samples: Vec<[f64; 2]>,
}

impl Segment {
    fn jump(x0: f64, x1: f64, z: f64) -> Self {
        Segment { kind: SegmentKind::FastJump, start: [x0, z], end: [x1, z], samples: vec![[x0, z], [x1, z]] }
    }

    fn arc(samples: Vec<[f64; 2]>) -> Self {
        Segment { kind: SegmentKind::SlowArc, start: samples[0], end: *samples.last().unwrap(), samples }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularOrbit {
    pub segments: Vec<Segment>,
    /// z where the `M_A+` arc reaches `L+`.
    pub crossing_z: f64,
    /// x' of the desingularized flow at the crossing.
    pub crossing_xdot: f64,
    pub transversal: bool,
    pub landing: [f64; 2],
    pub z_minus: f64,
    pub z_plus: f64,
    pub z_star: f64,
    pub gamma_s_at_landing: Option<f64>,
    pub in_funnel_linear: bool,
    pub in_funnel_numeric: Option<bool>,
    pub funnel_method: FunnelMethod,
    pub closed: bool,
}

impl SingularOrbit {
    /// Polylines as CSV: `segment_index,kind,x,z`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["segment_index", "kind", "x", "z"])?;
        for (i, seg) in self.segments.iter().enumerate() {
            for [x, z] in &seg.samples {
                w.write_record([i.to_string(), seg.kind.as_str().to_string(), fmt_f64(*x), fmt_f64(*z)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

const SLOW_HORIZON: f64 = 1e3;
const TRANSVERSAL_TOL: f64 = 1e-9;
/// The return arc on `M_A-` stops this far short of `L-`.
const FOLD_GAP: f64 = 1e-4;

fn orbit_config() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-11, atol: 1e-13, h_init: None, h_max: 0.05, max_steps: 2_000_000, ..Default::default() }
}

pub fn build_singular_orbit(pr: &DimensionlessParams, method: FunnelMethod) -> Result<SingularOrbit> {
    pr.validate()?;
    let (_, _, m_s) = require_stable_node(pr)?;
    let zm = z_minus(pr);
    let zp = z_plus(pr);
    let z_star = zm - m_s;
    let field = |_t: f64, u: &[f64; 2]| desingularized_vf(pr, u[0], u[1]);
    let cfg = orbit_config();

    let mut segments = vec![Segment::jump(-1.0, 2.0, zm)];

    let upper = [EventSpec::new(0, 1.0, Direction::Falling, true)];
    let (traj, log) = integrate_with_events(&field, [2.0, zm], (0.0, SLOW_HORIZON), &cfg, &upper)?;
    let Some(hit) = log.last() else {
        let [x, z] = traj.last_state();
        return Err(Error::OrbitTrapped { x, z });
    };
    let crossing_z = hit.state[1];
    let crossing_xdot = desingularized_vf(pr, 1.0, crossing_z)[0];
    if crossing_xdot.abs() < TRANSVERSAL_TOL {
        return Err(Error::NonTransversal { z: crossing_z, xdot: crossing_xdot });
    }
    // The arc reaches L+ moving toward smaller x.
    let transversal = crossing_xdot < 0.0;
    segments.push(Segment::arc(traj.states));
    segments.push(Segment::jump(1.0, -2.0, crossing_z));

    let in_funnel_linear = crossing_z < z_star;
    let gamma_s_at_landing = match strong_canard_checked(pr, -2.0) {
        Ok(c) => Some(c.canard.z_at_stop),
        Err(e) if method == FunnelMethod::Numeric => return Err(e),
        Err(_) => None,
    };
    let in_funnel_numeric = gamma_s_at_landing.map(|g| crossing_z < g);
    let chosen = match method {
        FunnelMethod::Linear => in_funnel_linear,
        FunnelMethod::Numeric => in_funnel_numeric.unwrap_or(false),
    };
    let closed = transversal && chosen && in_funnel_numeric.unwrap_or(true);

    if closed {
        let lower = [EventSpec::new(0, -1.0 - FOLD_GAP, Direction::Rising, true)];
        let (back, _) = integrate_with_events(&field, [-2.0, crossing_z], (0.0, SLOW_HORIZON), &cfg, &lower)?;
        segments.push(Segment::arc(back.states));
    }

    Ok(SingularOrbit {
        segments,
        crossing_z,
        crossing_xdot,
        transversal,
        landing: [-2.0, crossing_z],
        z_minus: zm,
        z_plus: zp,
        z_star,
        gamma_s_at_landing,
        in_funnel_linear,
        in_funnel_numeric,
        funnel_method: method,
        closed,
    })
}
