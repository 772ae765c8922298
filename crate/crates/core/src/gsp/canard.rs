//! Strong canard: the trajectory of the desingularized flow that enters the
//! lower folded node tangent to the strong eigenvector. It bounds the
//! singular funnel on `M_A-`.

use serde::{Deserialize, Serialize};

use super::desingularized_vf;
use super::folded::require_stable_node;
use crate::error::{Error, Result};
use crate::model::DimensionlessParams;
use crate::simulate::{integrate_with_events, Direction, EventSpec, IntegratorConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanardApprox {
    /// Polyline (x, z) from the seed near the node out to `x_stop`.
    pub samples: Vec<[f64; 2]>,
    pub seed_offset: f64,
    pub x_stop: f64,
    /// z of the canard where it reaches `x_stop`.
    pub z_at_stop: f64,
    /// dz/dx of the vector field at the seed point.
    pub tangent_slope_at_node: f64,
    pub slope_strong: f64,
    pub z_minus: f64,
}

impl CanardApprox {
    /// Signed distance above the tangent line `z = m_s (x+1) + z_-` per sample.
    pub fn heights_above_tangent(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(move |[x, z]| z - (self.slope_strong * (x + 1.0) + self.z_minus))
    }
}

/// Horizon in desingularized time for the reverse-time integration.
const HORIZON: f64 = 500.0;

fn canard_config() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-12, atol: 1e-14, h_init: None, h_max: 0.05, max_steps: 2_000_000, ..Default::default() }
}

/// Integrates the desingularized flow backwards from the node along the
/// strong eigendirection (pointing into x < -1) until x reaches `x_stop`.
pub fn strong_canard(pr: &DimensionlessParams, seed_offset: f64, x_stop: f64) -> Result<CanardApprox> {
    if !(seed_offset > 0.0 && seed_offset.is_finite()) {
        return Err(Error::Domain(format!("seed offset must be > 0, got {seed_offset}")));
    }
    if !(x_stop < -1.0) {
        return Err(Error::Domain(format!("x_stop must lie on M_A- (x < -1), got {x_stop}")));
    }
    let (node, _mu_s, m_s) = require_stable_node(pr)?;
    let z_minus = node.z_value;
    let norm = (1.0 + m_s * m_s).sqrt();
    let seed = [-1.0 - seed_offset / norm, z_minus - seed_offset * m_s / norm];

    let fwd = desingularized_vf(pr, seed[0], seed[1]);
    let tangent_slope_at_node = fwd[1] / fwd[0];

    let reverse = |_t: f64, u: &[f64; 2]| {
        let [dx, dz] = desingularized_vf(pr, u[0], u[1]);
        [-dx, -dz]
    };
    let events =
        [EventSpec::new(0, x_stop, Direction::Falling, true), EventSpec::new(0, -1.0, Direction::Rising, true)];
    let (traj, log) = integrate_with_events(&reverse, seed, (0.0, HORIZON), &canard_config(), &events)?;

    match log.last() {
        Some(rec) if rec.event == 0 => Ok(CanardApprox {
            samples: traj.states,
            seed_offset,
            x_stop,
            z_at_stop: rec.state[1],
            tangent_slope_at_node,
            slope_strong: m_s,
            z_minus,
        }),
        Some(rec) => Err(Error::CanardHitsNullcline { x: rec.state[0], z: rec.state[1] }),
        None => Err(Error::CanardIncomplete { x_stop }),
    }
}

/// Canard from the default seed plus a second run at one tenth of the
/// offset; their difference at `x_stop` is the convergence estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedCanard {
    pub canard: CanardApprox,
    pub refined_z_at_stop: f64,
    pub offset_difference: f64,
}

pub fn default_seed_offset(z_minus: f64) -> f64 {
    1e-6 * (1.0 + z_minus.abs())
}

pub fn strong_canard_checked(pr: &DimensionlessParams, x_stop: f64) -> Result<CheckedCanard> {
    let offset = default_seed_offset(super::z_minus(pr));
    let canard = strong_canard(pr, offset, x_stop)?;
    let refined = strong_canard(pr, 0.1 * offset, x_stop)?;
    Ok(CheckedCanard {
        offset_difference: (canard.z_at_stop - refined.z_at_stop).abs(),
        refined_z_at_stop: refined.z_at_stop,
        canard,
    })
}
