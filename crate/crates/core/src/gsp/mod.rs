//! Singular-limit geometry of the fast/slow system.
//!
//! The critical manifold `y = h(x)` is S-shaped: attracting outer branches
//! `M_A-` (x < -1) and `M_A+` (x > 1), a repelling middle branch `M_R`, and
//! fold lines `L-` / `L+` at x = -1 / x = 1. Slow dynamics on it are written
//! in (x, z) coordinates.

mod canard;
mod conditions;
mod folded;
mod orbit;

pub use canard::{strong_canard, strong_canard_checked, CanardApprox, CheckedCanard};
pub use conditions::{check_conditions, Condition, ConditionReport, ConditionSet, Mode};
pub use folded::{
    find_folded_singularities, jacobian_desingularized, jacobian_folded, lower_folded_singularity, predicted_signature,
    FoldClass, FoldJacobian, FoldedSingularity, PredictedSignature,
};
pub use orbit::{build_singular_orbit, FunnelMethod, Segment, SegmentKind, SingularOrbit};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::DimensionlessParams;
use crate::poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "M_A-")]
    LowerAttracting,
    #[serde(rename = "L-")]
    LowerFold,
    #[serde(rename = "M_R")]
    Repelling,
    #[serde(rename = "L+")]
    UpperFold,
    #[serde(rename = "M_A+")]
    UpperAttracting,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::LowerAttracting => "M_A-",
            Branch::LowerFold => "L-",
            Branch::Repelling => "M_R",
            Branch::UpperFold => "L+",
            Branch::UpperAttracting => "M_A+",
        })
    }
}

pub fn branch_of(x: f64) -> Branch {
    if x < -1.0 {
        Branch::LowerAttracting
    } else if x == -1.0 {
        Branch::LowerFold
    } else if x < 1.0 {
        Branch::Repelling
    } else if x == 1.0 {
        Branch::UpperFold
    } else {
        Branch::UpperAttracting
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldSide {
    Lower,
    Upper,
}

impl FoldSide {
    pub fn x(self) -> f64 {
        match self {
            FoldSide::Lower => -1.0,
            FoldSide::Upper => 1.0,
        }
    }
}

/// Reduced problem in the form `h'(x) x' = x_rhs`, `z' = z_dot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedFlow {
    pub h_prime: f64,
    pub x_rhs: f64,
    pub z_dot: f64,
}

impl ReducedFlow {
    /// `x'` off the folds; `None` where `h'(x) = 0`.
    pub fn x_dot(&self) -> Option<f64> {
        (self.h_prime != 0.0).then(|| self.x_rhs / self.h_prime)
    }
}

pub fn reduced_vf(pr: &DimensionlessParams, x: f64, z: f64) -> ReducedFlow {
    let h = pr.h(x);
    ReducedFlow {
        h_prime: pr.h_prime(x),
        x_rhs: pr.f(x) - (pr.m + 1.0) * h - pr.lambda + z,
        z_dot: pr.r * (pr.lambda + h - z),
    }
}

/// Reduced flow with time rescaled by `h'(x)`; orientation flips on `M_R`.
pub fn desingularized_vf(pr: &DimensionlessParams, x: f64, z: f64) -> [f64; 2] {
    let h = pr.h(x);
    [pr.f(x) - (pr.m + 1.0) * h - pr.lambda + z, pr.r * pr.h_prime(x) * (pr.lambda + h - z)]
}

/// `delta = f(-1) - m h(-1) = p (a+1)^2 - b - m (k+2)`.
pub fn delta(pr: &DimensionlessParams) -> f64 {
    pr.p * (pr.a + 1.0).powi(2) - pr.b - pr.m * (pr.k + 2.0)
}

/// z of the folded singularity on `L-`: `(m+1) h(-1) + lambda - f(-1)`.
pub fn z_minus(pr: &DimensionlessParams) -> f64 {
    (pr.m + 1.0) * pr.h(-1.0) + pr.lambda - pr.f(-1.0)
}

/// z of the folded singularity on `L+`: `(m+1)(k-2) + lambda - p(1-a)^2 + b`.
pub fn z_plus(pr: &DimensionlessParams) -> f64 {
    (pr.m + 1.0) * pr.h(1.0) + pr.lambda - pr.f(1.0)
}

/// Where the z-nullcline `z = h(x) + lambda` meets `L-`.
pub fn z_nullcline_at_lower_fold(pr: &DimensionlessParams) -> f64 {
    pr.h(-1.0) + pr.lambda
}

/// Coefficients of `m h(x) - f(x)`, highest degree first. Its real roots
/// are the x-coordinates of ordinary singularities.
pub fn nullcline_cubic(pr: &DimensionlessParams) -> [f64; 4] {
    [pr.m, -pr.p, 2.0 * pr.a * pr.p - 3.0 * pr.m, pr.m * pr.k - pr.p * pr.a * pr.a + pr.b]
}

/// Discriminant of `m h - f` written in terms of `(a, p, m, delta)`.
pub fn discriminant_delta(a: f64, p: f64, m: f64, delta: f64) -> f64 {
    let c1 = -3.0 * m + 2.0 * a * p;
    let c0 = -delta - 2.0 * m + p + 2.0 * a * p;
    p * p * c1 * c1 - 4.0 * m * c1.powi(3) + 4.0 * p.powi(3) * c0 - 18.0 * m * p * c1 * c0 - 27.0 * m * m * c0 * c0
}

/// Below this magnitude the discriminant sign is not trusted.
pub const DISCRIMINANT_BOUNDARY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscriminantSign {
    /// One real intersection of the nullclines.
    Negative,
    /// Three real intersections.
    Positive,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantVerdict {
    pub value: f64,
    pub sign: DiscriminantSign,
    /// Distinct real roots of `m h - f` from the closed-form solver; absent
    /// in the boundary band.
    pub root_count: Option<usize>,
}

/// Sign of the discriminant paired with an independent root count.
pub fn discriminant_verdict(pr: &DimensionlessParams) -> DiscriminantVerdict {
    let value = discriminant_delta(pr.a, pr.p, pr.m, delta(pr));
    let sign = if value.abs() < DISCRIMINANT_BOUNDARY {
        DiscriminantSign::Boundary
    } else if value < 0.0 {
        DiscriminantSign::Negative
    } else {
        DiscriminantSign::Positive
    };
    let root_count = (sign != DiscriminantSign::Boundary).then(|| {
        let [c3, c2, c1, c0] = nullcline_cubic(pr);
        poly::real_root_count(c3, c2, c1, c0)
    });
    DiscriminantVerdict { value, sign, root_count }
}

/// Equilibrium of the full system seen on the critical manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrdinarySingularity {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub branch: Branch,
}

pub fn ordinary_singularities(pr: &DimensionlessParams) -> Vec<OrdinarySingularity> {
    let [c3, c2, c1, c0] = nullcline_cubic(pr);
    poly::solve_cubic(c3, c2, c1, c0)
        .into_iter()
        .map(|root| {
            let y = pr.h(root.x);
            OrdinarySingularity { x: root.x, y, z: y + pr.lambda, branch: branch_of(root.x) }
        })
        .collect()
}

/// Landing x of the fast fiber leaving a fold: the simple root of `h(x) = h(+-1)`.
pub fn project_fold(side: FoldSide, k: f64) -> f64 {
    let target = side.x().powi(3) - 3.0 * side.x() + k;
    poly::solve_cubic(1.0, 0.0, -3.0, k - target)
        .into_iter()
        .find(|r| r.multiplicity == 1)
        .map(|r| r.x)
        .expect("h(x) = h(+-1) always has a simple root")
}
