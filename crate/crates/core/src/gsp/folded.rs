use serde::{Deserialize, Serialize};

use super::{delta, z_minus, z_plus, FoldSide};
use crate::error::{Error, Result};
use crate::model::DimensionlessParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldClass {
    StableNode,
    StableFocus,
    Unstable,
    Saddle,
    /// Zero determinant: folded saddle-node of type II (delta = 0 or r = 0).
    Degenerate,
}

/// Linearization of the desingularized flow at an arbitrary point.
pub fn jacobian_desingularized(pr: &DimensionlessParams, x: f64, z: f64) -> [[f64; 2]; 2] {
    let hp = pr.h_prime(x);
    let hpp = pr.h_second(x);
    [[pr.f_prime(x) - (pr.m + 1.0) * hp, 1.0], [pr.r * (hp * hp + hpp * (pr.lambda + pr.h(x) - z)), -pr.r * hp]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldJacobian {
    pub matrix: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    /// `trace^2 - 4 det`.
    pub discriminant: f64,
}

impl FoldJacobian {
    fn from_matrix(matrix: [[f64; 2]; 2]) -> Self {
        let trace = matrix[0][0] + matrix[1][1];
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        FoldJacobian { matrix, trace, det, discriminant: trace * trace - 4.0 * det }
    }

    /// Real eigenvalues ordered (larger magnitude, smaller magnitude).
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        if self.discriminant < 0.0 {
            return None;
        }
        let root = self.discriminant.sqrt();
        // larger-magnitude root first, the other through det = product
        let big = if self.trace >= 0.0 { 0.5 * (self.trace + root) } else { 0.5 * (self.trace - root) };
        let small = if big == 0.0 { 0.0 } else { self.det / big };
        Some((big, small))
    }

    fn classify(&self) -> FoldClass {
        let scale = 1.0f64.max(self.trace * self.trace);
        if self.det.abs() <= 1e-12 * scale {
            FoldClass::Degenerate
        } else if self.det < 0.0 {
            FoldClass::Saddle
        } else if self.trace >= 0.0 {
            FoldClass::Unstable
        } else if self.discriminant < 0.0 {
            FoldClass::StableFocus
        } else {
            FoldClass::StableNode
        }
    }
}

/// Exact Jacobian of the desingularized flow at the folded singularity on
/// the given fold. On `L-` it reduces to `[[f'(-1), 1], [-6 r delta, 0]]`.
pub fn jacobian_folded(pr: &DimensionlessParams, side: FoldSide) -> FoldJacobian {
    let x = side.x();
    // lambda + h(x) - z at the folded singularity
    let h_gap = match side {
        FoldSide::Lower => delta(pr),
        FoldSide::Upper => pr.f(1.0) - pr.m * pr.h(1.0),
    };
    let matrix = [[pr.f_prime(x), 1.0], [pr.r * pr.h_second(x) * h_gap, 0.0]];
    FoldJacobian::from_matrix(matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldedSingularity {
    pub fold_side: FoldSide,
    pub z_value: f64,
    pub jacobian: FoldJacobian,
    pub classification: FoldClass,
    /// Larger-magnitude real eigenvalue.
    pub eigen_strong: Option<f64>,
    pub eigen_weak: Option<f64>,
    /// z/x slope of the strong eigenvector.
    pub slope_strong: Option<f64>,
    pub slope_weak: Option<f64>,
    /// `mu_w / mu_s`, stable nodes only.
    pub mu_ratio: Option<f64>,
    pub s_predicted: Option<u32>,
    /// `(1 + mu) / (2 mu)` landed on an integer and was decremented.
    pub s_boundary: bool,
}

fn build(pr: &DimensionlessParams, side: FoldSide) -> FoldedSingularity {
    let jacobian = jacobian_folded(pr, side);
    let classification = jacobian.classify();
    let eig = jacobian.real_eigenvalues();
    let j21 = jacobian.matrix[1][0];
    let slope = |mu: f64| (mu != 0.0).then(|| j21 / mu);
    let (eigen_strong, eigen_weak) = match eig {
        Some((s, w)) => (Some(s), Some(w)),
        None => (None, None),
    };
    let mut mu_ratio = None;
    let mut s_predicted = None;
    let mut s_boundary = false;
    if classification == FoldClass::StableNode {
        if let Some((s, w)) = eig {
            let mu = w / s;
            mu_ratio = Some(mu);
            if let Ok(pred) = predicted_signature(mu) {
                s_predicted = Some(pred.s);
                s_boundary = pred.boundary;
            }
        }
    }
    FoldedSingularity {
        fold_side: side,
        z_value: match side {
            FoldSide::Lower => z_minus(pr),
            FoldSide::Upper => z_plus(pr),
        },
        jacobian,
        classification,
        eigen_strong,
        eigen_weak,
        slope_strong: eigen_strong.and_then(slope),
        slope_weak: eigen_weak.and_then(slope),
        mu_ratio,
        s_predicted,
        s_boundary,
    }
}

/// Folded singularities on `L-` and `L+`, in that order.
pub fn find_folded_singularities(pr: &DimensionlessParams) -> Vec<FoldedSingularity> {
    vec![build(pr, FoldSide::Lower), build(pr, FoldSide::Upper)]
}

pub fn lower_folded_singularity(pr: &DimensionlessParams) -> FoldedSingularity {
    build(pr, FoldSide::Lower)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedSignature {
    pub s: u32,
    pub boundary: bool,
}

/// Small-oscillation count `s`: the greatest integer strictly below
/// `(1 + mu) / (2 mu)`.
pub fn predicted_signature(mu: f64) -> Result<PredictedSignature> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Domain(format!("eigenvalue ratio must lie in (0, 1), got {mu}")));
    }
    let v = (1.0 + mu) / (2.0 * mu);
    let nearest = v.round();
    if (v - nearest).abs() <= 1e-12 * v {
        return Ok(PredictedSignature { s: nearest as u32 - 1, boundary: true });
    }
    Ok(PredictedSignature { s: v.floor() as u32, boundary: false })
}

/// Stable-node data for the lower fold or the reason it is not one.
pub(crate) fn require_stable_node(pr: &DimensionlessParams) -> Result<(FoldedSingularity, f64, f64)> {
    let node = lower_folded_singularity(pr);
    match (node.classification, node.eigen_strong, node.slope_strong) {
        (FoldClass::StableNode, Some(mu_s), Some(m_s)) => Ok((node, mu_s, m_s)),
        (class, ..) => Err(Error::NoFoldedNode(format!("{class:?}"))),
    }
}
