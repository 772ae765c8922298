//! Analytic sufficient conditions (a)-(i) for a stable `1^s` orbit.
//!
//! Strict mode evaluates the inequalities exactly as stated. Sharp mode
//! swaps (e) for the concavity inequality `12r + |mu_s| - 2p - 6(m+1) < 0`
//! with the computed strong eigenvalue, swaps (i) for the direct comparison
//! `z_+ < z_*`, and additionally requires a stable node by eigenvalues.

use serde::{Deserialize, Serialize};

use super::folded::lower_folded_singularity;
use super::{delta, discriminant_verdict, z_minus, z_plus, DiscriminantSign, FoldClass};
use crate::model::DimensionlessParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Strict,
    Sharp,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "sharp" => Ok(Mode::Sharp),
            other => Err(format!("unknown mode '{other}' (expected strict or sharp)")),
        }
    }
}

/// Which conditions a verdict requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionSet {
    /// (a)-(i) together with delta < 4.
    #[default]
    Full,
    /// (a)-(d), (g), (h): the conditions not tied to the linear funnel estimate.
    NoFunnel,
}

/// An evaluated inequality. `value` is the left-hand side compared against
/// zero (or the quantity named in the field docs); NaN when not computable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub value: f64,
    pub pass: bool,
}

impl Condition {
    fn positive(value: f64) -> Self {
        Condition { value, pass: value > 0.0 }
    }

    fn negative(value: f64) -> Self {
        Condition { value, pass: value < 0.0 }
    }

    fn unavailable() -> Self {
        Condition { value: f64::NAN, pass: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub mode: Mode,
    pub delta: f64,
    /// Largest r allowed by (d): `p^2 (a+1)^2 / (6 delta)`.
    pub r_max: f64,

    /// p > 0; value p.
    pub cond_a: Condition,
    /// -1 < a < 1; value a.
    pub cond_b: Condition,
    /// delta > 0.
    pub cond_c: Condition,
    /// p^2 (a+1)^2 - 6 r delta > 0.
    pub cond_d: Condition,
    /// Mode-dependent: `e_printed` in strict mode, `e_sharp` in sharp mode.
    pub cond_e: Condition,
    /// p(a+1) - 2 > 0.
    pub cond_f: Condition,
    /// 4(ap - m) - delta > 0.
    pub cond_g: Condition,
    /// Discriminant of m h - f, must be negative.
    pub cond_h: Condition,
    /// Mode-dependent: `i_printed` in strict mode, `i_direct` in sharp mode.
    pub cond_i: Condition,

    /// 4 - delta > 0.
    pub delta_below_4: Condition,
    /// 2 p^2 (a+1)^2 / delta + 2pa - 6(m+1) < 0.
    pub e_printed: Condition,
    /// 12 r + |mu_s| - 2p - 6(m+1) < 0; needs a stable node.
    pub e_sharp: Condition,
    /// 4(m+4) - 5ap - p > 0.
    pub i_printed: Condition,
    /// 4(m+1) - 5ap - p > 0.
    pub i_variant: Condition,
    /// z_* - z_+ > 0; needs a stable node.
    pub i_direct: Condition,

    /// Lower folded singularity classified as a stable node by its eigenvalues.
    pub node_by_eigenvalues: bool,
    /// Sharp mode with delta <= 0: funnel checks skipped.
    pub no_folded_node: bool,
    /// |discriminant| inside the boundary band; (h) not asserted.
    pub discriminant_boundary: bool,

    pub z_minus: f64,
    pub z_plus: f64,
    pub z_star: Option<f64>,
    pub mu_strong: Option<f64>,
}

pub fn check_conditions(pr: &DimensionlessParams, mode: Mode) -> ConditionReport {
    let (a, p, m, r) = (pr.a, pr.p, pr.m, pr.r);
    let d = delta(pr);
    let u = p * (a + 1.0);

    let cond_a = Condition { value: p, pass: p > 0.0 };
    let cond_b = Condition { value: a, pass: -1.0 < a && a < 1.0 };
    let cond_c = Condition::positive(d);
    let cond_d = Condition::positive(u * u - 6.0 * r * d);
    let cond_f = Condition::positive(u - 2.0);
    let cond_g = Condition::positive(4.0 * (a * p - m) - d);
    let delta_below_4 = Condition::positive(4.0 - d);

    let disc = discriminant_verdict(pr);
    let cond_h = Condition { value: disc.value, pass: disc.sign == DiscriminantSign::Negative };

    let e_printed = if d != 0.0 {
        Condition::negative(2.0 * u * u / d + 2.0 * p * a - 6.0 * (m + 1.0))
    } else {
        Condition::unavailable()
    };
    let i_printed = Condition::positive(4.0 * (m + 4.0) - 5.0 * a * p - p);
    let i_variant = Condition::positive(4.0 * (m + 1.0) - 5.0 * a * p - p);

    let node = lower_folded_singularity(pr);
    let node_by_eigenvalues = node.classification == FoldClass::StableNode;
    let zm = z_minus(pr);
    let zp = z_plus(pr);
    let no_folded_node = mode == Mode::Sharp && d <= 0.0;

    let (mu_strong, z_star) = match (node_by_eigenvalues && !no_folded_node, node.eigen_strong, node.slope_strong) {
        (true, Some(mu_s), Some(m_s)) => (Some(mu_s), Some(zm - m_s)),
        _ => (None, None),
    };
    let e_sharp = match mu_strong {
        Some(mu_s) => Condition::negative(12.0 * r + mu_s.abs() - 2.0 * p - 6.0 * (m + 1.0)),
        None => Condition::unavailable(),
    };
    let i_direct = match z_star {
        Some(zs) => Condition::positive(zs - zp),
        None => Condition::unavailable(),
    };

    let (cond_e, cond_i) = match mode {
        Mode::Strict => (e_printed, i_printed),
        Mode::Sharp => (e_sharp, i_direct),
    };

    ConditionReport {
        mode,
        delta: d,
        r_max: if d != 0.0 { u * u / (6.0 * d) } else { f64::INFINITY },
        cond_a,
        cond_b,
        cond_c,
        cond_d,
        cond_e,
        cond_f,
        cond_g,
        cond_h,
        cond_i,
        delta_below_4,
        e_printed,
        e_sharp,
        i_printed,
        i_variant,
        i_direct,
        node_by_eigenvalues,
        no_folded_node,
        discriminant_boundary: disc.sign == DiscriminantSign::Boundary,
        z_minus: zm,
        z_plus: zp,
        z_star,
        mu_strong,
    }
}

impl ConditionReport {
    /// The nine mode-dependent conditions in order (a)..(i).
    pub fn letters(&self) -> [(char, Condition); 9] {
        [
            ('a', self.cond_a),
            ('b', self.cond_b),
            ('c', self.cond_c),
            ('d', self.cond_d),
            ('e', self.cond_e),
            ('f', self.cond_f),
            ('g', self.cond_g),
            ('h', self.cond_h),
            ('i', self.cond_i),
        ]
    }

    pub fn verdict(&self, set: ConditionSet) -> bool {
        let required: &[char] = match set {
            ConditionSet::Full => &['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i'],
            ConditionSet::NoFunnel => &['a', 'b', 'c', 'd', 'g', 'h'],
        };
        let letters_ok = self.letters().iter().filter(|(c, _)| required.contains(c)).all(|(_, cond)| cond.pass);
        let extra_ok = match set {
            ConditionSet::Full => self.delta_below_4.pass,
            ConditionSet::NoFunnel => true,
        };
        let node_ok = self.mode == Mode::Strict || self.node_by_eigenvalues;
        letters_ok && extra_ok && node_ok
    }
}
