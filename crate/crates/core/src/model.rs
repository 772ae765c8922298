//! Model forms: the dimensional energy-balance/carbon system with tanh
//! albedo, its cubic approximation, and the dimensionless fast/slow system
//!
//! ```text
//! eps x' = y - h(x)
//!     y' = f(x) - m y - (lambda + y) + z
//!     z' = r (lambda + y - z)
//! ```
//!
//! with `h(x) = x^3 - 3x + k` and `f(x) = p (x - a)^2 - b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Dimensional constants. Temperatures are shifted by `T_tilde` before use.
///
/// `C_p` is expressed so that a flux in W m^-2 divided by `C_p` is a rate in
/// K/yr. `B6` is a rate (1/yr) and `P` carries PgC K^-2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    #[serde(rename = "C_p")]
    pub c_p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub alpha_max: f64,
    pub alpha_min: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "T_tilde")]
    pub t_tilde: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    #[serde(rename = "B1")]
    pub b1: f64,
    #[serde(rename = "B2")]
    pub b2: f64,
    #[serde(rename = "B3")]
    pub b3: f64,
    #[serde(rename = "B4")]
    pub b4: f64,
    #[serde(rename = "B5")]
    pub b5: f64,
    #[serde(rename = "B6")]
    pub b6: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessParams {
    pub k: f64,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub lambda: f64,
    pub r: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "A0")]
    pub a0: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    #[serde(rename = "t0")]
    pub t0: f64,
}

/// Output of [`PhysicalParams::nondimensionalize`]. `k_forcing` is the
/// constant `K` of the cubic model, kept so every model form uses the same value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nondimensionalization {
    pub params: DimensionlessParams,
    pub scales: Scales,
    pub k_forcing: f64,
}

impl State3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        State3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for State3 {
    fn from(v: [f64; 3]) -> Self {
        State3::new(v[0], v[1], v[2])
    }
}

impl From<State3> for [f64; 3] {
    fn from(s: State3) -> Self {
        [s.x, s.y, s.z]
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("C_p", self.c_p),
            ("Q", self.q),
            ("alpha_max", self.alpha_max),
            ("alpha_min", self.alpha_min),
            ("D", self.d),
            ("B1", self.b1),
            ("B2", self.b2),
            ("B3", self.b3),
            ("B4", self.b4),
            ("B5", self.b5),
            ("B6", self.b6),
            ("P", self.p),
            ("L", self.l),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        // B0 is the outgoing-flux offset at 0 K and is usually negative.
        for (name, v) in [("T_tilde", self.t_tilde), ("T_star", self.t_star), ("B0", self.b0)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.alpha_min < self.alpha_max && self.alpha_max <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need alpha_min < alpha_max <= 1, got alpha_min = {}, alpha_max = {}",
                self.alpha_min, self.alpha_max
            )));
        }
        Ok(())
    }

    fn albedo_span(&self) -> f64 {
        self.q * (self.alpha_max - self.alpha_min)
    }

    /// Planetary albedo at shifted temperature `s = T - T_tilde`.
    pub fn albedo(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::Domain(format!("albedo of non-finite temperature {s}")));
        }
        if !(self.d > 0.0) {
            return Err(Error::Domain(format!("albedo width D must be > 0, got {}", self.d)));
        }
        Ok(self.albedo_unchecked(s))
    }

    fn albedo_unchecked(&self, s: f64) -> f64 {
        let mid = 0.5 * (self.alpha_max + self.alpha_min);
        let half = 0.5 * (self.alpha_max - self.alpha_min);
        mid - half * (s / self.d).tanh()
    }

    /// `K = Q(1 - (aM + am)/2) - (B0 + B2 T_tilde)`.
    pub fn k_forcing(&self) -> f64 {
        self.q * (1.0 - 0.5 * (self.alpha_max + self.alpha_min)) - (self.b0 + self.b2 * self.t_tilde)
    }

    pub fn s_star(&self) -> f64 {
        self.t_star - self.t_tilde
    }

    /// Land and ocean carbon rates shared by both dimensional forms.
    fn carbon_rates(&self, s: f64, a: f64, h: f64) -> (f64, f64) {
        let ocean = self.l + self.b5 * a - self.b6 * h;
        let ds = s - self.s_star();
        let land = self.b3 * (self.p * ds * ds - self.b4 - a);
        (land - ocean, ocean)
    }

    /// Right-hand side in (S, A, H), time in years, tanh albedo.
    pub fn vf_tanh(&self, state: [f64; 3]) -> [f64; 3] {
        let [s, a, h] = state;
        let absorbed = self.q * (1.0 - self.albedo_unchecked(s));
        let outgoing = self.b0 + self.b2 * self.t_tilde - self.b1 * a + self.b2 * s;
        let (da, dh) = self.carbon_rates(s, a, h);
        [(absorbed - outgoing) / self.c_p, da, dh]
    }

    /// Right-hand side with the albedo term replaced by its cubic Taylor polynomial.
    pub fn vf_cubic(&self, state: [f64; 3]) -> [f64; 3] {
        let [s, a, h] = state;
        let span = self.albedo_span();
        let d = self.d;
        let ds =
            self.b1 * a - span / (6.0 * d.powi(3)) * s.powi(3) + (span / (2.0 * d) - self.b2) * s + self.k_forcing();
        let (da, dh) = self.carbon_rates(s, a, h);
        [ds / self.c_p, da, dh]
    }

    /// Scales and dimensionless parameters that turn [`Self::vf_cubic`]
    /// exactly into [`DimensionlessParams::vf_full`].
    pub fn nondimensionalize(&self) -> Result<Nondimensionalization> {
        self.validate()?;
        let span = self.albedo_span();
        let linear = span - 2.0 * self.d * self.b2;
        if !(linear > 0.0) {
            return Err(Error::NoRealScaling(format!("Q(alpha_max - alpha_min) - 2 D B2 = {linear} must be > 0")));
        }
        let s0 = self.d * (linear / span).sqrt();
        let a0 = linear * s0 / (6.0 * self.d * self.b1);
        let h0 = self.b5 * a0 / self.b6;
        let t0 = 1.0 / self.b5;
        let k_forcing = self.k_forcing();
        let params = DimensionlessParams {
            k: -k_forcing / (self.b1 * a0),
            p: self.b3 * self.p * s0 * s0 / (self.b5 * a0),
            a: self.s_star() / s0,
            b: self.b3 * self.b4 / (self.b5 * a0),
            m: self.b3 / self.b5,
            lambda: self.l / (self.b5 * a0),
            r: self.b6 / self.b5,
            epsilon: self.b5 * self.c_p * s0 / (self.b1 * a0),
        };
        Ok(Nondimensionalization { params, scales: Scales { s0, a0, h0, t0 }, k_forcing })
    }
}

impl Scales {
    pub fn to_dimensionless(&self, sah: [f64; 3]) -> State3 {
        State3::new(sah[0] / self.s0, sah[1] / self.a0, sah[2] / self.h0)
    }

    pub fn to_physical(&self, state: State3) -> [f64; 3] {
        [state.x * self.s0, state.y * self.a0, state.z * self.h0]
    }
}

impl DimensionlessParams {
    /// Mixed-mode reference set with epsilon = 0.1 (a = 0.8, p = 3, b = 2.1, k = 4).
    pub const P1: DimensionlessParams =
        DimensionlessParams { k: 4.0, p: 3.0, a: 0.8, b: 2.1, m: 1.0, lambda: 1.0, r: 1.0, epsilon: 0.1 };

    /// Parameter set satisfying the analytic MMO conditions, epsilon = 0.001.
    pub const P2: DimensionlessParams =
        DimensionlessParams { k: 2.2, p: 1.05, a: 0.91, b: 0.31, m: 0.6, lambda: 1.0, r: 0.3, epsilon: 0.001 };

    /// Three-timescale variant of P1 (r = 0.05, b = 2).
    pub const THREE_TIMESCALE: DimensionlessParams =
        DimensionlessParams { k: 4.0, p: 3.0, a: 0.8, b: 2.0, m: 1.0, lambda: 1.0, r: 0.05, epsilon: 0.1 };

    /// Checks the type invariants used at input boundaries.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k", self.k),
            ("p", self.p),
            ("a", self.a),
            ("b", self.b),
            ("m", self.m),
            ("lambda", self.lambda),
            ("r", self.r),
            ("epsilon", self.epsilon),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParams(format!("r must be > 0, got {}", self.r)));
        }
        Ok(())
    }

    pub fn h(&self, x: f64) -> f64 {
        x * x * x - 3.0 * x + self.k
    }

    pub fn h_prime(&self, x: f64) -> f64 {
        3.0 * x * x - 3.0
    }

    pub fn h_second(&self, x: f64) -> f64 {
        6.0 * x
    }

    pub fn f(&self, x: f64) -> f64 {
        let u = x - self.a;
        self.p * u * u - self.b
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        2.0 * self.p * (x - self.a)
    }

    /// `F(x, y) = y - h(x)`; the critical manifold is its zero set.
    pub fn fast_residual(&self, x: f64, y: f64) -> f64 {
        y - self.h(x)
    }

    /// Full vector field in slow time.
    pub fn vf_full(&self, state: State3) -> Result<State3> {
        if self.epsilon == 0.0 {
            return Err(Error::SingularLimit);
        }
        Ok(State3::from(self.vf_full_array([state.x, state.y, state.z])))
    }

    /// Array form of [`Self::vf_full`] for the integrator; epsilon must be nonzero.
    pub fn vf_full_array(&self, u: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = u;
        [
            self.fast_residual(x, y) / self.epsilon,
            self.f(x) - self.m * y - (self.lambda + y) + z,
            self.r * (self.lambda + y - z),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Fold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub stability: Stability,
    pub multiplicity: u8,
}

/// Band around |x| = 1 inside which a root is tagged as a fold.
const FOLD_BAND: f64 = 1e-9;

/// Layer-problem equilibria for frozen `y`: roots of `x^3 - 3x + k - y`.
pub fn energy_balance_equilibria(y: f64, k: f64) -> Vec<Equilibrium> {
    poly::solve_cubic(1.0, 0.0, -3.0, k - y)
        .into_iter()
        .map(|root| {
            let ax = root.x.abs();
            let stability = if (ax - 1.0).abs() <= FOLD_BAND {
                Stability::Fold
            } else if ax > 1.0 {
                Stability::Attracting
            } else {
                Stability::Repelling
            };
            Equilibrium { x: root.x, stability, multiplicity: root.multiplicity }
        })
        .collect()
}
