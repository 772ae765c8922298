#![allow(dead_code)]

use canard_scope::{DimensionlessParams, PhysicalParams};

/// Builds a physical parameter set whose cubic form scales onto `target`.
///
/// Q, the albedo limits, D, B1, B2, B5 and T_tilde are fixed; the remaining
/// physical constants are solved for from the scale definitions.
pub fn physical_for(target: &DimensionlessParams) -> PhysicalParams {
    let (q, am, an, d, b1, b2, b5, t_tilde): (f64, f64, f64, f64, f64, f64, f64, f64) =
        (342.0, 0.7, 0.3, 10.0, 0.05, 1.5, 0.05, 260.0);
    let span = q * (am - an);
    let lin = span - 2.0 * d * b2;
    let s0 = d * (lin / span).sqrt();
    let a0 = lin * s0 / (6.0 * d * b1);
    let big_k = -target.k * b1 * a0;
    PhysicalParams {
        c_p: target.epsilon * b1 * a0 / (b5 * s0),
        q,
        alpha_max: am,
        alpha_min: an,
        d,
        t_tilde,
        t_star: t_tilde + target.a * s0,
        b0: q * (1.0 - 0.5 * (am + an)) - b2 * t_tilde - big_k,
        b1,
        b2,
        b3: target.m * b5,
        b4: target.b * a0 / target.m,
        b5,
        b6: target.r * b5,
        p: target.p * a0 / (target.m * s0 * s0),
        l: target.lambda * b5 * a0,
    }
}

/// Number of distinct real roots of `c3 x^3 + c2 x^2 + c1 x + c0` from the
/// signs of the cubic at its critical points.
pub fn real_roots_by_critical_values(c: [f64; 4]) -> usize {
    let [c3, c2, c1, c0] = c;
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    // c'(x) = 3 c3 x^2 + 2 c2 x + c1
    let disc = 4.0 * c2 * c2 - 12.0 * c3 * c1;
    if disc <= 0.0 {
        return 1;
    }
    let sq = disc.sqrt();
    let x1 = (-2.0 * c2 - sq) / (6.0 * c3);
    let x2 = (-2.0 * c2 + sq) / (6.0 * c3);
    if eval(x1) * eval(x2) < 0.0 {
        3
    } else {
        1
    }
}
