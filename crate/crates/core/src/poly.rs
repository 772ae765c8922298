//! Closed-form real roots of polynomials up to degree three.
//!
//! Cubics go through the depressed form: trigonometric branch for three
//! real roots, Cardano for one, explicit formulas for the repeated-root
//! case. Simple roots get a Newton polish on the original coefficients.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub x: f64,
    pub multiplicity: u8,
}

impl RealRoot {
    fn simple(x: f64) -> Self {
        RealRoot { x, multiplicity: 1 }
    }
}

/// Relative band inside which the depressed-cubic discriminant counts as zero.
const REPEATED_ROOT_BAND: f64 = 1e-12;

/// Discriminant of `a x^3 + b x^2 + c x + d`.
///
/// Positive: three distinct real roots. Negative: one real root and a
/// complex pair. Zero: a repeated root.
pub fn cubic_discriminant(a: f64, b: f64, c: f64, d: f64) -> f64 {
    18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * a * c.powi(3) - 27.0 * a * a * d * d
}

pub fn eval_cubic(coeffs: [f64; 4], x: f64) -> f64 {
    let [a, b, c, d] = coeffs;
    ((a * x + b) * x + c) * x + d
}

fn eval_cubic_deriv(coeffs: [f64; 4], x: f64) -> f64 {
    let [a, b, c, _] = coeffs;
    (3.0 * a * x + 2.0 * b) * x + c
}

/// Real roots of `a x^3 + b x^2 + c x + d`, ascending, repeated roots merged.
///
/// Falls back to the quadratic or linear formula when leading coefficients
/// vanish. An identically zero polynomial yields no roots.
pub fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> Vec<RealRoot> {
    if a == 0.0 {
        return solve_quadratic(b, c, d);
    }
    let coeffs = [a, b, c, d];
    let (bn, cn, dn) = (b / a, c / a, d / a);
    let shift = bn / 3.0;
    let p = cn - bn * bn / 3.0;
    let q = 2.0 * bn.powi(3) / 27.0 - bn * cn / 3.0 + dn;

    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p.powi(3);
    let scale = half_q * half_q + third_p.abs().powi(3);

    let mut roots = if scale == 0.0 || disc.abs() <= REPEATED_ROOT_BAND * scale {
        if p.abs() <= f64::EPSILON * (1.0 + bn * bn) {
            vec![RealRoot { x: -shift, multiplicity: 3 }]
        } else {
            let simple = 3.0 * q / p - shift;
            let double = -1.5 * q / p - shift;
            vec![RealRoot::simple(simple), RealRoot { x: double, multiplicity: 2 }]
        }
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let w = if half_q >= 0.0 { -half_q - s } else { -half_q + s };
        let u = w.cbrt();
        let t = if u == 0.0 { 0.0 } else { u - third_p / u };
        vec![RealRoot::simple(t - shift)]
    } else {
        let radius = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos();
        (0..3).map(|k| RealRoot::simple(radius * (phi / 3.0 - 2.0 * PI * k as f64 / 3.0).cos() - shift)).collect()
    };

    for root in roots.iter_mut().filter(|r| r.multiplicity == 1) {
        root.x = newton_polish(coeffs, root.x);
    }
    roots.sort_by(|l, r| l.x.total_cmp(&r.x));
    roots
}

fn newton_polish(coeffs: [f64; 4], mut x: f64) -> f64 {
    for _ in 0..3 {
        let fx = eval_cubic(coeffs, x);
        let dfx = eval_cubic_deriv(coeffs, x);
        if fx == 0.0 || dfx == 0.0 {
            break;
        }
        let next = x - fx / dfx;
        if !next.is_finite() || eval_cubic(coeffs, next).abs() >= fx.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots of `a x^2 + b x + c`, ascending.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<RealRoot> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![RealRoot::simple(-c / b)];
    }
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc.abs() <= REPEATED_ROOT_BAND * scale {
        return vec![RealRoot { x: -b / (2.0 * a), multiplicity: 2 }];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    vec![RealRoot::simple(lo), RealRoot::simple(hi)]
}

/// Number of distinct real roots of the cubic, taken from the closed-form solver.
pub fn real_root_count(a: f64, b: f64, c: f64, d: f64) -> usize {
    solve_cubic(a, b, c, d).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn xs(roots: &[RealRoot]) -> Vec<f64> {
        roots.iter().map(|r| r.x).collect()
    }

    #[test]
    fn three_distinct_roots() {
        let r = solve_cubic(1.0, 0.0, -3.0, 0.0);
        let x = xs(&r);
        assert_eq!(x.len(), 3);
        assert_relative_eq!(x[0], -3f64.sqrt(), epsilon = 1e-14);
        assert!(x[1].abs() < 1e-14);
        assert_relative_eq!(x[2], 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn double_root_factorisations() {
        // (x+1)^2 (x-2) = x^3 - 3x - 2
        let r = solve_cubic(1.0, 0.0, -3.0, -2.0);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], RealRoot { x: -1.0, multiplicity: 2 });
        assert_eq!(r[1], RealRoot { x: 2.0, multiplicity: 1 });
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let r = solve_cubic(1.0, 0.0, -3.0, 2.0);
        assert_eq!(r[0], RealRoot { x: -2.0, multiplicity: 1 });
        assert_eq!(r[1], RealRoot { x: 1.0, multiplicity: 2 });
    }

    #[test]
    fn triple_root() {
        // (x-2)^3
        let r = solve_cubic(1.0, -6.0, 12.0, -8.0);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert_relative_eq!(r[0].x, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn one_real_root() {
        // x^3 - 3x^2 + 1.8x + 4.18
        let r = solve_cubic(1.0, -3.0, 1.8, 4.18);
        assert_eq!(r.len(), 1);
        assert!(eval_cubic([1.0, -3.0, 1.8, 4.18], r[0].x).abs() < 1e-13);
        assert!(cubic_discriminant(1.0, -3.0, 1.8, 4.18) < 0.0);
    }

    #[test]
    fn quadratic_fallbacks() {
        assert_eq!(xs(&solve_cubic(0.0, 1.0, -3.0, 2.0)), vec![1.0, 2.0]);
        assert!(solve_quadratic(1.0, 0.0, 1.0).is_empty());
        assert_eq!(xs(&solve_quadratic(0.0, 2.0, -1.0)), vec![0.5]);
        assert!(solve_quadratic(0.0, 0.0, 1.0).is_empty());
    }
}
