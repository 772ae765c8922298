//! Mixed-mode oscillation signatures from sampled x(t).
//!
//! An oscillation is a local maximum of x together with the lowest x since
//! the previous maximum. It is large (LAO) when it spans both folds
//! (`x_max > 1` and `x_min < -1`) and small (SAO) otherwise. A block `L^s`
//! is a run of L large oscillations followed by s small ones.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::Trajectory;

/// Minimum excursion that confirms a turning point.
pub const HYSTERESIS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscKind {
    Large,
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub t_peak: f64,
    pub x_max: f64,
    pub x_min_before: f64,
    pub kind: OscKind,
}

pub fn classify(x_max: f64, x_min_before: f64) -> OscKind {
    if x_max > 1.0 && x_min_before < -1.0 {
        OscKind::Large
    } else {
        OscKind::Small
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub large: u32,
    pub small: u32,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.large, self.small)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmoSignature {
    /// Complete blocks in time order.
    pub blocks: Vec<Block>,
    /// Minimal repeating cycle, rotated to its smallest form; empty when
    /// the block sequence does not repeat.
    pub cycle: Vec<Block>,
    pub periodic: bool,
    /// Leading blocks that precede the repeating part.
    pub transient_blocks: usize,
    /// `cycle` (or all blocks when aperiodic) joined with spaces, e.g. `1^2`.
    pub canonical: String,
    pub oscillations: Vec<Oscillation>,
}

/// Turning points of `xs` with the given hysteresis, starting at `t_from`.
fn oscillations(times: &[f64], xs: &[f64], t_from: f64) -> Vec<Oscillation> {
    #[derive(Clone, Copy)]
    enum Phase {
        Unknown,
        Rising,
        Falling,
    }
    let mut out = Vec::new();
    let start = times.partition_point(|&t| t < t_from);
    let (times, xs) = (&times[start..], &xs[start..]);
    let Some(&x0) = xs.first() else { return out };

    let mut phase = Phase::Unknown;
    let (mut hi, mut t_hi) = (x0, times[0]);
    let mut lo = x0;
    // lowest x since the last confirmed maximum (or the window start)
    let mut trough = x0;
    for (&t, &x) in times.iter().zip(xs) {
        match phase {
            Phase::Unknown => {
                if x > hi {
                    hi = x;
                    t_hi = t;
                }
                lo = lo.min(x);
                trough = lo;
                if x > lo + HYSTERESIS {
                    phase = Phase::Rising;
                } else if x < hi - HYSTERESIS {
                    phase = Phase::Falling;
                    lo = x;
                }
            }
            Phase::Rising => {
                if x > hi {
                    hi = x;
                    t_hi = t;
                } else if x < hi - HYSTERESIS {
                    out.push(Oscillation { t_peak: t_hi, x_max: hi, x_min_before: trough, kind: classify(hi, trough) });
                    phase = Phase::Falling;
                    lo = x;
                    trough = x;
                }
            }
            Phase::Falling => {
                if x < lo {
                    lo = x;
                    trough = trough.min(x);
                } else if x > lo + HYSTERESIS {
                    phase = Phase::Rising;
                    hi = x;
                    t_hi = t;
                }
            }
        }
    }
    out
}

fn blocks_from_kinds(kinds: &[OscKind]) -> (Vec<Block>, usize) {
    let first = kinds.iter().position(|k| *k == OscKind::Large);
    let Some(first) = first else { return (Vec::new(), kinds.len()) };
    let tail = &kinds[first..];
    if !tail.contains(&OscKind::Small) {
        // pure relaxation: one block per LAO
        return (vec![Block { large: 1, small: 0 }; tail.len() - 1], first);
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut prev = OscKind::Small;
    for &k in tail {
        match (prev, k) {
            (OscKind::Small, OscKind::Large) => blocks.push(Block { large: 1, small: 0 }),
            (OscKind::Large, OscKind::Large) => blocks.last_mut().unwrap().large += 1,
            (_, OscKind::Small) => blocks.last_mut().unwrap().small += 1,
        }
        prev = k;
    }
    // The last block may have been cut off by the end of the window.
    blocks.pop();
    (blocks, first)
}

/// Shortest q with `blocks[i] == blocks[i + q]` and at least two repeats.
fn minimal_period(blocks: &[Block]) -> Option<usize> {
    let n = blocks.len();
    (1..=n / 2).find(|&q| (0..n - q).all(|i| blocks[i] == blocks[i + q]))
}

/// Smallest prefix to skip (at most a quarter of the blocks) after which
/// the sequence repeats, with the period found there.
fn eventual_period(blocks: &[Block]) -> Option<(usize, usize)> {
    (0..=blocks.len() / 4).find_map(|d| minimal_period(&blocks[d..]).map(|q| (d, q)))
}

fn least_rotation(cycle: &[Block]) -> Vec<Block> {
    (0..cycle.len())
        .map(|r| {
            let mut v = cycle.to_vec();
            v.rotate_left(r);
            v
        })
        .min()
        .unwrap_or_default()
}

fn join(blocks: &[Block]) -> String {
    blocks.iter().map(Block::to_string).collect::<Vec<_>>().join(" ")
}

/// Signature of an oscillation sequence. Without any LAO the result is
/// `0^s` with s the SAO count, and is never periodic.
pub fn signature_from_oscillations(osc: Vec<Oscillation>) -> MmoSignature {
    let kinds: Vec<OscKind> = osc.iter().map(|o| o.kind).collect();
    let (blocks, _) = blocks_from_kinds(&kinds);
    if !kinds.contains(&OscKind::Large) {
        return MmoSignature {
            blocks: Vec::new(),
            cycle: Vec::new(),
            periodic: false,
            transient_blocks: 0,
            canonical: format!("0^{}", kinds.len()),
            oscillations: osc,
        };
    }
    let (cycle, periodic, transient_blocks) = match eventual_period(&blocks) {
        Some((d, q)) => (least_rotation(&blocks[d..d + q]), true, d),
        None => (Vec::new(), false, 0),
    };
    let canonical = if periodic { join(&cycle) } else { join(&blocks) };
    MmoSignature { blocks, cycle, periodic, transient_blocks, canonical, oscillations: osc }
}

/// Signature of x(t) sampled at `times`, ignoring the first
/// `transient_fraction` of the time span.
pub fn signature_from_series(times: &[f64], xs: &[f64], transient_fraction: f64) -> Result<MmoSignature> {
    if times.len() != xs.len() {
        return Err(Error::Domain(format!("{} times but {} samples", times.len(), xs.len())));
    }
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(Error::Domain(format!("transient fraction must lie in [0, 1), got {transient_fraction}")));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("samples must be finite with strictly increasing times".into()));
    }
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return Err(Error::NoOscillation("empty series".into()));
    };
    let t_from = t0 + transient_fraction * (t1 - t0);
    let osc = oscillations(times, xs, t_from);
    if osc.len() < 2 {
        return Err(Error::NoOscillation(format!(
            "{} maxima after t = {t_from}; trajectory may have settled to an equilibrium",
            osc.len()
        )));
    }
    Ok(signature_from_oscillations(osc))
}

/// Signature of the x component of a full-system trajectory.
pub fn signature(traj: &Trajectory<3>, transient_fraction: f64) -> Result<MmoSignature> {
    signature_from_series(&traj.times, &traj.component(0), transient_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Piecewise-linear signal through the given extrema, sampled finely.
    fn through(extrema: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut ts = Vec::new();
        let mut xs = Vec::new();
        let mut t = 0.0;
        for w in extrema.windows(2) {
            for i in 0..20 {
                let s = i as f64 / 20.0;
                ts.push(t + s);
                xs.push(w[0] + s * (w[1] - w[0]));
            }
            t += 1.0;
        }
        ts.push(t);
        xs.push(*extrema.last().unwrap());
        (ts, xs)
    }

    /// Extrema for `reps` repetitions of the given block pattern.
    fn pattern(blocks: &[(u32, u32)], reps: usize) -> Vec<f64> {
        let mut e = vec![-0.5];
        for _ in 0..reps {
            for &(l, s) in blocks {
                for _ in 0..l {
                    e.extend([-1.8, 2.0]);
                }
                for _ in 0..s {
                    e.extend([-1.2, -0.8]);
                }
            }
        }
        e.extend([-1.8, 2.0, -1.8]);
        e
    }

    #[test]
    fn one_large_two_small() {
        let (t, x) = through(&pattern(&[(1, 2)], 6));
        let sig = signature_from_series(&t, &x, 0.0).unwrap();
        assert!(sig.periodic);
        assert_eq!(sig.canonical, "1^2");
        assert_eq!(sig.cycle, vec![Block { large: 1, small: 2 }]);
    }

    #[test]
    fn composite_cycle_is_rotated() {
        let (t, x) = through(&pattern(&[(2, 3), (1, 1)], 5));
        let sig = signature_from_series(&t, &x, 0.0).unwrap();
        assert!(sig.periodic);
        assert_eq!(sig.canonical, "1^1 2^3");
    }

    #[test]
    fn relaxation_only() {
        let (t, x) = through(&pattern(&[(1, 0)], 5));
        assert_eq!(signature_from_series(&t, &x, 0.0).unwrap().canonical, "1^0");
    }

    #[test]
    fn no_large_oscillation() {
        let e: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { -1.1 } else { -0.9 }).collect();
        let (t, x) = through(&e);
        let sig = signature_from_series(&t, &x, 0.0).unwrap();
        assert!(!sig.periodic);
        assert!(sig.canonical.starts_with("0^"));
    }

    #[test]
    fn equilibrium_has_no_signature() {
        let t: Vec<f64> = (0..100).map(f64::from).collect();
        let x = vec![0.3; 100];
        assert!(matches!(signature_from_series(&t, &x, 0.5), Err(Error::NoOscillation(_))));
    }

    #[test]
    fn transient_block_is_skipped() {
        let mut e = pattern(&[(1, 5)], 1);
        e.truncate(e.len() - 3);
        e.extend(pattern(&[(2, 1)], 6).into_iter().skip(1));
        let (t, x) = through(&e);
        let sig = signature_from_series(&t, &x, 0.0).unwrap();
        assert!(sig.periodic);
        assert_eq!(sig.transient_blocks, 1);
        assert_eq!(sig.canonical, "2^1");
    }

    #[test]
    fn aperiodic_sequence() {
        let mut e = pattern(&[(1, 1)], 2);
        e.extend(pattern(&[(1, 3)], 1));
        e.extend(pattern(&[(2, 0)], 1));
        let (t, x) = through(&e);
        let sig = signature_from_series(&t, &x, 0.0).unwrap();
        assert!(!sig.periodic);
        assert!(sig.cycle.is_empty());
    }

    #[test]
    fn lao_requires_both_folds() {
        assert_eq!(classify(1.5, -1.5), OscKind::Large);
        assert_eq!(classify(0.9, -1.5), OscKind::Small);
        assert_eq!(classify(1.5, -0.9), OscKind::Small);
    }

    #[test]
    fn bad_input() {
        assert!(signature_from_series(&[0.0, 1.0], &[0.0], 0.0).is_err());
        assert!(signature_from_series(&[0.0, 0.0], &[0.0, 1.0], 0.0).is_err());
        assert!(signature_from_series(&[0.0, 1.0], &[0.0, 1.0], 1.0).is_err());
    }

    fn block_strategy() -> impl Strategy<Value = Vec<(u32, u32)>> {
        prop::collection::vec((1u32..4, 1u32..5), 1..4)
    }

    proptest! {
        #[test]
        fn rotation_invariant(cycle in block_strategy(), shift in 0usize..4) {
            let (t, x) = through(&pattern(&cycle, 5));
            let base = signature_from_series(&t, &x, 0.0).unwrap();
            let mut rotated = cycle.clone();
            rotated.rotate_left(shift % cycle.len());
            let (t, x) = through(&pattern(&rotated, 5));
            let other = signature_from_series(&t, &x, 0.0).unwrap();
            prop_assert!(base.periodic && other.periodic);
            prop_assert_eq!(base.canonical, other.canonical);
        }

        #[test]
        fn repetition_count_irrelevant(cycle in block_strategy(), reps in 3usize..7) {
            let (t, x) = through(&pattern(&cycle, reps));
            let a = signature_from_series(&t, &x, 0.0).unwrap();
            let (t, x) = through(&pattern(&cycle, reps + 2));
            let b = signature_from_series(&t, &x, 0.0).unwrap();
            prop_assert_eq!(a.cycle, b.cycle);
        }

        #[test]
        fn cycle_divides_input(cycle in block_strategy()) {
            let (t, x) = through(&pattern(&cycle, 4));
            let sig = signature_from_series(&t, &x, 0.0).unwrap();
            prop_assert_eq!(cycle.len() % sig.cycle.len(), 0);
            let l: u32 = cycle.iter().map(|b| b.0).sum();
            let s: u32 = cycle.iter().map(|b| b.1).sum();
            let k = (cycle.len() / sig.cycle.len()) as u32;
            prop_assert_eq!(sig.cycle.iter().map(|b| b.large).sum::<u32>() * k, l);
            prop_assert_eq!(sig.cycle.iter().map(|b| b.small).sum::<u32>() * k, s);
        }
    }
}
