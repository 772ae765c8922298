//! Adaptive Dormand-Prince 5(4) integration with fourth-order dense output
//! and directional event location.
//!
//! The state is a fixed-size array so the same integrator drives the 3D
//! full system, the 2D desingularized flow, and scalar test problems.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DimensionlessParams, State3};

/// Right-hand side `y' = f(t, y)`.
pub trait VectorField<const N: usize> {
    fn eval(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> VectorField<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn eval(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    DormandPrince54,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when absent.
    #[serde(default)]
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    #[serde(default)]
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_max: 0.1,
            max_steps: 5_000_000,
            method: Method::DormandPrince54,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegratorConfig { rtol, atol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Config(format!("tolerances must be > 0 (rtol = {}, atol = {})", self.rtol, self.atol)));
        }
        if !(self.h_max > 0.0) {
            return Err(Error::Config(format!("h_max must be > 0, got {}", self.h_max)));
        }
        if let Some(h) = self.h_init {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("h_init must be finite and > 0, got {h}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Accepted points of an integration. `derivs` holds the vector field at
/// each point and feeds the Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub derivs: Vec<[f64; N]>,
    /// Continuous-extension term for the step ending at each point after the
    /// first. Missing entries fall back to cubic Hermite.
    pub dense: Vec<[f64; N]>,
    pub step_stats: StepStats,
    /// Set when `max_steps` ran out before the end of the time span.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Rising,
    Falling,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    /// State component index (0 = x, 1 = y or z in 2D, 2 = z in 3D).
    pub component: usize,
    pub threshold: f64,
    pub direction: Direction,
    pub terminal: bool,
}

impl EventSpec {
    pub fn new(component: usize, threshold: f64, direction: Direction, terminal: bool) -> Self {
        EventSpec { component, threshold, direction, terminal }
    }

    fn triggers(&self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self.direction {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Both => rising || falling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord<const N: usize> {
    /// Index into the event list passed to the integrator.
    pub event: usize,
    pub t: f64,
    pub state: [f64; N],
}

/// Event location stops once the component is this close to the threshold.
pub const EVENT_TOLERANCE: f64 = 1e-10;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Fourth-order continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct StepResult<const N: usize> {
    y_new: [f64; N],
    f_new: [f64; N],
    err: f64,
    /// `h * sum(d_i k_i)` for the continuous extension.
    dense: [f64; N],
}

fn dp_step<const N: usize, F: VectorField<N>>(
    field: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    cfg: &IntegratorConfig,
) -> Option<StepResult<N>> {
    let k2 = field.eval(t + C2 * h, &combine(y, h, &[(A21, k1)]));
    let k3 = field.eval(t + C3 * h, &combine(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = field.eval(t + C4 * h, &combine(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = field.eval(t + C5 * h, &combine(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = field.eval(t + h, &combine(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = combine(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    if !all_finite(&y_new) {
        return None;
    }
    let k7 = field.eval(t + h, &y_new);
    if !all_finite(&k7) {
        return None;
    }
    let mut err: f64 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
        err = err.max(e.abs() / sc);
    }
    let dense =
        std::array::from_fn(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
    Some(StepResult { y_new, f_new: k7, err, dense })
}

fn initial_step<const N: usize, F: VectorField<N>>(
    field: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    cfg: &IntegratorConfig,
) -> f64 {
    let rms = |v: &[f64; N]| {
        let s: f64 = v
            .iter()
            .zip(y0)
            .map(|(a, y)| {
                let w = a / (cfg.atol + cfg.rtol * y.abs());
                w * w
            })
            .sum();
        (s / N as f64).sqrt()
    };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = combine(y0, h0, &[(1.0, f0)]);
    let f1 = field.eval(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| (f1[i] - f0[i]) / h0);
    let d2 = rms(&diff);
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(1.0 / 5.0) };
    let h = (100.0 * h0).min(h1);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6
    }
}

/// Fourth-order dense output of one accepted step.
struct DenseStep<'a, const N: usize> {
    t0: f64,
    h: f64,
    y0: &'a [f64; N],
    f0: &'a [f64; N],
    y1: &'a [f64; N],
    f1: &'a [f64; N],
    dense: [f64; N],
}

impl<const N: usize> DenseStep<'_, N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        std::array::from_fn(|i| {
            let diff = self.y1[i] - self.y0[i];
            let bspl = self.h * self.f0[i] - diff;
            let r4 = diff - self.h * self.f1[i] - bspl;
            self.y0[i] + s * (diff + s1 * (bspl + s * (r4 + s1 * self.dense[i])))
        })
    }
}

/// Integrates `field` from `initial` over `t_span` (forward only).
pub fn integrate<const N: usize, F: VectorField<N>>(
    field: &F,
    initial: [f64; N],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>> {
    integrate_with_events(field, initial, t_span, cfg, &[]).map(|(traj, _)| traj)
}

/// Full three-dimensional system over `[0, t_end]`.
pub fn simulate(
    pr: &DimensionlessParams,
    initial: State3,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<3>> {
    if pr.epsilon == 0.0 {
        return Err(Error::SingularLimit);
    }
    pr.validate()?;
    let field = |_t: f64, u: &[f64; 3]| pr.vf_full_array(*u);
    integrate(&field, initial.into(), (0.0, t_end), cfg)
}

/// Like [`integrate`], additionally locating threshold crossings of state
/// components. Terminal events end the trajectory at the event point.
pub fn integrate_with_events<const N: usize, F: VectorField<N>>(
    field: &F,
    initial: [f64; N],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    events: &[EventSpec],
) -> Result<(Trajectory<N>, Vec<EventRecord<N>>)> {
    cfg.validate()?;
    let (t0, t_end) = t_span;
    if !(t0.is_finite() && t_end.is_finite() && t_end > t0) {
        return Err(Error::Config(format!("time span must be finite and increasing, got {t_span:?}")));
    }
    if !all_finite(&initial) {
        return Err(Error::NonFinite { t: t0, state: initial.to_vec() });
    }
    for ev in events {
        if ev.component >= N || !ev.threshold.is_finite() {
            return Err(Error::Config(format!("invalid event {ev:?} for a {N}-dimensional state")));
        }
    }

    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = initial;
    let mut f = field.eval(t, &y);
    stats.evaluations += 1;
    if !all_finite(&f) {
        return Err(Error::NonFinite { t, state: y.to_vec() });
    }

    let mut traj = Trajectory {
        times: vec![t],
        states: vec![y],
        derivs: vec![f],
        dense: Vec::new(),
        step_stats: stats,
        truncated: false,
    };
    let mut log = Vec::new();

    let mut h = match cfg.h_init {
        Some(h) => h,
        None => {
            stats.evaluations += 1;
            initial_step(field, t, &y, &f, cfg)
        }
    }
    .min(cfg.h_max);
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted >= cfg.max_steps {
            traj.truncated = true;
            break;
        }
        let mut h_try = h.min(cfg.h_max);
        let hits_end = t + h_try >= t_end;
        if hits_end {
            h_try = t_end - t;
        }
        if h_try <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h: h_try });
        }

        stats.evaluations += 6;
        let Some(step) = dp_step(field, t, &y, &f, h_try, cfg) else {
            stats.rejected += 1;
            h = 0.25 * h_try;
            last_rejected = true;
            continue;
        };

        if step.err > 1.0 {
            stats.rejected += 1;
            let factor = (SAFETY * step.err.powf(-0.2)).max(MIN_FACTOR);
            h = h_try * factor;
            last_rejected = true;
            continue;
        }

        stats.accepted += 1;
        let t_new = if hits_end { t_end } else { t + h_try };
        let mut factor =
            if step.err == 0.0 { MAX_FACTOR } else { (SAFETY * step.err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
        if last_rejected {
            factor = factor.min(1.0);
        }
        last_rejected = false;
        h = h_try * factor;

        let mut terminal_at = None;
        if !events.is_empty() {
            let seg =
                DenseStep { t0: t, h: t_new - t, y0: &y, f0: &f, y1: &step.y_new, f1: &step.f_new, dense: step.dense };
            let mut found = locate_events(events, &seg, t_new);
            found.sort_by(|a, b| a.t.total_cmp(&b.t));
            for rec in found {
                let is_terminal = events[rec.event].terminal;
                log.push(rec);
                if is_terminal {
                    terminal_at = Some(rec);
                    break;
                }
            }
        }

        if let Some(rec) = terminal_at {
            let f_ev = field.eval(rec.t, &rec.state);
            stats.evaluations += 1;
            traj.times.push(rec.t);
            traj.states.push(rec.state);
            traj.derivs.push(f_ev);
            traj.dense.push([0.0; N]);
            break;
        }

        t = t_new;
        y = step.y_new;
        f = step.f_new;
        traj.times.push(t);
        traj.states.push(y);
        traj.derivs.push(f);
        traj.dense.push(step.dense);
    }

    traj.step_stats = stats;
    Ok((traj, log))
}

fn locate_events<const N: usize>(events: &[EventSpec], seg: &DenseStep<'_, N>, tb: f64) -> Vec<EventRecord<N>> {
    let (ta, ya, yb) = (seg.t0, seg.y0, seg.y1);
    let mut out = Vec::new();
    for (idx, ev) in events.iter().enumerate() {
        let c = ev.component;
        let ga = ya[c] - ev.threshold;
        let gb = yb[c] - ev.threshold;
        if !ev.triggers(ga, gb) {
            continue;
        }
        let g = |t: f64| seg.eval(t)[c] - ev.threshold;
        let (mut lo, mut hi) = (ta, tb);
        let mut t_ev = tb;
        if gb.abs() >= EVENT_TOLERANCE {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    t_ev = hi;
                    break;
                }
                let gm = g(mid);
                if gm.abs() < EVENT_TOLERANCE {
                    t_ev = mid;
                    break;
                }
                if gm.signum() == ga.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                t_ev = hi;
            }
        }
        let state = if t_ev == tb { *yb } else { seg.eval(t_ev) };
        out.push(EventRecord { event: idx, t: t_ev, state });
    }
    out
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    pub fn last_state(&self) -> [f64; N] {
        *self.states.last().expect("trajectory has at least one point")
    }

    /// Dense output at `t`, clamped to the covered interval.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.states[0];
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1];
        }
        let i = self.times.partition_point(|&ti| ti <= t) - 1;
        self.step(i).eval(t)
    }

    fn step(&self, i: usize) -> DenseStep<'_, N> {
        DenseStep {
            t0: self.times[i],
            h: self.times[i + 1] - self.times[i],
            y0: &self.states[i],
            f0: &self.derivs[i],
            y1: &self.states[i + 1],
            f1: &self.derivs[i + 1],
            dense: self.dense.get(i).copied().unwrap_or([0.0; N]),
        }
    }

    /// Uniform resampling with spacing `dt` through the dense output.
    pub fn resample(&self, dt: f64) -> Vec<(f64, [f64; N])> {
        assert!(dt > 0.0, "resample spacing must be positive");
        let (a, b) = (self.t_start(), self.t_end());
        let n = ((b - a) / dt).floor() as usize;
        (0..=n)
            .map(|i| {
                let t = a + i as f64 * dt;
                (t, self.interpolate(t))
            })
            .collect()
    }

    /// Component `c` of every stored state.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[c]).collect()
    }

    /// CSV with header `t,<names...>`, one row per stored point.
    pub fn write_csv<W: Write>(&self, out: W, names: [&str; N]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(names.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![fmt_f64(*t)];
            row.extend(s.iter().map(|v| fmt_f64(*v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest representation that round-trips, '.' decimal separator.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// JSON sidecar written next to a trajectory CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySidecar {
    pub config: IntegratorConfig,
    pub step_stats: StepStats,
    pub truncated: bool,
    pub points: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn sidecar(&self, config: &IntegratorConfig) -> TrajectorySidecar {
        TrajectorySidecar {
            config: *config,
            step_stats: self.step_stats,
            truncated: self.truncated,
            points: self.len(),
        }
    }
}

/// Times of successive crossings of `threshold` by component `c`, read off
/// the dense output between stored points.
pub fn crossing_times<const N: usize>(
    traj: &Trajectory<N>,
    c: usize,
    threshold: f64,
    direction: Direction,
) -> Vec<f64> {
    let spec = EventSpec::new(c, threshold, direction, false);
    (1..traj.len())
        .flat_map(|i| locate_events(std::slice::from_ref(&spec), &traj.step(i - 1), traj.times[i]))
        .map(|r| r.t)
        .collect()
}

/// Mean spacing of rising crossings of `threshold` by component `c` after `t_from`.
pub fn mean_period<const N: usize>(traj: &Trajectory<N>, c: usize, threshold: f64, t_from: f64) -> Option<f64> {
    let times: Vec<f64> =
        crossing_times(traj, c, threshold, Direction::Rising).into_iter().filter(|&t| t >= t_from).collect();
    if times.len() < 2 {
        return None;
    }
    Some((times[times.len() - 1] - times[0]) / (times.len() - 1) as f64)
}
