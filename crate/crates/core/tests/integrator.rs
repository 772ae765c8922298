use canard_scope::signature::{signature, signature_from_series, OscKind};
use canard_scope::simulate::{integrate, mean_period, simulate, IntegratorConfig};
use canard_scope::{DimensionlessParams, Error, State3};

fn decay_error(rtol: f64) -> (f64, usize) {
    let field = |_t: f64, y: &[f64; 1]| [-y[0]];
    let cfg = IntegratorConfig { rtol, atol: rtol * 1e-3, h_max: 10.0, ..Default::default() };
    let traj = integrate(&field, [1.0], (0.0, 5.0), &cfg).unwrap();
    ((traj.last_state()[0] - (-5.0f64).exp()).abs(), traj.step_stats.accepted)
}

#[test]
fn convergence_order_at_least_four() {
    // error ~ C h^q and steps ~ 1/h, so log(error) vs log(steps) has slope -q
    let pts: Vec<(f64, f64)> = [1e-5, 1e-6, 1e-7, 1e-8, 1e-9]
        .iter()
        .map(|&tol| {
            let (err, steps) = decay_error(tol);
            ((steps as f64).ln(), err.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let order = -sxy / sxx;
    assert!(order >= 4.0, "observed order {order}");
}

#[test]
fn halving_rtol_bounds_step_growth() {
    let pr = DimensionlessParams::P1;
    let mut prev = None;
    for rtol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
        let cfg = IntegratorConfig { rtol, atol: rtol * 1e-2, h_max: 0.05, ..Default::default() };
        let n = simulate(&pr, State3::new(0.0, 0.0, 0.0), 20.0, &cfg).unwrap().step_stats.accepted;
        if let Some(p) = prev {
            assert!((n as f64) < 1.5 * p as f64, "{p} -> {n} steps");
        }
        prev = Some(n);
    }
}

#[test]
fn p1_period_stable_across_tolerances() {
    let pr = DimensionlessParams::P1;
    let period = |rtol: f64| {
        let cfg = IntegratorConfig { rtol, atol: rtol * 1e-2, h_max: 0.01, ..Default::default() };
        let traj = simulate(&pr, State3::new(0.0, 0.0, 0.0), 200.0, &cfg).unwrap();
        mean_period(&traj, 0, 0.0, 100.0).unwrap()
    };
    let (a, b) = (period(1e-8), period(1e-10));
    assert!(((a - b) / b).abs() < 5e-5, "{a} vs {b}");
}

#[test]
fn flux_identity_along_trajectory() {
    let pr = DimensionlessParams { epsilon: 0.01, ..DimensionlessParams::P1 };
    let cfg = IntegratorConfig { h_max: 0.01, ..Default::default() };
    let traj = simulate(&pr, State3::new(0.0, 0.0, 0.0), 30.0, &cfg).unwrap();
    for u in &traj.states {
        let [x, y, z] = *u;
        let [_, dy, dz] = pr.vf_full_array(*u);
        let rhs = pr.p * (x - pr.a).powi(2) - pr.b - pr.m * y;
        let scale = [pr.f(x), pr.m * y, pr.lambda + y, z].iter().fold(1.0f64, |s, v| s.max(v.abs()));
        assert!((dy + dz / pr.r - rhs).abs() <= 8.0 * f64::EPSILON * scale);
    }
}

#[test]
fn singular_limit_cannot_be_simulated() {
    let pr = DimensionlessParams { epsilon: 0.0, ..DimensionlessParams::P1 };
    let err = simulate(&pr, State3::new(0.0, 0.0, 0.0), 1.0, &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, Error::SingularLimit));
}

#[test]
fn sine_has_ten_maxima() {
    let field = |t: f64, _y: &[f64; 1]| [t.cos()];
    let cfg = IntegratorConfig { rtol: 1e-10, atol: 1e-12, h_max: 0.05, ..Default::default() };
    let traj = integrate(&field, [0.0], (0.0, 20.0 * std::f64::consts::PI + 1.0), &cfg).unwrap();
    let sig = signature_from_series(&traj.times, &traj.component(0), 0.0).unwrap();
    assert_eq!(sig.oscillations.len(), 10);
    // peaks are sampled, so the error is at most h_max^2 / 8
    for o in &sig.oscillations {
        assert!((o.x_max - 1.0).abs() <= 0.05f64.powi(2) / 8.0 + 1e-9, "{}", o.x_max);
    }
}

#[test]
fn monotone_signal_has_no_oscillation() {
    let t: Vec<f64> = (0..500).map(|i| i as f64 * 0.1).collect();
    let x: Vec<f64> = t.iter().map(|t| t.tanh()).collect();
    assert!(matches!(signature_from_series(&t, &x, 0.0), Err(Error::NoOscillation(_))));
}

#[test]
fn p1_small_epsilon_alternates_large_and_small() {
    let pr = DimensionlessParams { epsilon: 0.01, ..DimensionlessParams::P1 };
    let cfg = IntegratorConfig { rtol: 1e-9, atol: 1e-11, h_max: 0.01, ..Default::default() };
    let traj = simulate(&pr, State3::new(0.0, 0.0, 0.0), 200.0, &cfg).unwrap();
    let sig = signature(&traj, 0.5).unwrap();
    let kinds: Vec<OscKind> = sig.oscillations.iter().map(|o| o.kind).collect();
    let large = kinds.iter().filter(|k| **k == OscKind::Large).count();
    let small = kinds.len() - large;
    assert!(large >= 3);
    // two SAOs for every LAO, up to the partial cycles at either end
    assert!((small as i64 - 2 * large as i64).abs() <= 2, "{large} large, {small} small");
    assert_eq!(sig.canonical, "1^2");
}
