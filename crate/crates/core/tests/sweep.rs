use canard_scope::gsp::{check_conditions, delta, Mode};
use canard_scope::sweep::{run_sweep, write_region_csv, Range, SweepSpec};
use proptest::prelude::*;

fn csv_bytes(spec: &SweepSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    write_region_csv(&run_sweep(spec).unwrap(), &mut buf).unwrap();
    buf
}

#[test]
fn output_independent_of_thread_count() {
    let spec = SweepSpec { m: Range::new(0.3, 0.9, 3), ..Default::default() };
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(|| csv_bytes(&spec));
    let four = pool(4).install(|| csv_bytes(&spec));
    assert_eq!(one, four);
    assert_eq!(one, csv_bytes(&spec));
}

#[test]
fn subset_region_contains_full_region() {
    for mode in [Mode::Strict, Mode::Sharp] {
        let spec = SweepSpec { mode, a: Range::new(-1.0, 1.0, 40), p: Range::new(0.15, 6.0, 40), ..Default::default() };
        let full = run_sweep(&spec).unwrap();
        let subset = run_sweep(&SweepSpec { subset: true, ..spec }).unwrap();
        assert_eq!(full.len(), subset.len());
        for (f, s) in full.iter().zip(&subset) {
            assert!(!f.verdict || s.verdict, "a = {}, p = {}", f.a, f.p);
        }
    }
}

#[test]
fn rows_match_pointwise_checker() {
    let spec = SweepSpec { a: Range::new(-0.5, 0.95, 9), p: Range::new(0.5, 6.0, 9), ..Default::default() };
    for row in run_sweep(&spec).unwrap() {
        let rep = check_conditions(&spec.params_at(row.a, row.p, row.m), spec.mode);
        let flags = rep.letters().map(|(_, c)| c.pass);
        assert_eq!(row.conditions, flags);
        let all = flags.iter().all(|f| *f) && rep.delta_below_4.pass;
        assert_eq!(row.verdict, all);
    }
}

proptest! {
    #[test]
    fn b_inversion_round_trip(
        a in -1.0..1.0f64, p in 0.01..6.0f64, m in 0.0..3.0f64,
        d in -2.0..5.0f64, k in -5.0..10.0f64,
    ) {
        let spec = SweepSpec { delta: d, k, ..Default::default() };
        let pr = spec.params_at(a, p, m);
        let scale = [p * (a + 1.0).powi(2), m * (k + 2.0), d].iter().fold(1.0f64, |s, v| s.max(v.abs()));
        prop_assert!((delta(&pr) - d).abs() <= 1e-12 * scale);
    }
}
