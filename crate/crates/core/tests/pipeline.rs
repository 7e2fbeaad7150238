//! End-to-end use of the public API: model, function, profile, bound, check.

use concentra::bounds::{bound_general, Regime};
use concentra::diffops::{norm_profile, ProfileMode};
use concentra::funcs::FunctionSpec;
use concentra::models::{build_ising, IsingSpec};
use concentra::space::{Measure, DEFAULT_CAP};
use concentra::tensors::OpNormOptions;
use concentra::verify::{check_domination, default_grid, safety_factor, tail_curve, with_atoms, BoundCurve, Side, TailMode};

fn dominated(measure: &Measure<f64>, f: &FunctionSpec<f64>, regime: Regime<f64>) -> f64 {
    let profile = norm_profile(f, measure, regime.d(), ProfileMode::Exact, &OpNormOptions::default(), DEFAULT_CAP).unwrap();
    let bound = bound_general(&profile, &regime).unwrap();
    let table = f.tabulate(measure.space(), DEFAULT_CAP).unwrap();
    let grid = default_grid(&bound, 0.01, 60).unwrap();
    let grid = with_atoms(&grid, &measure.law(DEFAULT_CAP).unwrap(), &table, Side::TwoSided);
    let curve = tail_curve(measure, &table, &grid, TailMode::Exact, Side::TwoSided, DEFAULT_CAP).unwrap();
    let report = check_domination(&curve, &BoundCurve::of(&bound, &grid)).unwrap();
    assert!(report.dominated, "violations at {:?}", report.violations);
    safety_factor(&curve, &bound).unwrap()
}

#[test]
fn rademacher_sum_first_order() {
    let m = Measure::rademacher(8);
    let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x: &[f64]| x.iter().sum()).unwrap();
    assert!(dominated(&m, &f, Regime::Independent { d: 1 }) >= 1.0);
}

#[test]
fn rademacher_chaos_second_order() {
    let m = Measure::rademacher(6);
    let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x: &[f64]| {
        let s: f64 = x.iter().sum();
        (s * s - x.len() as f64) / 2.0
    })
    .unwrap();
    assert!(dominated(&m, &f, Regime::Independent { d: 2 }) >= 1.0);
}

#[test]
fn high_temperature_ising_magnetization() {
    // a very generous ∂-LSI constant; only domination is asserted
    let (m, _) = build_ising(&IsingSpec::curie_weiss(6, 0.3)).unwrap();
    let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x: &[f64]| x.iter().sum()).unwrap();
    assert!(dominated(&m, &f, Regime::Dlsi { sigma2: 4.0, d: 1 }) >= 1.0);
}

#[test]
fn shrinking_the_constant_eventually_breaks_domination() {
    let m = Measure::rademacher(6);
    let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x: &[f64]| x.iter().sum()).unwrap();
    let regime = Regime::Independent { d: 1 };
    let profile = norm_profile(&f, &m, 1, ProfileMode::Exact, &OpNormOptions::default(), DEFAULT_CAP).unwrap();
    let bound = bound_general(&profile, &regime).unwrap();
    let table = f.tabulate(m.space(), DEFAULT_CAP).unwrap();
    let grid = with_atoms(&default_grid(&bound, 0.01, 60).unwrap(), &m.law(DEFAULT_CAP).unwrap(), &table, Side::TwoSided);
    let curve = tail_curve(&m, &table, &grid, TailMode::Exact, Side::TwoSided, DEFAULT_CAP).unwrap();
    let s = safety_factor(&curve, &bound).unwrap();
    let shrunk = bound.shrunk(1.01 * s);
    let report = check_domination(&curve, &BoundCurve::of(&shrunk, &grid)).unwrap();
    assert!(!report.dominated);
}
