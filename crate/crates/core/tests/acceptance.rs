//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! if any criterion fails.

use std::time::Instant;

use omseq::property::{
    check_homogeneity, check_lemma_suite, check_quasi_triangle, check_triangle_s1,
    reproduce_counterexample, CheckName, Lemma, PropertyReport, Trial,
};
use omseq::{
    geometric_closed_form, geometric_example, geometric_partial_closed_form, global_norm, run_suite,
    window_norm, FiniteSequence, SYoungSpec, SuiteConfig, WeightSpec, Window, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn single(name: CheckName, trials: u64) -> PropertyReport {
    run_suite(&SuiteConfig { seed: SEED, trials, checks: vec![name.to_string()] }).unwrap()
}

/// Passed, ran the requested trials, and every listed case occurred.
fn record_ok(report: &PropertyReport, name: CheckName, trials: u64, cases: &[&str]) -> Outcome {
    let rec = report.record(name).expect("record present");
    let seen = &rec.details.as_ref().unwrap()["cases"];
    let missing: Vec<_> = cases.iter().filter(|c| seen[**c].as_u64().unwrap_or(0) == 0).collect();
    let detail = format!(
        "{} trials, {} failures, cases {}{}",
        rec.trials,
        rec.failures,
        seen,
        if missing.is_empty() { String::new() } else { format!(", missing {missing:?}") }
    );
    outcome(rec.passed && rec.trials >= trials && missing.is_empty(), detail)
}

fn closed_form_geometric() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for d in [1.5, 2.0, 5.0] {
        for p in [0.5, 1.0, 2.0] {
            let start = Instant::now();
            let f = SYoungSpec::power(p, p.min(1.0)).unwrap();
            let x = geometric_example(d, p, 64).unwrap();
            let n = global_norm(&x, &f, &WeightSpec::Identity, DEFAULT_TOL).unwrap().value;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.max((n - geometric_closed_form(d, p).unwrap()).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max error {worst:.3e}, slowest case {slowest:.3}s"))
}

fn partial_sums() -> Outcome {
    let f = SYoungSpec::power(1.0, 1.0).unwrap();
    let x = geometric_example(2.0, 1.0, 64).unwrap();
    let mut worst = 0.0f64;
    for n in [0u64, 1, 5, 10] {
        let v = window_norm(&x, &Window::new(0, n), &f, &WeightSpec::Identity, DEFAULT_TOL).unwrap();
        worst = worst.max((v - geometric_partial_closed_form(2.0, 1.0, n).unwrap()).abs());
    }
    let at10 = geometric_partial_closed_form(2.0, 1.0, 10).unwrap();
    outcome(
        worst <= 1e-9 && (at10 - 1.4990234375).abs() <= 1e-12,
        format!("max error {worst:.3e}, N=10 closed form {at10}"),
    )
}

fn doubling_comparison() -> Outcome {
    let cmp = reproduce_counterexample(80).unwrap();
    let report = single(CheckName::ReproduceCounterexample, 0);
    let rec = report.record(CheckName::ReproduceCounterexample).unwrap();
    let emitted = &rec.details.as_ref().unwrap()["comparison"];
    let ok = (cmp.engine_norm_x - 1.0).abs() <= 1e-6
        && (cmp.closed_form - 1.0).abs() <= 1e-6
        && (cmp.oracle_norm_sum - 2.0).abs() <= 1e-6
        && (cmp.engine_norm_sum - 2.0).abs() <= 1e-6
        && (cmp.homogeneity_prediction - 2.0).abs() <= 1e-6
        && cmp.claimed_norm_sum == 4.0
        && cmp.discrepancy
        && emitted["discrepancy"] == true
        && emitted["claimed_norm_sum"] == 4.0
        && rec.passed;
    outcome(
        ok,
        format!(
            "||x|| = {:.12} (closed form {:.12}), ||x+x|| engine {:.12} oracle {:.12}, claimed {} flagged as discrepancy: {}",
            cmp.engine_norm_x, cmp.closed_form, cmp.engine_norm_sum, cmp.oracle_norm_sum,
            cmp.claimed_norm_sum, cmp.discrepancy
        ),
    )
}

fn lemma_suite() -> Outcome {
    let report = check_lemma_suite(500, SEED);
    let mut cases = Vec::new();
    for lemma in [Lemma::ModularAtNorm, Lemma::BoundedModular, Lemma::ZeroScaledSum] {
        cases.push(format!("{}:zero_norm", lemma.as_str()));
        cases.push(format!("{}:positive_norm", lemma.as_str()));
    }
    for lemma in [Lemma::UnitBall, Lemma::ScaledBall] {
        cases.push(format!("{}:norm_at_most_one", lemma.as_str()));
        cases.push(format!("{}:norm_above_one", lemma.as_str()));
    }
    let refs: Vec<&str> = cases.iter().map(String::as_str).collect();
    let base = record_ok(&report, CheckName::LemmaSuite, 5 * 500, &refs);

    // The constructed boundary instances really sit on the unit sphere.
    let p2 = SYoungSpec::power(2.0, 1.0).unwrap();
    let pyth = FiniteSequence::new(0, vec![0.6, 0.0, 0.8]);
    let a = window_norm(&pyth, &Window::new(1, 1), &p2, &WeightSpec::Identity, DEFAULT_TOL).unwrap();
    let e = SYoungSpec::exp_minus_one(0.5).unwrap();
    let delta = FiniteSequence::delta(3, std::f64::consts::LN_2);
    let b = window_norm(&delta, &Window::new(3, 0), &e, &WeightSpec::Identity, DEFAULT_TOL).unwrap();
    let boundary = (a - 1.0).abs() <= 1e-12 && (b - 1.0).abs() <= 1e-12;
    let rec = report.record(CheckName::LemmaSuite).unwrap();
    let boundary_runs: u64 = rec.details.as_ref().unwrap()["cases"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(k, _)| k.starts_with("boundary:"))
        .map(|(_, v)| v.as_u64().unwrap())
        .sum();
    outcome(
        base.passed && boundary && boundary_runs == 10,
        format!("{}; boundary norms {a} and {b}, {boundary_runs} boundary runs", base.detail),
    )
}

fn inverse_sandwich() -> Outcome {
    let families = [
        SYoungSpec::power(0.5, 0.5).unwrap(),
        SYoungSpec::power(1.0, 1.0).unwrap(),
        SYoungSpec::power(2.0, 1.0).unwrap(),
        SYoungSpec::power(3.5, 0.7).unwrap(),
        SYoungSpec::exp_minus_one(1.0).unwrap(),
        SYoungSpec::exp_minus_one(0.3).unwrap(),
        SYoungSpec::power_log(0.5, 0.5).unwrap(),
        SYoungSpec::power_log(1.0, 1.0).unwrap(),
        SYoungSpec::power_log(2.5, 1.0).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut total = 0;
    for f in families {
        for i in 0..100 {
            let t = if i == 0 { 0.0 } else { rng.gen_range(0.0..=100.0) };
            let inner = f.evaluate(f.inverse(t).unwrap()).unwrap();
            let outer = f.inverse(f.evaluate(t).unwrap()).unwrap();
            total += 1;
            if !(inner <= t + 1e-9 && t <= outer + 1e-9) {
                failures += 1;
            }
            let trial = Trial::InverseSandwich { young: f, t };
            if !trial.evaluate().unwrap().passed {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{total} samples over 9 specs in 3 families, {failures} failures"))
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("geometric closed form, 9 (D, p) cases at L = 64", Box::new(closed_form_geometric)),
        ("centered partial sums for D = 2, p = 1", Box::new(partial_sums)),
        ("x = y doubling comparison and discrepancy record", Box::new(doubling_comparison)),
        ("homogeneity, 200 trials", Box::new(|| {
            let r = check_homogeneity(200, SEED);
            record_ok(&r, CheckName::Homogeneity, 200, &["zero_scalar", "nonzero_scalar"])
        })),
        ("quasi-triangle inequality and 1 <= C < 2, 500 pairs", Box::new(|| {
            let r = check_quasi_triangle(500, SEED);
            record_ok(&r, CheckName::QuasiTriangle, 500, &["both_nonzero", "one_zero"])
        })),
        ("triangle inequality for convex Phi at s = 1, 500 pairs", Box::new(|| {
            let r = check_triangle_s1(500, SEED);
            record_ok(&r, CheckName::TriangleS1, 500, &["both_nonzero"])
        })),
        ("windowed-norm lemmas, 500 trials each, both directions", Box::new(lemma_suite)),
        ("zero characterization, 500 trials", Box::new(|| {
            let r = single(CheckName::ZeroCharacterization, 500);
            record_ok(&r, CheckName::ZeroCharacterization, 500, &["zero_content", "nonzero_content"])
        })),
        ("inverse sandwich, 100 samples per spec", Box::new(inverse_sandwich)),
        ("coordinate bound, 200 trials", Box::new(|| {
            let r = single(CheckName::CoordinateBound, 200);
            record_ok(&r, CheckName::CoordinateBound, 200, &["nonzero_sequence"])
        })),
        ("grid oracle and enlarged window sweep, 100 + 100 instances", Box::new(|| {
            let r = single(CheckName::OracleEquivalence, 100);
            record_ok(&r, CheckName::OracleEquivalence, 200, &["window:nonzero_window", "global:sweep"])
        })),
    ];

    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!(
            "{status} criterion {:>2}: {title} [{:.2}s] {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
