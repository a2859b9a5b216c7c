//! Acceptance gate. Each criterion runs at its stated tolerance and sample
//! size and prints a single PASS/FAIL line; `cargo test --test acceptance --
//! --nocapture` shows them.

use std::time::Instant;

use riskscale::stats::with_threads;
use riskscale::verify::{run_check, verify_suite, CHECKS, DEFAULT_SEED};

fn criterion(number: usize) {
    let start = Instant::now();
    let result = run_check(number - 1, DEFAULT_SEED);
    let elapsed = start.elapsed().as_secs_f64();
    let verdict = if result.pass() { "PASS" } else { "FAIL" };
    let (stat, thr) = result
        .headline()
        .map_or((f64::NAN, f64::NAN), |h| (h.statistic, h.threshold));
    println!(
        "criterion {number:>2} {:<30} {verdict} statistic={stat:.4e} threshold={thr:.4e} time={elapsed:.2}s",
        result.name
    );
    if !result.pass() {
        for p in result.parts.iter().filter(|p| !p.pass) {
            println!(
                "    failing part {}: {:.6e} > {:.6e}",
                p.test_name, p.statistic, p.threshold
            );
        }
        if let Some(e) = &result.error {
            println!("    error: {e}");
        }
    }
    assert!(result.pass(), "criterion {number} ({}) failed: {result:?}", result.name);
}

#[test]
fn criterion_01_scalar_credibility() {
    criterion(1);
}

#[test]
fn criterion_02_gaussian_premium_equivalence() {
    criterion(2);
}

#[test]
fn criterion_03_elliptical_reduction() {
    criterion(3);
}

#[test]
fn criterion_04_sphere_constraint() {
    criterion(4);
}

#[test]
fn criterion_05_beta_marginal_law() {
    criterion(5);
}

#[test]
fn criterion_06_gamma_dirichlet_factorization() {
    criterion(6);
}

#[test]
fn criterion_07_scale_cancellation() {
    criterion(7);
}

#[test]
fn criterion_08_beta_gamma_algebra() {
    criterion(8);
}

#[test]
fn criterion_09_weighted_gaussian_case() {
    criterion(9);
}

#[test]
fn criterion_10_random_p_sphere_constraint() {
    criterion(10);
}

#[test]
fn criterion_11_mgb2_sampler_equivalence() {
    criterion(11);
}

#[test]
fn criterion_12_clayton_survival_identity() {
    criterion(12);
}

#[test]
fn criterion_13_breiman_limit() {
    criterion(13);
}

#[test]
fn criterion_14_determinism() {
    let start = Instant::now();
    let first = with_threads(4, || verify_suite(DEFAULT_SEED)).render();
    let second = with_threads(4, || verify_suite(DEFAULT_SEED)).render();
    let single = with_threads(1, || verify_suite(DEFAULT_SEED)).render();
    let ok = first == second && first == single && first.lines().count() == CHECKS.len();
    println!(
        "criterion 14 {:<30} {} time={:.2}s",
        "determinism",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    assert_eq!(first.lines().count(), CHECKS.len());
    assert_eq!(first, second, "two runs differ");
    assert_eq!(first, single, "1 vs 4 workers differ");
}
