//! Release gate: one test per acceptance criterion. Each test prints the
//! criterion's one-line summary (run with `--nocapture` to see lines for
//! passing criteria too) and asserts the pass flag.

use overshoot_lab::acceptance;

const MASTER_SEED: u64 = 13;

fn run(f: fn(u64) -> acceptance::CriterionResult) {
    let result = f(MASTER_SEED);
    println!("{}", result.summary_line());
    assert!(result.passed, "{}", result.summary_line());
}

#[test]
fn criterion_01_beta_sin_reflection() {
    run(acceptance::criterion_1);
}

#[test]
fn criterion_02_moments_vs_quadrature() {
    run(acceptance::criterion_2);
}

#[test]
fn criterion_03_critical_moment_boundary() {
    run(acceptance::criterion_3);
}

#[test]
fn criterion_04_sampler_vs_cdf_ks() {
    run(acceptance::criterion_4);
}

#[test]
fn criterion_05_chain_log_drift() {
    run(acceptance::criterion_5);
}

#[test]
fn criterion_06_phase_diagram_agreement() {
    run(acceptance::criterion_6);
}

#[test]
fn criterion_07_boundary_log_step_symmetry() {
    run(acceptance::criterion_7);
}

#[test]
fn criterion_08_path_oracle_vs_overshoot_law() {
    run(acceptance::criterion_8);
}

#[test]
fn criterion_09_symmetric_stable_corollary() {
    run(acceptance::criterion_9);
}

#[test]
fn criterion_10_counterexample_orbits() {
    run(acceptance::criterion_10);
}

#[test]
fn criterion_11_thread_count_independence() {
    run(acceptance::criterion_11);
}
