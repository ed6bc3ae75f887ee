//! Acceptance suite: one test per criterion, with the measured values
//! printed on one line each (also runnable via `skycart verify all`).

use skycart_cli::verify::run_criterion;

fn check(id: usize) {
    let r = run_criterion(id);
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_fig3_convergence() {
    check(1);
}

#[test]
fn criterion_02_fig4_instability_and_recovery() {
    check(2);
}

#[test]
fn criterion_03_inner_loop_gain() {
    check(3);
}

#[test]
fn criterion_04_disturbance_bound() {
    check(4);
}

#[test]
fn criterion_05_fictitious_error() {
    check(5);
}

#[test]
fn criterion_06_energy_conservation() {
    check(6);
}

#[test]
fn criterion_07_model_reduction() {
    check(7);
}

#[test]
fn criterion_08_cart_law() {
    check(8);
}

#[test]
fn criterion_09_equilibria() {
    check(9);
}

#[test]
fn criterion_10_rg_bisection() {
    check(10);
}

#[test]
fn criterion_11_lyapunov_grid() {
    check(11);
}
