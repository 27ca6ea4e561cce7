//! The acceptance suite, one test per criterion so failures name themselves.
//! `swankit verify` runs the same checks; this target exists so plain
//! `cargo test` gates on them too.

use swankit::verify;

fn gate(index: usize) {
    let c = verify::run(index);
    println!("{}", verify::render_line(&c));
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn criterion_01_expansion_identity() {
    gate(1);
}

#[test]
fn criterion_02_hermitization() {
    gate(2);
}

#[test]
fn criterion_03_constant_commutator() {
    gate(3);
}

#[test]
fn criterion_04_pdm_equivalence() {
    gate(4);
}

#[test]
fn criterion_05_constant_mass_spectrum() {
    gate(5);
}

#[test]
fn criterion_06_f_conditions() {
    gate(6);
}

#[test]
fn criterion_07_generalized_commutator() {
    gate(7);
}

#[test]
fn criterion_08_quasi_solvability() {
    gate(8);
}

#[test]
fn criterion_09_riccati_chain() {
    gate(9);
}

#[test]
fn criterion_10_scaling() {
    gate(10);
}
