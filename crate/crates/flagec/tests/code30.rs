//! Integration checks specific to the bundled [[30,14,3]] code.

use std::path::Path;

use flagec::codefile::load_code;
use flagec::consecutive::{lemma1_check_z, lemma3_check};
use flagec::css::CssCode;
use flagec::{Pauli, Syndrome};

fn code30() -> CssCode {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes/c30.code");
    load_code(&path).expect("fixture loads")
}

#[test]
fn weight_three_logical_is_in_the_normalizer() {
    let code = code30();
    let x_bar = Pauli::from_sparse_str("X1 X11 X21", 30).unwrap();
    assert!(code.in_normalizer(&x_bar));
    assert!(!code.in_stabilizer_group(&x_bar));
}

#[test]
fn weight_two_correction_for_a_mixed_error() {
    let code = code30();
    let error = Pauli::from_sparse_str("X3 Z17", 30).unwrap();
    let syndrome = code.syndrome(&error);
    let fix = code.min_weight_correction(&syndrome, 3).unwrap();
    assert_eq!(fix.weight(), 2);
    assert_eq!(code.syndrome(&fix), syndrome);
    // no weight-1 Pauli shares this syndrome
    for q in 1..=30 {
        for kind in flagec::PauliKind::NONTRIVIAL {
            let single = Pauli::single(30, q, kind);
            assert_ne!(
                code.syndrome(&single),
                syndrome,
                "weight-1 match at {kind:?}{q}"
            );
        }
    }
}

#[test]
fn suffix_conditions_hold_for_the_check_matrix() {
    let code = code30();
    assert!(lemma3_check(code.hx()).unwrap().verdict);
    assert!(lemma1_check_z(code.hx()).verdict);
}

#[test]
fn shifted_generators_span_the_same_stabilizers() {
    // the row spaces of the shifted check matrices equal the originals
    let code = code30();
    for matrix in [code.hx(), code.hz()] {
        let space = matrix.row_space();
        for l in 0..30 {
            let shifted = matrix.shift_rows_left(l);
            assert!(shifted.rows().all(|r| space.contains(r)), "shift {l}");
            let shifted_space = shifted.row_space();
            assert!(
                matrix.rows().all(|r| shifted_space.contains(r)),
                "shift {l} reverse"
            );
        }
    }
}

#[test]
fn shift_covariance_of_product_set_syndromes() {
    // syndromes of the shifted set under shifted generators equal the
    // syndromes of the unshifted set under the original generators
    let code = code30();
    let base = flagec::consecutive::consecutive_set(flagec::consecutive::SetKind::Product, 0, 30);
    for l in [1usize, 7, 29] {
        let shifted =
            flagec::consecutive::consecutive_set(flagec::consecutive::SetKind::Product, l, 30);
        let hx = code.hx().shift_rows_left(l);
        let hz = code.hz().shift_rows_left(l);
        for (e0, el) in base.elements.iter().zip(&shifted.elements) {
            let s0 = code.syndrome(e0);
            let sl = Syndrome {
                sx: hx.mul_vec(el.z_bits()),
                sz: hz.mul_vec(el.x_bits()),
            };
            assert_eq!(s0, sl);
        }
    }
}

#[test]
fn every_syndrome_is_reachable_within_weight_four() {
    let code = code30();
    assert_eq!(flagec::css::covering_cap(&code), Some(4));
}

#[test]
fn cross_pair_swap_breaks_the_pairing_pattern() {
    let code = code30();
    let mut table = code.logicals().unwrap().to_vec();
    // exchange the X representative of pair 1 with the Z representative
    // of pair 2
    let x1 = table[0].0.clone();
    let z2 = table[1].1.clone();
    table[0].0 = z2;
    table[1].1 = x1;
    let report = code.validate_logicals(&table);
    assert!(!report.is_clean());
}

#[test]
fn fault_free_circuits_report_parities_for_low_weight_errors() {
    use flagec::circuit::{build_flag_circuit, decompose_operator, propagate};
    let code = code30();
    let circuits: Vec<_> = code
        .generators()
        .iter()
        .map(|g| build_flag_circuit(decompose_operator(&g.pauli).unwrap()))
        .collect();
    let mut errors = vec![Pauli::identity(30)];
    for q in 1..=30usize {
        for kind in flagec::PauliKind::NONTRIVIAL {
            errors.push(Pauli::single(30, q, kind));
        }
    }
    // a deterministic sample of weight-2 errors
    for q in 1..=29usize {
        errors.push({
            let mut p = Pauli::single(30, q, flagec::PauliKind::X);
            p.set(q + 1, flagec::PauliKind::Z);
            p
        });
    }
    for (circuit, generator) in circuits.iter().zip(code.generators()) {
        for error in &errors {
            let run = propagate(circuit, error, &[]).unwrap();
            assert!(!run.any_flag());
            assert_eq!(run.outcome_flip, !error.commutes(&generator.pauli));
            assert_eq!(&run.residual, error);
        }
    }
}
