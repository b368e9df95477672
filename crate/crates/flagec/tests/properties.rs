//! Property tests for the algebraic invariants the rest of the crate
//! leans on.

use flagec::circuit::{build_flag_circuit, decompose_operator};
use flagec::classical::ClassicalCode;
use flagec::css::CssCode;
use flagec::poly::BinaryPolynomial;
use flagec::{Pauli, PauliKind};

use proptest::prelude::*;

fn arb_pauli(n: usize) -> impl Strategy<Value = Pauli> {
    proptest::collection::vec(0u8..4, n).prop_map(move |kinds| {
        let mut p = Pauli::identity(n);
        for (i, k) in kinds.iter().enumerate() {
            p.set(
                i + 1,
                [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z][*k as usize],
            );
        }
        p
    })
}

fn steane() -> CssCode {
    let h = BinaryPolynomial::from_exponents(&[0, 2, 3, 4]).unwrap();
    let c = ClassicalCode::from_check_polynomial(&h, 7).unwrap();
    CssCode::build(&c, &c).unwrap()
}

proptest! {
    #[test]
    fn multiply_is_involutive_and_commutative(p in arb_pauli(9), q in arb_pauli(9)) {
        prop_assert!(p.multiply(&p).is_identity());
        prop_assert_eq!(p.multiply(&q), q.multiply(&p));
    }

    #[test]
    fn multiply_is_associative(p in arb_pauli(6), q in arb_pauli(6), r in arb_pauli(6)) {
        prop_assert_eq!(p.multiply(&q).multiply(&r), p.multiply(&q.multiply(&r)));
    }

    #[test]
    fn commutation_is_symmetric(p in arb_pauli(8), q in arb_pauli(8)) {
        prop_assert_eq!(p.commutes(&q), q.commutes(&p));
    }

    #[test]
    fn weight_is_shift_invariant(p in arb_pauli(10), l in 0usize..10) {
        prop_assert_eq!(p.left_cyclic_shift(l).weight(), p.weight());
    }

    #[test]
    fn symplectic_is_a_homomorphism(p in arb_pauli(8), q in arb_pauli(8)) {
        let lhs = p.multiply(&q).symplectic();
        let rhs = p.symplectic().xor(&q.symplectic());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_composition(p in arb_pauli(9), a in 0usize..9, b in 0usize..9) {
        let lhs = p.left_cyclic_shift(a).left_cyclic_shift(b);
        let rhs = p.left_cyclic_shift((a + b) % 9);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pauli_text_roundtrips(p in arb_pauli(12)) {
        let dense = Pauli::from_dense_str(&p.dense_string()).unwrap();
        prop_assert_eq!(&dense, &p);
        let sparse = Pauli::from_sparse_str(&p.sparse_string(), 12).unwrap();
        prop_assert_eq!(&sparse, &p);
    }

    #[test]
    fn syndrome_ignores_stabilizer_factors(e in arb_pauli(7), g_index in 0usize..6) {
        let code = steane();
        let g = &code.generators()[g_index].pauli;
        prop_assert_eq!(code.syndrome(&e.multiply(g)), code.syndrome(&e));
    }

    #[test]
    fn min_weight_correction_never_heavier(e in arb_pauli(7)) {
        let code = steane();
        if e.weight() <= 3 {
            let fix = code.min_weight_correction(&code.syndrome(&e), 3).unwrap();
            prop_assert!(fix.weight() <= e.weight());
            prop_assert_eq!(code.syndrome(&fix), code.syndrome(&e));
        }
    }

    #[test]
    fn stabilizer_membership_implies_normalizer(p in arb_pauli(7)) {
        let code = steane();
        if code.in_stabilizer_group(&p) {
            prop_assert!(code.in_normalizer(&p));
        }
    }

    #[test]
    fn fault_free_circuits_report_the_parity(e in arb_pauli(7), g_index in 0usize..6) {
        let code = steane();
        let g = code.generators()[g_index].pauli.clone();
        let circuit = build_flag_circuit(decompose_operator(&g).unwrap());
        let run = flagec::circuit::propagate(&circuit, &e, &[]).unwrap();
        prop_assert_eq!(run.outcome_flip, !e.commutes(&g));
        prop_assert!(!run.any_flag());
        prop_assert_eq!(run.residual, e);
    }
}
