//! Golden-file comparison for the circuit dump format.

use std::path::Path;

use flagec::circuit::{build_flag_circuit, build_nonflag_circuit, decompose_operator};
use flagec::codefile::load_code;

#[test]
fn steane_generator_one_matches_the_golden_dump() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes/steane.code");
    let code = load_code(&path).unwrap();
    let g1 = code.generators()[0].pauli.clone();
    let circuit = build_flag_circuit(decompose_operator(&g1).unwrap());
    let golden = include_str!("golden/steane_g1_flag.txt");
    assert_eq!(circuit.dump(), golden);
}

#[test]
fn nonflag_dump_has_the_bare_shape() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes/steane.code");
    let code = load_code(&path).unwrap();
    let g1 = code.generators()[0].pauli.clone();
    let circuit = build_nonflag_circuit(&g1).unwrap();
    let dump = circuit.dump();
    let lines: Vec<&str> = dump.lines().collect();
    assert_eq!(lines.first(), Some(&"PREP m0 Z"));
    assert_eq!(lines.last(), Some(&"MEAS m0 Z"));
    assert_eq!(lines.len(), 2 + g1.weight());
    assert!(lines[1..=g1.weight()].iter().all(|l| l.starts_with("CPL ")));
}
