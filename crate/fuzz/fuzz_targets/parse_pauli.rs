#![no_main]

use libfuzzer_sys::fuzz_target;

// Both Pauli text forms must never panic, and every accepted operator must
// survive a serialize/reparse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };

    if let Ok(p) = flagec::Pauli::from_dense_str(text) {
        let again = flagec::Pauli::from_dense_str(&p.dense_string()).unwrap();
        assert_eq!(again, p);
    }

    // sparse form needs a length; derive one from the input
    for n in [1usize, 7, 30, 64] {
        if let Ok(p) = flagec::Pauli::from_sparse_str(text, n) {
            let again = flagec::Pauli::from_sparse_str(&p.sparse_string(), n).unwrap();
            assert_eq!(again, p);
        }
        let _ = flagec::Pauli::parse(text, n);
    }
});
