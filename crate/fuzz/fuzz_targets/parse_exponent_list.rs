#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = flagec::BinaryPolynomial::parse_exponent_list(text) {
        // accepted polynomials are nonzero and reparse from their exponents
        let exps = p.exponents();
        assert!(!exps.is_empty());
        let again = flagec::BinaryPolynomial::from_exponents(&exps).unwrap();
        assert_eq!(again, p);
    }
});
