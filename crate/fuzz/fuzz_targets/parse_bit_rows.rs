#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(bits) = flagec::Bits::from_bit_str(text) {
        assert_eq!(bits.to_string(), text);
        assert_eq!(bits.weight(), text.chars().filter(|&c| c == '1').count());
    }
});
