#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for n in [1usize, 7, 30] {
        if let Ok(table) = flagec::codefile::parse_logical_table(text, n) {
            for (x_bar, z_bar) in &table {
                assert!(!x_bar.is_identity() && !z_bar.is_identity());
                assert_eq!(x_bar.n(), n);
                assert_eq!(z_bar.n(), n);
            }
        }
    }
});
