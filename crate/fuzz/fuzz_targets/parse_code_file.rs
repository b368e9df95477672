#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = flagec::codefile::parse_code_file(text) {
        // building from an accepted spec must not panic either (code
        // lengths are capped by the parser); errors are fine
        if spec.logical_table.is_none() && spec.n <= 64 {
            let _ = flagec::codefile::build_from_spec(&spec, std::path::Path::new("."));
        }
    }
});
