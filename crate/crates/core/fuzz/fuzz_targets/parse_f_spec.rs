#![no_main]

use libfuzzer_sys::fuzz_target;
use robin_symmetry::cli::parse::parse_f_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_f_spec(text) {
        let again = parse_f_spec(&spec.to_string()).expect("display output parses");
        assert_eq!(spec, again);
    }
});
