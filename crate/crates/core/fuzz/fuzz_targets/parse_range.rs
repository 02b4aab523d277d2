#![no_main]

use libfuzzer_sys::fuzz_target;
use robin_symmetry::cli::parse::{parse_range, parse_vector};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(range) = parse_range(text) {
        // Keep allocation bounded on huge counts.
        if range.count <= 1 << 16 {
            let values = range.values();
            assert_eq!(values.len(), range.count);
            assert_eq!(values[0], range.lo);
            assert_eq!(*values.last().unwrap(), range.hi);
            assert!(values.iter().all(|v| !v.is_nan()));
        }
    }
    if let Ok(v) = parse_vector(text) {
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.is_finite()));
    }
});
