#![no_main]

use libfuzzer_sys::fuzz_target;
use robin_symmetry::cli::parse::{parse_config, CONFIG_KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_config(text) {
        for (key, value) in &map {
            assert!(CONFIG_KEYS.contains(&key.as_str()));
            assert_eq!(value.trim(), value);
            assert!(!value.contains('#'));
        }
    }
});
