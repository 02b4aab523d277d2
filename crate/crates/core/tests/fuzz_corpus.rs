//! Replays the checked-in fuzz seeds through the parsers so they stay valid
//! inputs on stable toolchains.

use std::fs;
use std::path::Path;

use robin_symmetry::cli::parse::{parse_config, parse_f_spec, parse_range, parse_vector};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("parse_config") {
        let parsed = parse_config(&text);
        assert_eq!(parsed.is_err(), name == "duplicate", "{name}: {parsed:?}");
    }
}

#[test]
fn range_seeds() {
    for (name, text) in seeds("parse_range") {
        match name.as_str() {
            "vector" => assert_eq!(parse_vector(&text).unwrap(), vec![0.5, 0.0, -0.25]),
            "degenerate" => assert!(parse_range(&text).is_err()),
            _ => assert!(parse_range(&text).is_ok(), "{name}"),
        }
    }
}

#[test]
fn f_spec_seeds() {
    for (name, text) in seeds("parse_f_spec") {
        let spec = parse_f_spec(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_f_spec(&spec.to_string()).unwrap(), spec);
    }
}
