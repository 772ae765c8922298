//! Replays the checked-in fuzz seeds through the parsers.

use std::fs;
use std::path::PathBuf;

use canard_scope::io::{parse_dimensionless_json, parse_physical_json, parse_sweep_spec_json, parse_trajectory_csv};
use canard_scope::sweep::parse_grid;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).unwrap()
}

#[test]
fn dimensionless_seeds() {
    for (name, data) in seeds("dimensionless_json") {
        assert_eq!(parse_dimensionless_json(text(&data)).is_ok(), name != "missing_field.json", "{name}");
    }
}

#[test]
fn physical_seeds() {
    for (name, data) in seeds("physical_json") {
        let pr = parse_physical_json(text(&data)).unwrap();
        assert_eq!(pr.nondimensionalize().is_ok(), name == "reference.json", "{name}");
    }
}

#[test]
fn sweep_spec_seeds() {
    for (name, data) in seeds("sweep_spec_json") {
        assert_eq!(parse_sweep_spec_json(text(&data)).is_ok(), name != "inverted.json", "{name}");
    }
}

#[test]
fn grid_seeds() {
    for (name, data) in seeds("grid") {
        assert_eq!(parse_grid(text(&data)).is_ok(), name != "zero", "{name}");
    }
}

#[test]
fn trajectory_seeds() {
    for (name, data) in seeds("trajectory_csv") {
        let parsed = parse_trajectory_csv(&data[..]);
        assert_eq!(parsed.is_ok(), name != "decreasing.csv", "{name}");
        if name == "reordered.csv" {
            assert_eq!(parsed.unwrap().x, vec![1.0, 2.0]);
        }
    }
}
