use std::path::PathBuf;

use ctxcat::io::{ingest_datasheets, parse_model, parse_poset, parse_projection};
use ctxcat::ToleranceConfig;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn model_seeds_parse() {
    for (name, bytes) in seeds("model_json") {
        let model = parse_model(std::str::from_utf8(&bytes).unwrap())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        model.enumerate().unwrap();
    }
}

#[test]
fn projection_seeds_parse() {
    let tol = ToleranceConfig::default();
    for (name, bytes) in seeds("projection_json") {
        parse_projection(std::str::from_utf8(&bytes).unwrap(), &tol)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn poset_seeds_parse() {
    for (name, bytes) in seeds("poset_json") {
        parse_poset(std::str::from_utf8(&bytes).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn datasheet_seeds_parse() {
    for (name, bytes) in seeds("datasheet_csv") {
        let (rows, cols) = (bytes[0] as usize % 8, bytes[1] as usize % 8);
        let tables =
            ingest_datasheets(&bytes[2..], rows, cols).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!tables.is_empty(), "{name}");
    }
}

#[test]
fn truncated_inputs_are_rejected_cleanly() {
    let tol = ToleranceConfig::default();
    for (_, bytes) in seeds("model_json").into_iter().chain(seeds("poset_json")) {
        let text = String::from_utf8(bytes).unwrap();
        for cut in (0..text.len()).step_by(37) {
            let head = &text[..cut];
            assert!(parse_model(head).is_err());
            assert!(parse_poset(head).is_err());
            assert!(parse_projection(head, &tol).is_err());
        }
    }
}
