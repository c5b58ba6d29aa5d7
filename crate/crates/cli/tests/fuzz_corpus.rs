//! Replays the checked-in fuzz corpus through the parser entry points.

use std::path::Path;

use finespec_cli::args::{parse_k_range, parse_lambda, parse_resolution, parse_window};
use finespec_cli::parse_config;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect()
}

#[test]
fn config_seeds() {
    let seeds = corpus("parse_config");
    assert!(seeds.len() >= 5);
    let ok = seeds.iter().filter(|s| parse_config(s).is_ok()).count();
    assert_eq!(ok, seeds.len() - 2);
}

#[test]
fn arg_seeds() {
    let seeds = corpus("parse_args");
    assert!(!seeds.is_empty());
    for s in &seeds {
        let _ = (
            parse_lambda(s),
            parse_window(s),
            parse_resolution(s),
            parse_k_range(s),
        );
    }
    assert!(seeds.iter().any(|s| parse_window(s).is_ok()));
}

proptest! {
    #[test]
    fn config_parser_never_panics(s in "\\PC{0,200}") {
        let _ = parse_config(&s);
    }

    #[test]
    fn mutated_config_never_panics(pos in 0usize..600, byte in "[ -~\n]") {
        let base = include_str!("../configs/paper-example.cfg");
        let mut text = base.to_string();
        let at = pos.min(text.len());
        if text.is_char_boundary(at) {
            text.insert_str(at, &byte);
        }
        let _ = parse_config(&text);
    }
}
