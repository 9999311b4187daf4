//! Parses a CHC system and shows the three preprocessing passes.
//!
//! cargo run --example parse_preprocess [FILE]

use catalia::chc::{parse_system, print_system};
use catalia::preprocess::preprocess;

const NONEMPTY_HEAD: &str = include_str!("../tests/corpus/nonempty_head.smt2");

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable input"),
        None => NONEMPTY_HEAD.to_string(),
    };
    let system = parse_system(&text).unwrap_or_else(|e| panic!("parse error: {e}"));
    println!(";; input: {} clause(s)\n{}", system.clauses.len(), print_system(&system));

    let (pre, report) = preprocess(&system, true);
    println!(";; after preprocessing ({report})\n{}", print_system(&pre));
}
