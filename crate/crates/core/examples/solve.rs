//! Runs the full refinement loop on a file (default: the even/odd list
//! system) and prints the verdict with its evidence.
//!
//! cargo run --example solve [FILE]   (needs z3)

use catalia::chc::{parse_system, print_constraint};
use catalia::driver::{solve, SolveConfig, SolveResult};

const EVEN_ODD: &str = include_str!("../tests/corpus/even_odd_list.smt2");

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable input"),
        None => EVEN_ODD.to_string(),
    };
    let system = parse_system(&text).unwrap();
    let (result, stats) = solve(&system, &SolveConfig::default());
    println!("{}", result.verdict());
    match result {
        SolveResult::Satisfiable { model, cata } => {
            println!(";; catamorphism {cata}");
            if let Some(m) = model {
                let preds: Vec<String> = system.predicates.keys().cloned().collect();
                print!("{}", m.to_smt(&system.datatypes, Some(&preds)));
            }
        }
        SolveResult::Unsatisfiable { counterexample, witness, .. } => {
            println!(";; θ = {}", print_constraint(&counterexample.constraint));
            println!(";; witness {witness:?}");
        }
        SolveResult::Unknown(reason) => println!(";; {reason}"),
    }
    println!(";; {stats:?}");
}
