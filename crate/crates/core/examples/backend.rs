//! Sends abstract systems to the CHC solver: one satisfiable, one refuted
//! with a resolution proof.
//!
//! cargo run --example backend   (needs z3 on PATH, or CATALIA_BACKEND)

use catalia::abstraction::abstract_system;
use catalia::backend::{Backend, BackendConfig, ChcResult};
use catalia::cata::Catamorphism;
use catalia::chc::parse_system;
use catalia::preprocess::preprocess;

const PLUS_NAT: &str = include_str!("../tests/corpus/plus_nat.smt2");

fn main() {
    let mut config = BackendConfig::default();
    if let Ok(exe) = std::env::var("CATALIA_BACKEND") {
        config.executable = exe.into();
    }
    let backend = Backend::new(config);
    let (system, _) = preprocess(&parse_system(PLUS_NAT).unwrap(), true);

    for cata in [Catamorphism::size(&system.datatypes), Catamorphism::zero(&system.datatypes, 1)] {
        println!(";; abstraction under {cata}");
        let abs = abstract_system(&cata, &system).unwrap();
        match backend.chc_check_sat(&abs.system) {
            Ok(ChcResult::Sat(Some(model))) => {
                for (pred, def) in &model {
                    println!("  {pred}: {}", catalia::chc::print_constraint(&def.body));
                }
            }
            Ok(ChcResult::Sat(None)) => println!("  sat (model unavailable)"),
            Ok(ChcResult::Unsat(proof)) => {
                println!("  unsat: {proof}");
                println!("  proof replays: {}", backend.validate_proof(&abs.system, &proof).unwrap());
            }
            Ok(ChcResult::Unknown(why)) => println!("  unknown: {why}"),
            Err(e) => println!("  backend error: {e}"),
        }
    }
}
