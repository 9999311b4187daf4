//! Replays the refutation of the zero abstraction on the original PlusNat
//! clauses and decides whether the resulting counterexample is real.
//!
//! cargo run --example counterexample   (needs z3)

use catalia::abstraction::abstract_system;
use catalia::backend::{Backend, BackendConfig, ChcResult};
use catalia::cata::Catamorphism;
use catalia::chc::{parse_system, print_constraint};
use catalia::counterexample::{feasibility, replay_proof, simplify};
use catalia::preprocess::preprocess;
use catalia::synthesis::ProofObligation;

const PLUS_NAT: &str = include_str!("../tests/corpus/plus_nat.smt2");

fn main() {
    let backend = Backend::new(BackendConfig::default());
    let (system, _) = preprocess(&parse_system(PLUS_NAT).unwrap(), true);
    let zero = Catamorphism::zero(&system.datatypes, 1);
    let abs = abstract_system(&zero, &system).unwrap();
    let ChcResult::Unsat(proof) = backend.chc_check_sat(&abs.system).expect("solver available") else {
        panic!("the zero abstraction should be refutable");
    };
    println!("abstract refutation: {proof}");
    let cex = replay_proof(&proof, &system, &abs.origin).unwrap();
    println!("replayed on clauses {:?}", cex.clauses);
    println!("θ           = {}", print_constraint(&cex.constraint));
    let theta = simplify(&cex.constraint);
    println!("simplified θ = {}", print_constraint(&theta));
    println!("feasibility: {:?}", feasibility(&backend, &theta, &system, None));
    println!("obligation:  {}", ProofObligation::from_spurious(&theta));
}
