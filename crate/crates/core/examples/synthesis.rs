//! Catamorphism synthesis for the obligation ∀l. cons(0, cons(0, l)) ≠ nil,
//! starting from the constant-zero catamorphism.
//!
//! cargo run --example synthesis   (needs z3)

use catalia::backend::{Backend, BackendConfig};
use catalia::cata::{Catamorphism, TemplateCatamorphism};
use catalia::chc::{parse_formula, parse_system, print_constraint, Constraint, Env, Sort, Value, Var};
use catalia::sexp::parse_all;
use catalia::synthesis::{encode, reduce_ground, synthesis, ProofObligation, SynthConfig};

fn main() {
    let dt = parse_system("(declare-datatypes ((ilist 0)) (((nil) (cons (head Int) (tail ilist)))))")
        .unwrap()
        .datatypes;
    let l = Var::new("l", Sort::adt("ilist"));
    let body = parse_formula(&parse_all("(not (= (cons 0 (cons 0 l)) nil))").unwrap()[0], &dt, std::slice::from_ref(&l)).unwrap();
    let template = TemplateCatamorphism::linear(&dt, 1, Some(1));
    println!("template: {}", template.to_smt(&dt));

    let encoded = encode(&body, 1);
    println!("encoded:  {}", print_constraint(&encoded));
    let ground: Env = [("l".to_string(), Value::Adt(dt.constructor("nil").unwrap().clone(), vec![]))].into();
    println!("grounded at l = nil: {}", print_constraint(&reduce_ground(&encoded, &template, &ground).unwrap()));

    let backend = Backend::new(BackendConfig::default());
    let obligation = ProofObligation { vars: vec![l], body };
    let zero = Catamorphism::zero(&dt, 1);
    match synthesis(&backend, &[obligation], &zero, &Constraint::True, &template, &dt, &SynthConfig::default()) {
        Ok(Some(s)) => {
            println!("synthesized after {} round(s): {}", s.iterations, s.cata);
            println!("parameters: {:?}", s.assignment);
            println!("Θ: {}", print_constraint(&s.theta));
        }
        Ok(None) => println!("no catamorphism in this template"),
        Err(e) => println!("synthesis failed: {e}"),
    }
}
