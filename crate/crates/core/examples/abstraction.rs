//! Abstracts the PlusNat system through the size catamorphism and maps a
//! hand-written integer model back to natural numbers.
//!
//! cargo run --example abstraction

use catalia::abstraction::{abstract_system, check_model_on_ground_instances, concretize_model, AbstractModel, PredDef, SampleConfig};
use catalia::cata::Catamorphism;
use catalia::chc::{parse_formula, parse_system, print_system, Sort, Var};
use catalia::preprocess::preprocess;
use catalia::sexp::parse_all;

const PLUS_NAT: &str = include_str!("../tests/corpus/plus_nat.smt2");

fn main() {
    let (system, _) = preprocess(&parse_system(PLUS_NAT).unwrap(), true);
    let size = Catamorphism::size(&system.datatypes);
    println!(";; catamorphism: {size}");
    let abs = abstract_system(&size, &system).unwrap();
    println!("{}", print_system(&abs.system));

    // Integer model: PlusNat(m, n, r) iff r = m + n - 1, Lt(m, n) iff m < n,
    // and the admissibility predicate holds on positive sizes.
    let ints = |names: &[&str]| names.iter().map(|n| Var::int(*n)).collect::<Vec<_>>();
    let def = |params: Vec<Var>, body: &str| PredDef {
        body: parse_formula(&parse_all(body).unwrap()[0], &abs.system.datatypes, &params).unwrap(),
        params,
    };
    let mut model = AbstractModel::new();
    for (pred, sorts) in &abs.system.predicates {
        assert!(sorts.iter().all(|s| *s == Sort::Int));
        let d = match pred.as_str() {
            "PlusNat" => def(ints(&["m", "n", "r"]), "(= r (- (+ m n) 1))"),
            "Lt" => def(ints(&["m", "n"]), "(< m n)"),
            _ => def(ints(&["s"]), "(>= s 1)"),
        };
        model.insert(pred.clone(), d);
    }
    let concrete = concretize_model(&model, &size, &system).unwrap();
    let preds: Vec<String> = ["PlusNat", "Lt"].map(String::from).to_vec();
    println!(";; concretized model\n{}", concrete.to_smt(&system.datatypes, Some(&preds)));
    let report = check_model_on_ground_instances(&concrete, &system, &SampleConfig::default());
    println!(";; {} ground instances checked, {} violations", report.checked, report.violations.len());
}
