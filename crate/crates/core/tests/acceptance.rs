//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the report.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use catalia::abstraction::{abstract_system, abstract_term, check_model_on_ground_instances, is_adt_free, AbstractionEnv, SampleConfig};
use catalia::backend::{internal_unfold_unsat, ChcResult, Logic, SmtResult};
use catalia::cata::{Catamorphism, Expr, ParamAssignment, TemplateCatamorphism};
use catalia::chc::{
    eval_constraint, eval_term, parse_formula, parse_system, print_constraint, print_system, ArithOp, ChcSystem, CmpOp,
    Constraint, Datatypes, Env, Sort, Term, Value, Var,
};
use catalia::counterexample::{feasibility, replay_proof, simplify, Feasibility};
use catalia::driver::{solve, SolveResult};
use catalia::preprocess::preprocess;
use catalia::sexp::parse_all;
use catalia::synthesis::{encode, grid_search, reduce_ground, synthesis, ProofObligation, SynthConfig};
use num_bigint::BigInt;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::strategy::Union;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const CASES: u32 = 1000;
const E2E_LIMIT: Duration = Duration::from_secs(60);
const UNIT_LIMIT: Duration = Duration::from_secs(1);

const DATATYPES: &str = "(declare-datatypes ((nat 0) (ilist 0) (tree 0)) \
    (((Z) (S (p nat))) \
     ((nil) (cons (head Int) (tail ilist))) \
     ((leaf) (node (left tree) (val Int) (right tree)))))";

const NAT_LIST: &str = "(declare-datatypes ((nat 0) (ilist 0)) \
    (((Z) (S (p nat))) ((nil) (cons (head Int) (tail ilist)))))";

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn datatypes(decl: &str) -> Datatypes {
    parse_system(decl).unwrap().datatypes
}

// ---------------------------------------------------------------------------
// Oracles

/// Catamorphism evaluation read directly off the structure maps.
fn oracle_fold(cata: &Catamorphism, v: &Value) -> Vec<BigInt> {
    let Value::Adt(c, args) = v else { panic!("fold of an integer") };
    cata.maps[&c.name].outputs.iter().map(|e| oracle_expr(cata, e, args)).collect()
}

fn oracle_expr(cata: &Catamorphism, e: &Expr, args: &[Value]) -> BigInt {
    match e {
        Expr::Lit(n) => n.clone(),
        Expr::IntArg(pos) => args[*pos].as_int().expect("integer field").clone(),
        Expr::Child { pos, comp } => oracle_fold(cata, &args[*pos])[*comp].clone(),
        Expr::Param(p) => panic!("uninstantiated parameter {p}"),
        Expr::Bin(op, a, b) => {
            let (a, b) = (oracle_expr(cata, a, args), oracle_expr(cata, b, args));
            match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }
        }
    }
}

fn eval_with(c: &Constraint, env: &Env, cata: &Catamorphism) -> bool {
    let fold = |_: &str, comp: usize, v: &Value| oracle_fold(cata, v)[comp].clone();
    eval_constraint(c, env, Some(&fold)).expect("evaluable")
}

fn param_env(m: &ParamAssignment) -> Env {
    m.iter().map(|(k, v)| (k.clone(), Value::Int(v.clone()))).collect()
}

fn assignment(template: &TemplateCatamorphism, values: &[i64]) -> ParamAssignment {
    template.params.iter().zip(values).map(|(p, &v)| (p.name.clone(), BigInt::from(v))).collect()
}

// ---------------------------------------------------------------------------
// Generators

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum S {
    Nat,
    List,
    Tree,
    Int,
}

#[derive(Clone, Copy)]
struct Gen {
    lists: bool,
    trees: bool,
    selectors: bool,
}

impl Gen {
    const FULL: Gen = Gen {
        lists: true,
        trees: true,
        selectors: true,
    };
}

fn one(options: Vec<BoxedStrategy<String>>) -> BoxedStrategy<String> {
    Union::new(options).boxed()
}

fn lit() -> BoxedStrategy<String> {
    (-3i64..=3)
        .prop_map(|n| if n < 0 { format!("(- {})", -n) } else { n.to_string() })
        .boxed()
}

fn term(sort: S, depth: u32, g: Gen) -> BoxedStrategy<String> {
    let names: &[&str] = match sort {
        S::Nat => &["x", "y", "Z"],
        S::List => &["l", "k", "nil"],
        S::Tree => &["t", "leaf"],
        S::Int => &["i", "j"],
    };
    let mut options: Vec<BoxedStrategy<String>> = names.iter().map(|n| Just(n.to_string()).boxed()).collect();
    if sort == S::Int {
        options.push(lit());
    }
    if depth == 0 {
        return one(options);
    }
    let d = depth - 1;
    match sort {
        S::Nat => {
            options.push(term(S::Nat, d, g).prop_map(|t| format!("(S {t})")).boxed());
            if g.selectors {
                options.push(term(S::Nat, d, g).prop_map(|t| format!("(p {t})")).boxed());
            }
        }
        S::List => {
            options.push((term(S::Int, d, g), term(S::List, d, g)).prop_map(|(h, t)| format!("(cons {h} {t})")).boxed());
            if g.selectors {
                options.push(term(S::List, d, g).prop_map(|t| format!("(tail {t})")).boxed());
            }
        }
        S::Tree => {
            options.push(
                (term(S::Tree, d, g), term(S::Int, d, g), term(S::Tree, d, g))
                    .prop_map(|(l, v, r)| format!("(node {l} {v} {r})"))
                    .boxed(),
            );
            if g.selectors {
                options.push(term(S::Tree, d, g).prop_map(|t| format!("(left {t})")).boxed());
            }
        }
        S::Int => {
            options.push((term(S::Int, d, g), term(S::Int, d, g)).prop_map(|(a, b)| format!("(+ {a} {b})")).boxed());
            options.push((term(S::Int, d, g), term(S::Int, d, g)).prop_map(|(a, b)| format!("(- {a} {b})")).boxed());
            options.push((lit(), term(S::Int, d, g)).prop_map(|(a, b)| format!("(* {a} {b})")).boxed());
            if g.selectors && g.lists {
                options.push(term(S::List, d, g).prop_map(|t| format!("(head {t})")).boxed());
            }
            if g.selectors && g.trees {
                options.push(term(S::Tree, d, g).prop_map(|t| format!("(val {t})")).boxed());
            }
        }
    }
    one(options)
}

fn atom(g: Gen, depth: u32) -> BoxedStrategy<String> {
    let cmp = prop_oneof![Just("<"), Just("<="), Just("="), Just(">="), Just(">")];
    let mut options = vec![
        (cmp, term(S::Int, depth, g), term(S::Int, depth, g))
            .prop_map(|(op, a, b)| format!("({op} {a} {b})"))
            .boxed(),
        (term(S::Nat, depth, g), term(S::Nat, depth, g)).prop_map(|(a, b)| format!("(= {a} {b})")).boxed(),
        (term(S::Nat, depth, g), term(S::Nat, depth, g)).prop_map(|(a, b)| format!("(distinct {a} {b})")).boxed(),
    ];
    let mut adt = |s: S| {
        options.push((term(s, depth, g), term(s, depth, g)).prop_map(|(a, b)| format!("(= {a} {b})")).boxed());
        options.push((term(s, depth, g), term(s, depth, g)).prop_map(|(a, b)| format!("(not (= {a} {b}))")).boxed());
    };
    if g.lists {
        adt(S::List);
    }
    if g.trees {
        adt(S::Tree);
    }
    if g.selectors {
        options.push(term(S::Nat, depth, g).prop_map(|t| format!("((_ is S) {t})")).boxed());
        if g.lists {
            options.push(term(S::List, depth, g).prop_map(|t| format!("((_ is cons) {t})")).boxed());
        }
    }
    one(options)
}

fn formula(g: Gen, depth: u32) -> BoxedStrategy<String> {
    atom(g, depth)
        .prop_recursive(2, 12, 3, |inner| {
            prop_oneof![
                vec(inner.clone(), 1..4).prop_map(|ps| format!("(and {})", ps.join(" "))),
                vec(inner.clone(), 1..4).prop_map(|ps| format!("(or {})", ps.join(" "))),
                inner.prop_map(|p| format!("(not {p})")),
            ]
        })
        .boxed()
}

const PREDICATES: &str = "(declare-fun P (nat Int) Bool)\n(declare-fun Q (ilist nat) Bool)\n\
    (declare-fun R (Int) Bool)\n(declare-fun T (tree Int) Bool)\n";

fn pred_atom() -> BoxedStrategy<String> {
    let g = Gen::FULL;
    prop_oneof![
        (term(S::Nat, 2, g), term(S::Int, 1, g)).prop_map(|(a, b)| format!("(P {a} {b})")),
        (term(S::List, 2, g), term(S::Nat, 1, g)).prop_map(|(a, b)| format!("(Q {a} {b})")),
        term(S::Int, 2, g).prop_map(|a| format!("(R {a})")),
        (term(S::Tree, 2, g), term(S::Int, 1, g)).prop_map(|(a, b)| format!("(T {a} {b})")),
    ]
    .boxed()
}

fn clause_text() -> BoxedStrategy<String> {
    let head = prop_oneof![1 => Just("false".to_string()), 3 => pred_atom()];
    (vec(atom(Gen::FULL, 2), 0..3), vec(pred_atom(), 0..3), head)
        .prop_map(|(cs, body, head)| {
            let parts: Vec<String> = cs.into_iter().chain(body).collect();
            let vars = "((x nat) (y nat) (l ilist) (k ilist) (t tree) (i Int) (j Int))";
            if parts.is_empty() {
                format!("(assert (forall {vars} {head}))")
            } else {
                format!("(assert (forall {vars} (=> (and {}) {head})))", parts.join(" "))
            }
        })
        .boxed()
}

fn system_text() -> BoxedStrategy<String> {
    vec(clause_text(), 1..5)
        .prop_map(|cs| format!("(set-logic HORN)\n{DATATYPES}\n{PREDICATES}{}\n(check-sat)\n", cs.join("\n")))
        .boxed()
}

/// Ground values of an ADT with constructor-node size at most `budget`.
fn value(dt: &Datatypes, adt: &str, budget: usize) -> BoxedStrategy<Value> {
    let mut options = Vec::new();
    for c in &dt.adt(adt).unwrap().constructors {
        let ints = c.fields.iter().filter(|f| !f.sort.is_adt()).count();
        let kids = c.fields.len() - ints;
        let room = budget.saturating_sub(1 + ints);
        if kids > 0 && room < kids {
            continue;
        }
        let share = if kids == 0 { 0 } else { room / kids };
        let fields: Vec<BoxedStrategy<Value>> = c
            .fields
            .iter()
            .map(|f| match &f.sort {
                Sort::Adt(a) => value(dt, a, share),
                _ => (-8i64..=8).prop_map(Value::int).boxed(),
            })
            .collect();
        let c = c.clone();
        options.push(fields.prop_map(move |args| Value::Adt(c.clone(), args)).boxed());
    }
    Union::new(options).boxed()
}

fn run_property<T: Strategy>(seed: u8, strategy: T, test: impl Fn(T::Value) -> Result<(), TestCaseError>) -> Outcome {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        max_global_rejects: CASES * 4,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]));
    runner.run(&strategy, test).map_err(|e| e.to_string())?;
    Ok(format!("{CASES} cases, seed {seed}"))
}

fn random_cata(dt: &Datatypes, degree: usize, values: &[i64]) -> Catamorphism {
    let template = TemplateCatamorphism::linear(dt, degree, None);
    template.instantiate(&assignment(&template, values)).unwrap()
}

fn cata_strategy(dt: &Datatypes, bound: i64) -> BoxedStrategy<(usize, Vec<i64>)> {
    let counts: Vec<usize> = (1..=3).map(|d| TemplateCatamorphism::linear(dt, d, None).params.len()).collect();
    (1usize..=3)
        .prop_flat_map(move |d| (Just(d), vec(-bound..=bound, counts[d - 1])))
        .boxed()
}

// ---------------------------------------------------------------------------
// End-to-end criteria

fn sat_with_checked_model(name: &str) -> Result<(SolveResult, catalia::driver::SolveStats), String> {
    let sys = common::system(name);
    let (result, stats) = solve(&sys, &common::solve_config());
    let SolveResult::Satisfiable { model, .. } = &result else {
        return Err(format!("expected sat, got {}", result.verdict()));
    };
    let model = model.as_ref().ok_or("model unavailable")?;
    let report = check_model_on_ground_instances(
        model,
        &sys,
        &SampleConfig {
            samples: 500,
            ..SampleConfig::default()
        },
    );
    check(report.violations.is_empty(), format!("{} violations", report.violations.len()))?;
    check(report.checked > 0, "no instance checked")?;
    Ok((result, stats))
}

fn criterion_1() -> Outcome {
    let (_, stats) = sat_with_checked_model("plus_nat.smt2")?;
    Ok(format!("sat after {} iteration(s), model passes 500-sample check", stats.iterations))
}

fn criterion_2() -> Outcome {
    let (result, stats) = sat_with_checked_model("even_odd_list.smt2")?;
    check(stats.rung == Some(0), format!("needed ladder rung {:?}", stats.rung))?;
    let SolveResult::Satisfiable { cata, .. } = result else { unreachable!() };
    Ok(format!("sat with {cata} from the first template"))
}

fn criterion_3() -> Outcome {
    let sys = common::system("plus_int.smt2");
    let abs = abstract_system(&Catamorphism::size(&sys.datatypes), &sys).map_err(|e| e.to_string())?;
    check(abs.system.clauses == sys.clauses, "abstraction changed an integer-only system")?;
    let (result, _) = solve(&sys, &common::solve_config());
    check(matches!(result, SolveResult::Satisfiable { .. }), format!("got {}", result.verdict()))?;
    Ok("sat, abstraction is the identity".into())
}

fn criterion_4() -> Outcome {
    let sys = common::system("plus_nat_unsat.smt2");
    let (result, _) = solve(&sys, &common::solve_config());
    let SolveResult::Unsatisfiable { counterexample, .. } = &result else {
        return Err(format!("expected unsat, got {}", result.verdict()));
    };
    let backend = common::backend();
    let theta = &counterexample.constraint;
    check(
        matches!(feasibility(&backend, theta, &sys, Some(E2E_LIMIT)), Feasibility::Sat(_)),
        "θ is not satisfiable",
    )?;
    let dt = sys.datatypes.clone();
    let mut decide = |c: &Constraint| -> catalia::backend::Result<Option<bool>> {
        Ok(match backend.check_constraint(c, &dt, Logic::AdtLia, Some(Duration::from_secs(10)))? {
            SmtResult::Sat(_) => Some(true),
            SmtResult::Unsat => Some(false),
            _ => None,
        })
    };
    let proof = internal_unfold_unsat(&sys, 4, &mut decide).map_err(|e| e.to_string())?;
    let proof = proof.ok_or("no refutation at depth 4")?;
    Ok(format!("unsat, θ = {}; unfolder: {proof}", print_constraint(theta)))
}

fn criterion_5() -> Outcome {
    let sys = common::system("succ_not_zero.smt2");
    let (result, _) = solve(&sys, &common::solve_config());
    check(matches!(result, SolveResult::Satisfiable { .. }), format!("got {}", result.verdict()))?;
    let backend = common::backend();
    let size = Catamorphism::size(&sys.datatypes);
    let (augmented, _) = preprocess(&sys, true);
    let abs = abstract_system(&size, &augmented).map_err(|e| e.to_string())?;
    let on = backend.chc_check_sat(&abs.system).map_err(|e| e.to_string())?;
    check(matches!(on, ChcResult::Sat(_)), "augmented abstraction is not sat")?;
    let (bare, _) = preprocess(&sys, false);
    let abs = abstract_system(&size, &bare).map_err(|e| e.to_string())?;
    let ChcResult::Unsat(proof) = backend.chc_check_sat(&abs.system).map_err(|e| e.to_string())? else {
        return Err("abstraction without admissibility is not refutable".into());
    };
    let cex = replay_proof(&proof, &bare, &abs.origin).map_err(|e| e.to_string())?;
    let theta = simplify(&cex.constraint);
    check(
        feasibility(&backend, &theta, &bare, Some(E2E_LIMIT)) == Feasibility::Unsat,
        "refutation is not spurious",
    )?;
    Ok(format!("sat; without augmentation the size abstraction is spuriously refuted by {}", print_constraint(&theta)))
}

// ---------------------------------------------------------------------------
// Worked examples

fn criterion_6() -> Outcome {
    let sys = common::system("plus_nat.smt2");
    let (pre, _) = preprocess(&sys, true);
    let zero = Catamorphism::zero(&pre.datatypes, 1);
    let abs = abstract_system(&zero, &pre).map_err(|e| e.to_string())?;
    let backend = common::backend();
    let ChcResult::Unsat(proof) = backend.chc_check_sat(&abs.system).map_err(|e| e.to_string())? else {
        return Err("zero abstraction is not refuted".into());
    };
    let cex = replay_proof(&proof, &pre, &abs.origin).map_err(|e| e.to_string())?;
    let theta = simplify(&cex.constraint);
    let shape_ok = match &theta {
        Constraint::Cmp(CmpOp::AdtEq, a, b) => {
            let is_zero = |t: &Term| matches!(t, Term::Cons(c, args) if c.name == "Z" && args.is_empty());
            let is_succ_var =
                |t: &Term| matches!(t, Term::Cons(c, args) if c.name == "S" && matches!(args.as_slice(), [Term::Var(_)]));
            (is_zero(a) && is_succ_var(b)) || (is_zero(b) && is_succ_var(a))
        }
        _ => false,
    };
    check(shape_ok, format!("θ simplifies to {}", print_constraint(&theta)))?;
    check(feasibility(&backend, &theta, &pre, Some(UNIT_LIMIT * 10)) == Feasibility::Unsat, "θ is feasible")?;
    Ok(format!("θ = {}, infeasible", print_constraint(&theta)))
}

fn criterion_7() -> Outcome {
    let dt = datatypes("(declare-datatypes ((ilist 0)) (((nil) (cons (head Int) (tail ilist)))))");
    let l = Var::new("l", Sort::adt("ilist"));
    let phi = parse_formula(&parse_all("(not (= (cons 0 (cons 0 l)) nil))").unwrap()[0], &dt, std::slice::from_ref(&l))
        .map_err(|e| e.to_string())?;
    let template = TemplateCatamorphism::linear(&dt, 1, Some(1));
    let nil = Value::Adt(dt.constructor("nil").unwrap().clone(), vec![]);
    let ground: Env = [("l".to_string(), nil)].into_iter().collect();
    let theta = reduce_ground(&encode(&phi, 1), &template, &ground).map_err(|e| e.to_string())?;
    // a: tail coefficient, b: head coefficient, c: cons constant, d: nil constant.
    let names = ["cons!0!1", "cons!0!0", "cons!0!k", "nil!0!k"];
    let expected = |a: i64, _b: i64, c: i64, d: i64| a * (a * d + c) + c != d;
    for a in -3..=3 {
        for b in -3..=3 {
            for c in -3..=3 {
                for d in -3..=3 {
                    let env: Env = names.iter().zip([a, b, c, d]).map(|(n, v)| (n.to_string(), Value::int(v))).collect();
                    let got = eval_constraint(&theta, &env, None).map_err(|e| e.to_string())?;
                    check(got == expected(a, b, c, d), format!("Θ differs at a={a} b={b} c={c} d={d}"))?;
                }
            }
        }
    }
    let model: ParamAssignment = names.iter().zip([0, 0, 1, 0]).map(|(n, v)| (n.to_string(), BigInt::from(v))).collect();
    check(eval_constraint(&theta, &param_env(&model), None) == Ok(true), "{a↦0, b↦0, c↦1, d↦0} violates Θ")?;
    let cata1 = template.instantiate(&model).map_err(|e| e.to_string())?;
    check(eval_with(&encode(&phi, 1), &ground, &cata1), "cata₁ does not satisfy the grounded obligation")?;

    let backend = common::backend();
    let ob = ProofObligation {
        vars: vec![l],
        body: phi.clone(),
    };
    let zero = Catamorphism::zero(&dt, 1);
    let s = synthesis(&backend, &[ob], &zero, &Constraint::True, &template, &dt, &SynthConfig::default())
        .map_err(|e| e.to_string())?
        .ok_or("synthesis failed")?;
    check(eval_constraint(&s.theta, &param_env(&s.assignment), None) == Ok(true), "result violates its Θ")?;
    check(eval_constraint(&theta, &param_env(&s.assignment), None) == Ok(true), "result violates a·(a·d+c)+c ≠ d")?;
    check(s.cata == template.instantiate(&s.assignment).unwrap(), "catamorphism differs from its assignment")?;
    Ok(format!("Θ = {}; synthesized {}", print_constraint(&theta), s.cata))
}

// ---------------------------------------------------------------------------
// Property suites

fn criterion_8() -> Outcome {
    let dt = datatypes(DATATYPES);
    let strategy = (system_text(), cata_strategy(&dt, 3), any::<bool>());
    run_property(8, strategy, |(text, (degree, values), augment)| {
        let sys = parse_system(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let cata = random_cata(&sys.datatypes, degree, &values);
        let (pre, _) = preprocess(&sys, augment);
        let abs = abstract_system(&cata, &pre).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(is_adt_free(&abs.system), "ADT left in abstraction of\n{}", text);
        Ok(())
    })
}

fn criterion_9() -> Outcome {
    let dt = datatypes(DATATYPES);
    let adts = prop_oneof![Just("nat"), Just("ilist"), Just("tree")];
    let d2 = dt.clone();
    let strategy = (cata_strategy(&dt, 3), adts.prop_flat_map(move |a| value(&d2, a, 8)));
    run_property(9, strategy, |((degree, values), v)| {
        prop_assert!(v.size() <= 8);
        let cata = random_cata(&dt, degree, &values);
        let image = abstract_term(&AbstractionEnv::new(), &cata, &v.to_term()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let got: Vec<BigInt> = image
            .iter()
            .map(|t| eval_term(t, &Env::new(), None).unwrap().as_int().unwrap().clone())
            .collect();
        prop_assert_eq!(got, oracle_fold(&cata, &v), "value {}", v);
        Ok(())
    })
}

fn obligation_vars() -> Vec<Var> {
    vec![
        Var::new("x", Sort::adt("nat")),
        Var::new("y", Sort::adt("nat")),
        Var::new("l", Sort::adt("ilist")),
        Var::new("k", Sort::adt("ilist")),
        Var::int("i"),
        Var::int("j"),
    ]
}

fn ground_env(dt: &Datatypes) -> BoxedStrategy<Env> {
    (value(dt, "nat", 6), value(dt, "nat", 6), value(dt, "ilist", 6), value(dt, "ilist", 6), -8i64..=8, -8i64..=8)
        .prop_map(|(x, y, l, k, i, j)| {
            [("x", x), ("y", y), ("l", l), ("k", k), ("i", Value::int(i)), ("j", Value::int(j))]
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect()
        })
        .boxed()
}

const OBLIGATION_GEN: Gen = Gen {
    lists: true,
    trees: false,
    selectors: false,
};

fn parse_obligation(text: &str, dt: &Datatypes) -> Result<Constraint, TestCaseError> {
    parse_formula(&parse_all(text).unwrap()[0], dt, &obligation_vars()).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))
}

fn criterion_10() -> Outcome {
    let dt = datatypes(NAT_LIST);
    let strategy = (formula(OBLIGATION_GEN, 2), ground_env(&dt), cata_strategy(&dt, 2));
    run_property(10, strategy, |(text, ground, (degree, values))| {
        let phi = parse_obligation(&text, &dt)?;
        let enc = encode(&phi, degree);
        let template = TemplateCatamorphism::linear(&dt, degree, Some(2));
        let m = assignment(&template, &values);
        let reduced = reduce_ground(&enc, &template, &ground).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(reduced.free_vars().iter().all(|v| m.contains_key(&v.name)), "non-parameter left in {}", print_constraint(&reduced));
        let grounded = eval_constraint(&reduced, &param_env(&m), None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let direct = eval_with(&enc, &ground, &template.instantiate(&m).unwrap());
        prop_assert_eq!(grounded, direct, "{}", text);
        Ok(())
    })
}

fn criterion_11() -> Outcome {
    let dt = datatypes(NAT_LIST);
    let g = Gen {
        lists: false,
        trees: false,
        selectors: false,
    };
    let vars = [
        Var::new("x", Sort::adt("nat")),
        Var::new("y", Sort::adt("nat")),
        Var::int("i"),
        Var::int("j"),
    ];
    let nats = |max: usize| -> Vec<Value> {
        let z = Value::Adt(dt.constructor("Z").unwrap().clone(), vec![]);
        let s = dt.constructor("S").unwrap().clone();
        std::iter::successors(Some(z), |v| Some(Value::Adt(s.clone(), vec![v.clone()]))).take(max).collect()
    };
    let small = (nats(5), (-8i64..=8).map(Value::int).collect::<Vec<_>>());
    let wide = (nats(12), (-24i64..=24).map(Value::int).collect::<Vec<_>>());
    let envs = |(ns, is): &(Vec<Value>, Vec<Value>)| {
        let mut out = Vec::new();
        for x in ns {
            for y in ns {
                for i in is {
                    for j in is {
                        let e: Env = [("x", x), ("y", y), ("i", i), ("j", j)]
                            .into_iter()
                            .map(|(n, v)| (n.to_string(), v.clone()))
                            .collect();
                        out.push(e);
                    }
                }
            }
        }
        out
    };
    let small_envs = envs(&small);
    run_property(11, formula(g, 2), |text| {
        let c = parse_formula(&parse_all(&text).unwrap()[0], &dt, &vars).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let s = simplify(&c);
        let mut c_sat = false;
        let mut s_sat = false;
        for e in &small_envs {
            let cv = eval_constraint(&c, e, None).unwrap();
            let sv = eval_constraint(&s, e, None).unwrap();
            prop_assert!(!cv || sv, "{} holds but {} does not", text, print_constraint(&s));
            c_sat |= cv;
            s_sat |= sv;
        }
        if s_sat && !c_sat {
            let found = envs(&wide).iter().any(|e| eval_constraint(&c, e, None).unwrap());
            prop_assert!(found, "{} unsatisfiable but {} satisfiable", text, print_constraint(&s));
        }
        Ok(())
    })
}

fn criterion_12() -> Outcome {
    let dt = datatypes(NAT_LIST);
    let template = TemplateCatamorphism::linear(&dt, 1, Some(1));
    let n = template.params.len();
    let strategy = (formula(OBLIGATION_GEN, 2), vec(ground_env(&dt), 1..4), vec(-1i64..=1, n));
    let properties = run_property(12, strategy, |(text, grounds, values)| {
        let enc = encode(&parse_obligation(&text, &dt)?, 1);
        let m = assignment(&template, &values);
        let candidate = template.instantiate(&m).unwrap();
        let mut theta = Constraint::True;
        for g in &grounds {
            let reduced = reduce_ground(&enc, &template, g).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if !eval_with(&enc, g, &candidate) {
                prop_assert_eq!(eval_constraint(&reduced, &param_env(&m), None), Ok(false), "refuted candidate survives");
            }
            theta = Constraint::and([theta, reduced]);
        }
        match grid_search(&theta, &template, 1_000_000) {
            Some(found) => {
                prop_assert_eq!(eval_constraint(&theta, &param_env(&found), None), Ok(true));
                let cata = template.instantiate(&found).unwrap();
                prop_assert!(grounds.iter().all(|g| eval_with(&enc, g, &cata)));
            }
            None => prop_assert_eq!(eval_constraint(&theta, &param_env(&m), None), Ok(false)),
        }
        Ok(())
    })?;

    // Live synthesis on the zero-catamorphism obligation over nat.
    let backend = common::backend();
    let nat = datatypes("(declare-datatypes ((nat 0)) (((Z) (S (p nat)))))");
    let n_var = Var::new("n", Sort::adt("nat"));
    let body = parse_formula(&parse_all("(not (= Z (S n)))").unwrap()[0], &nat, std::slice::from_ref(&n_var)).unwrap();
    let template = TemplateCatamorphism::linear(&nat, 1, Some(1));
    let ob = ProofObligation {
        vars: vec![n_var],
        body,
    };
    let s = synthesis(&backend, &[ob], &Catamorphism::zero(&nat, 1), &Constraint::True, &template, &nat, &SynthConfig::default())
        .map_err(|e| e.to_string())?
        .ok_or("synthesis failed on ∀n. Z ≠ S(n)")?;
    check(eval_constraint(&s.theta, &param_env(&s.assignment), None) == Ok(true), "synthesis result violates its Θ")?;
    Ok(format!("{properties}; live synthesis gives {}", s.cata))
}

fn alpha_equivalent(a: &ChcSystem, b: &ChcSystem) -> bool {
    a.datatypes == b.datatypes
        && a.predicates == b.predicates
        && a.clauses.len() == b.clauses.len()
        && a.clauses.iter().zip(&b.clauses).all(|(x, y)| x.canonical() == y.canonical())
}

fn round_trip(text: &str) -> Result<(), String> {
    let first = parse_system(text).map_err(|e| e.to_string())?;
    let printed = print_system(&first);
    let second = parse_system(&printed).map_err(|e| format!("{e}\n{printed}"))?;
    check(alpha_equivalent(&first, &second), format!("not α-equivalent:\n{printed}"))?;
    check(print_system(&second) == printed, "printing is not a fixed point")
}

fn criterion_13() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    files.sort();
    for f in &files {
        round_trip(&std::fs::read_to_string(f).unwrap()).map_err(|e| format!("{}: {e}", f.display()))?;
    }
    let random = run_property(13, system_text(), |text| round_trip(&text).map_err(TestCaseError::fail))?;
    Ok(format!("{} corpus files; random systems: {random}", files.len()))
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 13] = [
        ("nat system is sat with a checked model", E2E_LIMIT, criterion_1),
        ("even/odd list system is sat from the first template", E2E_LIMIT, criterion_2),
        ("integer-only system is sat", E2E_LIMIT, criterion_3),
        ("unsat PlusNat variant with a real refutation", E2E_LIMIT, criterion_4),
        ("admissibility augmentation is necessary", E2E_LIMIT, criterion_5),
        ("replayed counterexample Z = S(n) is spurious", UNIT_LIMIT, criterion_6),
        ("encoder and grounding reproduce Θ", UNIT_LIMIT, criterion_7),
        ("abstractions are ADT-free", Duration::MAX, criterion_8),
        ("abstraction commutes with evaluation", Duration::MAX, criterion_9),
        ("grounded encoding agrees with evaluation", Duration::MAX, criterion_10),
        ("simplification preserves satisfiability", Duration::MAX, criterion_11),
        ("CEGIS progress", Duration::MAX, criterion_12),
        ("parse/print round trip", Duration::MAX, criterion_13),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = started.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed > *limit {
                Err(format!("took {:.1}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
            } else {
                Ok(d)
            }
        });
        match &outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{:>6.2}s] {name}: {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                println!("criterion {:>2} FAIL [{:>6.2}s] {name}: {why}", i + 1, elapsed.as_secs_f64());
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
