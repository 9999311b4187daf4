mod common;

use std::path::Path;
use std::time::Duration;

use catalia::abstraction::check_model_on_ground_instances;
use catalia::backend::{internal_unfold_unsat, Logic, SmtResult};
use catalia::chc::{parse_system, Constraint};
use catalia::counterexample::{feasibility, Feasibility};
use catalia::driver::{bench_csv, bench_summary, benchmark_run, solve, SolveConfig, SolveResult, UnknownReason};

fn corpus_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

#[test]
fn corpus_verdicts_match_sidecars() {
    let rows = benchmark_run(&corpus_dir(), &common::solve_config()).unwrap();
    assert!(rows.len() >= 10);
    for r in &rows {
        assert_eq!(Some(r.verdict.as_str()), r.expected.as_deref(), "{}", r.instance);
    }
    let csv = bench_csv(&rows);
    assert_eq!(csv.lines().count(), rows.len() + 1);
    assert!(!bench_summary(&rows).contains("MISMATCH"));
}

#[test]
fn verdicts_are_sound() {
    let backend = common::backend();
    for name in ["plus_nat", "plus_nat_unsat", "list_length", "list_length_unsat", "counter_unsat", "nonempty_head", "tree_size"] {
        let sys = common::system(&format!("{name}.smt2"));
        let cfg = common::solve_config();
        match solve(&sys, &cfg).0 {
            SolveResult::Satisfiable { model, .. } => {
                let report = check_model_on_ground_instances(model.as_ref().unwrap(), &sys, &cfg.sample);
                assert!(report.violations.is_empty(), "{name}");
            }
            SolveResult::Unsatisfiable { counterexample, .. } => {
                let f = feasibility(&backend, &counterexample.constraint, &sys, None);
                assert!(matches!(f, Feasibility::Sat(_)), "{name}");
                let dt = sys.datatypes.clone();
                let mut decide = |c: &Constraint| -> catalia::backend::Result<Option<bool>> {
                    Ok(match backend.check_constraint(c, &dt, Logic::AdtLia, Some(Duration::from_secs(10)))? {
                        SmtResult::Sat(_) => Some(true),
                        SmtResult::Unsat => Some(false),
                        _ => None,
                    })
                };
                assert!(internal_unfold_unsat(&sys, 6, &mut decide).unwrap().is_some(), "{name}");
            }
            SolveResult::Unknown(r) => panic!("{name}: unknown ({r})"),
        }
    }
}

#[test]
fn verdicts_never_conflict_across_seeds_and_caps() {
    for name in ["plus_nat", "plus_nat_unsat", "even_odd_list", "succ_not_zero"] {
        let sys = common::system(&format!("{name}.smt2"));
        let mut seen = Vec::new();
        for (seed, cap) in [(0, 8), (1, 3), (2, 1)] {
            let mut cfg = common::solve_config();
            cfg.sample.seed = seed;
            cfg.ladder_cap = Some(cap);
            let v = solve(&sys, &cfg).0.verdict();
            if v != "unknown" {
                seen.push(v);
            }
        }
        seen.dedup();
        assert!(seen.len() <= 1, "{name}: {seen:?}");
    }
}

#[test]
fn obligations_persist_and_grow() {
    let sys = common::system("even_odd_list.smt2");
    let cfg = common::solve_config();
    let mut solver = catalia::driver::Solver::new(&sys, &cfg);
    let result = solver.run();
    assert_eq!(result.verdict(), "sat");
    assert_eq!(solver.stats.obligations, solver.obligations.len());
    assert!(solver.stats.iterations >= 2, "a refinement was expected");
    assert!(!solver.obligations.is_empty());
}

#[test]
fn exhausted_budget_is_unknown() {
    let sys = common::system("plus_nat.smt2");
    let cfg = SolveConfig {
        max_iterations: 0,
        ..common::solve_config()
    };
    assert!(matches!(solve(&sys, &cfg).0, SolveResult::Unknown(UnknownReason::IterationLimit)));
    let cfg = SolveConfig {
        ladder_cap: Some(0),
        ..common::solve_config()
    };
    assert!(matches!(solve(&sys, &cfg).0, SolveResult::Unknown(UnknownReason::LadderExhausted)));
}

#[test]
fn goal_free_system_is_sat_without_a_solver() {
    let sys = parse_system("(declare-fun P (Int) Bool)\n(assert (P 0))").unwrap();
    let mut cfg = SolveConfig::default();
    cfg.backend.executable = "/nonexistent/solver".into();
    assert_eq!(solve(&sys, &cfg).0.verdict(), "sat");
}
