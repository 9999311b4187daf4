//! The abstraction-refinement loop, run configuration, and the benchmark
//! harness.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::abstraction::{abstract_system, check_model_on_ground_instances, concretize_model, ConcreteModel, SampleConfig};
use crate::backend::{Backend, BackendConfig, ChcResult, ResolutionProof};
use crate::cata::{Catamorphism, Ladder};
use crate::chc::{parse_system, print_constraint, ChcSystem, Constraint, Env, ParseError};
use crate::counterexample::{feasibility, replay_proof, simplify, Counterexample, Feasibility};
use crate::preprocess::preprocess;
use crate::synthesis::{synthesis, ProofObligation, SynthConfig};

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub backend: BackendConfig,
    /// Wall-clock budget for one solve.
    pub timeout: Duration,
    /// Candidate test timeout after the first test of a synthesis call.
    pub default_test_timeout: Duration,
    /// Bound candidate tests by `default_test_timeout`; when false, tests
    /// run until the global budget is spent.
    pub test_timeout: bool,
    /// Number of template rungs tried; `None` for no limit.
    pub ladder_cap: Option<usize>,
    /// Past the fixed ladder prefix, grow the degree along with the bound.
    pub grow_degree: bool,
    pub sample: SampleConfig,
    /// Directory receiving one SMT-LIB2 file per counterexample.
    pub dump_cex: Option<PathBuf>,
    /// Admissibility augmentation; disabling it is for experiments only.
    pub augment: bool,
    /// Spurious counterexamples with undecided feasibility tolerated per template.
    pub unknown_feasibility_cap: usize,
    /// Total refinement rounds before giving up.
    pub max_iterations: usize,
}

impl Default for SolveConfig {
    fn default() -> SolveConfig {
        SolveConfig {
            backend: BackendConfig::default(),
            timeout: Duration::from_secs(60),
            default_test_timeout: Duration::from_secs(1),
            test_timeout: true,
            ladder_cap: Some(8),
            grow_degree: false,
            sample: SampleConfig::default(),
            dump_cex: None,
            augment: true,
            unknown_feasibility_cap: 3,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    LadderExhausted,
    Timeout,
    IterationLimit,
    BackendFailure(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::LadderExhausted => write!(f, "ladder exhausted"),
            UnknownReason::Timeout => write!(f, "timeout"),
            UnknownReason::IterationLimit => write!(f, "iteration limit"),
            UnknownReason::BackendFailure(m) => write!(f, "backend failure: {m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SolveResult {
    /// `model` is `None` when the solver's abstract model was not usable.
    Satisfiable {
        model: Option<ConcreteModel>,
        cata: Catamorphism,
    },
    Unsatisfiable {
        counterexample: Counterexample,
        witness: Env,
        proof: ResolutionProof,
    },
    Unknown(UnknownReason),
}

impl SolveResult {
    pub fn verdict(&self) -> &'static str {
        match self {
            SolveResult::Satisfiable { .. } => "sat",
            SolveResult::Unsatisfiable { .. } => "unsat",
            SolveResult::Unknown(_) => "unknown",
        }
    }
}

/// What a solve did, for diagnostics and the benchmark table.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Abstract CHC queries issued.
    pub iterations: usize,
    /// Index of the last template rung entered (0-based), if any.
    pub rung: Option<usize>,
    pub obligations: usize,
    pub repeated_counterexamples: usize,
    pub elapsed: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Preprocessed system plus the state of the refinement loop.
pub struct Solver<'c> {
    config: &'c SolveConfig,
    started: Instant,
    pub system: ChcSystem,
    pub cata: Catamorphism,
    pub obligations: Vec<ProofObligation>,
    pub stats: SolveStats,
    seen: BTreeSet<String>,
}

impl<'c> Solver<'c> {
    pub fn new(input: &ChcSystem, config: &'c SolveConfig) -> Solver<'c> {
        let (system, report) = preprocess(input, config.augment);
        log::debug!("preprocessing: {report}");
        let cata = Catamorphism::size(&system.datatypes);
        Solver {
            config,
            started: Instant::now(),
            system,
            cata,
            obligations: Vec::new(),
            stats: SolveStats::default(),
            seen: BTreeSet::new(),
        }
    }

    fn remaining(&self) -> Option<Duration> {
        self.config.timeout.checked_sub(self.started.elapsed()).filter(|d| !d.is_zero())
    }

    fn backend(&self, remaining: Duration) -> Backend {
        let mut cfg = self.config.backend.clone();
        cfg.timeout = cfg.timeout.min(remaining);
        Backend::new(cfg)
    }

    /// Runs the loop to a verdict.
    pub fn run(&mut self) -> SolveResult {
        let result = self.run_inner();
        self.stats.elapsed = self.started.elapsed();
        self.stats.obligations = self.obligations.len();
        result
    }

    fn run_inner(&mut self) -> SolveResult {
        let dt = self.system.datatypes.clone();
        for (index, rung) in Ladder::new(self.config.ladder_cap, self.config.grow_degree).enumerate() {
            self.stats.rung = Some(index);
            let template = rung.template(&dt);
            log::info!("template: degree {}, coefficients in [-{b}, {b}]", rung.degree, b = rung.bound);
            let mut theta = Constraint::True;
            let mut undecided = 0;
            loop {
                if self.stats.iterations >= self.config.max_iterations {
                    return SolveResult::Unknown(UnknownReason::IterationLimit);
                }
                let Some(remaining) = self.remaining() else {
                    return SolveResult::Unknown(UnknownReason::Timeout);
                };
                let backend = self.backend(remaining);
                self.stats.iterations += 1;
                let abs = match abstract_system(&self.cata, &self.system) {
                    Ok(a) => a,
                    Err(e) => return SolveResult::Unknown(UnknownReason::BackendFailure(e.to_string())),
                };
                log::debug!("abstraction under {}", self.cata);
                let proof = match backend.chc_check_sat(&abs.system) {
                    Ok(ChcResult::Sat(model)) => return self.satisfiable(model.as_ref()),
                    Ok(ChcResult::Unsat(p)) => p,
                    Ok(ChcResult::Unknown(r)) if self.remaining().is_none() => {
                        log::info!("abstract query: {r}");
                        return SolveResult::Unknown(UnknownReason::Timeout);
                    }
                    Ok(ChcResult::Unknown(r)) => return SolveResult::Unknown(UnknownReason::BackendFailure(r)),
                    Err(e) => return SolveResult::Unknown(UnknownReason::BackendFailure(e.to_string())),
                };
                let cex = match replay_proof(&proof, &self.system, &abs.origin) {
                    Ok(c) => c,
                    Err(e) => return SolveResult::Unknown(UnknownReason::BackendFailure(e.to_string())),
                };
                let simplified = simplify(&cex.constraint);
                let key = print_constraint(&simplified);
                log::info!("counterexample: {key}");
                if !self.seen.insert(key) {
                    self.stats.repeated_counterexamples += 1;
                }
                self.dump(&simplified);
                match feasibility(&backend, &simplified, &self.system, Some(backend.config.timeout)) {
                    Feasibility::Sat(witness) => {
                        return SolveResult::Unsatisfiable {
                            counterexample: Counterexample {
                                constraint: simplified,
                                clauses: cex.clauses,
                            },
                            witness,
                            proof,
                        }
                    }
                    Feasibility::Unsat => {}
                    Feasibility::Unknown(r) => {
                        undecided += 1;
                        log::warn!("feasibility undecided ({r}); treating the counterexample as spurious");
                        if undecided > self.config.unknown_feasibility_cap {
                            break;
                        }
                    }
                }
                self.obligations.push(ProofObligation::from_spurious(&simplified));
                let Some(remaining) = self.remaining() else {
                    return SolveResult::Unknown(UnknownReason::Timeout);
                };
                let synth_cfg = SynthConfig {
                    default_timeout: if self.config.test_timeout {
                        self.config.default_test_timeout.min(remaining)
                    } else {
                        remaining
                    },
                    first_timeout: Some(remaining),
                    theta_timeout: backend.config.timeout.min(remaining),
                    ..SynthConfig::default()
                };
                match synthesis(&backend, &self.obligations, &self.cata, &theta, &template, &dt, &synth_cfg) {
                    Ok(Some(s)) => {
                        log::info!("synthesized {} after {} round(s)", s.cata, s.iterations);
                        self.cata = s.cata;
                        theta = s.theta;
                    }
                    Ok(None) => break,
                    Err(e) => return SolveResult::Unknown(UnknownReason::BackendFailure(e.to_string())),
                }
            }
        }
        SolveResult::Unknown(UnknownReason::LadderExhausted)
    }

    fn satisfiable(&self, model: Option<&crate::abstraction::AbstractModel>) -> SolveResult {
        let Some(model) = model else {
            log::warn!("sat, but the solver's model is unavailable");
            return SolveResult::Satisfiable {
                model: None,
                cata: self.cata.clone(),
            };
        };
        let concrete = match concretize_model(model, &self.cata, &self.system) {
            Ok(m) => m,
            Err(e) => return SolveResult::Unknown(UnknownReason::BackendFailure(e.to_string())),
        };
        let report = check_model_on_ground_instances(&concrete, &self.system, &self.config.sample);
        if let Some(v) = report.violations.first() {
            log::error!("model violates clause #{} on sampled instances", v.clause);
            return SolveResult::Unknown(UnknownReason::BackendFailure(format!("model check failed on clause #{}", v.clause)));
        }
        SolveResult::Satisfiable {
            model: Some(concrete),
            cata: self.cata.clone(),
        }
    }

    fn dump(&self, theta: &Constraint) {
        let Some(dir) = &self.config.dump_cex else { return };
        let mut text = crate::chc::print_datatypes(&self.system.datatypes);
        for v in theta.free_vars() {
            let _ = writeln!(text, "(declare-const {} {})", crate::sexp::quote_symbol(&v.name), crate::chc::print_sort(&v.sort));
        }
        let _ = writeln!(text, "(assert {})\n(check-sat)", print_constraint(theta));
        let path = dir.join(format!("cex-{:03}.smt2", self.stats.iterations));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, text)) {
            log::warn!("cannot write {}: {e}", path.display());
        }
    }
}

/// Solves a parsed system.
pub fn solve(system: &ChcSystem, config: &SolveConfig) -> (SolveResult, SolveStats) {
    let mut solver = Solver::new(system, config);
    let result = solver.run();
    (result, solver.stats)
}

/// Parses and solves SMT-LIB2 text.
pub fn solve_text(text: &str, config: &SolveConfig) -> Result<(SolveResult, SolveStats), SolveError> {
    let system = parse_system(text)?;
    Ok(solve(&system, config))
}

/// One line of the benchmark table.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub expected: Option<String>,
    pub verdict: String,
    pub seconds: f64,
    pub iterations: usize,
    pub rung: Option<usize>,
}

impl BenchRow {
    /// A definite verdict contradicting the expected one.
    pub fn is_mismatch(&self) -> bool {
        match &self.expected {
            Some(e) => (self.verdict == "sat" || self.verdict == "unsat") && self.verdict != *e,
            None => false,
        }
    }
}

/// Solves every `.smt2` file in `dir` (sorted by name). An optional sidecar
/// `<name>.expected` holds the expected verdict.
pub fn benchmark_run(dir: &Path, config: &SolveConfig) -> std::io::Result<Vec<BenchRow>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in files {
        let instance = f.file_name().unwrap().to_string_lossy().into_owned();
        let expected = std::fs::read_to_string(f.with_extension("expected"))
            .ok()
            .map(|s| s.trim().to_string());
        let started = Instant::now();
        let (verdict, stats) = match std::fs::read_to_string(&f).map_err(SolveError::from).and_then(|t| solve_text(&t, config)) {
            Ok((r, s)) => (r.verdict().to_string(), s),
            Err(e) => {
                log::warn!("{instance}: {e}");
                ("error".to_string(), SolveStats::default())
            }
        };
        rows.push(BenchRow {
            instance,
            expected,
            verdict,
            seconds: started.elapsed().as_secs_f64(),
            iterations: stats.iterations,
            rung: stats.rung,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("instance,expected,verdict,seconds,iterations,rung\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{},{}",
            r.instance,
            r.expected.as_deref().unwrap_or(""),
            r.verdict,
            r.seconds,
            r.iterations,
            r.rung.map_or(String::new(), |x| x.to_string())
        );
    }
    out
}

pub fn bench_summary(rows: &[BenchRow]) -> String {
    let count = |v: &str| rows.iter().filter(|r| r.verdict == v).count();
    let mismatches: Vec<&str> = rows.iter().filter(|r| r.is_mismatch()).map(|r| r.instance.as_str()).collect();
    let mut s = format!(
        "{} instances: {} sat, {} unsat, {} unknown, {} errors",
        rows.len(),
        count("sat"),
        count("unsat"),
        count("unknown"),
        count("error")
    );
    if !mismatches.is_empty() {
        let _ = write!(s, "; MISMATCHES: {}", mismatches.join(", "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_benchmark_directory() {
        let dir = tempfile::tempdir().unwrap();
        let rows = benchmark_run(dir.path(), &SolveConfig::default()).unwrap();
        assert!(rows.is_empty());
        assert_eq!(bench_csv(&rows), "instance,expected,verdict,seconds,iterations,rung\n");
        assert!(bench_summary(&rows).starts_with("0 instances"));
    }

    #[test]
    fn mismatch_policy() {
        let row = |expected: &str, verdict: &str| BenchRow {
            instance: "x".into(),
            expected: Some(expected.into()),
            verdict: verdict.into(),
            seconds: 0.0,
            iterations: 0,
            rung: None,
        };
        assert!(row("unsat", "sat").is_mismatch());
        assert!(!row("sat", "unknown").is_mismatch());
        assert!(!row("sat", "sat").is_mismatch());
    }
}
