use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use catalia::backend::BackendConfig;
use catalia::chc::{parse_system, print_constraint};
use catalia::driver::{bench_csv, bench_summary, benchmark_run, solve, SolveConfig, SolveResult};
use clap::Parser;

/// Decides satisfiability of constrained Horn clauses over algebraic data
/// types by catamorphism abstraction.
#[derive(Parser, Debug)]
#[command(name = "catalia", version)]
struct Cli {
    /// SMT-LIB2 input; standard input when omitted.
    file: Option<PathBuf>,
    /// Global time budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Solver executable.
    #[arg(long, env = "CATALIA_BACKEND")]
    backend: Option<PathBuf>,
    /// Solver arguments, whitespace separated.
    #[arg(long, allow_hyphen_values = true)]
    backend_args: Option<String>,
    /// Candidate test timeout in seconds.
    #[arg(long, default_value_t = 1.0)]
    default_test_timeout: f64,
    /// Do not bound candidate tests (global budget only).
    #[arg(long)]
    no_timeout: bool,
    /// Number of template rungs tried.
    #[arg(long, default_value_t = 8)]
    ladder_cap: usize,
    /// Try rungs without limit, growing the degree too.
    #[arg(long)]
    no_degree_cap: bool,
    /// Sampled ground instances in the model check.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the model as SMT-LIB2 definitions.
    #[arg(long)]
    print_model: bool,
    /// Print the counterexample and its refutation.
    #[arg(long)]
    print_proof: bool,
    /// Write every counterexample to DIR.
    #[arg(long, value_name = "DIR")]
    dump_cex: Option<PathBuf>,
    /// Depth of the internal unfolder used when no solver proof is available.
    #[arg(long)]
    internal_bmc_depth: Option<usize>,
    /// Transcript directory for solver answers.
    #[arg(long, value_name = "DIR")]
    transcripts: Option<PathBuf>,
    /// Backend config file (key = value lines).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Skip admissibility augmentation.
    #[arg(long)]
    no_augment: bool,
    /// Solve every .smt2 file in DIR and print a CSV table.
    #[arg(long, value_name = "DIR", conflicts_with = "file")]
    benchmark: Option<PathBuf>,
}

fn config(cli: &Cli) -> Result<SolveConfig, String> {
    let mut backend = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            BackendConfig::from_kv(&text).map_err(|e| e.to_string())?
        }
        None => BackendConfig::default(),
    };
    if let Some(b) = &cli.backend {
        backend.executable = b.clone();
    }
    if let Some(a) = &cli.backend_args {
        backend.set("chc_args", a)?;
        backend.set("smt_args", a)?;
    }
    if let Some(d) = cli.internal_bmc_depth {
        backend.unfold_depth = d;
    }
    if let Some(t) = &cli.transcripts {
        backend.transcripts = Some(t.clone());
    }
    let seconds = |s: f64, what: &str| {
        Duration::try_from_secs_f64(s)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| format!("{what} must be a positive number of seconds"))
    };
    let mut cfg = SolveConfig {
        backend,
        timeout: seconds(cli.timeout, "--timeout")?,
        default_test_timeout: seconds(cli.default_test_timeout, "--default-test-timeout")?,
        test_timeout: !cli.no_timeout,
        ladder_cap: (!cli.no_degree_cap).then_some(cli.ladder_cap),
        grow_degree: cli.no_degree_cap,
        dump_cex: cli.dump_cex.clone(),
        augment: !cli.no_augment,
        ..SolveConfig::default()
    };
    cfg.sample.samples = cli.samples;
    cfg.sample.seed = cli.seed;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let cfg = config(cli)?;
    if let Some(dir) = &cli.benchmark {
        let rows = benchmark_run(dir, &cfg).map_err(|e| format!("{}: {e}", dir.display()))?;
        print!("{}", bench_csv(&rows));
        eprintln!("{}", bench_summary(&rows));
        return Ok(if rows.iter().any(|r| r.is_mismatch()) { ExitCode::from(1) } else { ExitCode::SUCCESS });
    }
    let text = match &cli.file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            s
        }
    };
    let system = parse_system(&text).map_err(|e| e.to_string())?;
    let (result, stats) = solve(&system, &cfg);
    println!("{}", result.verdict());
    match &result {
        SolveResult::Satisfiable { model, cata } => {
            log::info!("catamorphism: {cata}");
            if cli.print_model {
                match model {
                    Some(m) => {
                        let preds: Vec<String> = system.predicates.keys().cloned().collect();
                        print!("{}", m.to_smt(&system.datatypes, Some(&preds)));
                    }
                    None => println!("; model unavailable"),
                }
            }
        }
        SolveResult::Unsatisfiable {
            counterexample,
            witness,
            proof,
        } => {
            if cli.print_proof {
                println!("; counterexample\n{}", print_constraint(&counterexample.constraint));
                let ids: Vec<String> = counterexample.clauses.iter().map(|c| format!("#{c}")).collect();
                println!("; clauses {}", ids.join(" "));
                println!("; abstract refutation: {proof}");
                for (k, v) in witness {
                    println!("; {k} = {v}");
                }
            }
        }
        SolveResult::Unknown(reason) => eprintln!("unknown: {reason}"),
    }
    log::info!(
        "{} iteration(s), {} obligation(s), {:.2}s",
        stats.iterations,
        stats.obligations,
        stats.elapsed.as_secs_f64()
    );
    Ok(if matches!(result, SolveResult::Unknown(_)) { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
