//! Solves every instance of a directory and prints the CSV table.
//!
//! cargo run --example benchmark [DIR]   (needs z3)

use std::path::PathBuf;
use std::time::Duration;

use catalia::driver::{bench_csv, bench_summary, benchmark_run, SolveConfig};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus"));
    let config = SolveConfig {
        timeout: Duration::from_secs(30),
        ..SolveConfig::default()
    };
    let rows = benchmark_run(&dir, &config).expect("readable directory");
    print!("{}", bench_csv(&rows));
    println!("{}", bench_summary(&rows));
}
