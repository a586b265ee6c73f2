//! One line per acceptance criterion; exits nonzero if any criterion fails.
//!
//! Built without the libtest harness so the lines are printed on every `cargo test` run.

use std::process::ExitCode;

use morita_core::acceptance::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.number).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", results.len(), results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
