use std::process::ExitCode;

use ncball::acceptance::{run_all, Context, DEFAULT_SEED};

fn main() -> ExitCode {
    let seed = std::env::var("NCBALL_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    println!("acceptance suites, seed {seed}");
    let outcomes = run_all(&Context::new(seed));
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
