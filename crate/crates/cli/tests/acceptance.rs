use std::process::ExitCode;

use hilbloc_cli::acceptance::Suite;
use hilbloc_cli::commands::DEFAULT_SEED;

fn main() -> ExitCode {
    let suite = Suite::new(DEFAULT_SEED);
    println!("acceptance suite, seed {DEFAULT_SEED}");
    let outcomes = suite.run_all(|o| println!("{}", o.line()));
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    for o in outcomes.iter().filter(|o| !o.passed) {
        println!("criterion {} detail: {}", o.id, o.detail);
    }
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
