//! Prints one line per acceptance criterion and exits non-zero if any fails.

use fmc_cli::acceptance::run_all;

fn main() {
    let outcomes = run_all();
    println!("\nacceptance criteria");
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if outcomes.len() != 9 || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed\n", outcomes.len());
}
