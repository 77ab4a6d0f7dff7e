//! All ten acceptance criteria, one line each. `TAYDOM_SCALE` shrinks the
//! random batteries for quick local runs.

use std::process::ExitCode;
use std::time::Instant;

use taydom_cli::suite::{Suite, SuiteConfig};

fn main() -> ExitCode {
    let scale = std::env::var("TAYDOM_SCALE").ok().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let mut suite = Suite::new(SuiteConfig { seed: 0, scale });
    let mut failed = 0;
    let mut clock = Instant::now();
    let results = suite.run(&[], |r| {
        println!("{}  [{:.1}s]", r.line(), clock.elapsed().as_secs_f64());
        for e in &r.examples {
            println!("    {e}");
        }
        clock = Instant::now();
    });
    for r in &results {
        failed += !r.pass as usize;
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
