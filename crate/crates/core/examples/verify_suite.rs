//! Runs the full check suite and prints one line per criterion.
//!
//! `cargo run --release --example verify_suite -- 10`

use landau_torus::verify::{render, run_suite, SuiteOptions};

fn main() -> landau_torus::Result<()> {
    let n_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let t = std::time::Instant::now();
    let results = run_suite(&SuiteOptions { n_max, ..Default::default() })?;
    print!("{}", render(&results));
    println!("{:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
