//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use iquantum::selftest;

fn main() -> ExitCode {
    let data = match selftest::acceptance_suite() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot load the shipped configurations: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failed = 0;
    for id in 1..=10 {
        let start = Instant::now();
        let r = selftest::run_criterion(id, &data).expect("criterion ids are 1..=10");
        println!("{r} ({:.1}s)", start.elapsed().as_secs_f64());
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
