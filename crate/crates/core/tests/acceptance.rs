//! Runs the reproduction suite and prints one line per criterion. Built
//! without the test harness so the lines are shown on success too.

use std::process::ExitCode;

use drinfeld_core::suite::{run_suite, RunConfig};

fn main() -> ExitCode {
    let report = run_suite(&RunConfig::default());
    print!("{}", report.render());
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
