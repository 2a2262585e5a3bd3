//! Prints each criterion with its running time.

use drinfeld_core::suite::{run_checks_timed, RunConfig};

fn main() {
    for (r, t) in run_checks_timed(&RunConfig::default()) {
        println!("{:>6.1}s {:?} {:>2} {}: {}", t.as_secs_f64(), r.status, r.id, r.name, r.computed);
    }
}
