//! One PASS/FAIL line per acceptance criterion. Criterion 12 reruns the
//! whole suite on one thread and on eight threads and compares hashes.
//! The process fails only when a criterion outside the known-unattainable
//! list fails.

use std::process::ExitCode;

use fundcoeff::selftest::{self, KNOWN_UNATTAINABLE};

fn main() -> ExitCode {
    let report = selftest::run_full();
    println!("acceptance criteria");
    for r in &report.results {
        println!("{}", r.line());
    }
    println!("selftest hash {}", report.hash());
    println!("known unattainable: {KNOWN_UNATTAINABLE:?}");
    let unexpected = report.unexpected_failures();
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
