//! Acceptance suite: one PASS/FAIL line per criterion, followed by the
//! measured values and tolerances of its parts. Runs without the test
//! harness so the report is always printed.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` test a relation that does not hold
//! for the implemented formulas; they run in full and print FAIL, and this
//! target fails if one of them unexpectedly passes so the list stays honest.

use std::process::ExitCode;

use unitary_dirac::checks::{run_all, KNOWN_UNATTAINABLE};
use unitary_dirac::tolerances::Tolerances;
use unitary_dirac::Execution;

fn main() -> ExitCode {
    let reports = run_all(Execution::Parallel, &Tolerances::default());
    for r in &reports {
        print!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} criteria pass", reports.len());
    let changed: Vec<u32> = reports
        .iter()
        .filter(|r| r.passed() == KNOWN_UNATTAINABLE.contains(&r.id))
        .map(|r| r.id)
        .collect();
    if changed.is_empty() {
        println!("all verdicts as expected (known unattainable: {KNOWN_UNATTAINABLE:?})");
        ExitCode::SUCCESS
    } else {
        println!("unexpected verdict for criteria {changed:?}");
        ExitCode::FAILURE
    }
}
