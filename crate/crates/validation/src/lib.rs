//! Runner for long-running acceptance checks.
//!
//! Each check returns an [`Outcome`]; [`run`] executes the selected checks in
//! order, prints one `PASS`/`FAIL` line per check and returns the number of
//! failures. A panic inside a check counts as a failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    /// Measured values, printed after the verdict.
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub run: fn() -> Outcome,
}

/// Ids named on the command line, or every id when none are given. Flags
/// (anything starting with `-`) are ignored so that `cargo test` arguments
/// pass through harmlessly.
pub fn selection(args: impl IntoIterator<Item = String>) -> Option<Vec<u32>> {
    let ids: Vec<u32> = args.into_iter().filter(|a| !a.starts_with('-')).filter_map(|a| a.parse().ok()).collect();
    (!ids.is_empty()).then_some(ids)
}

pub fn run(checks: &[Check], only: Option<&[u32]>) -> usize {
    let mut failures = 0;
    for c in checks.iter().filter(|c| only.map_or(true, |ids| ids.contains(&c.id))) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::new(false, format!("panicked: {msg}"))
            });
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<34} {}  [{:.1}s] {}",
            c.id,
            c.name,
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    failures
}
