//! Fixture problems shared by the benchmarks.

use eplan_core::{parse_problem, PlanningProblem};

/// Fixture names, in the order benchmarks report them.
pub const FIXTURES: [&str; 6] = ["dc", "dc_prime", "dc_dprime", "dv", "di", "dr"];

pub fn fixture(name: &str) -> PlanningProblem {
    let path = format!("{}/../core/fixtures/{name}.e", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_problem(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}
