//! Action description language with bounded integer time, its argumentation
//! reformulation, and an abductive planner built on top of it.

pub mod args;
pub mod derive;
pub mod error;
pub mod models;
pub mod parse;
pub mod plan;
pub mod vocab;

pub use args::{translate, ArgumentRule, Atom, Context, Program, RuleSet, Schema};
pub use derive::{DerivationNode, Deriver, Mode, NodeStatus, Search, Trace};
pub use error::{Error, Result};
pub use models::{Interpretation, Oracle, PlanResultClass};
pub use parse::{parse_plan, parse_problem, parse_problem_unchecked, parse_query, render_problem, SourceSpan};
pub use vocab::*;
pub use plan::{plan, plan_and_verify, PlanKind, PlanMode, PlanOptions, PlanOutcome, Planner, Verified};
