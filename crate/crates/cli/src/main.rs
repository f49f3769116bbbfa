//! `eplan`: consistency, entailment, planning and plan validation for
//! action descriptions.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eplan_core::args::{translate, Context};
use eplan_core::models::check_query;
use eplan_core::{
    parse_plan, parse_problem_unchecked, parse_query, plan_and_verify, Error, HProp, Oracle, PlanKind, PlanMode,
    PlanOptions, PlanResultClass, PlanningProblem, TProp,
};

#[derive(Parser)]
#[command(name = "eplan", version, about = "Plan with incomplete information in an action description language")]
struct Cli {
    /// Override the horizon declared in the file.
    #[arg(long, global = true)]
    horizon: Option<u32>,
    /// Refuse problems with more fluents than this.
    #[arg(long, global = true, default_value_t = 16)]
    max_fluents: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count models; succeed iff there is at least one.
    Check { file: PathBuf },
    /// Decide whether every model satisfies the query.
    Entails {
        file: PathBuf,
        /// e.g. "Running holds-at 7, -Petrol holds-at 3"
        #[arg(allow_hyphen_values = true)]
        query: String,
        #[arg(long, value_enum, default_value_t = Engine::Oracle)]
        engine: Engine,
    },
    /// Search for a plan achieving the goal.
    Plan {
        file: PathBuf,
        /// Replace the goal given in the file.
        #[arg(long, allow_hyphen_values = true)]
        goal: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Safe)]
        mode: ModeArg,
        /// Write the derivation transcript here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Classify a plan as safe, weak or neither.
    Validate {
        file: PathBuf,
        /// A plan file, or inline text like "TurnOn happens-at 7, Fill happens-at 2".
        #[arg(long)]
        plan: String,
        #[arg(long, allow_hyphen_values = true)]
        goal: Option<String>,
    },
    /// Print every model as a fluent by time table.
    Models { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Oracle,
    Argumentation,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Weak,
    Safe,
}

/// Printed verdict plus exit status.
struct Outcome {
    text: String,
    code: u8,
}

fn fail(e: Error) -> Outcome {
    let code = if matches!(e, Error::CapExceeded { .. }) { 3 } else { 2 };
    Outcome {
        text: format!("error: {e}\n"),
        code,
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome {
        text: format!("error: {}: {e}\n", path.display()),
        code: 2,
    })
}

fn load(path: &Path, horizon: Option<u32>, goal: Option<&str>) -> Result<PlanningProblem, Outcome> {
    let text = read(path)?;
    let mut p = parse_problem_unchecked(&text).map_err(fail)?;
    if let Some(h) = horizon {
        p.problem.horizon = h;
    }
    if let Some(g) = goal {
        p.problem.goal = parse_query(g).map_err(fail)?;
    }
    let diags = p.problem.validate();
    if !diags.is_empty() {
        let list = diags.into_iter().map(|d| (d.clone(), p.spans.get(&d.at).copied())).collect();
        return Err(fail(Error::Invalid(list)));
    }
    Ok(p.problem)
}

fn check_cap(p: &PlanningProblem, cap: usize) -> Result<(), Outcome> {
    if p.fluents.len() > cap {
        return Err(fail(Error::CapExceeded {
            fluents: p.fluents.len(),
            limit: cap,
        }));
    }
    Ok(())
}

fn lines_of_plan(actions: &[HProp]) -> String {
    let mut sorted = actions.to_vec();
    sorted.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.action.cmp(&b.action)));
    let mut out = String::new();
    for h in sorted {
        let _ = writeln!(out, "{} @ {}", h.action, h.time.0);
    }
    out
}

fn lines_of_assumptions(a: &[TProp]) -> String {
    let mut out = String::new();
    for t in a {
        let _ = writeln!(out, "ASSUMES {} @ {}", t.literal, t.time.0);
    }
    out
}

fn check(cli: &Cli, file: &Path) -> Result<Outcome, Outcome> {
    let p = load(file, cli.horizon, None)?;
    let n = oracle(cli).models(&p).map_err(fail)?.len();
    Ok(Outcome {
        text: format!("models: {n}\n"),
        code: if n > 0 { 0 } else { 1 },
    })
}

fn oracle(cli: &Cli) -> Oracle {
    Oracle {
        max_fluents: cli.max_fluents,
    }
}

fn entails(cli: &Cli, file: &Path, query: &str, engine: Engine) -> Result<Outcome, Outcome> {
    let p = load(file, cli.horizon, None)?;
    let q = parse_query(query).map_err(fail)?;
    check_query(&p, &q).map_err(fail)?;
    check_cap(&p, cli.max_fluents)?;
    let by_models = || oracle(cli).entails(&p, &q).map_err(fail);
    let by_args = || -> Result<bool, Outcome> {
        let prog = translate(&p).map_err(fail)?;
        let mut ctx = Context::new(&prog, []);
        ctx.set_cap(cli.max_fluents);
        let atoms: Vec<_> = q.iter().map(|t| prog.literal_atom(t).expect("checked query")).collect();
        ctx.sceptical_all(&atoms).map_err(fail)
    };
    let word = |b: bool| if b { "entailed" } else { "not entailed" };
    let (text, verdict, agree) = match engine {
        Engine::Oracle => {
            let v = by_models()?;
            (format!("{}\n", word(v)), v, true)
        }
        Engine::Argumentation => {
            let v = by_args()?;
            (format!("{}\n", word(v)), v, true)
        }
        Engine::Both => {
            let (a, b) = (by_models()?, by_args()?);
            let mut t = format!("oracle: {}\nargumentation: {}\n", word(a), word(b));
            if a == b {
                t.push_str(&format!("{}\n", word(a)));
            } else {
                t.push_str("DISAGREEMENT\n");
            }
            (t, a, a == b)
        }
    };
    let code = if !agree {
        4
    } else if verdict {
        0
    } else {
        1
    };
    Ok(Outcome { text, code })
}

fn plan(cli: &Cli, file: &Path, goal: Option<&str>, mode: ModeArg, trace: Option<&Path>) -> Result<Outcome, Outcome> {
    let p = load(file, cli.horizon, goal)?;
    if p.goal.is_empty() {
        return Err(fail(Error::EmptyQuery));
    }
    let opts = PlanOptions {
        max_fluents: cli.max_fluents,
        trace: trace.is_some(),
        ..Default::default()
    };
    let mode = match mode {
        ModeArg::Weak => PlanMode::Weak,
        ModeArg::Safe => PlanMode::Safe,
    };
    let v = plan_and_verify(&p, mode, opts).map_err(fail)?;
    if let (Some(path), Some(o)) = (trace, &v.outcome) {
        let mut text = o.trace.join("\n");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Outcome {
            text: format!("error: {}: {e}\n", path.display()),
            code: 2,
        })?;
    }
    let Some(o) = v.outcome else {
        return Ok(Outcome {
            text: "NO-PLAN\n".into(),
            code: 1,
        });
    };
    let mut text = match o.kind {
        PlanKind::Safe => "SAFE\n".to_string(),
        PlanKind::Weak => "WEAK\n".to_string(),
    };
    text.push_str(&lines_of_plan(&o.actions));
    text.push_str(&lines_of_assumptions(&o.assumptions));
    if let Some(d) = v.defect {
        text.push_str(&format!("DEFECT {d}\n"));
        return Ok(Outcome { text, code: 4 });
    }
    let code = match (o.kind, mode) {
        (PlanKind::Safe, _) | (PlanKind::Weak, PlanMode::Weak) => 0,
        _ => 1,
    };
    Ok(Outcome { text, code })
}

fn validate(cli: &Cli, file: &Path, plan: &str, goal: Option<&str>) -> Result<Outcome, Outcome> {
    let p = load(file, cli.horizon, goal)?;
    let text = if Path::new(plan).is_file() {
        read(Path::new(plan))?
    } else {
        plan.to_string()
    };
    let delta = parse_plan(&text).map_err(fail)?;
    let diags = p.with_plan(&delta).validate();
    if !diags.is_empty() {
        return Err(fail(Error::Invalid(diags.into_iter().map(|d| (d, None)).collect())));
    }
    let class = oracle(cli).classify_plan(&p, &delta).map_err(fail)?;
    Ok(match class {
        PlanResultClass::Safe => Outcome {
            text: "SAFE\n".into(),
            code: 0,
        },
        PlanResultClass::Weak { assumptions } => Outcome {
            text: format!("WEAK\n{}", lines_of_assumptions(&assumptions)),
            code: 1,
        },
        PlanResultClass::NotAPlan => Outcome {
            text: "NOT-A-PLAN\n".into(),
            code: 1,
        },
    })
}

fn models(cli: &Cli, file: &Path) -> Result<Outcome, Outcome> {
    let p = load(file, cli.horizon, None)?;
    let all = oracle(cli).models(&p).map_err(fail)?;
    let mut text = String::new();
    for (i, h) in all.iter().enumerate() {
        let _ = writeln!(text, "model {}", i + 1);
        text.push_str(&h.table());
    }
    let _ = writeln!(text, "models: {}", all.len());
    Ok(Outcome {
        text,
        code: if all.is_empty() { 1 } else { 0 },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Check { file } => check(&cli, file),
        Command::Entails { file, query, engine } => entails(&cli, file, query, *engine),
        Command::Plan {
            file,
            goal,
            mode,
            trace,
        } => plan(&cli, file, goal.as_deref(), *mode, trace.as_deref()),
        Command::Validate { file, plan, goal } => validate(&cli, file, plan, goal.as_deref()),
        Command::Models { file } => models(&cli, file),
    };
    let o = r.unwrap_or_else(|e| e);
    if o.code == 2 || o.code == 3 {
        eprint!("{}", o.text);
    } else {
        print!("{}", o.text);
    }
    ExitCode::from(o.code)
}
