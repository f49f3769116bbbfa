use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.e", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn eplan(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_eplan")).args(args).output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("eplan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_counts_models() {
    let (out, _, code) = eplan(&["check", &fixture("dc")]);
    assert_eq!(out, golden("check_dc.out"));
    assert_eq!(code, 0);
}

#[test]
fn contradictory_observations_are_inconsistent() {
    let f = scratch("contra.e", "fluent F. action A. horizon 2. F holds-at 1. -F holds-at 1.");
    let (out, _, code) = eplan(&["check", &f]);
    assert_eq!(out, "models: 0\n");
    assert_eq!(code, 1);
}

#[test]
fn malformed_file_is_a_usage_error() {
    let f = scratch("bad.e", "fluent F. action A. A initiates.");
    let (out, err, code) = eplan(&["check", &f]);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(code, 2);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let (_, _, code) = eplan(&["check", &fixture("dc"), "--bogus"]);
    assert_eq!(code, 2);
}

#[test]
fn cap_exceeded_has_its_own_code() {
    let (_, err, code) = eplan(&["check", &fixture("dc"), "--max-fluents", "1"]);
    assert!(err.contains("cap"), "{err}");
    assert_eq!(code, 3);
}

#[test]
fn horizon_override_is_validated() {
    let (_, _, code) = eplan(&["check", &fixture("dc"), "--horizon", "3"]);
    assert_eq!(code, 2);
    let (out, _, code) = eplan(&["check", &fixture("dc"), "--horizon", "12"]);
    assert_eq!((out.as_str(), code), ("models: 2\n", 0));
}

#[test]
fn running_at_seven_is_entailed_by_both_engines() {
    let (out, _, code) = eplan(&["entails", &fixture("dc"), "Running holds-at 7", "--engine", "both"]);
    assert_eq!(out, "oracle: entailed\nargumentation: entailed\nentailed\n");
    assert_eq!(code, 0);
}

#[test]
fn emptying_the_tank_breaks_the_entailment() {
    let text = std::fs::read_to_string(fixture("dc")).unwrap() + "Empty happens-at 3.\n";
    let f = scratch("dc_empty.e", &text);
    let (out, _, code) = eplan(&["entails", &f, "Running holds-at 7", "--engine", "both"]);
    assert_eq!(out, "oracle: not entailed\nargumentation: not entailed\nnot entailed\n");
    assert_eq!(code, 1);
}

#[test]
fn engines_agree_when_run_separately() {
    for q in ["Running holds-at 7", "Running holds-at 3", "-Running holds-at 2", "Petrol holds-at 8"] {
        let (a, _, ca) = eplan(&["entails", &fixture("dc"), q, "--engine", "oracle"]);
        let (b, _, cb) = eplan(&["entails", &fixture("dc"), q, "--engine", "argumentation"]);
        assert_eq!((a, ca), (b, cb), "{q}");
    }
}

#[test]
fn bad_queries_are_usage_errors() {
    for q in ["", "Running holds-at 99", "Fuel holds-at 1", "Running at 1"] {
        let (_, _, code) = eplan(&["entails", &fixture("dc"), q]);
        assert_eq!(code, 2, "{q:?}");
    }
}

#[test]
fn plan_goldens() {
    for (args, file, code) in [
        (vec!["plan", "dc_prime"], "plan_dc_prime.out", 0),
        (vec!["plan", "dc_dprime", "--mode", "weak"], "plan_dc_dprime_weak.out", 0),
        (vec!["plan", "dc_dprime"], "plan_dc_dprime_safe.out", 0),
        (vec!["plan", "dv"], "plan_dv.out", 0),
        (vec!["plan", "di"], "plan_di.out", 0),
        (vec!["plan", "dr"], "plan_dr.out", 0),
    ] {
        let path = fixture(args[1]);
        let mut full: Vec<&str> = vec![args[0], &path];
        full.extend(&args[2..]);
        let (out, _, c) = eplan(&full);
        assert_eq!(out, golden(file), "{file}");
        assert_eq!(c, code, "{file}");
    }
}

#[test]
fn weak_only_result_in_safe_mode_exits_one() {
    let f = scratch(
        "weak_only.e",
        "fluent F, G. action A. horizon 3. A initiates F when {G}. goal F holds-at 3.",
    );
    let (out, _, code) = eplan(&["plan", &f]);
    assert!(out.starts_with("WEAK\nA @ 2\nASSUMES G @ 2\n"), "{out}");
    assert_eq!(code, 1);
    let (_, _, code) = eplan(&["plan", &f, "--mode", "weak"]);
    assert_eq!(code, 0);
}

#[test]
fn unreachable_goal_has_no_plan() {
    let f = scratch("none.e", "fluent F. action A. horizon 2. -F holds-at 2. goal F holds-at 2.");
    let (out, _, code) = eplan(&["plan", &f]);
    assert_eq!((out.as_str(), code), ("NO-PLAN\n", 1));
}

#[test]
fn goal_flag_overrides_the_file() {
    let (out, _, code) = eplan(&["plan", &fixture("dc_prime"), "--goal", "-Petrol holds-at 4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("SAFE\nEmpty @ "), "{out}");
}

#[test]
fn missing_goal_is_a_usage_error() {
    let (_, _, code) = eplan(&["plan", &fixture("dc")]);
    assert_eq!(code, 2);
}

#[test]
fn trace_is_written_in_rule_notation() {
    let dir = std::env::temp_dir().join(format!("eplan-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.txt");
    let p = path.to_string_lossy().into_owned();
    let (_, _, code) = eplan(&["plan", &fixture("dc_dprime"), "--trace", &p]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, golden("trace_dc_dprime.txt"));
    for line in text.lines() {
        let kind = line.split(' ').next().unwrap();
        assert!(["NODE", "ATTACK", "COUNTER", "SUSPEND", "ABDUCE"].contains(&kind), "{line}");
    }
}

#[test]
fn validate_classifies_car_plans() {
    let f = fixture("dc_dprime");
    let (out, _, code) = eplan(&["validate", &f, "--plan", "TurnOn happens-at 7"]);
    assert_eq!((out.as_str(), code), ("WEAK\nASSUMES Petrol @ 7\n", 1));
    let (out, _, code) = eplan(&["validate", &f, "--plan", "TurnOn happens-at 7, Fill happens-at 2"]);
    assert_eq!((out.as_str(), code), ("SAFE\n", 0));
    let (out, _, code) = eplan(&["validate", &f, "--plan", ""]);
    assert_eq!((out.as_str(), code), ("NOT-A-PLAN\n", 1));
}

#[test]
fn validate_reads_plan_files() {
    let plan = scratch("plan.txt", "TurnOn happens-at 7.\nFill happens-at 2.\n");
    let (out, _, code) = eplan(&["validate", &fixture("dc_dprime"), "--plan", &plan]);
    assert_eq!((out.as_str(), code), ("SAFE\n", 0));
}

#[test]
fn validate_rejects_undeclared_actions() {
    let (_, _, code) = eplan(&["validate", &fixture("dc_dprime"), "--plan", "Drive happens-at 1"]);
    assert_eq!(code, 2);
    let (_, _, code) = eplan(&["validate", &fixture("dc_dprime"), "--plan", "Fill happens-at 40"]);
    assert_eq!(code, 2);
}

#[test]
fn safe_plans_revalidate_as_safe() {
    for name in ["dc_prime", "dc_dprime", "dv", "di", "dr"] {
        let f = fixture(name);
        let (out, _, code) = eplan(&["plan", &f]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("SAFE"));
        let plan: Vec<String> = lines
            .map(|l| {
                let (a, t) = l.split_once(" @ ").unwrap();
                format!("{a} happens-at {t}")
            })
            .collect();
        let (v, _, code) = eplan(&["validate", &f, "--plan", &plan.join(", ")]);
        assert_eq!((v.as_str(), code), ("SAFE\n", 0), "{name}");
    }
}

#[test]
fn models_prints_tables() {
    let (out, _, code) = eplan(&["models", &fixture("dc")]);
    assert_eq!(out, golden("models_dc.out"));
    assert_eq!(code, 0);
}

#[test]
fn exit_codes_follow_the_verdict() {
    let (out, _, code) = eplan(&["validate", &fixture("dv"), "--plan", "InjectA happens-at 7"]);
    assert!(out.starts_with("WEAK\n"));
    assert_eq!(code, 1);
    let (out, _, code) = eplan(&["validate", &fixture("dv"), "--plan", "InjectA happens-at 7, InjectB happens-at 3"]);
    assert_eq!((out.as_str(), code), ("SAFE\n", 0));
}
