mod common;

use eplan_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A random problem some plan of at most one action solves, weakly or safely.
fn solvable(seed: u64, shape: common::Shape) -> (PlanningProblem, Vec<PlanResultClass>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = Oracle::default();
    loop {
        let p = common::problem(&mut rng, shape);
        let classes: Vec<PlanResultClass> = common::plans(&p, 1)
            .iter()
            .map(|d| oracle.classify_plan(&p, d).unwrap())
            .collect();
        if classes.iter().any(|c| c.is_weak_or_safe()) {
            return (p, classes);
        }
    }
}

fn check_outputs(p: &PlanningProblem) {
    let oracle = Oracle::default();
    for mode in [PlanMode::Weak, PlanMode::Safe] {
        let v = plan_and_verify(p, mode, PlanOptions::default()).unwrap();
        assert!(v.defect.is_none(), "{:?}\n{}", v.defect, render_problem(p));
        let Some(o) = v.outcome else { continue };
        let class = oracle.classify_plan(p, &o.actions).unwrap();
        assert!(class.is_weak_or_safe(), "{}", render_problem(p));
        if o.kind == PlanKind::Safe {
            assert!(class.is_safe(), "{}", render_problem(p));
            assert!(o.assumptions.is_empty());
        }
        let goal_time = p.goal.iter().map(|g| g.time.0).max().unwrap();
        assert!(o.actions.iter().all(|h| h.time.0 < p.horizon.max(goal_time)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn planner_outputs_pass_the_oracle(seed in any::<u64>()) {
        let (p, _) = solvable(seed, common::Shape::default());
        check_outputs(&p);
    }

    #[test]
    fn with_ramifications(seed in any::<u64>()) {
        let shape = common::Shape { ramifications: true, ..Default::default() };
        let (p, _) = solvable(seed, shape);
        check_outputs(&p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn weak_found_whenever_a_one_action_weak_plan_exists(seed in any::<u64>()) {
        let (p, _) = solvable(seed, common::Shape::default());
        let v = plan_and_verify(&p, PlanMode::Weak, PlanOptions::default()).unwrap();
        prop_assert!(v.outcome.is_some(), "{}", render_problem(&p));
    }
}

/// How often the planner settles for a weak plan although a one-action
/// safe plan exists; printed, not asserted.
#[test]
#[ignore]
fn sweep() {
    for seed in 100..110u64 {
        let shape = common::Shape {
            ramifications: seed % 2 == 0,
            ..Default::default()
        };
        let (mut safe, mut weak, mut missed) = (0, 0, 0);
        for i in 0..200 {
            let (p, classes) = solvable(seed * 1000 + i, shape);
            let v = plan_and_verify(&p, PlanMode::Safe, PlanOptions::default()).unwrap();
            assert!(v.defect.is_none(), "{:?}\n{}", v.defect, render_problem(&p));
            match v.outcome {
                Some(o) if o.kind == PlanKind::Safe => safe += 1,
                _ => {
                    weak += 1;
                    if classes.iter().any(|c| c.is_safe()) {
                        missed += 1;
                        if std::env::var("SHOW_MISSED").is_ok() {
                            eprintln!("MISSED\n{}", render_problem(&p));
                        }
                    }
                }
            }
        }
        eprintln!("seed {seed}: safe {safe} weak {weak} missed {missed}");
    }
}
