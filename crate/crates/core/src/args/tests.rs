use super::*;
use crate::models::Oracle;
use crate::parse::parse_problem;

pub(crate) const DC: &str = "fluent Petrol, Running. action TurnOn, Empty. horizon 8. \
    TurnOn initiates Running when {Petrol}. Empty terminates Petrol. \
    TurnOn happens-at 5. Petrol holds-at 1.";

const DC_PRIME: &str = "fluent Petrol, Running. action TurnOn, Empty, Fill. horizon 8. \
    TurnOn initiates Running when {Petrol}. Empty terminates Petrol. Fill initiates Petrol. \
    Petrol holds-at 1. -Running holds-at 1. Fill needs {-Running}. TurnOn happens-at 3.";

fn prog(text: &str) -> Program {
    translate(&parse_problem(text).unwrap()).unwrap()
}

fn set(p: &Program, text: &str) -> RuleSet {
    p.rules(text).unwrap_or_else(|| panic!("bad rules {text}"))
}

fn rule(p: &Program, text: &str) -> ArgumentRule {
    p.rule(text).unwrap()
}

#[test]
fn background_of_car_engine() {
    let p = prog(DC);
    let dump = p.dump_background();
    assert!(dump.contains("HappensAt(TurnOn,5).\n"), "{dump}");
    assert!(dump.contains("Initiation(Running,t) <- HappensAt(TurnOn,t), HoldsAt(Petrol,t).\n"));
    assert!(dump.contains("Termination(Petrol,t) <- HappensAt(Empty,t).\n"));
}

#[test]
fn base_of_one_fluent_one_tick() {
    let p = prog("fluent F. horizon 1.");
    let base = p.base_rules();
    assert_eq!(p.dump_rules(&base), "PA[F,0]\nNA[F,0]\nPG[F,1;0]\nNG[F,1;0]\nPA[F,1]\nNA[F,1]\n");
    assert!(base.is_subset(&p.theory_rules()));
    assert_eq!(p.theory_rules().len(), 8);
    assert!(base.iter().all(|r| !r.schema.is_persistence()));
}

#[test]
fn rule_names_round_trip() {
    let p = prog(DC);
    for r in p.theory_rules().iter() {
        assert_eq!(p.rule(&p.show(r)), Some(*r));
    }
    assert_eq!(p.rule("PG[Running,5;7]"), None);
    assert_eq!(p.rule("PA[Running,5;4]"), None);
    assert_eq!(p.rule("PG[Nothing,5;4]"), None);
}

#[test]
fn derivations_in_car_engine() {
    let p = prog(DC);
    let ctx = Context::new(&p, []);
    let running7 = Atom::holds(1, 7, true);
    let s0 = set(&p, "PG[Running,7;5], PA[Petrol,5]");
    assert!(ctx.derives(&s0, running7));
    assert_eq!(ctx.supports(running7, Pool::Within(&s0)).as_slice(), std::slice::from_ref(&s0));
    assert!(!ctx.derives(&RuleSet::new(), running7));
    let k = set(&p, "NA[Petrol,5]");
    let not_petrol5 = Atom::holds(0, 5, false);
    assert!(ctx.derives(&k, not_petrol5));
    assert_eq!(ctx.supports(not_petrol5, Pool::Within(&k)).as_slice(), std::slice::from_ref(&k));
    // Without the action fact the generation rule has no body.
    let bare = prog("fluent Petrol, Running. action TurnOn. horizon 8. TurnOn initiates Running when {Petrol}.");
    assert!(!Context::new(&bare, []).derives(&s0, running7));
    assert!(Context::new(&bare, [(0, 5)]).derives(&s0, running7));
}

#[test]
fn priorities() {
    let p = prog(DC);
    let less = |a: &str, b: &str| rule_less(&rule(&p, a), &rule(&p, b));
    assert!(less("PA[Running,5]", "NG[Running,5;3]"));
    assert!(less("NG[Running,7;3]", "PG[Running,7;5]"));
    assert!(!less("PG[Running,7;5]", "PG[Running,7;5]"));
    assert!(!less("PG[Running,7;5]", "NG[Running,7;3]"));
    assert!(less("NP[Running,7;3]", "PG[Running,7;5]"));
    assert!(less("NP[Running,7;5]", "PG[Running,7;5]"));
    assert!(!less("NP[Running,7;6]", "PG[Running,7;5]"));
    assert!(less("NA[Petrol,3]", "PP[Petrol,3;1]"));
    assert!(!less("NA[Petrol,3]", "PA[Petrol,3]"));
    assert!(!less("NA[Petrol,3]", "PG[Running,3;1]"));
}

#[test]
fn priority_is_irreflexive_and_between_conflicting_rules_only() {
    let p = prog("fluent F, G. horizon 3.");
    let rules = p.theory_rules();
    for a in rules.iter() {
        assert!(!rule_less(a, a));
        for b in rules.iter() {
            if rule_less(a, b) {
                assert!(a.fluent == b.fluent && a.at == b.at && a.schema.positive() != b.schema.positive());
                assert!(!rule_less(b, a));
            }
        }
    }
}

#[test]
fn set_priority() {
    let p = prog("fluent F, Petrol. horizon 9.");
    let lower = |a: &str, b: &str| set_lower(&set(&p, a), &set(&p, b));
    assert!(lower("PA[Petrol,5]", "NG[Petrol,5;3]"));
    assert!(!lower("", "PG[F,7;5]"));
    // NG[F,7;3] is below PG[F,7;5]; PG[F,9;8] is not comparable with it.
    assert!(lower("NG[F,7;3], PG[F,9;8]", "PG[F,7;5]"));
    assert!(!lower("NG[F,7;3], PG[F,7;6]", "NG[F,7;5]"));
    assert!(!lower("NG[F,7;3], NA[F,7]", "PG[F,7;5], PG[F,7;2]"));
}

#[test]
fn attacks_in_car_engine() {
    let p = prog(DC);
    let ctx = Context::new(&p, []);
    let s0 = set(&p, "PG[Running,7;5], PA[Petrol,5]");
    let k = set(&p, "NA[Petrol,5]");
    assert!(attacks(&ctx, &k, &s0));
    assert!(attacks(&ctx, &s0, &k));
    assert!(!attacks(&ctx, &RuleSet::new(), &s0));
    assert!(!attacks(&ctx, &RuleSet::new(), &k));

    let dp = prog(DC_PRIME);
    let ctx = Context::new(&dp, []);
    let persist = set(&dp, "PP[Petrol,3;1], PA[Petrol,1]");
    let na = set(&dp, "NA[Petrol,3]");
    assert!(attacks(&ctx, &persist, &na));
    assert!(!attacks(&ctx, &na, &persist));
}

#[test]
fn attack_is_not_symmetric() {
    let p = prog(DC);
    let ctx = Context::new(&p, []);
    let na = set(&p, "NA[Running,7]");
    let pg = set(&p, "PG[Running,7;5], PA[Petrol,5]");
    assert!(attacks(&ctx, &pg, &na));
    assert!(!attacks(&ctx, &na, &pg));
}

#[test]
fn admissibility_in_car_engine() {
    let p = prog(DC);
    let ctx = Context::new(&p, []);
    assert!(ctx.self_attacking(&set(&p, "PA[Petrol,5], NA[Petrol,5]")));
    assert!(!ctx.is_admissible(&set(&p, "PA[Petrol,5], NA[Petrol,5]")));
    let s0 = set(&p, "PG[Running,7;5], PA[Petrol,5]");
    assert!(!ctx.self_attacking(&s0));
    // Persistence outranks assumptions, so the root also needs Petrol before 5.
    let attack = ctx.first_undefended(&s0, None).unwrap();
    assert!(attack.attacker.iter().any(|r| r.schema.is_persistence()), "{}", p.show_set(&attack.attacker));
    let full = ctx.extend_to_full(&s0).unwrap().unwrap();
    assert!(ctx.is_admissible(&full));
}

#[test]
fn observation_domain_partial_set() {
    let p = prog(
        "fluent Protected, TypeA, Weak, Infected. action InjectC, InjectD, Bite, Expose. horizon 5. \
         InjectC initiates Protected when {TypeA}. InjectD initiates Protected when {Weak}. \
         Bite initiates Infected when {TypeA}. Expose initiates Infected when {Weak}. \
         -Infected holds-at 1. Infected holds-at 4.",
    );
    let ctx = Context::new(&p, []);
    let s = set(&p, "NA[Infected,1], PA[Infected,4]");
    assert!(!ctx.self_attacking(&s));
    assert!(!ctx.is_admissible(&s));
    // Inertia from the first assumption reaches 4 and outranks the second.
    let chain = set(&p, "NP[Infected,4;1], NA[Infected,1]");
    assert!(attacks(&ctx, &chain, &s));
    assert!(!attacks(&ctx, &s, &chain));
}

#[test]
fn admissibility_matches_exhaustive_attackers() {
    for text in [
        "fluent F. horizon 1.",
        "fluent F. horizon 1. F holds-at 1.",
        "fluent F. action A. horizon 1. A initiates F when {-F}. A happens-at 0.",
        "fluent F. action A. horizon 1. A terminates F. A initiates F when {F}. A happens-at 0.",
    ] {
        let p = prog(text);
        let ctx = Context::new(&p, []);
        let theory = p.theory_rules();
        let attackers: Vec<RuleSet> = subsets(&theory).collect();
        for s in subsets(&p.base_rules()) {
            let brute = !attacks(&ctx, &s, &s)
                && attackers.iter().all(|r| !attacks(&ctx, r, &s) || attacks(&ctx, &s, r))
                && ctx.unconfirmed(&s, None).is_none();
            assert_eq!(ctx.is_admissible(&s), brute, "{text}: {}", p.show_set(&s));
        }
    }
}

#[test]
fn empty_domain_has_two_extensions_per_tick_pattern() {
    let p = prog("fluent F. horizon 1.");
    let ctx = Context::new(&p, []);
    let sets = ctx.maximal_admissible().unwrap();
    assert_eq!(sets.len(), 2);
    let names: Vec<String> = sets.iter().map(|s| p.show_set(s)).collect();
    assert!(names.contains(&"{NA[F,0], PG[F,1;0], NG[F,1;0], NA[F,1]}".to_string()), "{names:?}");
    assert!(names.contains(&"{PA[F,0], PG[F,1;0], NG[F,1;0], PA[F,1]}".to_string()), "{names:?}");
}

#[test]
fn car_engine_extensions() {
    let pp = parse_problem(DC).unwrap();
    let p = translate(&pp).unwrap();
    let ctx = Context::new(&p, []);
    let sets = ctx.maximal_admissible().unwrap();
    assert!(sets.iter().all(|s| ctx.derives(s, Atom::holds(1, 7, true))));
    assert_eq!(sets.len(), Oracle::default().models(&pp).unwrap().len());
    assert!(ctx.sceptical(Atom::holds(1, 7, true)).unwrap());
    assert!(ctx.credulous(Atom::holds(1, 2, true)).unwrap());
    assert!(!ctx.sceptical(Atom::holds(1, 2, true)).unwrap());

    let p3 = prog(&format!("{DC} Empty happens-at 3."));
    let ctx3 = Context::new(&p3, []);
    assert!(!ctx3.sceptical(Atom::holds(1, 7, true)).unwrap());
    assert!(!ctx3.credulous(Atom::holds(0, 5, true)).unwrap());
}

#[test]
fn inconsistent_program_has_no_extensions() {
    let p = prog("fluent F. horizon 2. F holds-at 1. -F holds-at 1.");
    let ctx = Context::new(&p, []);
    assert!(ctx.maximal_admissible().unwrap().is_empty());
    assert!(ctx.sceptical(Atom::holds(0, 0, true)).unwrap());
    assert!(!ctx.credulous(Atom::holds(0, 0, true)).unwrap());
}

#[test]
fn cap_applies_to_enumeration() {
    let p = prog("fluent A, B, C. horizon 1.");
    let mut ctx = Context::new(&p, []);
    ctx.set_cap(2);
    assert!(matches!(ctx.maximal_admissible(), Err(Error::CapExceeded { limit: 2, .. })));
}

/// Every subset of `pool` (as a list), by bitmask.
fn subsets(pool: &RuleSet) -> impl Iterator<Item = RuleSet> + '_ {
    let rules = pool.rules();
    assert!(rules.len() <= 20);
    (0u32..1 << rules.len()).map(move |m| rules.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, r)| *r).collect())
}

fn brute_supports(ctx: &Context<'_>, pool: &RuleSet, a: Atom) -> Vec<RuleSet> {
    let mut out: Vec<RuleSet> = subsets(pool)
        .filter(|s| ctx.derives(s, a))
        .filter(|s| s.iter().all(|r| {
            let mut t = s.clone();
            t.remove(r);
            !ctx.derives(&t, a)
        }))
        .collect();
    out.sort();
    out
}

const TINY: [&str; 3] = [
    "fluent F, G. action A. horizon 1. A initiates F when {-G}. A terminates G when {F}. A happens-at 0.",
    "fluent F. action A. horizon 2. A initiates F when {-F}. A terminates F when {F}. A happens-at 0. A happens-at 1.",
    "fluent F, G. action A, B. horizon 1. A initiates G when {F, -G}. B terminates F. A happens-at 0. B happens-at 0.",
];

#[test]
fn supports_match_subset_enumeration() {
    for text in TINY {
        let p = prog(text);
        let ctx = Context::new(&p, []);
        for (pool_rules, pool) in [(p.theory_rules(), Pool::Theory), (p.base_rules(), Pool::Base)] {
            let mut atoms: Vec<Atom> = Vec::new();
            for f in 0..p.fluent_count() {
                for t in 0..=p.horizon() {
                    atoms.extend([
                        Atom::holds(f, t, true),
                        Atom::holds(f, t, false),
                        Atom::Initiation { fluent: f, at: t },
                        Atom::Termination { fluent: f, at: t },
                    ]);
                }
            }
            for a in atoms {
                let mut fast = ctx.supports(a, pool).as_ref().clone();
                fast.sort();
                assert_eq!(fast, brute_supports(&ctx, &pool_rules, a), "{text} {}", p.show_atom(&a));
            }
        }
    }
}

/// Every rule of `s` fires in its closure.
fn active(ctx: &Context<'_>, s: &RuleSet) -> bool {
    let c = ctx.closure(s);
    s.iter().all(|r| c.contains(r.conclusion()))
}

#[test]
fn maximal_sets_match_subset_enumeration() {
    let extra = ["fluent F. horizon 1. F holds-at 1.", "fluent F. action A. horizon 2. A initiates F. A happens-at 1."];
    for text in TINY.iter().copied().chain(extra) {
        let pp = parse_problem(text).unwrap();
        let p = translate(&pp).unwrap();
        let ctx = Context::new(&p, []);
        let admissible: Vec<RuleSet> = subsets(&p.base_rules()).filter(|s| ctx.is_admissible(s)).collect();
        let deciding: Vec<&RuleSet> = admissible.iter().filter(|s| ctx.closure(s).is_total()).collect();
        let mut maximal: Vec<RuleSet> = deciding
            .iter()
            .filter(|s| !deciding.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
            .map(|s| (*s).clone())
            .collect();
        maximal.sort();
        let mut fast = ctx.maximal_admissible().unwrap();
        fast.sort();
        assert_eq!(fast, maximal, "{text}");
        assert_eq!(fast.len(), Oracle::default().models(&pp).unwrap().len(), "{text}");
        for s in admissible.iter().filter(|s| active(&ctx, s)) {
            assert!(fast.iter().any(|m| s.is_subset(m)), "{text}: {}", p.show_set(s));
            assert!(ctx.extend_to_full(s).unwrap().is_some());
        }
    }
}
