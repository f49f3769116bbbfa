#![allow(dead_code)]

use eplan_core::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub const FLUENTS: [&str; 4] = ["F", "G", "H", "K"];
pub const ACTIONS: [&str; 3] = ["A", "B", "C"];

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_fluents: usize,
    pub max_actions: usize,
    pub max_horizon: u32,
    pub max_laws: usize,
    pub max_observations: usize,
    pub max_occurrences: usize,
    pub ramifications: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_fluents: 4,
            max_actions: 3,
            max_horizon: 5,
            max_laws: 4,
            max_observations: 2,
            max_occurrences: 3,
            ramifications: false,
        }
    }
}

fn literal(rng: &mut impl Rng, n: usize) -> FluentLiteral {
    FluentLiteral::new(FLUENTS[rng.gen_range(0..n)], rng.gen_bool(0.5))
}

fn conditions(rng: &mut impl Rng, n: usize) -> ConditionSet {
    let k = rng.gen_range(0..=2.min(n));
    let mut fl: Vec<usize> = (0..n).collect();
    fl.shuffle(rng);
    ConditionSet::new(fl[..k].iter().map(|&f| FluentLiteral::new(FLUENTS[f], rng.gen_bool(0.5))))
}

pub fn domain(rng: &mut impl Rng, shape: Shape) -> PlanningProblem {
    let n = rng.gen_range(1..=shape.max_fluents);
    let m = rng.gen_range(1..=shape.max_actions);
    let h = rng.gen_range(1..=shape.max_horizon);
    let mut p = PlanningProblem::new(h);
    p.fluents = FLUENTS[..n].iter().map(|s| s.to_string()).collect();
    p.actions = ACTIONS[..m].iter().map(|s| s.to_string()).collect();
    for _ in 0..rng.gen_range(0..=shape.max_laws) {
        p.domain.causal.push(CProp {
            action: ACTIONS[rng.gen_range(0..m)].into(),
            effect: if rng.gen_bool(0.5) { Effect::Initiates } else { Effect::Terminates },
            fluent: FLUENTS[rng.gen_range(0..n)].into(),
            conditions: conditions(rng, n),
        });
    }
    for _ in 0..rng.gen_range(0..=shape.max_occurrences) {
        let occ = HProp::new(ACTIONS[rng.gen_range(0..m)], rng.gen_range(0..=h));
        if !p.domain.occurrences.contains(&occ) {
            p.domain.occurrences.push(occ);
        }
    }
    for _ in 0..rng.gen_range(0..=shape.max_observations) {
        p.domain.observations.push(TProp::new(literal(rng, n), rng.gen_range(0..=h)));
    }
    if shape.ramifications && n >= 2 && rng.gen_bool(0.5) {
        let l = literal(rng, n);
        let c: Vec<FluentLiteral> = (0..n)
            .filter(|&f| FLUENTS[f] != l.fluent)
            .take(rng.gen_range(1..=2))
            .map(|f| FluentLiteral::new(FLUENTS[f], rng.gen_bool(0.5)))
            .collect();
        p.domain.ramifications.push(RProp {
            literal: l,
            conditions: ConditionSet::new(c),
        });
    }
    p
}

/// A domain with preconditions and a goal of one or two literals.
pub fn problem(rng: &mut impl Rng, shape: Shape) -> PlanningProblem {
    let mut p = domain(rng, shape);
    let n = p.fluents.len();
    let m = p.actions.len();
    if rng.gen_bool(0.4) {
        p.preconditions.push(PProp {
            action: ACTIONS[rng.gen_range(0..m)].into(),
            conditions: ConditionSet::new([literal(rng, n)]),
        });
    }
    let h = p.horizon;
    for _ in 0..rng.gen_range(1..=2) {
        let g = TProp::new(literal(rng, n), rng.gen_range(1..=h));
        if !p.goal.iter().any(|x| x.literal.fluent == g.literal.fluent && x.time == g.time) {
            p.goal.push(g);
        }
    }
    p
}

/// Every set of at most `k` action facts below the horizon.
pub fn plans(p: &PlanningProblem, k: usize) -> Vec<Vec<HProp>> {
    let facts: Vec<HProp> = p
        .actions
        .iter()
        .flat_map(|a| (0..p.horizon).map(move |t| HProp::new(a.clone(), t)))
        .filter(|h| !p.domain.occurrences.contains(h))
        .collect();
    let mut out: Vec<Vec<HProp>> = vec![Vec::new()];
    let mut frontier = out.clone();
    for _ in 0..k {
        let mut next = Vec::new();
        for plan in &frontier {
            let start = plan.last().map_or(0, |l| facts.iter().position(|f| f == l).unwrap() + 1);
            for f in &facts[start..] {
                let mut q = plan.clone();
                q.push(f.clone());
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
