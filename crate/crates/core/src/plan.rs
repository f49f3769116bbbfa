//! Weak and safe planning by abduction over derivations.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::args::{translate, ArgumentRule, Atom, Pool, Program, RuleSet};
use crate::derive::{AbductionState, Deriver, Facts, Mode, Search};
use crate::error::{Error, Result};
use crate::models::{Oracle, PlanResultClass};
use crate::vocab::{HProp, PlanningProblem, TProp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Safe,
    Weak,
}

/// A plan found by the planner.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub kind: PlanKind,
    /// Added occurrences, sorted by time then action.
    pub actions: Vec<HProp>,
    /// Literals the plan relies on; empty for safe plans.
    pub assumptions: Vec<TProp>,
    /// The admissible set that supports the goal.
    pub support: RuleSet,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    /// Most actions a plan may add.
    pub max_actions: usize,
    pub max_fluents: usize,
    pub node_budget: usize,
    /// Weak plans tried as starting points for a safe one.
    pub max_candidates: usize,
    pub trace: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            max_actions: 3,
            max_fluents: crate::args::DEFAULT_CAP,
            node_budget: 20_000,
            max_candidates: 64,
            trace: false,
        }
    }
}

/// Planner state for one problem.
pub struct Planner<'p> {
    problem: &'p PlanningProblem,
    deriver: Deriver<'p>,
    goals: Vec<Atom>,
    opts: PlanOptions,
}

/// A weak plan together with the admissible set behind it.
#[derive(Debug, Clone)]
struct Weak {
    support: RuleSet,
    facts: Facts,
}

impl<'p> Planner<'p> {
    pub fn new(problem: &'p PlanningProblem, prog: &'p Program, opts: PlanOptions) -> Result<Self> {
        if prog.fluent_count() > opts.max_fluents {
            return Err(Error::CapExceeded {
                fluents: prog.fluent_count(),
                limit: opts.max_fluents,
            });
        }
        let goals = problem
            .goal
            .iter()
            .map(|g| prog.literal_atom(g))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::EmptyQuery)?;
        let mut deriver = Deriver::new(prog).with_cap(opts.max_fluents);
        if opts.trace {
            deriver = deriver.with_trace();
        }
        deriver.node_budget = opts.node_budget;
        Ok(Planner {
            problem,
            deriver,
            goals,
            opts,
        })
    }

    fn prog(&self) -> &'p Program {
        self.deriver.prog()
    }

    pub fn trace(&self) -> Vec<String> {
        self.deriver.trace().lines().to_vec()
    }

    /// Candidate roots for the goal with the facts they need, in search order.
    pub fn abduce_support(&self) -> Result<Vec<(RuleSet, Facts)>> {
        let ctx = self.deriver.context(Mode::Domain, &Facts::new());
        let mut combos: Vec<(RuleSet, Facts)> = vec![(RuleSet::new(), Facts::new())];
        for &g in &self.goals {
            let options = ctx.abductive_supports(g, self.opts.max_actions);
            let mut next = Vec::new();
            for (rules, needs) in &combos {
                for o in options.iter() {
                    let mut n = needs.clone();
                    n.extend(o.needs.iter().copied());
                    if n.len() <= self.opts.max_actions {
                        let item = (rules.union(&o.rules), n);
                        if !next.contains(&item) {
                            next.push(item);
                        }
                    }
                }
            }
            combos = next;
        }
        combos.retain(|(r, n)| !self.deriver.context(Mode::WithObligations, n).self_attacking(r));
        let on_goal = |r: &RuleSet| {
            r.iter()
                .any(|x| x.schema.is_assumption() && self.goals.contains(&x.conclusion()))
        };
        let prog = self.prog();
        combos.sort_by(|(ra, na), (rb, nb)| {
            let latest = |n: &Facts| {
                let mut ts: Vec<u32> = n.iter().map(|x| x.1).collect();
                ts.sort_unstable_by(|a, b| b.cmp(a));
                ts
            };
            let names = |n: &Facts| n.iter().map(|&(a, _)| prog.action_name(a).to_string()).collect::<Vec<_>>();
            on_goal(ra)
                .cmp(&on_goal(rb))
                .then_with(|| na.len().cmp(&nb.len()))
                .then_with(|| latest(nb).cmp(&latest(na)))
                .then_with(|| names(na).cmp(&names(nb)))
                .then_with(|| ra.len().cmp(&rb.len()))
                .then_with(|| ra.cmp(rb))
        });
        let bare: Option<usize> = combos.iter().position(|(r, n)| {
            n.is_empty() && r.iter().all(|x| x.schema.is_assumption() && self.goals.contains(&x.conclusion()))
        });
        if let Some(i) = bare {
            if ctx.sceptical_all(&self.goals)? {
                let b = combos.remove(i);
                combos.insert(0, b);
            }
        }
        Ok(combos)
    }

    /// Roots in the order the weak search takes them: the settled bare goal
    /// first if there is one, then by increasing bound, with roots that
    /// assume part of the goal only after everything else.
    fn schedule(&self, roots: &[(RuleSet, Facts)]) -> Vec<(usize, usize)> {
        let on_goal = |r: &RuleSet| {
            r.iter()
                .any(|x| x.schema.is_assumption() && self.goals.contains(&x.conclusion()))
        };
        let mut out = Vec::new();
        let mut late = Vec::new();
        let first_settled = roots.first().is_some_and(|(r, n)| n.is_empty() && on_goal(r));
        for bound in 0..=self.opts.max_actions {
            for (i, (r, n)) in roots.iter().enumerate() {
                if n.len() > bound {
                    continue;
                }
                if on_goal(r) && !(first_settled && i == 0) {
                    if bound == self.opts.max_actions {
                        late.push((i, bound));
                    }
                } else {
                    out.push((i, bound));
                }
            }
        }
        out.extend(late);
        out
    }

    /// Visits weak plans in search order, by increasing number of actions.
    fn weak_search(&self, visit: &mut dyn FnMut(&Weak) -> Result<ControlFlow<()>>) -> Result<()> {
        let roots = self.abduce_support()?;
        let mut seen: BTreeSet<(RuleSet, Facts)> = BTreeSet::new();
        {
            for (i, bound) in self.schedule(&roots) {
                let (root, needs) = &roots[i];
                let Search::Found(d) = self.deriver.extended_successful(needs, root, bound - needs.len()) else {
                    continue;
                };
                if !seen.insert((d.root.clone(), d.facts.clone())) {
                    continue;
                }
                let ctx = self.deriver.context(Mode::WithObligations, &d.facts);
                if ctx.extend_to_full(&d.root)?.is_none() {
                    continue;
                }
                let w = Weak {
                    support: d.root,
                    facts: d.facts,
                };
                if visit(&w)?.is_break() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    fn plan_actions(&self, facts: &Facts) -> Vec<HProp> {
        let mut v: Vec<HProp> = facts
            .iter()
            .map(|&(a, t)| HProp::new(self.prog().action_name(a), t))
            .collect();
        v.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.action.cmp(&b.action)));
        v
    }

    /// Assumption rules of `s` whose conclusions are not settled: the
    /// opposite assumption still has an admissible superset.
    pub fn check_assumptions(&self, facts: &Facts, s: &RuleSet) -> Vec<ArgumentRule> {
        let mut out = Vec::new();
        for r in s.assumptions() {
            let opposite = ArgumentRule::assumption(r.fluent, r.at, !r.schema.positive());
            if !self
                .deriver
                .failed(Mode::WithObligations, facts, &RuleSet::singleton(opposite))
                .is_exhausted()
            {
                out.push(*r);
            }
        }
        out
    }

    /// No admissible set of the domain with `facts` that extends to a
    /// maximal one derives the complement of a goal or of a precondition
    /// obligation. Returns the refuted root and a counterexample.
    pub fn blocked(&self, facts: &Facts) -> Search<(RuleSet, RuleSet)> {
        blocked_in(&self.deriver, &self.goals, facts)
    }

    /// Literals of `w` worth assuming: law conditions behind its
    /// generation rules and the obligations of the plan, where unsettled.
    fn weak_assumptions(&self, w: &Weak) -> Vec<TProp> {
        let prog = self.prog();
        let ctx = self.deriver.context(Mode::WithObligations, &w.facts);
        let closure = ctx.closure(&w.support);
        let mut lits: BTreeSet<(u32, bool, usize)> = BTreeSet::new();
        for r in w.support.iter().filter(|r| r.schema.is_generation()) {
            for law in &prog.laws {
                if law.fluent == r.fluent && law.initiates == r.schema.positive() && ctx.facts().contains(&(law.action, r.body_time())) {
                    for &(f, v) in &law.conditions {
                        if closure.holds(f, r.body_time(), v) {
                            lits.insert((r.body_time(), v, f));
                        }
                    }
                }
            }
        }
        for (f, v, t) in prog.obligations(ctx.facts()) {
            lits.insert((t, v, f));
        }
        let mut out = Vec::new();
        for (t, v, f) in lits {
            let opposite = ArgumentRule::assumption(f, t, !v);
            if !self
                .deriver
                .failed(Mode::WithObligations, &w.facts, &RuleSet::singleton(opposite))
                .is_exhausted()
            {
                out.push(prog.atom_literal(&Atom::holds(f, t, v)).expect("holds atom"));
            }
        }
        out
    }

    /// Whether adding `extra` as observations makes the plan safe.
    fn safe_under(&self, facts: &Facts, extra: &[TProp]) -> Result<bool> {
        let p = self.problem.with_observations(extra);
        let prog = translate(&p)?;
        let d = Deriver::new(&prog).with_cap(self.opts.max_fluents);
        if !blocked_in(&d, &self.goals, facts).is_exhausted() {
            return Ok(false);
        }
        let ctx = d.context(Mode::WithObligations, facts);
        Ok(ctx.extend_to_full(&RuleSet::new())?.is_some())
    }

    fn weak_outcome(&self, w: &Weak) -> Result<PlanOutcome> {
        let mut assumptions = self.weak_assumptions(w);
        let mut safe = self.safe_under(&w.facts, &assumptions)?;
        if !safe {
            let prog = self.prog();
            let mut all = assumptions.clone();
            for r in self.check_assumptions(&w.facts, &w.support) {
                let lit = prog.atom_literal(&r.conclusion()).expect("holds atom");
                if !all.contains(&lit) {
                    all.push(lit);
                }
            }
            if self.safe_under(&w.facts, &all)? {
                assumptions = all;
                safe = true;
            }
        }
        let kind = if safe && assumptions.is_empty() {
            PlanKind::Safe
        } else {
            PlanKind::Weak
        };
        Ok(PlanOutcome {
            kind,
            actions: self.plan_actions(&w.facts),
            assumptions,
            support: w.support.clone(),
            trace: Vec::new(),
        })
    }

    /// First weak plan in search order.
    pub fn weak_plan(&self) -> Result<Option<PlanOutcome>> {
        let mut found = None;
        self.weak_search(&mut |w| {
            found = Some(w.clone());
            Ok(ControlFlow::Break(()))
        })?;
        let Some(w) = found else {
            return Ok(None);
        };
        let mut out = self.weak_outcome(&w)?;
        out.trace = self.trace();
        Ok(Some(out))
    }

    /// Refine weak plans until one is safe.
    pub fn safe_plan(&self) -> Result<Option<PlanOutcome>> {
        let mut found: Option<(RuleSet, Facts)> = None;
        let mut tried = 0usize;
        let mut err = None;
        self.weak_search(&mut |w| {
            tried += 1;
            let room = self.opts.max_actions.saturating_sub(w.facts.len());
            let mut check = |d: &Facts| self.blocked(d);
            if let Some(delta) = self.deriver.extended_failed(&w.facts, room, &mut check) {
                match self.confirm(&w.support, &delta) {
                    Ok(Some(s)) => {
                        found = Some((s, delta));
                        return Ok(ControlFlow::Break(()));
                    }
                    Ok(None) => {}
                    Err(e) => {
                        err = Some(e);
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
            Ok(if tried >= self.opts.max_candidates {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            })
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(found.map(|(support, facts)| PlanOutcome {
            kind: PlanKind::Safe,
            actions: self.plan_actions(&facts),
            assumptions: Vec::new(),
            support,
            trace: self.trace(),
        }))
    }

    /// An admissible superset of `s` under `facts` with obligations, which
    /// also extends to a full set.
    fn confirm(&self, s: &RuleSet, facts: &Facts) -> Result<Option<RuleSet>> {
        let Search::Found(d) = self.deriver.successful(Mode::WithObligations, facts, s) else {
            return Ok(None);
        };
        let ctx = self.deriver.context(Mode::WithObligations, facts);
        Ok(ctx.extend_to_full(&d.root)?.map(|_| d.root))
    }

    /// Abduction state of a fact set.
    pub fn state(&self, facts: &Facts) -> AbductionState {
        AbductionState::new(self.prog(), facts.clone())
    }
}

fn blocked_in(deriver: &Deriver<'_>, goals: &[Atom], facts: &Facts) -> Search<(RuleSet, RuleSet)> {
    let prog = deriver.prog();
    let ctx = deriver.context(Mode::Domain, facts);
    let mut targets: Vec<Atom> = goals.to_vec();
    for (f, v, t) in prog.obligations(ctx.facts()) {
        let a = Atom::holds(f, t, v);
        if !targets.contains(&a) {
            targets.push(a);
        }
    }
    for g in targets {
        let Some(neg) = prog.complement(g) else {
            continue;
        };
        for r in ctx.supports(neg, Pool::Base).iter() {
            let found = match deriver.failed(Mode::Domain, facts, r) {
                Search::Exhausted => continue,
                Search::Found(d) => Some(d.root),
                Search::Budget => None,
            };
            // An admissible superset with no full set above it has no model.
            match ctx.extend_to_full(r) {
                Ok(None) => continue,
                Ok(Some(full)) => return Search::Found((r.clone(), found.unwrap_or(full))),
                Err(_) => return Search::Budget,
            }
        }
    }
    Search::Exhausted
}

/// Which plans the planner should return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    Weak,
    Safe,
}

/// Planner result cross-checked against the model oracle.
#[derive(Debug, Clone)]
pub struct Verified {
    pub outcome: Option<PlanOutcome>,
    pub oracle: Option<PlanResultClass>,
    /// Description of a disagreement between the two engines.
    pub defect: Option<String>,
}

/// Plan with the argumentation engine (safe first in safe mode, falling
/// back to weak) and classify the result with the model oracle.
pub fn plan_and_verify(p: &PlanningProblem, mode: PlanMode, opts: PlanOptions) -> Result<Verified> {
    let prog = translate(p)?;
    let planner = Planner::new(p, &prog, opts)?;
    let outcome = match mode {
        PlanMode::Safe => match planner.safe_plan()? {
            Some(o) => Some(o),
            None => planner.weak_plan()?,
        },
        PlanMode::Weak => planner.weak_plan()?,
    };
    let Some(o) = &outcome else {
        return Ok(Verified {
            outcome,
            oracle: None,
            defect: None,
        });
    };
    let oracle = Oracle {
        max_fluents: opts.max_fluents,
    };
    let class = oracle.classify_plan(p, &o.actions)?;
    let defect = match (o.kind, &class) {
        (PlanKind::Safe, PlanResultClass::Safe) => None,
        (PlanKind::Weak, c) if c.is_weak_or_safe() => None,
        (k, c) => Some(format!("planner says {k:?}, models say {c:?}")),
    };
    Ok(Verified {
        outcome,
        oracle: Some(class),
        defect,
    })
}

/// Convenience wrapper: plan without the oracle check.
pub fn plan(p: &PlanningProblem, mode: PlanMode, opts: PlanOptions) -> Result<Option<PlanOutcome>> {
    let prog = translate(p)?;
    let planner = Planner::new(p, &prog, opts)?;
    match mode {
        PlanMode::Safe => match planner.safe_plan()? {
            Some(o) => Ok(Some(o)),
            None => planner.weak_plan(),
        },
        PlanMode::Weak => planner.weak_plan(),
    }
}
