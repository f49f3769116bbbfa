//! Model-theoretic semantics over bounded integer time.
//!
//! Persistence and the causal laws make a model a deterministic
//! function of its state at time 0, so [`Oracle::models`] enumerates the
//! `2^|Φ|` initial states and simulates forward. [`naive_models`] checks
//! every assignment against the definition directly and exists to validate
//! the simulation on tiny instances.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vocab::*;

/// Total truth assignment over fluents × `0..=horizon`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    fluents: Arc<[String]>,
    horizon: u32,
    values: Vec<bool>,
}

impl Interpretation {
    pub fn new(fluents: Arc<[String]>, horizon: u32, fill: bool) -> Self {
        let n = fluents.len() * (horizon as usize + 1);
        Interpretation {
            fluents,
            horizon,
            values: vec![fill; n],
        }
    }

    fn slot(&self, f: usize, t: u32) -> usize {
        f * (self.horizon as usize + 1) + t as usize
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn fluents(&self) -> &[String] {
        &self.fluents
    }

    pub fn get(&self, f: usize, t: u32) -> bool {
        self.values[self.slot(f, t)]
    }

    pub fn set(&mut self, f: usize, t: u32, v: bool) {
        let i = self.slot(f, t);
        self.values[i] = v;
    }

    pub fn value(&self, fluent: &str, t: u32) -> Option<bool> {
        let f = self.fluents.iter().position(|x| x == fluent)?;
        (t <= self.horizon).then(|| self.get(f, t))
    }

    pub fn satisfies_literal(&self, l: &FluentLiteral, t: u32) -> bool {
        self.value(&l.fluent, t) == Some(l.positive)
    }

    /// Fluent × time table, one row per fluent.
    pub fn table(&self) -> String {
        let width = self.fluents.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut out = format!("{:width$} ", "");
        for t in 0..=self.horizon {
            out.push_str(&format!(" {t}"));
        }
        out.push('\n');
        for (f, name) in self.fluents.iter().enumerate() {
            out.push_str(&format!("{name:width$} "));
            for t in 0..=self.horizon {
                out.push_str(if self.get(f, t) { " T" } else { " F" });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.table())
    }
}

/// True iff `h` satisfies every literal of `c` at `t`.
pub fn satisfies_at(h: &Interpretation, c: &ConditionSet, t: TimePoint) -> bool {
    c.iter().all(|l| h.satisfies_literal(l, t.0))
}

/// Index-resolved form of a problem's domain.
struct Grounded {
    fluents: Arc<[String]>,
    horizon: u32,
    /// (action, time) pairs.
    happens: Vec<(usize, u32)>,
    laws: Vec<Law>,
    observations: Vec<(usize, bool, u32)>,
    ramifications: Vec<Constraint>,
}

type Constraint = ((usize, bool), Vec<(usize, bool)>);
/// (action, fluent, initiates, conditions).
type Law = (usize, usize, bool, Vec<(usize, bool)>);

fn resolve(p: &PlanningProblem) -> Result<Grounded> {
    let diags = p.validate();
    if !diags.is_empty() {
        return Err(Error::Invalid(diags.into_iter().map(|d| (d, None)).collect()));
    }
    let fi = |n: &str| p.fluent_index(n).expect("validated");
    let ai = |n: &str| p.action_index(n).expect("validated");
    let lits = |c: &ConditionSet| c.iter().map(|l| (fi(&l.fluent), l.positive)).collect::<Vec<_>>();
    Ok(Grounded {
        fluents: p.fluents.iter().cloned().collect(),
        horizon: p.horizon,
        happens: p
            .domain
            .occurrences
            .iter()
            .map(|h| (ai(&h.action), h.time.0))
            .collect(),
        laws: p
            .domain
            .causal
            .iter()
            .map(|c| (ai(&c.action), fi(&c.fluent), c.effect == Effect::Initiates, lits(&c.conditions)))
            .collect(),
        observations: p
            .domain
            .observations
            .iter()
            .map(|t| (fi(&t.literal.fluent), t.literal.positive, t.time.0))
            .collect(),
        ramifications: p
            .domain
            .ramifications
            .iter()
            .map(|r| ((fi(&r.literal.fluent), r.literal.positive), lits(&r.conditions)))
            .collect(),
    })
}

impl Grounded {
    fn holds(h: &Interpretation, conds: &[(usize, bool)], t: u32) -> bool {
        conds.iter().all(|&(f, v)| h.get(f, t) == v)
    }

    /// (initiation set, termination set) for fluent `f`.
    fn change_points(&self, h: &Interpretation, f: usize) -> (BTreeSet<u32>, BTreeSet<u32>) {
        let mut init = BTreeSet::new();
        let mut term = BTreeSet::new();
        for &(a, t) in &self.happens {
            for (la, lf, initiates, conds) in &self.laws {
                if *la == a && *lf == f && Self::holds(h, conds, t) {
                    if *initiates {
                        init.insert(t);
                    } else {
                        term.insert(t);
                    }
                }
            }
        }
        (init, term)
    }

    fn static_ok(&self, h: &Interpretation) -> bool {
        self.observations.iter().all(|&(f, v, t)| h.get(f, t) == v)
            && (0..=self.horizon).all(|t| {
                self.ramifications
                    .iter()
                    .all(|((lf, lv), conds)| !Self::holds(h, conds, t) || h.get(*lf, t) == *lv)
            })
    }

    /// Persistence, causation, constraints and observations checked
    /// literally over every pair `t1 < t3`.
    fn is_model(&self, h: &Interpretation) -> bool {
        for f in 0..self.fluents.len() {
            let (init, term) = self.change_points(h, f);
            for t1 in 0..=self.horizon {
                for t3 in t1 + 1..=self.horizon {
                    let any_change = init.range(t1..t3).next().is_some() || term.range(t1..t3).next().is_some();
                    if !any_change && h.get(f, t1) != h.get(f, t3) {
                        return false;
                    }
                    if init.contains(&t1) && term.range(t1 + 1..t3).next().is_none() && !h.get(f, t3) {
                        return false;
                    }
                    if term.contains(&t1) && init.range(t1 + 1..t3).next().is_none() && h.get(f, t3) {
                        return false;
                    }
                }
            }
        }
        self.static_ok(h)
    }

    /// The unique run from `initial`, or `None` when some fluent is both
    /// initiated and terminated at a tick before the horizon.
    fn simulate(&self, initial: u64) -> Option<Interpretation> {
        let n = self.fluents.len();
        let mut h = Interpretation::new(self.fluents.clone(), self.horizon, false);
        for f in 0..n {
            h.set(f, 0, initial >> f & 1 == 1);
        }
        for t in 0..self.horizon {
            let mut init = vec![false; n];
            let mut term = vec![false; n];
            for &(a, at) in &self.happens {
                if at != t {
                    continue;
                }
                for (la, lf, initiates, conds) in &self.laws {
                    if *la == a && Self::holds(&h, conds, t) {
                        if *initiates {
                            init[*lf] = true;
                        } else {
                            term[*lf] = true;
                        }
                    }
                }
            }
            for f in 0..n {
                let v = match (init[f], term[f]) {
                    (true, true) => return None,
                    (true, false) => true,
                    (false, true) => false,
                    (false, false) => h.get(f, t),
                };
                h.set(f, t + 1, v);
            }
        }
        Some(h)
    }
}

/// Initiation and termination points of `fluent` in `h` relative to `p`.
pub fn change_points(h: &Interpretation, p: &PlanningProblem, fluent: &str) -> Result<(BTreeSet<u32>, BTreeSet<u32>)> {
    let g = resolve(p)?;
    let f = p
        .fluent_index(fluent)
        .ok_or_else(|| Error::Invalid(vec![]))?;
    Ok(g.change_points(h, f))
}

/// Direct check of the model conditions.
pub fn is_model(h: &Interpretation, p: &PlanningProblem) -> Result<bool> {
    let g = resolve(p)?;
    Ok(h.fluents.len() == g.fluents.len() && h.horizon == g.horizon && g.is_model(h))
}

/// Largest `|Φ|·(horizon+1)` accepted by [`naive_models`].
pub const NAIVE_LIMIT: usize = 20;

/// Every assignment that passes [`is_model`]; exponential in `|Φ|·(horizon+1)`.
pub fn naive_models(p: &PlanningProblem) -> Result<Vec<Interpretation>> {
    let g = resolve(p)?;
    let bits = g.fluents.len() * (g.horizon as usize + 1);
    if bits > NAIVE_LIMIT {
        return Err(Error::CapExceeded {
            fluents: bits,
            limit: NAIVE_LIMIT,
        });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << bits) {
        let mut h = Interpretation::new(g.fluents.clone(), g.horizon, false);
        for (i, v) in h.values.iter_mut().enumerate() {
            *v = mask >> i & 1 == 1;
        }
        if g.is_model(&h) {
            out.push(h);
        }
    }
    Ok(out)
}

/// Outcome of judging a candidate plan against the semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanResultClass {
    Safe,
    Weak { assumptions: Vec<TProp> },
    NotAPlan,
}

impl PlanResultClass {
    pub fn is_safe(&self) -> bool {
        matches!(self, PlanResultClass::Safe)
    }

    pub fn is_weak_or_safe(&self) -> bool {
        !matches!(self, PlanResultClass::NotAPlan)
    }
}

/// Enumeration-based decision procedures with a cap on `|Φ|`.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub max_fluents: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { max_fluents: 16 }
    }
}

impl Oracle {
    pub fn new(max_fluents: usize) -> Self {
        Oracle { max_fluents }
    }

    fn grounded(&self, p: &PlanningProblem) -> Result<Grounded> {
        let g = resolve(p)?;
        if g.fluents.len() > self.max_fluents {
            return Err(Error::CapExceeded {
                fluents: g.fluents.len(),
                limit: self.max_fluents,
            });
        }
        Ok(g)
    }

    /// All models of the domain of `p`, ordered by initial state.
    pub fn models(&self, p: &PlanningProblem) -> Result<Vec<Interpretation>> {
        let g = self.grounded(p)?;
        Ok((0u64..1u64 << g.fluents.len())
            .filter_map(|m| g.simulate(m))
            .filter(|h| g.static_ok(h))
            .collect())
    }

    pub fn is_consistent(&self, p: &PlanningProblem) -> Result<bool> {
        Ok(!self.models(p)?.is_empty())
    }

    /// Every model satisfies every t-proposition of `q`.
    pub fn entails(&self, p: &PlanningProblem, q: &[TProp]) -> Result<bool> {
        check_query(p, q)?;
        Ok(self
            .models(p)?
            .iter()
            .all(|h| q.iter().all(|t| h.satisfies_literal(&t.literal, t.time.0))))
    }

    /// `D ⊨ P` for the precondition set of `p`.
    pub fn satisfies_preconditions(&self, p: &PlanningProblem) -> Result<bool> {
        let obligations = precondition_instances(p);
        self.entails(p, &obligations)
    }

    /// Safe, weak (with one minimized assumption set) or neither.
    pub fn classify_plan(&self, p: &PlanningProblem, delta: &[HProp]) -> Result<PlanResultClass> {
        let d = p.with_plan(delta);
        let models = self.models(&d)?;
        if models.is_empty() {
            return Ok(PlanResultClass::NotAPlan);
        }
        let required: Vec<TProp> = p.goal.iter().cloned().chain(precondition_instances(&d)).collect();
        let good = |h: &Interpretation| required.iter().all(|t| h.satisfies_literal(&t.literal, t.time.0));
        if models.iter().all(good) {
            return Ok(PlanResultClass::Safe);
        }
        let witnesses: Vec<&Interpretation> = models.iter().filter(|h| good(h)).collect();
        if witnesses.is_empty() {
            return Ok(PlanResultClass::NotAPlan);
        }
        Ok(PlanResultClass::Weak {
            assumptions: self.assumptions(p, delta, &witnesses)?,
        })
    }

    /// Safe in `p` extended with `extra` as observations.
    fn safe_with(&self, p: &PlanningProblem, delta: &[HProp], extra: &[TProp]) -> Result<bool> {
        let d = p.with_observations(extra).with_plan(delta);
        let models = self.models(&d)?;
        let required: Vec<TProp> = p.goal.iter().cloned().chain(precondition_instances(&d)).collect();
        Ok(!models.is_empty()
            && models
                .iter()
                .all(|h| required.iter().all(|t| h.satisfies_literal(&t.literal, t.time.0))))
    }

    /// Condition literals of occurring actions read off the first witness for
    /// which they make the plan safe; otherwise the first witness's initial
    /// state. Minimized greedily.
    fn assumptions(&self, p: &PlanningProblem, delta: &[HProp], witnesses: &[&Interpretation]) -> Result<Vec<TProp>> {
        let d = p.with_plan(delta);
        let mut chosen = None;
        for w in witnesses {
            let mut candidates: BTreeSet<TProp> = BTreeSet::new();
            for h in &d.domain.occurrences {
                let laws = d.domain.causal.iter().filter(|c| c.action == h.action).map(|c| &c.conditions);
                let pre = d.preconditions.iter().filter(|c| c.action == h.action).map(|c| &c.conditions);
                for c in laws.chain(pre) {
                    for l in c.iter() {
                        let v = w.value(&l.fluent, h.time.0).expect("declared");
                        candidates.insert(TProp::new(FluentLiteral::new(l.fluent.clone(), v), h.time.0));
                    }
                }
            }
            let set: Vec<TProp> = candidates.into_iter().collect();
            if self.safe_with(p, delta, &set)? {
                chosen = Some(set);
                break;
            }
        }
        let mut set = match chosen {
            Some(s) => s,
            None => {
                let w = witnesses[0];
                w.fluents()
                    .iter()
                    .enumerate()
                    .map(|(f, name)| TProp::new(FluentLiteral::new(name.clone(), w.get(f, 0)), 0))
                    .collect()
            }
        };
        let mut i = 0;
        while i < set.len() {
            let mut trial = set.clone();
            trial.remove(i);
            if self.safe_with(p, delta, &trial)? {
                set = trial;
            } else {
                i += 1;
            }
        }
        Ok(set)
    }
}

/// Query literals name declared fluents at times within the horizon.
pub fn check_query(p: &PlanningProblem, q: &[TProp]) -> Result<()> {
    let probe = p.with_goal(q.to_vec());
    let diags: Vec<_> = probe
        .validate()
        .into_iter()
        .filter(|d| d.at.kind == PropKind::Goal)
        .map(|d| (d, None))
        .collect();
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(diags))
    }
}

/// `C(T)` for every p-proposition `A needs C` and occurrence `A happens-at T`.
pub fn precondition_instances(p: &PlanningProblem) -> Vec<TProp> {
    let mut out = Vec::new();
    for pp in &p.preconditions {
        for h in p.domain.occurrences.iter().filter(|h| h.action == pp.action) {
            for t in condition_at(&pp.conditions, h.time) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}
