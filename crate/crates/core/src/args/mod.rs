//! Argumentation reformulation of a domain description.
//!
//! A domain becomes a background theory (action facts plus one definite rule
//! per causal law) together with grounded argument rules over every fluent
//! and pair of times within the horizon.

mod attack;
mod closure;
mod extension;
mod support;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::vocab::*;

pub use attack::{attacks, rule_less, set_lower, Attack, Unconfirmed};
pub use closure::Closure;
pub use support::{AbductiveSupport, Pool};

pub type FluentId = usize;
pub type ActionId = usize;

/// Argument rule schema. Generation rules come first so that rule sets list
/// them before persistence and assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    PG,
    NG,
    PP,
    NP,
    PA,
    NA,
}

impl Schema {
    pub fn positive(self) -> bool {
        matches!(self, Schema::PG | Schema::PP | Schema::PA)
    }

    pub fn is_generation(self) -> bool {
        matches!(self, Schema::PG | Schema::NG)
    }

    pub fn is_persistence(self) -> bool {
        matches!(self, Schema::PP | Schema::NP)
    }

    pub fn is_assumption(self) -> bool {
        matches!(self, Schema::PA | Schema::NA)
    }

    pub fn name(self) -> &'static str {
        match self {
            Schema::PG => "PG",
            Schema::NG => "NG",
            Schema::PP => "PP",
            Schema::NP => "NP",
            Schema::PA => "PA",
            Schema::NA => "NA",
        }
    }

    fn from_name(s: &str) -> Option<Schema> {
        Some(match s {
            "PG" => Schema::PG,
            "NG" => Schema::NG,
            "PP" => Schema::PP,
            "NP" => Schema::NP,
            "PA" => Schema::PA,
            "NA" => Schema::NA,
            _ => return None,
        })
    }
}

/// A grounded argument rule concluding `(¬)HoldsAt(fluent, at)`; `from` is the
/// body time of generation and persistence rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentRule {
    pub at: u32,
    pub schema: Schema,
    pub fluent: FluentId,
    pub from: Option<u32>,
}

impl ArgumentRule {
    pub fn assumption(fluent: FluentId, at: u32, positive: bool) -> Self {
        ArgumentRule {
            at,
            schema: if positive { Schema::PA } else { Schema::NA },
            fluent,
            from: None,
        }
    }

    pub fn generation(fluent: FluentId, at: u32, from: u32, positive: bool) -> Self {
        ArgumentRule {
            at,
            schema: if positive { Schema::PG } else { Schema::NG },
            fluent,
            from: Some(from),
        }
    }

    pub fn persistence(fluent: FluentId, at: u32, from: u32, positive: bool) -> Self {
        ArgumentRule {
            at,
            schema: if positive { Schema::PP } else { Schema::NP },
            fluent,
            from: Some(from),
        }
    }

    pub fn conclusion(&self) -> Atom {
        Atom::Holds {
            fluent: self.fluent,
            at: self.at,
            positive: self.schema.positive(),
        }
    }

    /// Time of the events or value the rule depends on.
    pub fn body_time(&self) -> u32 {
        self.from.unwrap_or(self.at)
    }
}

/// Atoms of the monotonic language. HappensAt facts live in the context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Holds { fluent: FluentId, at: u32, positive: bool },
    Initiation { fluent: FluentId, at: u32 },
    Termination { fluent: FluentId, at: u32 },
}

impl Atom {
    pub fn holds(fluent: FluentId, at: u32, positive: bool) -> Self {
        Atom::Holds { fluent, at, positive }
    }

    pub fn time(&self) -> u32 {
        match *self {
            Atom::Holds { at, .. } | Atom::Initiation { at, .. } | Atom::Termination { at, .. } => at,
        }
    }

    pub fn fluent(&self) -> FluentId {
        match *self {
            Atom::Holds { fluent, .. } | Atom::Initiation { fluent, .. } | Atom::Termination { fluent, .. } => fluent,
        }
    }
}

/// Sorted, duplicate-free set of argument rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleSet(Vec<ArgumentRule>);

impl RuleSet {
    pub fn new() -> Self {
        RuleSet(Vec::new())
    }

    pub fn singleton(r: ArgumentRule) -> Self {
        RuleSet(vec![r])
    }

    pub fn rules(&self) -> &[ArgumentRule] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ArgumentRule> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, r: &ArgumentRule) -> bool {
        self.0.binary_search(r).is_ok()
    }

    pub fn insert(&mut self, r: ArgumentRule) -> bool {
        match self.0.binary_search(&r) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, r);
                true
            }
        }
    }

    pub fn remove(&mut self, r: &ArgumentRule) -> bool {
        match self.0.binary_search(r) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &RuleSet) -> RuleSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        RuleSet(out)
    }

    pub fn with(&self, r: ArgumentRule) -> RuleSet {
        let mut s = self.clone();
        s.insert(r);
        s
    }

    pub fn is_subset(&self, other: &RuleSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut j = 0;
        for r in &self.0 {
            while j < other.0.len() && other.0[j] < *r {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != *r {
                return false;
            }
            j += 1;
        }
        true
    }

    pub fn assumptions(&self) -> impl Iterator<Item = &ArgumentRule> {
        self.0.iter().filter(|r| r.schema.is_assumption())
    }
}

impl FromIterator<ArgumentRule> for RuleSet {
    fn from_iter<I: IntoIterator<Item = ArgumentRule>>(iter: I) -> Self {
        let mut v: Vec<ArgumentRule> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        RuleSet(v)
    }
}

impl<'a> IntoIterator for &'a RuleSet {
    type Item = &'a ArgumentRule;
    type IntoIter = std::slice::Iter<'a, ArgumentRule>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Law {
    pub action: ActionId,
    pub fluent: FluentId,
    pub initiates: bool,
    pub conditions: Vec<(FluentId, bool)>,
}

/// A constrained literal and the conditions that force it.
pub(crate) type Constraint = ((FluentId, bool), Vec<(FluentId, bool)>);

/// Grounded argumentation program for one planning problem.
#[derive(Debug, Clone)]
pub struct Program {
    pub(crate) fluents: Vec<String>,
    pub(crate) actions: Vec<String>,
    pub(crate) horizon: u32,
    pub(crate) happens: BTreeSet<(ActionId, u32)>,
    pub(crate) laws: Vec<Law>,
    pub(crate) observations: Vec<(FluentId, bool, u32)>,
    pub(crate) ramifications: Vec<Constraint>,
    pub(crate) preconditions: Vec<(ActionId, Vec<(FluentId, bool)>)>,
}

/// Build the argumentation program of a valid problem.
pub fn translate(p: &PlanningProblem) -> Result<Program> {
    let diags = p.validate();
    if !diags.is_empty() {
        return Err(Error::Invalid(diags.into_iter().map(|d| (d, None)).collect()));
    }
    let fi = |n: &str| p.fluent_index(n).expect("validated");
    let ai = |n: &str| p.action_index(n).expect("validated");
    let lits = |c: &ConditionSet| c.iter().map(|l| (fi(&l.fluent), l.positive)).collect::<Vec<_>>();
    Ok(Program {
        fluents: p.fluents.iter().cloned().collect(),
        actions: p.actions.iter().cloned().collect(),
        horizon: p.horizon,
        happens: p.domain.occurrences.iter().map(|h| (ai(&h.action), h.time.0)).collect(),
        laws: p
            .domain
            .causal
            .iter()
            .map(|c| Law {
                action: ai(&c.action),
                fluent: fi(&c.fluent),
                initiates: c.effect == Effect::Initiates,
                conditions: lits(&c.conditions),
            })
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
        preconditions: p.preconditions.iter().map(|pp| (ai(&pp.action), lits(&pp.conditions))).collect(),
    })
}

impl Program {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn fluent_count(&self) -> usize {
        self.fluents.len()
    }

    pub fn fluent_name(&self, f: FluentId) -> &str {
        &self.fluents[f]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn fluent_id(&self, name: &str) -> Option<FluentId> {
        self.fluents.iter().position(|f| f == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn happens(&self) -> &BTreeSet<(ActionId, u32)> {
        &self.happens
    }

    /// The opposing atom. Only holds-literals conflict.
    pub fn complement(&self, a: Atom) -> Option<Atom> {
        match a {
            Atom::Holds { fluent, at, positive } => Some(Atom::Holds {
                fluent,
                at,
                positive: !positive,
            }),
            _ => None,
        }
    }

    /// Every rule of the theory, in rule order.
    pub fn theory_rules(&self) -> RuleSet {
        self.grounded(true)
    }

    /// Generation rules and assumptions only.
    pub fn base_rules(&self) -> RuleSet {
        self.grounded(false)
    }

    fn grounded(&self, persistence: bool) -> RuleSet {
        let mut out = Vec::new();
        for f in 0..self.fluents.len() {
            for t in 0..=self.horizon {
                for pos in [true, false] {
                    out.push(ArgumentRule::assumption(f, t, pos));
                    for t1 in 0..t {
                        out.push(ArgumentRule::generation(f, t, t1, pos));
                        if persistence {
                            out.push(ArgumentRule::persistence(f, t, t1, pos));
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn show(&self, r: &ArgumentRule) -> String {
        match r.from {
            Some(t1) => format!("{}[{},{};{}]", r.schema.name(), self.fluents[r.fluent], r.at, t1),
            None => format!("{}[{},{}]", r.schema.name(), self.fluents[r.fluent], r.at),
        }
    }

    pub fn show_set(&self, s: &RuleSet) -> String {
        let names: Vec<String> = s.iter().map(|r| self.show(r)).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn show_atom(&self, a: &Atom) -> String {
        match *a {
            Atom::Holds { fluent, at, positive } => {
                format!("{}HoldsAt({},{})", if positive { "" } else { "¬" }, self.fluents[fluent], at)
            }
            Atom::Initiation { fluent, at } => format!("Initiation({},{})", self.fluents[fluent], at),
            Atom::Termination { fluent, at } => format!("Termination({},{})", self.fluents[fluent], at),
        }
    }

    pub fn show_fact(&self, (a, t): (ActionId, u32)) -> String {
        format!("HappensAt({},{})", self.actions[a], t)
    }

    /// Parse a rule written as `PG[Running,7;5]` or `PA[Petrol,5]`.
    pub fn rule(&self, text: &str) -> Option<ArgumentRule> {
        let (schema, rest) = text.trim().split_once('[')?;
        let schema = Schema::from_name(schema)?;
        let body = rest.strip_suffix(']')?;
        let (fluent, times) = body.split_once(',')?;
        let fluent = self.fluent_id(fluent.trim())?;
        let (at, from) = match times.split_once(';') {
            Some((a, b)) => (a.trim().parse().ok()?, Some(b.trim().parse().ok()?)),
            None => (times.trim().parse().ok()?, None),
        };
        if at > self.horizon || schema.is_assumption() != from.is_none() || from.is_some_and(|t1| t1 >= at) {
            return None;
        }
        Some(ArgumentRule { at, schema, fluent, from })
    }

    /// Parse a comma-separated list of rules.
    pub fn rules(&self, text: &str) -> Option<RuleSet> {
        let mut out = RuleSet::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let end = rest.find(']')? + 1;
            out.insert(self.rule(&rest[..end])?);
            rest = rest[end..].trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        }
        Some(out)
    }

    /// Background facts and rules, one per line.
    pub fn dump_background(&self) -> String {
        let mut out = String::new();
        for &(a, t) in &self.happens {
            out.push_str(&format!("{}.\n", self.show_fact((a, t))));
        }
        for law in &self.laws {
            let head = if law.initiates { "Initiation" } else { "Termination" };
            out.push_str(&format!("{}({},t) <- HappensAt({},t)", head, self.fluents[law.fluent], self.actions[law.action]));
            for &(f, v) in &law.conditions {
                out.push_str(&format!(", {}HoldsAt({},t)", if v { "" } else { "¬" }, self.fluents[f]));
            }
            out.push_str(".\n");
        }
        out
    }

    /// One rule per line.
    pub fn dump_rules(&self, s: &RuleSet) -> String {
        s.iter().map(|r| self.show(r) + "\n").collect()
    }

    /// Literal into program atom.
    pub fn literal_atom(&self, t: &TProp) -> Option<Atom> {
        Some(Atom::holds(self.fluent_id(&t.literal.fluent)?, t.time.0, t.literal.positive))
    }

    pub fn atom_literal(&self, a: &Atom) -> Option<TProp> {
        match *a {
            Atom::Holds { fluent, at, positive } => {
                Some(TProp::new(FluentLiteral::new(self.fluents[fluent].clone(), positive), at))
            }
            _ => None,
        }
    }

    /// `(fluent, polarity, time)` for every precondition instance of the given facts.
    pub fn obligations<'a>(&'a self, facts: impl IntoIterator<Item = &'a (ActionId, u32)>) -> Vec<(FluentId, bool, u32)> {
        let mut out: Vec<(FluentId, bool, u32)> = Vec::new();
        for &(a, t) in facts {
            for (pa, conds) in &self.preconditions {
                if *pa == a {
                    for &(f, v) in conds {
                        if !out.contains(&(f, v, t)) {
                            out.push((f, v, t));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Largest fluent count accepted by extension enumeration.
pub const DEFAULT_CAP: usize = 16;

/// Program together with the action facts in force and the literals an
/// extension must confirm.
#[derive(Debug, Clone)]
pub struct Context<'p> {
    pub prog: &'p Program,
    pub(crate) facts: BTreeSet<(ActionId, u32)>,
    pub(crate) required: Vec<(FluentId, bool, u32)>,
    pub(crate) memo: support::Memo,
    pub(crate) cap: usize,
}

impl<'p> Context<'p> {
    /// Background facts plus `extra`; constraints are the observations.
    pub fn new(prog: &'p Program, extra: impl IntoIterator<Item = (ActionId, u32)>) -> Self {
        let mut facts = prog.happens.clone();
        facts.extend(extra);
        Context {
            prog,
            facts,
            required: prog.observations.clone(),
            memo: Default::default(),
            cap: DEFAULT_CAP,
        }
    }

    /// As [`Context::new`], also requiring every precondition instance of the facts.
    pub fn with_obligations(prog: &'p Program, extra: impl IntoIterator<Item = (ActionId, u32)>) -> Self {
        let mut c = Context::new(prog, extra);
        for o in prog.obligations(&c.facts) {
            if !c.required.contains(&o) {
                c.required.push(o);
            }
        }
        c
    }

    pub fn set_cap(&mut self, cap: usize) {
        self.cap = cap;
    }

    pub fn facts(&self) -> &BTreeSet<(ActionId, u32)> {
        &self.facts
    }

    pub fn required(&self) -> &[(FluentId, bool, u32)] {
        &self.required
    }

    /// Extra literals that extensions must confirm.
    pub fn require(&mut self, lits: impl IntoIterator<Item = (FluentId, bool, u32)>) {
        for l in lits {
            if !self.required.contains(&l) {
                self.required.push(l);
            }
        }
    }

    pub fn closure(&self, s: &RuleSet) -> Closure {
        Closure::compute(self, s)
    }

    pub fn derives(&self, s: &RuleSet, a: Atom) -> bool {
        self.closure(s).contains(a)
    }
}

#[cfg(test)]
mod tests;
