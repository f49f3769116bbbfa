//! Ground vocabulary of a Language E planning problem.
//!
//! Everything here is an immutable value: fluent literals, timepoints, the
//! five proposition forms and the [`PlanningProblem`] that bundles them with
//! the declared fluents, actions and a finite horizon. Time is the integer
//! range `0..=horizon` with its usual strict order.

use std::collections::BTreeSet;
use std::fmt;

/// A fluent constant or its negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentLiteral {
    pub fluent: String,
    pub positive: bool,
}

impl FluentLiteral {
    pub fn new(fluent: impl Into<String>, positive: bool) -> Self {
        Self {
            fluent: fluent.into(),
            positive,
        }
    }

    pub fn pos(fluent: impl Into<String>) -> Self {
        Self::new(fluent, true)
    }

    pub fn neg(fluent: impl Into<String>) -> Self {
        Self::new(fluent, false)
    }

    pub fn complement(&self) -> Self {
        complement(self)
    }
}

/// Flips the polarity of `l`.
pub fn complement(l: &FluentLiteral) -> FluentLiteral {
    FluentLiteral {
        fluent: l.fluent.clone(),
        positive: !l.positive,
    }
}

impl fmt::Display for FluentLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.fluent)
        } else {
            write!(f, "-{}", self.fluent)
        }
    }
}

/// A tick on the integer time line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimePoint(pub u32);

impl TimePoint {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl From<u32> for TimePoint {
    fn from(v: u32) -> Self {
        TimePoint(v)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of fluent literals, kept sorted by fluent name with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ConditionSet(Vec<FluentLiteral>);

impl ConditionSet {
    pub fn new(literals: impl IntoIterator<Item = FluentLiteral>) -> Self {
        let mut v: Vec<FluentLiteral> = literals.into_iter().collect();
        v.sort();
        v.dedup();
        ConditionSet(v)
    }

    pub fn empty() -> Self {
        ConditionSet(Vec::new())
    }

    pub fn literals(&self) -> &[FluentLiteral] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &FluentLiteral> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First fluent that appears with both polarities, if any.
    pub fn contradiction(&self) -> Option<&str> {
        self.0
            .windows(2)
            .find(|w| w[0].fluent == w[1].fluent)
            .map(|w| w[0].fluent.as_str())
    }
}

impl FromIterator<FluentLiteral> for ConditionSet {
    fn from_iter<I: IntoIterator<Item = FluentLiteral>>(iter: I) -> Self {
        ConditionSet::new(iter)
    }
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// `L holds-at T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TProp {
    pub literal: FluentLiteral,
    pub time: TimePoint,
}

impl TProp {
    pub fn new(literal: FluentLiteral, time: u32) -> Self {
        Self {
            literal,
            time: TimePoint(time),
        }
    }
}

impl fmt::Display for TProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} holds-at {}", self.literal, self.time)
    }
}

/// `A happens-at T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HProp {
    pub action: String,
    pub time: TimePoint,
}

impl HProp {
    pub fn new(action: impl Into<String>, time: u32) -> Self {
        Self {
            action: action.into(),
            time: TimePoint(time),
        }
    }
}

impl fmt::Display for HProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} happens-at {}", self.action, self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    Initiates,
    Terminates,
}

impl Effect {
    pub fn keyword(self) -> &'static str {
        match self {
            Effect::Initiates => "initiates",
            Effect::Terminates => "terminates",
        }
    }
}

/// `A initiates F when C` / `A terminates F when C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CProp {
    pub action: String,
    pub effect: Effect,
    pub fluent: String,
    pub conditions: ConditionSet,
}

impl fmt::Display for CProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.action, self.effect.keyword(), self.fluent)?;
        if !self.conditions.is_empty() {
            write!(f, " when {}", self.conditions)?;
        }
        Ok(())
    }
}

/// `L whenever C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RProp {
    pub literal: FluentLiteral,
    pub conditions: ConditionSet,
}

impl fmt::Display for RProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} whenever {}", self.literal, self.conditions)
    }
}

/// `A needs C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PProp {
    pub action: String,
    pub conditions: ConditionSet,
}

impl fmt::Display for PProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} needs {}", self.action, self.conditions)
    }
}

/// Any one statement of a planning problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proposition {
    T(TProp),
    H(HProp),
    C(CProp),
    R(RProp),
    P(PProp),
}

/// Turns every literal of `c` into a t-proposition at `t`.
pub fn condition_at(c: &ConditionSet, t: TimePoint) -> Vec<TProp> {
    c.iter()
        .map(|l| TProp {
            literal: l.clone(),
            time: t,
        })
        .collect()
}

/// The t/h/c/r-propositions of a domain description.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DomainDescription {
    pub observations: Vec<TProp>,
    pub occurrences: Vec<HProp>,
    pub causal: Vec<CProp>,
    pub ramifications: Vec<RProp>,
}

/// A domain description with its vocabulary, preconditions and goal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlanningProblem {
    pub fluents: BTreeSet<String>,
    pub actions: BTreeSet<String>,
    pub horizon: u32,
    pub domain: DomainDescription,
    pub preconditions: Vec<PProp>,
    pub goal: Vec<TProp>,
}

/// Which list a proposition lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropKind {
    Observation,
    Occurrence,
    Causal,
    Ramification,
    Precondition,
    Goal,
}

/// Position of a proposition inside a [`PlanningProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropRef {
    pub kind: PropKind,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    UndeclaredFluent(String),
    UndeclaredAction(String),
    TimeOutOfRange { time: u32, horizon: u32 },
    ContradictoryConditions(String),
    EmptyPreconditionSet,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticKind::UndeclaredFluent(n) => write!(f, "undeclared fluent `{n}`"),
            DiagnosticKind::UndeclaredAction(n) => write!(f, "undeclared action `{n}`"),
            DiagnosticKind::TimeOutOfRange { time, horizon } => {
                write!(f, "timepoint {time} lies beyond horizon {horizon}")
            }
            DiagnosticKind::ContradictoryConditions(n) => {
                write!(f, "condition set contains both `{n}` and `-{n}`")
            }
            DiagnosticKind::EmptyPreconditionSet => write!(f, "empty precondition set"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub at: PropRef,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} #{}: {}", self.at.kind, self.at.index, self.kind)
    }
}

impl PlanningProblem {
    pub fn new(horizon: u32) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }

    pub fn fluent_index(&self, name: &str) -> Option<usize> {
        self.fluents.iter().position(|f| f == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Every proposition with its position, in a fixed kind order.
    pub fn propositions(&self) -> Vec<(PropRef, Proposition)> {
        let mut out = Vec::new();
        let d = &self.domain;
        let push = |out: &mut Vec<_>, kind, index, p| out.push((PropRef { kind, index }, p));
        for (i, p) in d.observations.iter().enumerate() {
            push(&mut out, PropKind::Observation, i, Proposition::T(p.clone()));
        }
        for (i, p) in d.occurrences.iter().enumerate() {
            push(&mut out, PropKind::Occurrence, i, Proposition::H(p.clone()));
        }
        for (i, p) in d.causal.iter().enumerate() {
            push(&mut out, PropKind::Causal, i, Proposition::C(p.clone()));
        }
        for (i, p) in d.ramifications.iter().enumerate() {
            push(&mut out, PropKind::Ramification, i, Proposition::R(p.clone()));
        }
        for (i, p) in self.preconditions.iter().enumerate() {
            push(&mut out, PropKind::Precondition, i, Proposition::P(p.clone()));
        }
        for (i, p) in self.goal.iter().enumerate() {
            push(&mut out, PropKind::Goal, i, Proposition::T(p.clone()));
        }
        out
    }

    /// Checks declarations, time bounds and condition-set invariants.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }

    /// `D ∪ Δ`: the problem with the given occurrences added (duplicates skipped).
    pub fn with_plan(&self, delta: &[HProp]) -> Self {
        let mut p = self.clone();
        for h in delta {
            if !p.domain.occurrences.contains(h) {
                p.domain.occurrences.push(h.clone());
            }
        }
        p
    }

    /// The problem with extra observations added (duplicates skipped).
    pub fn with_observations(&self, extra: &[TProp]) -> Self {
        let mut p = self.clone();
        for t in extra {
            if !p.domain.observations.contains(t) {
                p.domain.observations.push(t.clone());
            }
        }
        p
    }

    pub fn with_goal(&self, goal: Vec<TProp>) -> Self {
        let mut p = self.clone();
        p.goal = goal;
        p
    }

    /// Fluents that no c-proposition initiates or terminates.
    pub fn static_fluents(&self) -> BTreeSet<String> {
        let affected: BTreeSet<&str> = self
            .domain
            .causal
            .iter()
            .map(|c| c.fluent.as_str())
            .collect();
        self.fluents
            .iter()
            .filter(|f| !affected.contains(f.as_str()))
            .cloned()
            .collect()
    }
}

/// Returns one diagnostic per violated invariant; empty means well-formed.
pub fn validate(p: &PlanningProblem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (at, prop) in p.propositions() {
        let mut report = |kind| out.push(Diagnostic { at, kind });
        let fluent = |name: &str, report: &mut dyn FnMut(DiagnosticKind)| {
            if !p.fluents.contains(name) {
                report(DiagnosticKind::UndeclaredFluent(name.to_string()));
            }
        };
        let conds = |c: &ConditionSet, report: &mut dyn FnMut(DiagnosticKind)| {
            for l in c.iter() {
                if !p.fluents.contains(&l.fluent) {
                    report(DiagnosticKind::UndeclaredFluent(l.fluent.clone()));
                }
            }
            if let Some(f) = c.contradiction() {
                report(DiagnosticKind::ContradictoryConditions(f.to_string()));
            }
        };
        let action = |name: &str, report: &mut dyn FnMut(DiagnosticKind)| {
            if !p.actions.contains(name) {
                report(DiagnosticKind::UndeclaredAction(name.to_string()));
            }
        };
        let time = |t: TimePoint, report: &mut dyn FnMut(DiagnosticKind)| {
            if t.0 > p.horizon {
                report(DiagnosticKind::TimeOutOfRange {
                    time: t.0,
                    horizon: p.horizon,
                });
            }
        };
        match &prop {
            Proposition::T(t) => {
                fluent(&t.literal.fluent, &mut report);
                time(t.time, &mut report);
            }
            Proposition::H(h) => {
                action(&h.action, &mut report);
                time(h.time, &mut report);
            }
            Proposition::C(c) => {
                action(&c.action, &mut report);
                fluent(&c.fluent, &mut report);
                conds(&c.conditions, &mut report);
            }
            Proposition::R(r) => {
                fluent(&r.literal.fluent, &mut report);
                conds(&r.conditions, &mut report);
            }
            Proposition::P(pp) => {
                action(&pp.action, &mut report);
                conds(&pp.conditions, &mut report);
                if pp.conditions.is_empty() {
                    report(DiagnosticKind::EmptyPreconditionSet);
                }
            }
        }
    }
    out
}
