//! Minimal sets of rules responsible for deriving an atom.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::{ActionId, ArgumentRule, Atom, Context, RuleSet};

/// Which rules a support may use.
#[derive(Debug, Clone, Copy)]
pub enum Pool<'a> {
    /// Every grounded rule, persistence included.
    Theory,
    /// Generation rules and assumptions.
    Base,
    /// Rules of one given set.
    Within(&'a RuleSet),
}

impl Pool<'_> {
    fn admits(&self, r: &ArgumentRule) -> bool {
        match self {
            Pool::Theory => true,
            Pool::Base => !r.schema.is_persistence(),
            Pool::Within(s) => s.contains(r),
        }
    }

    fn persistence(&self) -> bool {
        !matches!(self, Pool::Base)
    }
}

type Supports = Rc<Vec<RuleSet>>;
type AbductiveMemo = RefCell<HashMap<(Atom, usize), Rc<Vec<AbductiveSupport>>>>;

#[derive(Debug, Clone, Default)]
pub(crate) struct Memo {
    theory: RefCell<HashMap<Atom, Supports>>,
    base: RefCell<HashMap<Atom, Supports>>,
    abductive: AbductiveMemo,
}

/// Drop duplicates and supersets.
pub(crate) fn minimize(mut sets: Vec<RuleSet>) -> Vec<RuleSet> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut out: Vec<RuleSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !out.iter().any(|k| k.is_subset(&s)) {
            out.push(s);
        }
    }
    out
}

impl Context<'_> {
    /// All minimal subsets of `pool` deriving `atom`, smallest first.
    pub fn supports(&self, atom: Atom, pool: Pool<'_>) -> Supports {
        match pool {
            Pool::Theory => self.supports_memo(atom, pool, &self.memo.theory),
            Pool::Base => self.supports_memo(atom, pool, &self.memo.base),
            Pool::Within(_) => {
                let local = RefCell::new(HashMap::new());
                self.supports_memo(atom, pool, &local)
            }
        }
    }

    /// Minimal supports within `s`, sharing one memo across several atoms.
    pub fn supports_within(&self, s: &RuleSet) -> impl FnMut(Atom) -> Supports + '_ {
        let local = RefCell::new(HashMap::new());
        let s = s.clone();
        move |atom| {
            let pool = Pool::Within(&s);
            self.supports_memo(atom, pool, &local)
        }
    }

    fn supports_memo(&self, atom: Atom, pool: Pool<'_>, memo: &RefCell<HashMap<Atom, Supports>>) -> Supports {
        if let Some(s) = memo.borrow().get(&atom) {
            return s.clone();
        }
        let horizon = self.prog.horizon;
        if atom.time() > horizon || atom.fluent() >= self.prog.fluents.len() {
            return Rc::new(Vec::new());
        }
        let mut found: Vec<RuleSet> = Vec::new();
        match atom {
            Atom::Holds { fluent, at, positive } => {
                let a = ArgumentRule::assumption(fluent, at, positive);
                if pool.admits(&a) {
                    found.push(RuleSet::singleton(a));
                }
                for t1 in 0..at {
                    let g = ArgumentRule::generation(fluent, at, t1, positive);
                    if pool.admits(&g) {
                        let body = if positive {
                            Atom::Initiation { fluent, at: t1 }
                        } else {
                            Atom::Termination { fluent, at: t1 }
                        };
                        for s in self.supports_memo(body, pool, memo).iter() {
                            found.push(s.with(g));
                        }
                    }
                    if pool.persistence() {
                        let p = ArgumentRule::persistence(fluent, at, t1, positive);
                        if pool.admits(&p) {
                            for s in self.supports_memo(Atom::holds(fluent, t1, positive), pool, memo).iter() {
                                found.push(s.with(p));
                            }
                        }
                    }
                }
            }
            Atom::Initiation { fluent, at } | Atom::Termination { fluent, at } => {
                let initiates = matches!(atom, Atom::Initiation { .. });
                for law in &self.prog.laws {
                    if law.fluent != fluent || law.initiates != initiates || !self.facts.contains(&(law.action, at)) {
                        continue;
                    }
                    let mut partial = vec![RuleSet::new()];
                    for &(f, v) in &law.conditions {
                        let subs = self.supports_memo(Atom::holds(f, at, v), pool, memo);
                        let mut next = Vec::new();
                        for x in &partial {
                            for y in subs.iter() {
                                next.push(x.union(y));
                            }
                        }
                        partial = minimize(next);
                        if partial.is_empty() {
                            break;
                        }
                    }
                    found.extend(partial);
                }
            }
        }
        let out = Rc::new(minimize(found));
        memo.borrow_mut().insert(atom, out.clone());
        out
    }
}

/// A base support that may rely on action facts not yet in the context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbductiveSupport {
    pub rules: RuleSet,
    pub needs: BTreeSet<(ActionId, u32)>,
}

impl AbductiveSupport {
    fn union(&self, other: &AbductiveSupport) -> AbductiveSupport {
        AbductiveSupport {
            rules: self.rules.union(&other.rules),
            needs: self.needs.union(&other.needs).copied().collect(),
        }
    }

    fn covers(&self, other: &AbductiveSupport) -> bool {
        self.rules.is_subset(&other.rules) && self.needs.is_subset(&other.needs)
    }
}

fn minimize_abductive(mut sets: Vec<AbductiveSupport>, max_needs: usize) -> Vec<AbductiveSupport> {
    sets.retain(|s| s.needs.len() <= max_needs);
    sets.sort_by(|a, b| {
        (a.needs.len() + a.rules.len())
            .cmp(&(b.needs.len() + b.rules.len()))
            .then_with(|| a.cmp(b))
    });
    sets.dedup();
    let mut out: Vec<AbductiveSupport> = Vec::with_capacity(sets.len());
    for s in sets {
        if !out.iter().any(|k| k.covers(&s)) {
            out.push(s);
        }
    }
    out
}

impl Context<'_> {
    /// Minimal base supports of `atom` where action facts at ticks below the
    /// horizon may be hypothesized, at most `max_needs` of them.
    pub fn abductive_supports(&self, atom: Atom, max_needs: usize) -> Rc<Vec<AbductiveSupport>> {
        if let Some(s) = self.memo.abductive.borrow().get(&(atom, max_needs)) {
            return s.clone();
        }
        let horizon = self.prog.horizon;
        let mut found: Vec<AbductiveSupport> = Vec::new();
        if atom.time() <= horizon && atom.fluent() < self.prog.fluents.len() {
            match atom {
                Atom::Holds { fluent, at, positive } => {
                    found.push(AbductiveSupport {
                        rules: RuleSet::singleton(ArgumentRule::assumption(fluent, at, positive)),
                        needs: BTreeSet::new(),
                    });
                    for t1 in 0..at {
                        let g = ArgumentRule::generation(fluent, at, t1, positive);
                        let body = if positive {
                            Atom::Initiation { fluent, at: t1 }
                        } else {
                            Atom::Termination { fluent, at: t1 }
                        };
                        for s in self.abductive_supports(body, max_needs).iter() {
                            found.push(AbductiveSupport {
                                rules: s.rules.with(g),
                                needs: s.needs.clone(),
                            });
                        }
                    }
                }
                Atom::Initiation { fluent, at } | Atom::Termination { fluent, at } => {
                    let initiates = matches!(atom, Atom::Initiation { .. });
                    for law in &self.prog.laws {
                        if law.fluent != fluent || law.initiates != initiates {
                            continue;
                        }
                        let fact = (law.action, at);
                        let mut needs = BTreeSet::new();
                        if !self.facts.contains(&fact) {
                            if at >= horizon {
                                continue;
                            }
                            needs.insert(fact);
                        }
                        let mut partial = vec![AbductiveSupport {
                            rules: RuleSet::new(),
                            needs,
                        }];
                        for &(f, v) in &law.conditions {
                            let subs = self.abductive_supports(Atom::holds(f, at, v), max_needs);
                            let mut next = Vec::new();
                            for x in &partial {
                                for y in subs.iter() {
                                    next.push(x.union(y));
                                }
                            }
                            partial = minimize_abductive(next, max_needs);
                        }
                        found.extend(partial);
                    }
                }
            }
        }
        let out = Rc::new(minimize_abductive(found, max_needs));
        self.memo.abductive.borrow_mut().insert((atom, max_needs), out.clone());
        out
    }
}
