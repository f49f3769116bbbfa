//! Priorities, attacks and admissibility.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::{ArgumentRule, Atom, Closure, Context, Pool, RuleSet};

/// The priority relation: `a` is strictly weaker than `b`. Only rules with
/// complementary conclusions on the same fluent and tick are comparable.
pub fn rule_less(a: &ArgumentRule, b: &ArgumentRule) -> bool {
    if a.fluent != b.fluent || a.at != b.at || a.schema.positive() == b.schema.positive() {
        return false;
    }
    let (sa, sb) = (a.schema, b.schema);
    if sb.is_generation() {
        if sa.is_assumption() {
            return true;
        }
        let (ta, tb) = (a.body_time(), b.body_time());
        return if sa.is_persistence() { tb >= ta } else { ta < tb };
    }
    sb.is_persistence() && sa.is_assumption()
}

/// `a` has a rule weaker than some rule of `b` and none stronger than any.
pub fn set_lower(a: &RuleSet, b: &RuleSet) -> bool {
    let mut lower = false;
    for x in a {
        for y in b {
            if rule_less(y, x) {
                return false;
            }
            lower |= rule_less(x, y);
        }
    }
    lower
}

/// A rule set with its closure and a memo of supports inside it.
pub(crate) struct Side<'s> {
    pub set: &'s RuleSet,
    pub closure: Closure,
    memo: RefCell<HashMap<Atom, Rc<Vec<RuleSet>>>>,
}

impl<'s> Side<'s> {
    pub fn new(ctx: &Context<'_>, set: &'s RuleSet) -> Self {
        Side {
            set,
            closure: ctx.closure(set),
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn supports(&self, ctx: &Context<'_>, a: Atom) -> Rc<Vec<RuleSet>> {
        if let Some(s) = self.memo.borrow().get(&a) {
            return s.clone();
        }
        let s = ctx.supports(a, Pool::Within(self.set));
        self.memo.borrow_mut().insert(a, s.clone());
        s
    }
}

/// Some pair of minimal supports deriving `lit` in `attacker` and its
/// complement in `attacked` where the attacker's is not lower.
pub(crate) fn attacks_on(ctx: &Context<'_>, attacker: &Side<'_>, attacked: &Side<'_>, lit: Atom) -> bool {
    let Some(c) = ctx.prog.complement(lit) else {
        return false;
    };
    if !attacker.closure.contains(lit) || !attacked.closure.contains(c) {
        return false;
    }
    let rs = attacker.supports(ctx, lit);
    let ss = attacked.supports(ctx, c);
    rs.iter().any(|r| ss.iter().any(|s| !set_lower(r, s)))
}

fn side_attacks(ctx: &Context<'_>, attacker: &Side<'_>, attacked: &Side<'_>) -> bool {
    attacker
        .closure
        .atoms()
        .into_iter()
        .any(|lit| attacks_on(ctx, attacker, attacked, lit))
}

/// `attacker` derives some atom whose complement `attacked` derives, through
/// minimal supports of which the attacker's is not lower.
pub fn attacks(ctx: &Context<'_>, attacker: &RuleSet, attacked: &RuleSet) -> bool {
    side_attacks(ctx, &Side::new(ctx, attacker), &Side::new(ctx, attacked))
}

/// An attack on a set: `attacker` derives the complement of `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attack {
    pub target: Atom,
    pub attacker: RuleSet,
}

/// What keeps a set from confirming the constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unconfirmed {
    /// A required or implied literal that is not derived.
    Missing(Atom),
    /// A constraint whose negation is derived, or a fluent both initiated
    /// and terminated at a tick before the horizon.
    Violated(Atom),
}

impl Context<'_> {
    pub fn self_attacking(&self, s: &RuleSet) -> bool {
        let side = Side::new(self, s);
        side_attacks(self, &side, &side)
    }

    /// Derived atoms of `side`, latest tick first.
    fn targets(side: &Side<'_>, at: Option<u32>) -> Vec<Atom> {
        let mut atoms = match at {
            Some(t) => side.closure.atoms_at(t),
            None => side.closure.atoms(),
        };
        atoms.sort_by(|a, b| b.time().cmp(&a.time()).then_with(|| a.cmp(b)));
        atoms
    }

    /// Minimal theory attackers of `s` on derived atoms (only those at tick
    /// `at`, if given) that `s` does not attack back, in search order.
    pub fn undefended(&self, s: &RuleSet, at: Option<u32>) -> Vec<Attack> {
        self.undefended_upto(s, at, usize::MAX)
    }

    /// First entry of [`Context::undefended`].
    pub fn first_undefended(&self, s: &RuleSet, at: Option<u32>) -> Option<Attack> {
        self.undefended_upto(s, at, 1).pop()
    }

    fn undefended_upto(&self, s: &RuleSet, at: Option<u32>, limit: usize) -> Vec<Attack> {
        let side = Side::new(self, s);
        let mut out = Vec::new();
        for lit in Self::targets(&side, at) {
            let Some(c) = self.prog.complement(lit) else {
                continue;
            };
            let mine = side.supports(self, lit);
            for r in self.supports(c, Pool::Theory).iter() {
                if !mine.iter().any(|m| !set_lower(r, m)) {
                    continue;
                }
                let other = Side::new(self, r);
                if !side_attacks(self, &side, &other) {
                    out.push(Attack {
                        target: lit,
                        attacker: r.clone(),
                    });
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
        out
    }

    /// Required literals and constraints not confirmed by `s`, restricted to
    /// tick `at` when given.
    pub fn unconfirmed(&self, s: &RuleSet, at: Option<u32>) -> Option<Unconfirmed> {
        self.unconfirmed_in(&self.closure(s), at)
    }

    pub(crate) fn unconfirmed_in(&self, c: &Closure, at: Option<u32>) -> Option<Unconfirmed> {
        let in_scope = |t: u32| at.is_none_or(|x| x == t);
        for t in (0..self.prog.horizon).filter(|&t| in_scope(t)) {
            for f in 0..self.prog.fluents.len() {
                let init = Atom::Initiation { fluent: f, at: t };
                if c.contains(init) && c.contains(Atom::Termination { fluent: f, at: t }) {
                    return Some(Unconfirmed::Violated(init));
                }
            }
        }
        let mut missing = None;
        for &(f, v, t) in &self.required {
            if !in_scope(t) {
                continue;
            }
            if c.holds(f, t, !v) {
                return Some(Unconfirmed::Violated(Atom::holds(f, t, v)));
            }
            if missing.is_none() && !c.holds(f, t, v) {
                missing = Some(Unconfirmed::Missing(Atom::holds(f, t, v)));
            }
        }
        for t in (0..=self.prog.horizon).filter(|&t| in_scope(t)) {
            for ((f, v), conds) in &self.prog.ramifications {
                if c.satisfies(conds, t) {
                    if c.holds(*f, t, !*v) {
                        return Some(Unconfirmed::Violated(Atom::holds(*f, t, *v)));
                    }
                    if missing.is_none() && !c.holds(*f, t, *v) {
                        missing = Some(Unconfirmed::Missing(Atom::holds(*f, t, *v)));
                    }
                }
            }
        }
        missing
    }

    /// Non-self-attacking, counterattacks every attack, and confirms the
    /// required literals and the constraints.
    pub fn is_admissible(&self, s: &RuleSet) -> bool {
        !self.self_attacking(s) && self.first_undefended(s, None).is_none() && self.unconfirmed(s, None).is_none()
    }

    /// Admissibility without the confirmation obligations.
    pub fn is_defended(&self, s: &RuleSet) -> bool {
        !self.self_attacking(s) && self.first_undefended(s, None).is_none()
    }
}
