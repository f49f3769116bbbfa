use super::{Atom, Context, FluentId, RuleSet, Schema};

/// Everything derivable from the background theory, the context's facts and
/// a rule set. Complementary atoms are kept apart, so both may be present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    n: usize,
    horizon: u32,
    pos: Vec<bool>,
    neg: Vec<bool>,
    init: Vec<bool>,
    term: Vec<bool>,
}

impl Closure {
    fn slot(&self, f: FluentId, t: u32) -> usize {
        t as usize * self.n + f
    }

    /// One pass over time suffices: every rule concludes strictly after its
    /// body except causal laws, which read holds-literals of the same tick.
    pub(crate) fn compute(ctx: &Context<'_>, s: &RuleSet) -> Closure {
        let prog = ctx.prog;
        let n = prog.fluents.len();
        let len = n * (prog.horizon as usize + 1);
        let mut c = Closure {
            n,
            horizon: prog.horizon,
            pos: vec![false; len],
            neg: vec![false; len],
            init: vec![false; len],
            term: vec![false; len],
        };
        let rules = s.rules();
        let mut i = 0;
        for t in 0..=prog.horizon {
            while i < rules.len() && rules[i].at == t {
                let r = rules[i];
                i += 1;
                let fires = match (r.schema, r.from) {
                    (Schema::PA | Schema::NA, _) => true,
                    (Schema::PP, Some(t1)) => c.pos[c.slot(r.fluent, t1)],
                    (Schema::NP, Some(t1)) => c.neg[c.slot(r.fluent, t1)],
                    (Schema::PG, Some(t1)) => c.init[c.slot(r.fluent, t1)],
                    (Schema::NG, Some(t1)) => c.term[c.slot(r.fluent, t1)],
                    _ => false,
                };
                if fires {
                    let k = c.slot(r.fluent, t);
                    if r.schema.positive() {
                        c.pos[k] = true;
                    } else {
                        c.neg[k] = true;
                    }
                }
            }
            for law in &prog.laws {
                if !ctx.facts.contains(&(law.action, t)) {
                    continue;
                }
                let holds = law.conditions.iter().all(|&(f, v)| {
                    let k = c.slot(f, t);
                    if v {
                        c.pos[k]
                    } else {
                        c.neg[k]
                    }
                });
                if holds {
                    let k = c.slot(law.fluent, t);
                    if law.initiates {
                        c.init[k] = true;
                    } else {
                        c.term[k] = true;
                    }
                }
            }
        }
        c
    }

    pub fn contains(&self, a: Atom) -> bool {
        if a.time() > self.horizon || a.fluent() >= self.n {
            return false;
        }
        let k = self.slot(a.fluent(), a.time());
        match a {
            Atom::Holds { positive: true, .. } => self.pos[k],
            Atom::Holds { positive: false, .. } => self.neg[k],
            Atom::Initiation { .. } => self.init[k],
            Atom::Termination { .. } => self.term[k],
        }
    }

    pub fn holds(&self, f: FluentId, t: u32, positive: bool) -> bool {
        self.contains(Atom::holds(f, t, positive))
    }

    /// Derived atoms with time `t`.
    pub fn atoms_at(&self, t: u32) -> Vec<Atom> {
        let mut out = Vec::new();
        for f in 0..self.n {
            let k = self.slot(f, t);
            if self.pos[k] {
                out.push(Atom::holds(f, t, true));
            }
            if self.neg[k] {
                out.push(Atom::holds(f, t, false));
            }
            if self.init[k] {
                out.push(Atom::Initiation { fluent: f, at: t });
            }
            if self.term[k] {
                out.push(Atom::Termination { fluent: f, at: t });
            }
        }
        out
    }

    pub fn atoms(&self) -> Vec<Atom> {
        (0..=self.horizon).flat_map(|t| self.atoms_at(t)).collect()
    }

    /// Whether every `(fluent, value)` pair is derived at `t`.
    pub fn satisfies(&self, conds: &[(FluentId, bool)], t: u32) -> bool {
        conds.iter().all(|&(f, v)| self.holds(f, t, v))
    }

    /// Every fluent has exactly one derived value at every tick.
    pub fn is_total(&self) -> bool {
        self.pos.iter().zip(&self.neg).all(|(p, n)| p ^ n)
    }
}
