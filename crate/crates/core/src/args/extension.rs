//! Maximal admissible sets.
//!
//! A maximal admissible set picks one assumption per fluent and tick and
//! holds every generation rule that either cannot fire or agrees with the
//! assumption it concludes on. They are enumerated tick by tick; since rules
//! only look backwards in time, an attack on an atom at tick `t` involves
//! rules up to `t` only, so each prefix is checked once.

use std::ops::ControlFlow;

use super::attack::Side;
use super::{ArgumentRule, Atom, Context, RuleSet};
use crate::error::{Error, Result};

impl Context<'_> {
    fn check_cap(&self) -> Result<()> {
        let n = self.prog.fluents.len();
        if n > self.cap {
            return Err(Error::CapExceeded {
                fluents: n,
                limit: self.cap,
            });
        }
        Ok(())
    }

    /// Rules of tick `t` for assignment `mask`, or `None` when `within`
    /// holds something that cannot be part of such a layer.
    fn layer(&self, prefix: &RuleSet, t: u32, mask: u64, within: Option<&RuleSet>) -> Option<RuleSet> {
        let n = self.prog.fluents.len();
        let c = self.closure(prefix);
        let mut out = prefix.clone();
        for f in 0..n {
            let v = mask >> f & 1 == 1;
            if let Some(w) = within {
                if w.contains(&ArgumentRule::assumption(f, t, !v)) {
                    return None;
                }
            }
            out.insert(ArgumentRule::assumption(f, t, v));
            for t1 in 0..t {
                for pos in [true, false] {
                    let body = if pos {
                        Atom::Initiation { fluent: f, at: t1 }
                    } else {
                        Atom::Termination { fluent: f, at: t1 }
                    };
                    let g = ArgumentRule::generation(f, t, t1, pos);
                    if !c.contains(body) || pos == v {
                        out.insert(g);
                    } else if within.is_some_and(|w| w.contains(&g)) {
                        return None;
                    }
                }
            }
        }
        Some(out)
    }

    /// The prefix ending at tick `t` is admissible as far as atoms at `t` go.
    fn layer_ok(&self, s: &RuleSet, t: u32) -> bool {
        let side = Side::new(self, s);
        if self.unconfirmed_in(&side.closure, Some(t)).is_some() {
            return false;
        }
        let atoms = side.closure.atoms_at(t);
        if atoms.iter().any(|&a| super::attack::attacks_on(self, &side, &side, a)) {
            return false;
        }
        self.first_undefended(s, Some(t)).is_none()
    }

    fn full_sets(
        &self,
        prefix: RuleSet,
        t: u32,
        within: Option<&RuleSet>,
        visit: &mut dyn FnMut(&RuleSet) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = self.prog.fluents.len();
        for mask in 0u64..1u64 << n {
            let Some(s) = self.layer(&prefix, t, mask, within) else {
                continue;
            };
            if !self.layer_ok(&s, t) {
                continue;
            }
            if t == self.prog.horizon {
                visit(&s)?;
            } else {
                self.full_sets(s, t + 1, within, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Every maximal admissible subset of the base.
    pub fn maximal_admissible(&self) -> Result<Vec<RuleSet>> {
        self.check_cap()?;
        let mut out = Vec::new();
        let _ = self.full_sets(RuleSet::new(), 0, None, &mut |s| {
            out.push(s.clone());
            ControlFlow::Continue(())
        });
        Ok(out)
    }

    /// Derived in every maximal admissible set; vacuous when there are none.
    pub fn sceptical(&self, a: Atom) -> Result<bool> {
        self.check_cap()?;
        let mut all = true;
        let _ = self.full_sets(RuleSet::new(), 0, None, &mut |s| {
            if self.derives(s, a) {
                ControlFlow::Continue(())
            } else {
                all = false;
                ControlFlow::Break(())
            }
        });
        Ok(all)
    }

    /// Derived in some maximal admissible set.
    pub fn credulous(&self, a: Atom) -> Result<bool> {
        self.check_cap()?;
        let mut some = false;
        let _ = self.full_sets(RuleSet::new(), 0, None, &mut |s| {
            if self.derives(s, a) {
                some = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        Ok(some)
    }

    /// Every atom in `q` derived in every maximal admissible set.
    pub fn sceptical_all(&self, q: &[Atom]) -> Result<bool> {
        self.check_cap()?;
        let mut all = true;
        let _ = self.full_sets(RuleSet::new(), 0, None, &mut |s| {
            let c = self.closure(s);
            if q.iter().all(|&a| c.contains(a)) {
                ControlFlow::Continue(())
            } else {
                all = false;
                ControlFlow::Break(())
            }
        });
        Ok(all)
    }

    /// A maximal admissible set containing the assumptions and generation
    /// rules of `s` and deriving everything `s` derives, if one exists.
    pub fn extend_to_full(&self, s: &RuleSet) -> Result<Option<RuleSet>> {
        self.check_cap()?;
        let core: RuleSet = s.iter().filter(|r| !r.schema.is_persistence()).cloned().collect();
        let wanted = self.closure(s).atoms();
        let mut found = None;
        let _ = self.full_sets(RuleSet::new(), 0, Some(&core), &mut |full| {
            if core.is_subset(full) && {
                let c = self.closure(full);
                wanted.iter().all(|&a| c.contains(a))
            } {
                found = Some(full.clone());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        Ok(found)
    }
}
