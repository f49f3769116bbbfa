//! Derivations: search for admissible supersets of a root, optionally
//! hypothesizing action facts along the way.
//!
//! A derivation repeatedly takes the first attack the root leaves
//! unanswered and adds a base support that attacks it back, then closes the
//! required literals the same way. Every admissible superset of the root is
//! reachable this way, so exhausting the search is a finite failure.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::args::{set_lower, AbductiveSupport, ActionId, Atom, Context, Pool, Program, RuleSet, Unconfirmed};

pub type Facts = BTreeSet<(ActionId, u32)>;

/// Which literals an extension must confirm besides the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The domain's t- and r-propositions.
    Domain,
    /// Those plus the precondition instances of every action fact.
    WithObligations,
}

/// Status of a node in a derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeStatus {
    Live,
    /// Becomes an attack once these facts are added.
    Suspended(Facts),
    /// Answered by the counterattack below it.
    Defeated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationNode {
    pub arguments: RuleSet,
    pub status: NodeStatus,
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    fn live(arguments: RuleSet) -> Self {
        DerivationNode {
            arguments,
            status: NodeStatus::Live,
            children: Vec::new(),
        }
    }
}

/// Result of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// Exhausted: nothing exists.
    Exhausted,
    /// Gave up after the node budget.
    Budget,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Search::Exhausted)
    }
}

/// Successful derivation together with its tree.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub root: RuleSet,
    pub facts: Facts,
    pub tree: DerivationNode,
}

/// Abduction accumulator: facts added to the program and the precondition
/// literals they bring along.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbductionState {
    pub abduced: Facts,
    pub obligations: Vec<Atom>,
}

impl AbductionState {
    pub fn new(prog: &Program, abduced: Facts) -> Self {
        let obligations = prog
            .obligations(&abduced)
            .into_iter()
            .map(|(f, v, t)| Atom::holds(f, t, v))
            .collect();
        AbductionState { abduced, obligations }
    }
}

/// Line-oriented transcript of derivation events.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    enabled: bool,
    lines: Vec<String>,
}

/// Trace lines kept per run.
const TRACE_LIMIT: usize = 100_000;

impl Trace {
    pub fn enabled() -> Self {
        Trace {
            enabled: true,
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, line: String) {
        if self.enabled && self.lines.len() < TRACE_LIMIT {
            self.lines.push(line);
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }
}

/// Derivation engine over one program; keeps one context per fact set.
pub struct Deriver<'p> {
    prog: &'p Program,
    contexts: RefCell<HashMap<(Mode, Facts), Rc<Context<'p>>>>,
    trace: RefCell<Trace>,
    /// Node budget of a single derivation.
    pub node_budget: usize,
    cap: usize,
}

impl<'p> Deriver<'p> {
    pub fn new(prog: &'p Program) -> Self {
        Deriver {
            prog,
            contexts: RefCell::new(HashMap::new()),
            trace: RefCell::new(Trace::default()),
            node_budget: 20_000,
            cap: crate::args::DEFAULT_CAP,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = RefCell::new(Trace::enabled());
        self
    }

    /// Fluent cap applied to maximal-set enumeration.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn prog(&self) -> &'p Program {
        self.prog
    }

    pub fn trace(&self) -> Trace {
        self.trace.borrow().clone()
    }

    pub(crate) fn log(&self, f: impl FnOnce() -> String) {
        let mut t = self.trace.borrow_mut();
        if t.is_enabled() {
            t.push(f());
        }
    }

    pub(crate) fn show_facts(&self, facts: &Facts) -> String {
        let v: Vec<String> = facts.iter().map(|&f| self.prog.show_fact(f)).collect();
        v.join(", ")
    }

    /// Context of the program extended with `facts` (beyond the background).
    pub fn context(&self, mode: Mode, facts: &Facts) -> Rc<Context<'p>> {
        let key = (mode, facts.clone());
        if let Some(c) = self.contexts.borrow().get(&key) {
            return c.clone();
        }
        let extra = facts.iter().copied();
        let mut ctx = match mode {
            Mode::Domain => Context::new(self.prog, extra),
            Mode::WithObligations => Context::with_obligations(self.prog, extra),
        };
        ctx.set_cap(self.cap);
        let ctx = Rc::new(ctx);
        self.contexts.borrow_mut().insert(key, ctx.clone());
        ctx
    }

    /// Base supports of some complement of an atom of `attacker` that are
    /// not lower than the attacker's own support of that atom.
    fn counter_candidates(&self, ctx: &Context<'_>, attacker: &RuleSet) -> Vec<RuleSet> {
        let closure = ctx.closure(attacker);
        let mut out: Vec<RuleSet> = Vec::new();
        let mut atoms = closure.atoms();
        atoms.sort_by(|a, b| b.time().cmp(&a.time()).then_with(|| a.cmp(b)));
        for mu in atoms {
            let Some(c) = ctx.prog.complement(mu) else {
                continue;
            };
            let theirs = ctx.supports(mu, Pool::Within(attacker));
            for cand in ctx.supports(c, Pool::Base).iter() {
                if theirs.iter().any(|r| !set_lower(cand, r)) && !out.contains(cand) {
                    out.push(cand.clone());
                }
            }
        }
        out.sort_by_key(|s| s.len());
        out
    }

    /// An admissible superset of `root` in the context of `facts`.
    pub fn successful(&self, mode: Mode, facts: &Facts, root: &RuleSet) -> Search<Derivation> {
        let ctx = self.context(mode, facts);
        let mut visited = HashSet::new();
        let mut nodes = 0usize;
        self.log(|| format!("NODE {}", self.prog.show_set(root)));
        let r = self.dfs(&ctx, root.clone(), &mut visited, &mut nodes);
        match r {
            Search::Found((s, tree)) => Search::Found(Derivation {
                root: s,
                facts: facts.clone(),
                tree,
            }),
            Search::Exhausted => Search::Exhausted,
            Search::Budget => Search::Budget,
        }
    }

    fn dfs(
        &self,
        ctx: &Context<'_>,
        root: RuleSet,
        visited: &mut HashSet<RuleSet>,
        nodes: &mut usize,
    ) -> Search<(RuleSet, DerivationNode)> {
        if !visited.insert(root.clone()) {
            return Search::Exhausted;
        }
        *nodes += 1;
        if *nodes > self.node_budget {
            return Search::Budget;
        }
        if ctx.self_attacking(&root) {
            return Search::Exhausted;
        }
        let missing = match ctx.unconfirmed(&root, None) {
            Some(Unconfirmed::Violated(_)) => return Search::Exhausted,
            Some(Unconfirmed::Missing(a)) => Some(a),
            None => None,
        };
        let mut budget_hit = false;
        if let Some(att) = ctx.first_undefended(&root, None) {
            self.log(|| format!("ATTACK {} on {}", self.prog.show_set(&att.attacker), self.prog.show_atom(&att.target)));
            for c in self.counter_candidates(ctx, &att.attacker) {
                let next = root.union(&c);
                if next == root || visited.contains(&next) || ctx.self_attacking(&next) {
                    continue;
                }
                self.log(|| format!("COUNTER {}", self.prog.show_set(&c)));
                match self.dfs(ctx, next, visited, nodes) {
                    Search::Found((s, child)) => {
                        let mut tree = DerivationNode::live(root.clone());
                        tree.children.push(DerivationNode {
                            arguments: att.attacker.clone(),
                            status: NodeStatus::Defeated,
                            children: vec![DerivationNode::live(c)],
                        });
                        tree.children.extend(child.children);
                        return Search::Found((s, tree));
                    }
                    Search::Budget => budget_hit = true,
                    Search::Exhausted => {}
                }
                if budget_hit {
                    return Search::Budget;
                }
            }
            return Search::Exhausted;
        }
        if let Some(a) = missing {
            for c in ctx.supports(a, Pool::Base).iter() {
                let next = root.union(c);
                if visited.contains(&next) {
                    continue;
                }
                self.log(|| format!("NODE {} for {}", self.prog.show_set(c), self.prog.show_atom(&a)));
                match self.dfs(ctx, next, visited, nodes) {
                    Search::Found(found) => return Search::Found(found),
                    Search::Budget => return Search::Budget,
                    Search::Exhausted => {}
                }
            }
            return Search::Exhausted;
        }
        Search::Found((root.clone(), DerivationNode::live(root)))
    }

    /// `Exhausted` confirms that no admissible superset of `root` exists;
    /// `Found` carries a counterexample.
    pub fn failed(&self, mode: Mode, facts: &Facts, root: &RuleSet) -> Search<Derivation> {
        self.successful(mode, facts, root)
    }

    /// Admissible `S ⊇ root` and facts `Δ ⊇ facts`, adding at most
    /// `max_new` facts, with precondition obligations of `Δ` confirmed.
    pub fn extended_successful(&self, facts: &Facts, root: &RuleSet, max_new: usize) -> Search<Derivation> {
        let mut visited = HashSet::new();
        let mut nodes = 0usize;
        self.log(|| {
            if facts.is_empty() {
                format!("NODE {}", self.prog.show_set(root))
            } else {
                format!("NODE {} with {}", self.prog.show_set(root), self.show_facts(facts))
            }
        });
        match self.ext_dfs(root.clone(), facts.clone(), facts.len() + max_new, &mut visited, &mut nodes) {
            Search::Found((s, d, tree)) => Search::Found(Derivation { root: s, facts: d, tree }),
            Search::Exhausted => Search::Exhausted,
            Search::Budget => Search::Budget,
        }
    }

    fn ext_candidates(&self, ctx: &Context<'_>, target: Atom, facts: &Facts, room: usize) -> Vec<AbductiveSupport> {
        let mut v: Vec<AbductiveSupport> = ctx
            .abductive_supports(target, room)
            .iter()
            .filter(|s| s.needs.iter().all(|n| !facts.contains(n)))
            .cloned()
            .collect();
        v.sort_by(|a, b| {
            a.needs
                .len()
                .cmp(&b.needs.len())
                .then_with(|| a.rules.len().cmp(&b.rules.len()))
                .then_with(|| b.needs.iter().map(|n| n.1).max().cmp(&a.needs.iter().map(|n| n.1).max()))
                .then_with(|| a.cmp(b))
        });
        v
    }

    fn ext_dfs(
        &self,
        root: RuleSet,
        facts: Facts,
        max_facts: usize,
        visited: &mut HashSet<(RuleSet, Facts)>,
        nodes: &mut usize,
    ) -> Search<(RuleSet, Facts, DerivationNode)> {
        if !visited.insert((root.clone(), facts.clone())) {
            return Search::Exhausted;
        }
        *nodes += 1;
        if *nodes > self.node_budget {
            return Search::Budget;
        }
        let ctx = self.context(Mode::WithObligations, &facts);
        if ctx.self_attacking(&root) {
            return Search::Exhausted;
        }
        let missing = match ctx.unconfirmed(&root, None) {
            Some(Unconfirmed::Violated(_)) => return Search::Exhausted,
            Some(Unconfirmed::Missing(a)) => Some(a),
            None => None,
        };
        let room = max_facts.saturating_sub(facts.len());
        let mut options: Vec<AbductiveSupport> = Vec::new();
        let attack = ctx.first_undefended(&root, None);
        if let Some(att) = &attack {
            self.log(|| format!("ATTACK {} on {}", self.prog.show_set(&att.attacker), self.prog.show_atom(&att.target)));
            let closure = ctx.closure(&att.attacker);
            let mut atoms = closure.atoms();
            atoms.sort_by(|a, b| b.time().cmp(&a.time()).then_with(|| a.cmp(b)));
            for mu in atoms {
                let Some(c) = ctx.prog.complement(mu) else {
                    continue;
                };
                let theirs = ctx.supports(mu, Pool::Within(&att.attacker));
                for cand in self.ext_candidates(&ctx, c, &facts, room) {
                    if theirs.iter().any(|r| !set_lower(&cand.rules, r)) && !options.contains(&cand) {
                        options.push(cand);
                    }
                }
            }
            options.sort_by_key(|o| (o.needs.len(), o.rules.len()));
        } else if let Some(a) = missing {
            options = self.ext_candidates(&ctx, a, &facts, room);
        } else {
            return Search::Found((root.clone(), facts, DerivationNode::live(root)));
        }
        for o in options {
            let next = root.union(&o.rules);
            let mut next_facts = facts.clone();
            next_facts.extend(o.needs.iter().copied());
            if visited.contains(&(next.clone(), next_facts.clone())) {
                continue;
            }
            if !o.needs.is_empty() {
                self.log(|| format!("ABDUCE {}", self.show_facts(&o.needs)));
            }
            let next_ctx = self.context(Mode::WithObligations, &next_facts);
            if next_ctx.self_attacking(&next) {
                continue;
            }
            self.log(|| {
                let kind = if attack.is_some() { "COUNTER" } else { "NODE" };
                format!("{kind} {}", self.prog.show_set(&o.rules))
            });
            match self.ext_dfs(next, next_facts, max_facts, visited, nodes) {
                Search::Found((s, d, child)) => {
                    let mut tree = DerivationNode::live(root.clone());
                    if let Some(att) = &attack {
                        tree.children.push(DerivationNode {
                            arguments: att.attacker.clone(),
                            status: NodeStatus::Defeated,
                            children: vec![DerivationNode::live(o.rules.clone())],
                        });
                    }
                    tree.children.extend(child.children);
                    return Search::Found((s, d, tree));
                }
                Search::Budget => return Search::Budget,
                Search::Exhausted => {}
            }
        }
        Search::Exhausted
    }

    /// Attacks on `s` that would exist, and that `s` could not obviously
    /// answer, if the listed facts were added; cheapest first.
    /// Attacks on atoms derived by `focus` come first.
    pub fn suspended_attacks(&self, facts: &Facts, s: &RuleSet, focus: &RuleSet, max_needs: usize) -> Vec<DerivationNode> {
        let ctx = self.context(Mode::Domain, facts);
        let closure = ctx.closure(s);
        let focused = ctx.closure(focus);
        let mut out: Vec<(bool, DerivationNode)> = Vec::new();
        for lit in closure.atoms() {
            let Some(c) = ctx.prog.complement(lit) else {
                continue;
            };
            let mine = ctx.supports(lit, Pool::Within(s));
            for cand in ctx.abductive_supports(c, max_needs).iter() {
                if cand.needs.is_empty() || cand.needs.iter().any(|n| facts.contains(n)) {
                    continue;
                }
                if !mine.iter().any(|m| !set_lower(&cand.rules, m)) {
                    continue;
                }
                let node = DerivationNode {
                    arguments: cand.rules.clone(),
                    status: NodeStatus::Suspended(cand.needs.clone()),
                    children: Vec::new(),
                };
                let off = !focused.contains(lit);
                if !out.iter().any(|(_, n)| *n == node) {
                    out.push((off, node));
                }
            }
        }
        out.sort_by(|(fa, a), (fb, b)| {
            let key = |n: &DerivationNode| match &n.status {
                NodeStatus::Suspended(needs) => (
                    needs.len(),
                    needs.iter().map(|x| x.1).min().unwrap_or(0),
                    needs.iter().map(|&(a, _)| self.prog.action_name(a).to_string()).collect::<Vec<_>>(),
                ),
                _ => (0, 0, Vec::new()),
            };
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0)
                .then_with(|| fa.cmp(fb))
                .then_with(|| ka.cmp(&kb))
                .then_with(|| a.arguments.cmp(&b.arguments))
        });
        out.into_iter().map(|(_, n)| n).collect()
    }

    /// Facts `Δ' ⊇ facts` (at most `max_new` more) under which `check`
    /// reports no counterexample. `check` returns the root it tried and an
    /// admissible superset; would-be attackers of the latter guide which
    /// facts to add.
    pub fn extended_failed(
        &self,
        facts: &Facts,
        max_new: usize,
        check: &mut dyn FnMut(&Facts) -> Search<(RuleSet, RuleSet)>,
    ) -> Option<Facts> {
        for bound in 0..=max_new {
            let mut visited = HashSet::new();
            if let Some(d) = self.block_dfs(facts.clone(), facts.len() + bound, check, &mut visited) {
                return Some(d);
            }
        }
        None
    }

    fn block_dfs(
        &self,
        facts: Facts,
        max_facts: usize,
        check: &mut dyn FnMut(&Facts) -> Search<(RuleSet, RuleSet)>,
        visited: &mut HashSet<Facts>,
    ) -> Option<Facts> {
        if !visited.insert(facts.clone()) {
            return None;
        }
        let (focus, counter) = match check(&facts) {
            Search::Exhausted => return Some(facts),
            Search::Budget => return None,
            Search::Found(t) => t,
        };
        let room = max_facts.saturating_sub(facts.len());
        if room == 0 {
            return None;
        }
        for node in self.suspended_attacks(&facts, &counter, &focus, room) {
            let NodeStatus::Suspended(needs) = &node.status else {
                continue;
            };
            let mut next = facts.clone();
            next.extend(needs.iter().copied());
            if next.len() > max_facts || visited.contains(&next) {
                continue;
            }
            self.log(|| format!("SUSPEND {} until {}", self.prog.show_set(&node.arguments), self.show_facts(needs)));
            self.log(|| format!("ABDUCE {}", self.show_facts(needs)));
            if let Some(d) = self.block_dfs(next, max_facts, check, visited) {
                return Some(d);
            }
        }
        None
    }
}
