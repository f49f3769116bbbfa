//! Text format for planning problems and entailment queries.
//!
//! ```text
//! fluent Petrol, Running.
//! action TurnOn, Empty.
//! horizon 8.
//! TurnOn initiates Running when {Petrol}.
//! Empty terminates Petrol.
//! TurnOn happens-at 5.
//! Petrol holds-at 1.
//! goal Running holds-at 8.
//! ```
//!
//! Negation is written `-F`, statements end with `.`, and `#` starts a line
//! comment. Declarations may appear anywhere in the file.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::vocab::*;

/// 1-based position of a token in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Nat(u32),
    Minus,
    Comma,
    Dot,
    LBrace,
    RBrace,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "`{n}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "fluent",
    "action",
    "horizon",
    "initiates",
    "terminates",
    "when",
    "happens-at",
    "holds-at",
    "whenever",
    "needs",
    "goal",
];

fn syntax(span: SourceSpan, message: impl Into<String>) -> Error {
    Error::Syntax {
        span,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<(Vec<(Tok, SourceSpan)>, SourceSpan)> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut last = SourceSpan {
        line: 1,
        column: 1,
        length: 1,
    };
    while i < chars.len() {
        let c = chars[i];
        let span = |len| SourceSpan {
            line,
            column: col,
            length: len,
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '-' => Some(Tok::Minus),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            _ => None,
        };
        if let Some(t) = single {
            last = span(1);
            toks.push((t, last));
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let sp = span(i - start);
            let n = s
                .parse::<u32>()
                .map_err(|_| syntax(sp, format!("number `{s}` is too large")))?;
            last = sp;
            toks.push((Tok::Nat(n), sp));
            col += i - start;
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let mut s: String = chars[start..i].iter().collect();
            if (s == "happens" || s == "holds")
                && chars.get(i) == Some(&'-')
                && chars.get(i + 1) == Some(&'a')
                && chars.get(i + 2) == Some(&'t')
                && !chars
                    .get(i + 3)
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_')
            {
                s.push_str("-at");
                i += 3;
            }
            let sp = span(i - start);
            last = sp;
            toks.push((Tok::Name(s), sp));
            col += i - start;
            continue;
        }
        return Err(syntax(span(1), format!("unexpected character `{c}`")));
    }
    Ok((toks, last))
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        let (toks, end) = lex(text)?;
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => syntax(self.span(), format!("expected {wanted}, found {t}")),
            None => syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Name(n)) if n == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == kw)
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) if !KEYWORDS.contains(&n.as_str()) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn nat(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn literal(&mut self) -> Result<FluentLiteral> {
        let positive = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            false
        } else {
            true
        };
        Ok(FluentLiteral::new(self.name()?, positive))
    }

    fn namelist(&mut self) -> Result<Vec<String>> {
        let mut v = vec![self.name()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            v.push(self.name()?);
        }
        Ok(v)
    }

    fn condset(&mut self) -> Result<ConditionSet> {
        self.expect(Tok::LBrace)?;
        let mut v = vec![self.literal()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    v.push(self.literal()?);
                }
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.unexpected("`,` or `}`")),
            }
        }
        Ok(ConditionSet::new(v))
    }

    fn tprop(&mut self) -> Result<TProp> {
        let literal = self.literal()?;
        self.keyword("holds-at")?;
        let t = self.nat()?;
        Ok(TProp::new(literal, t))
    }

    fn tproplist(&mut self) -> Result<Vec<TProp>> {
        let mut v = vec![self.tprop()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            v.push(self.tprop()?);
        }
        Ok(v)
    }
}

/// A parsed problem together with the source span of every proposition.
#[derive(Debug, Clone)]
pub struct ParsedProblem {
    pub problem: PlanningProblem,
    pub spans: HashMap<PropRef, SourceSpan>,
}

/// Parses without validating; see [`parse_problem`].
pub fn parse_problem_unchecked(text: &str) -> Result<ParsedProblem> {
    let mut p = Parser::new(text)?;
    let mut prob = PlanningProblem::default();
    let mut spans = HashMap::new();
    let mut horizon: Option<u32> = None;
    let record = |spans: &mut HashMap<_, _>, kind, index, span| {
        spans.insert(PropRef { kind, index }, span);
    };
    while !p.at_end() {
        let start = p.span();
        if p.is_keyword("fluent") {
            p.bump();
            prob.fluents.extend(p.namelist()?);
        } else if p.is_keyword("action") {
            p.bump();
            prob.actions.extend(p.namelist()?);
        } else if p.is_keyword("horizon") {
            p.bump();
            let h = p.nat()?;
            if horizon.is_some() {
                return Err(syntax(start, "horizon declared twice"));
            }
            horizon = Some(h);
        } else if p.is_keyword("goal") {
            p.bump();
            for t in p.tproplist()? {
                record(&mut spans, PropKind::Goal, prob.goal.len(), start);
                prob.goal.push(t);
            }
        } else if p.peek() == Some(&Tok::Minus) {
            let lit = p.literal()?;
            statement_after_literal(&mut p, lit, &mut prob, &mut spans, start)?;
        } else {
            let head = p.name()?;
            match p.peek() {
                Some(Tok::Name(k)) if k == "initiates" || k == "terminates" => {
                    let effect = if k == "initiates" {
                        Effect::Initiates
                    } else {
                        Effect::Terminates
                    };
                    p.bump();
                    let fluent = p.name()?;
                    let conditions = if p.is_keyword("when") {
                        p.bump();
                        p.condset()?
                    } else {
                        ConditionSet::empty()
                    };
                    record(&mut spans, PropKind::Causal, prob.domain.causal.len(), start);
                    prob.domain.causal.push(CProp {
                        action: head,
                        effect,
                        fluent,
                        conditions,
                    });
                }
                Some(Tok::Name(k)) if k == "happens-at" => {
                    p.bump();
                    let t = p.nat()?;
                    record(&mut spans, PropKind::Occurrence, prob.domain.occurrences.len(), start);
                    prob.domain.occurrences.push(HProp::new(head, t));
                }
                Some(Tok::Name(k)) if k == "needs" => {
                    p.bump();
                    let conditions = p.condset()?;
                    record(&mut spans, PropKind::Precondition, prob.preconditions.len(), start);
                    prob.preconditions.push(PProp {
                        action: head,
                        conditions,
                    });
                }
                _ => {
                    statement_after_literal(
                        &mut p,
                        FluentLiteral::pos(head),
                        &mut prob,
                        &mut spans,
                        start,
                    )?;
                }
            }
        }
        p.expect(Tok::Dot)?;
    }
    prob.horizon = horizon.unwrap_or_else(|| max_time(&prob));
    Ok(ParsedProblem {
        problem: prob,
        spans,
    })
}

fn statement_after_literal(
    p: &mut Parser,
    literal: FluentLiteral,
    prob: &mut PlanningProblem,
    spans: &mut HashMap<PropRef, SourceSpan>,
    start: SourceSpan,
) -> Result<()> {
    if p.is_keyword("holds-at") {
        p.bump();
        let t = p.nat()?;
        spans.insert(
            PropRef {
                kind: PropKind::Observation,
                index: prob.domain.observations.len(),
            },
            start,
        );
        prob.domain.observations.push(TProp::new(literal, t));
        Ok(())
    } else if p.is_keyword("whenever") {
        p.bump();
        let conditions = p.condset()?;
        spans.insert(
            PropRef {
                kind: PropKind::Ramification,
                index: prob.domain.ramifications.len(),
            },
            start,
        );
        prob.domain.ramifications.push(RProp {
            literal,
            conditions,
        });
        Ok(())
    } else if literal.positive {
        Err(p.unexpected("`initiates`, `terminates`, `happens-at`, `holds-at`, `whenever` or `needs`"))
    } else {
        Err(p.unexpected("`holds-at` or `whenever`"))
    }
}

fn max_time(p: &PlanningProblem) -> u32 {
    let d = &p.domain;
    d.observations
        .iter()
        .map(|t| t.time.0)
        .chain(d.occurrences.iter().map(|h| h.time.0))
        .chain(p.goal.iter().map(|t| t.time.0))
        .max()
        .unwrap_or(0)
}

/// Parses and validates a problem file. A missing `horizon` defaults to the
/// largest timepoint mentioned.
pub fn parse_problem(text: &str) -> Result<PlanningProblem> {
    let parsed = parse_problem_unchecked(text)?;
    let diags = parsed.problem.validate();
    if diags.is_empty() {
        Ok(parsed.problem)
    } else {
        Err(Error::Invalid(
            diags
                .into_iter()
                .map(|d| {
                    let span = parsed.spans.get(&d.at).copied();
                    (d, span)
                })
                .collect(),
        ))
    }
}

/// Parses `L holds-at N, L holds-at N, ...`.
pub fn parse_query(text: &str) -> Result<Vec<TProp>> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Err(Error::EmptyQuery);
    }
    let q = p.tproplist()?;
    if p.peek() == Some(&Tok::Dot) {
        p.bump();
    }
    if !p.at_end() {
        return Err(p.unexpected("`,` or end of query"));
    }
    Ok(q)
}

/// Parses a plan: `A happens-at N` items separated by `,` or `.`; may be empty.
pub fn parse_plan(text: &str) -> Result<Vec<HProp>> {
    let mut p = Parser::new(text)?;
    let mut plan = Vec::new();
    while !p.at_end() {
        let a = p.name()?;
        p.keyword("happens-at")?;
        plan.push(HProp::new(a, p.nat()?));
        match p.peek() {
            Some(Tok::Comma) | Some(Tok::Dot) => {
                p.bump();
            }
            None => {}
            _ => return Err(p.unexpected("`,`, `.` or end of plan")),
        }
    }
    Ok(plan)
}

/// Renders a problem in the canonical statement order that
/// [`parse_problem`] reads back to an equal value.
pub fn render_problem(p: &PlanningProblem) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = &String>| it.cloned().collect::<Vec<_>>().join(", ");
    if !p.fluents.is_empty() {
        out.push_str(&format!("fluent {}.\n", join(&mut p.fluents.iter())));
    }
    if !p.actions.is_empty() {
        out.push_str(&format!("action {}.\n", join(&mut p.actions.iter())));
    }
    out.push_str(&format!("horizon {}.\n", p.horizon));
    for c in &p.domain.causal {
        out.push_str(&format!("{c}.\n"));
    }
    for h in &p.domain.occurrences {
        out.push_str(&format!("{h}.\n"));
    }
    for t in &p.domain.observations {
        out.push_str(&format!("{t}.\n"));
    }
    for r in &p.domain.ramifications {
        out.push_str(&format!("{r}.\n"));
    }
    for pp in &p.preconditions {
        out.push_str(&format!("{pp}.\n"));
    }
    if !p.goal.is_empty() {
        let g: Vec<String> = p.goal.iter().map(|t| t.to_string()).collect();
        out.push_str(&format!("goal {}.\n", g.join(", ")));
    }
    out
}
