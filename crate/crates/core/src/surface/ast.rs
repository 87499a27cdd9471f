use std::collections::BTreeSet;

use crate::version::{ModuleName, PartialLabel, Version};

/// Byte range plus the 1-based line and column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end), line: self.line, col: self.col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SPattern {
    Var(String),
    Int(i64),
    Pair(Box<SPattern>, Box<SPattern>),
    List(Vec<SPattern>),
    Cons(Box<SPattern>, Box<SPattern>),
}

impl SPattern {
    pub fn binders(&self) -> Vec<&str> {
        match self {
            SPattern::Var(x) => vec![x.as_str()],
            SPattern::Int(_) => vec![],
            SPattern::Pair(a, b) | SPattern::Cons(a, b) => {
                let mut v = a.binders();
                v.extend(b.binders());
                v
            }
            SPattern::List(ps) => ps.iter().flat_map(|p| p.binders()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum TermKind {
    Int(i64),
    Var(String),
    Lam(String, Box<SurfaceTerm>),
    App(Box<SurfaceTerm>, Box<SurfaceTerm>),
    Let(String, Box<SurfaceTerm>, Box<SurfaceTerm>),
    Pair(Box<SurfaceTerm>, Box<SurfaceTerm>),
    List(Vec<SurfaceTerm>),
    /// `if` is parsed into a case on 0 / anything else.
    Case(Box<SurfaceTerm>, Vec<(SPattern, SurfaceTerm)>),
    VerOf(PartialLabel, Box<SurfaceTerm>),
    Unversion(Box<SurfaceTerm>),
}

/// Surface term. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct SurfaceTerm {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for SurfaceTerm {
    fn eq(&self, other: &Self) -> bool {
        use TermKind::*;
        match (&self.kind, &other.kind) {
            (Int(a), Int(b)) => a == b,
            (Var(a), Var(b)) => a == b,
            (Lam(x, a), Lam(y, b)) => x == y && a == b,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Let(x, a1, a2), Let(y, b1, b2)) => x == y && a1 == b1 && a2 == b2,
            (Pair(a1, a2), Pair(b1, b2)) => a1 == b1 && a2 == b2,
            (List(a), List(b)) => a == b,
            (Case(s, bs), Case(t, cs)) => s == t && bs == cs,
            (VerOf(d, a), VerOf(e, b)) => d == e && a == b,
            (Unversion(a), Unversion(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for SurfaceTerm {}

impl SurfaceTerm {
    pub fn new(kind: TermKind) -> Self {
        SurfaceTerm { kind, span: Span::default() }
    }

    pub fn at(kind: TermKind, span: Span) -> Self {
        SurfaceTerm { kind, span }
    }

    pub fn int(n: i64) -> Self {
        Self::new(TermKind::Int(n))
    }

    pub fn var(x: &str) -> Self {
        Self::new(TermKind::Var(x.to_string()))
    }

    pub fn lam(x: &str, body: SurfaceTerm) -> Self {
        Self::new(TermKind::Lam(x.to_string(), Box::new(body)))
    }

    pub fn app(f: SurfaceTerm, a: SurfaceTerm) -> Self {
        Self::new(TermKind::App(Box::new(f), Box::new(a)))
    }

    pub fn apps(f: SurfaceTerm, args: impl IntoIterator<Item = SurfaceTerm>) -> Self {
        args.into_iter().fold(f, SurfaceTerm::app)
    }

    pub fn binop(op: &str, a: SurfaceTerm, b: SurfaceTerm) -> Self {
        Self::apps(Self::var(op), [a, b])
    }

    pub fn let_(x: &str, t1: SurfaceTerm, t2: SurfaceTerm) -> Self {
        Self::new(TermKind::Let(x.to_string(), Box::new(t1), Box::new(t2)))
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match &self.kind {
            TermKind::Int(_) => {}
            TermKind::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            TermKind::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            TermKind::App(a, b) | TermKind::Pair(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            TermKind::Let(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            TermKind::List(ts) => ts.iter().for_each(|t| t.collect_free(bound, out)),
            TermKind::Case(s, bs) => {
                s.collect_free(bound, out);
                for (p, t) in bs {
                    let n = bound.len();
                    bound.extend(p.binders().into_iter().map(String::from));
                    t.collect_free(bound, out);
                    bound.truncate(n);
                }
            }
            TermKind::VerOf(_, t) | TermKind::Unversion(t) => t.collect_free(bound, out),
        }
    }

    /// Visits every node in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a SurfaceTerm)) {
        f(self);
        match &self.kind {
            TermKind::Int(_) | TermKind::Var(_) => {}
            TermKind::Lam(_, b) | TermKind::VerOf(_, b) | TermKind::Unversion(b) => b.walk(f),
            TermKind::App(a, b) | TermKind::Pair(a, b) | TermKind::Let(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TermKind::List(ts) => ts.iter().for_each(|t| t.walk(f)),
            TermKind::Case(s, bs) => {
                s.walk(f);
                bs.iter().for_each(|(_, t)| t.walk(f));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub body: SurfaceTerm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModule {
    pub name: ModuleName,
    /// Filled in by the repository loader; `None` for a bare parse.
    pub version: Option<Version>,
    pub imports: Vec<ModuleName>,
    pub defs: Vec<Definition>,
}

impl SurfaceModule {
    pub fn def(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.name == name)
    }
}
