use std::collections::BTreeSet;
use std::fmt;

use crate::version::PartialLabel;

/// Data constructors: pairs and cons/nil lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Con {
    Pair,
    Nil,
    Cons,
}

impl Con {
    pub fn arity(self) -> usize {
        match self {
            Con::Pair | Con::Cons => 2,
            Con::Nil => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Var(String),
    /// Promoted pattern [p]. Lambdas produced by the translation only use
    /// [x]; case branches use [p] for arbitrary p (the push reading).
    Box(Box<Pattern>),
    Int(i64),
    Con(Con, Vec<Pattern>),
}

impl Pattern {
    pub fn boxed_var(x: &str) -> Pattern {
        Pattern::Box(Box::new(Pattern::Var(x.to_string())))
    }

    pub fn binders(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Pattern::Var(x) => out.push(x),
            Pattern::Box(p) => p.collect_binders(out),
            Pattern::Int(_) => {}
            Pattern::Con(_, ps) => ps.iter().for_each(|p| p.collect_binders(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(i64),
    Var(String),
    App(Box<Term>, Box<Term>),
    Lam(Pattern, Box<Term>),
    Promote(Box<Term>),
    Con(Con, Vec<Term>),
    Case(Box<Term>, Vec<(Pattern, Term)>),
    VerOf(PartialLabel, Box<Term>),
    Unversion(Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn lam(p: Pattern, body: Term) -> Term {
        Term::Lam(p, Box::new(body))
    }

    pub fn promote(t: Term) -> Term {
        Term::Promote(Box::new(t))
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out, false);
        out
    }

    /// Free variables outside any `unversion` subterm. These are the
    /// variables whose grades a promotion or `ver` depends on: `unversion`
    /// cuts the dependency between its operand and the enclosing term.
    pub fn dependency_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out, true);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>, stop_at_unversion: bool) {
        match self {
            Term::Int(_) => {}
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::App(f, a) => {
                f.collect_free(bound, out, stop_at_unversion);
                a.collect_free(bound, out, stop_at_unversion);
            }
            Term::Lam(p, body) => {
                let n = bound.len();
                bound.extend(p.binders().into_iter().map(String::from));
                body.collect_free(bound, out, stop_at_unversion);
                bound.truncate(n);
            }
            Term::Promote(t) | Term::VerOf(_, t) => t.collect_free(bound, out, stop_at_unversion),
            Term::Unversion(t) => {
                if !stop_at_unversion {
                    t.collect_free(bound, out, stop_at_unversion)
                }
            }
            Term::Con(_, ts) => ts.iter().for_each(|t| t.collect_free(bound, out, stop_at_unversion)),
            Term::Case(s, branches) => {
                s.collect_free(bound, out, stop_at_unversion);
                for (p, t) in branches {
                    let n = bound.len();
                    bound.extend(p.binders().into_iter().map(String::from));
                    t.collect_free(bound, out, stop_at_unversion);
                    bound.truncate(n);
                }
            }
        }
    }

    /// Nesting depth, counting every node.
    pub fn depth(&self) -> usize {
        1 + match self {
            Term::Int(_) | Term::Var(_) => 0,
            Term::App(f, a) => f.depth().max(a.depth()),
            Term::Lam(_, t) | Term::Promote(t) | Term::VerOf(_, t) | Term::Unversion(t) => t.depth(),
            Term::Con(_, ts) => ts.iter().map(Term::depth).max().unwrap_or(0),
            Term::Case(s, bs) => bs.iter().map(|(_, t)| t.depth()).max().unwrap_or(0).max(s.depth()),
        }
    }

    /// Visits every node in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Int(_) | Term::Var(_) => {}
            Term::App(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::Lam(_, t) | Term::Promote(t) | Term::VerOf(_, t) | Term::Unversion(t) => t.walk(f),
            Term::Con(_, ts) => ts.iter().for_each(|t| t.walk(f)),
            Term::Case(s, bs) => {
                s.walk(f);
                bs.iter().for_each(|(_, t)| t.walk(f));
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(x) => write!(f, "{x}"),
            Pattern::Box(p) => write!(f, "[{p}]"),
            Pattern::Int(n) => write!(f, "{n}"),
            Pattern::Con(Con::Pair, ps) => write!(f, "({}, {})", ps[0], ps[1]),
            Pattern::Con(Con::Nil, _) => write!(f, "[]"),
            Pattern::Con(Con::Cons, ps) => write!(f, "({} : {})", ps[0], ps[1]),
        }
    }
}

impl Term {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let open = |f: &mut fmt::Formatter<'_>, need: bool| if need { write!(f, "(") } else { Ok(()) };
        let close = |f: &mut fmt::Formatter<'_>, need: bool| if need { write!(f, ")") } else { Ok(()) };
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Var(x) => write!(f, "{x}"),
            Term::App(a, b) => {
                open(f, prec > 1)?;
                a.fmt_prec(f, 1)?;
                write!(f, " ")?;
                b.fmt_prec(f, 2)?;
                close(f, prec > 1)
            }
            Term::Lam(p, t) => {
                open(f, prec > 0)?;
                write!(f, "λ{p}.")?;
                t.fmt_prec(f, 0)?;
                close(f, prec > 0)
            }
            Term::Promote(t) => {
                write!(f, "[")?;
                t.fmt_prec(f, 0)?;
                write!(f, "]")
            }
            Term::Con(Con::Pair, ts) => {
                write!(f, "(")?;
                ts[0].fmt_prec(f, 0)?;
                write!(f, ", ")?;
                ts[1].fmt_prec(f, 0)?;
                write!(f, ")")
            }
            Term::Con(Con::Nil, _) => write!(f, "nil"),
            Term::Con(Con::Cons, ts) => {
                open(f, prec > 1)?;
                write!(f, "cons ")?;
                ts[0].fmt_prec(f, 2)?;
                write!(f, " ")?;
                ts[1].fmt_prec(f, 2)?;
                close(f, prec > 1)
            }
            Term::Case(s, bs) => {
                open(f, prec > 0)?;
                write!(f, "case ")?;
                s.fmt_prec(f, 0)?;
                write!(f, " of {{")?;
                for (i, (p, t)) in bs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, " {p} ↦ ")?;
                    t.fmt_prec(f, 0)?;
                }
                write!(f, " }}")?;
                close(f, prec > 0)
            }
            Term::VerOf(d, t) => {
                open(f, prec > 0)?;
                write!(f, "ver {d} of ")?;
                t.fmt_prec(f, 2)?;
                close(f, prec > 0)
            }
            Term::Unversion(t) => {
                open(f, prec > 1)?;
                write!(f, "unversion ")?;
                t.fmt_prec(f, 2)?;
                close(f, prec > 1)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
