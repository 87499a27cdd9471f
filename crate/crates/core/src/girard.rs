//! Girard's translation between surface terms and VLMini.
//!
//! Forward: every lambda binds a promoted pattern and every argument is
//! promoted. A case scrutinee is promoted and each alternative pattern is
//! wrapped in a promoted pattern (the push reading); a constructor value in
//! argument position is promoted as a whole (the pull reading).
//!
//! `unversion t` becomes `(λ[u].u) (unversion [t])`: the operand is always a
//! versioned value, and the surrounding application unboxes the regraded
//! result so it can be used like any other value.

use thiserror::Error;

use crate::surface::{SPattern, SurfaceTerm, TermKind};
use crate::vlmini::{Con, Pattern, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GirardError {
    #[error("unresolved occurrence `{0}` left in the program")]
    ResidualVariable(String),
    #[error("term has no surface counterpart: {0}")]
    UnexpectedShape(String),
}

const UNVERSION_BINDER: &str = "u";

pub fn forward_translate(t: &SurfaceTerm) -> Term {
    match &t.kind {
        TermKind::Int(n) => Term::Int(*n),
        TermKind::Var(x) => Term::Var(x.clone()),
        TermKind::Lam(x, b) => Term::lam(Pattern::boxed_var(x), forward_translate(b)),
        TermKind::App(f, a) => Term::app(forward_translate(f), Term::promote(forward_translate(a))),
        TermKind::Let(x, a, b) => Term::app(
            Term::lam(Pattern::boxed_var(x), forward_translate(b)),
            Term::promote(forward_translate(a)),
        ),
        TermKind::Pair(a, b) => Term::Con(Con::Pair, vec![forward_translate(a), forward_translate(b)]),
        TermKind::List(ts) => ts
            .iter()
            .rev()
            .fold(Term::Con(Con::Nil, vec![]), |acc, t| Term::Con(Con::Cons, vec![forward_translate(t), acc])),
        TermKind::Case(s, bs) => Term::Case(
            Box::new(Term::promote(forward_translate(s))),
            bs.iter().map(|(p, t)| (Pattern::Box(Box::new(forward_pattern(p))), forward_translate(t))).collect(),
        ),
        TermKind::VerOf(d, b) => Term::VerOf(d.clone(), Box::new(forward_translate(b))),
        TermKind::Unversion(b) => Term::app(
            Term::lam(Pattern::boxed_var(UNVERSION_BINDER), Term::var(UNVERSION_BINDER)),
            Term::Unversion(Box::new(Term::promote(forward_translate(b)))),
        ),
    }
}

pub fn forward_pattern(p: &SPattern) -> Pattern {
    match p {
        SPattern::Var(x) => Pattern::Var(x.clone()),
        SPattern::Int(n) => Pattern::Int(*n),
        SPattern::Pair(a, b) => Pattern::Con(Con::Pair, vec![forward_pattern(a), forward_pattern(b)]),
        SPattern::Cons(a, b) => Pattern::Con(Con::Cons, vec![forward_pattern(a), forward_pattern(b)]),
        SPattern::List(ps) => ps
            .iter()
            .rev()
            .fold(Pattern::Con(Con::Nil, vec![]), |acc, p| Pattern::Con(Con::Cons, vec![forward_pattern(p), acc])),
    }
}

/// Structural check of forward output: arguments are promoted (an
/// `unversion` node counts, being promoted inside) and lambdas bind
/// promoted patterns.
pub fn is_girard_shaped(t: &Term) -> bool {
    let mut ok = true;
    t.walk(&mut |n| match n {
        Term::App(_, a) if !matches!(**a, Term::Promote(_) | Term::Unversion(_)) => ok = false,
        Term::Lam(p, _) if !matches!(p, Pattern::Box(_)) => ok = false,
        Term::Unversion(a) if !matches!(**a, Term::Promote(_)) => ok = false,
        _ => {}
    });
    ok
}

/// Erases promotions and promoted patterns, recovering `let` and
/// `unversion` from their translated shapes.
pub fn reverse_translate(t: &Term) -> Result<SurfaceTerm, GirardError> {
    Ok(SurfaceTerm::new(match t {
        Term::Int(n) => TermKind::Int(*n),
        Term::Var(x) if x.contains('#') => return Err(GirardError::ResidualVariable(x.clone())),
        Term::Var(x) => TermKind::Var(x.clone()),
        Term::App(f, a) => {
            if let (Term::Lam(p, body), Term::Unversion(inner)) = (&**f, &**a) {
                if let (Some(u), Term::Var(v)) = (binder(p), &**body) {
                    if u == v {
                        return Ok(SurfaceTerm::new(TermKind::Unversion(Box::new(reverse_translate(unpromote(inner))?))));
                    }
                }
            }
            if let (Term::Lam(p, body), Term::Promote(arg)) = (&**f, &**a) {
                if let Some(x) = binder(p) {
                    return Ok(SurfaceTerm::let_(x, reverse_translate(arg)?, reverse_translate(body)?));
                }
            }
            TermKind::App(Box::new(reverse_translate(f)?), Box::new(reverse_translate(unpromote(a))?))
        }
        Term::Lam(p, b) => {
            let x = binder(p).ok_or_else(|| GirardError::UnexpectedShape(format!("lambda pattern {p}")))?;
            TermKind::Lam(x.to_string(), Box::new(reverse_translate(b)?))
        }
        Term::Promote(b) => return reverse_translate(b),
        Term::Con(Con::Pair, ts) => {
            TermKind::Pair(Box::new(reverse_translate(&ts[0])?), Box::new(reverse_translate(&ts[1])?))
        }
        Term::Con(Con::Nil, _) => TermKind::List(vec![]),
        Term::Con(Con::Cons, ts) => match list_items(t) {
            Some(items) => TermKind::List(items.into_iter().map(reverse_translate).collect::<Result<_, _>>()?),
            None => {
                let head = reverse_translate(&ts[0])?;
                let tail = reverse_translate(&ts[1])?;
                return Ok(SurfaceTerm::binop(":", head, tail));
            }
        },
        Term::Case(s, bs) => TermKind::Case(
            Box::new(reverse_translate(unpromote(s))?),
            bs.iter()
                .map(|(p, t)| Ok((reverse_pattern(p)?, reverse_translate(t)?)))
                .collect::<Result<_, GirardError>>()?,
        ),
        Term::VerOf(d, b) => TermKind::VerOf(d.clone(), Box::new(reverse_translate(b)?)),
        Term::Unversion(b) => TermKind::Unversion(Box::new(reverse_translate(unpromote(b))?)),
    }))
}

pub fn reverse_pattern(p: &Pattern) -> Result<SPattern, GirardError> {
    Ok(match p {
        Pattern::Var(x) => SPattern::Var(x.clone()),
        Pattern::Int(n) => SPattern::Int(*n),
        Pattern::Box(p) => return reverse_pattern(p),
        Pattern::Con(Con::Pair, ps) => {
            SPattern::Pair(Box::new(reverse_pattern(&ps[0])?), Box::new(reverse_pattern(&ps[1])?))
        }
        Pattern::Con(Con::Nil, _) => SPattern::List(vec![]),
        Pattern::Con(Con::Cons, ps) => {
            let mut items = Vec::new();
            let mut cur = p;
            loop {
                match cur {
                    Pattern::Con(Con::Cons, ps) => {
                        items.push(&ps[0]);
                        cur = &ps[1];
                    }
                    Pattern::Con(Con::Nil, _) => {
                        return Ok(SPattern::List(items.into_iter().map(reverse_pattern).collect::<Result<_, _>>()?))
                    }
                    _ => break,
                }
            }
            SPattern::Cons(Box::new(reverse_pattern(&ps[0])?), Box::new(reverse_pattern(&ps[1])?))
        }
    })
}

fn binder(p: &Pattern) -> Option<&str> {
    match p {
        Pattern::Var(x) => Some(x),
        Pattern::Box(inner) => match &**inner {
            Pattern::Var(x) => Some(x),
            _ => None,
        },
        _ => None,
    }
}

fn unpromote(t: &Term) -> &Term {
    match t {
        Term::Promote(b) => b,
        _ => t,
    }
}

/// Elements of a cons chain that ends in nil.
fn list_items(t: &Term) -> Option<Vec<&Term>> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Con(Con::Cons, ts) => {
                items.push(&ts[0]);
                cur = &ts[1];
            }
            Term::Con(Con::Nil, _) => return Some(items),
            _ => return None,
        }
    }
}
