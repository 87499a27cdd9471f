use std::fmt::Write;

use super::ast::{SPattern, SurfaceModule, SurfaceTerm, TermKind};

pub const BINARY_OPS: &[&str] = &["||", "&&", "==", "/=", "<", "<=", ">", ">=", ":", "++", "+", "-", "*", "/", "%"];

pub fn is_operator(x: &str) -> bool {
    BINARY_OPS.contains(&x)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Operand,
    Fun,
    Arg,
}

/// Prints a term in concrete syntax that parses back to the same tree.
pub fn pretty_term(t: &SurfaceTerm) -> String {
    let mut s = String::new();
    go(t, Ctx::Top, &mut s);
    s
}

pub fn pretty_pattern(p: &SPattern) -> String {
    let mut s = String::new();
    pat(p, false, &mut s);
    s
}

pub fn pretty_module(m: &SurfaceModule) -> String {
    let mut s = format!("module {} where\n", m.name);
    for i in &m.imports {
        let _ = writeln!(s, "import {i}");
    }
    for d in &m.defs {
        let _ = write!(s, "\n{} = {}\n", d.name, pretty_term(&d.body));
    }
    s
}

/// `op a b` with `op` a binary operator.
fn as_binop(t: &SurfaceTerm) -> Option<(&str, &SurfaceTerm, &SurfaceTerm)> {
    let TermKind::App(f, b) = &t.kind else { return None };
    let TermKind::App(op, a) = &f.kind else { return None };
    match &op.kind {
        TermKind::Var(o) if is_operator(o) => Some((o, a, b)),
        _ => None,
    }
}

fn go(t: &SurfaceTerm, ctx: Ctx, s: &mut String) {
    let paren = |s: &mut String, need: bool, body: &dyn Fn(&mut String)| {
        if need {
            s.push('(');
        }
        body(s);
        if need {
            s.push(')');
        }
    };
    if let Some((op, a, b)) = as_binop(t) {
        paren(s, ctx != Ctx::Top, &|s| {
            go(a, Ctx::Operand, s);
            let _ = write!(s, " {op} ");
            go(b, Ctx::Operand, s);
        });
        return;
    }
    match &t.kind {
        TermKind::Int(n) if *n < 0 => {
            let _ = write!(s, "({n})");
        }
        TermKind::Int(n) => {
            let _ = write!(s, "{n}");
        }
        TermKind::Var(x) if is_operator(x) => {
            let _ = write!(s, "({x})");
        }
        TermKind::Var(x) => s.push_str(x),
        TermKind::App(f, a) => paren(s, ctx == Ctx::Arg, &|s| {
            go(f, Ctx::Fun, s);
            s.push(' ');
            go(a, Ctx::Arg, s);
        }),
        TermKind::Lam(x, b) => paren(s, ctx != Ctx::Top, &|s| {
            let _ = write!(s, "\\{x} -> ");
            go(b, Ctx::Top, s);
        }),
        TermKind::Let(x, a, b) => paren(s, ctx != Ctx::Top, &|s| {
            let _ = write!(s, "let {x} = ");
            go(a, Ctx::Top, s);
            s.push_str(" in ");
            go(b, Ctx::Top, s);
        }),
        TermKind::Pair(a, b) => {
            s.push('(');
            go(a, Ctx::Top, s);
            s.push_str(", ");
            go(b, Ctx::Top, s);
            s.push(')');
        }
        TermKind::List(ts) => {
            s.push('[');
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                go(t, Ctx::Top, s);
            }
            s.push(']');
        }
        TermKind::Case(sc, bs) => paren(s, ctx != Ctx::Top, &|s| {
            s.push_str("case ");
            go(sc, Ctx::Top, s);
            s.push_str(" of { ");
            for (i, (p, t)) in bs.iter().enumerate() {
                if i > 0 {
                    s.push_str("; ");
                }
                pat(p, false, s);
                s.push_str(" -> ");
                go(t, Ctx::Top, s);
            }
            s.push_str(" }");
        }),
        TermKind::VerOf(d, b) => paren(s, ctx != Ctx::Top, &|s| {
            s.push_str("ver [");
            for (i, (m, v)) in d.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{m}={v}");
            }
            s.push_str("] of ");
            go(b, Ctx::Top, s);
        }),
        TermKind::Unversion(b) => paren(s, ctx == Ctx::Arg, &|s| {
            s.push_str("unversion ");
            go(b, Ctx::Arg, s);
        }),
    }
}

fn pat(p: &SPattern, atomic: bool, s: &mut String) {
    match p {
        SPattern::Var(x) => s.push_str(x),
        SPattern::Int(n) => {
            let _ = write!(s, "{n}");
        }
        SPattern::Pair(a, b) => {
            s.push('(');
            pat(a, false, s);
            s.push_str(", ");
            pat(b, false, s);
            s.push(')');
        }
        SPattern::List(ps) => {
            s.push('[');
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                pat(p, false, s);
            }
            s.push(']');
        }
        SPattern::Cons(h, t) => {
            if atomic {
                s.push('(');
            }
            pat(h, true, s);
            s.push_str(" : ");
            pat(t, false, s);
            if atomic {
                s.push(')');
            }
        }
    }
}
