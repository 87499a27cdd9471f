mod common;

use proptest::prelude::*;

use common::strat;
use vl_core::girard::{forward_translate, is_girard_shaped, reverse_translate, GirardError};
use vl_core::surface::{parse_term, SPattern, SurfaceTerm, TermKind};
use vl_core::vlmini::{Con, Pattern, Term};

fn fwd(src: &str) -> Term {
    forward_translate(&parse_term(src).unwrap())
}

#[test]
fn lambda_binds_promoted_pattern() {
    assert_eq!(fwd("\\x -> x"), Term::lam(Pattern::boxed_var("x"), Term::var("x")));
}

#[test]
fn application_promotes_argument() {
    assert_eq!(fwd("f s"), Term::app(Term::var("f"), Term::promote(Term::var("s"))));
}

#[test]
fn literal_is_unchanged() {
    assert_eq!(fwd("42"), Term::Int(42));
}

#[test]
fn let_becomes_redex_and_back() {
    let t = fwd("let x = 1 in x");
    assert_eq!(t, Term::app(Term::lam(Pattern::boxed_var("x"), Term::var("x")), Term::promote(Term::Int(1))));
    assert_eq!(reverse_translate(&t).unwrap(), parse_term("let x = 1 in x").unwrap());
}

#[test]
fn nested_application_shape() {
    // reverse (sort xs) with a let around it
    let t = fwd("let xs = [2, 1] in reverse (sort xs)");
    let list = Term::Con(Con::Cons, vec![Term::Int(2), Term::Con(Con::Cons, vec![Term::Int(1), Term::Con(Con::Nil, vec![])])]);
    let body = Term::app(
        Term::var("reverse"),
        Term::promote(Term::app(Term::var("sort"), Term::promote(Term::var("xs")))),
    );
    assert_eq!(t, Term::app(Term::lam(Pattern::boxed_var("xs"), body), Term::promote(list)));
    assert!(is_girard_shaped(&t));
}

#[test]
fn case_promotes_scrutinee_and_patterns() {
    let t = fwd("case p of { (a, b) -> a }");
    let Term::Case(s, bs) = &t else { panic!("{t}") };
    assert!(matches!(**s, Term::Promote(_)));
    assert!(matches!(bs[0].0, Pattern::Box(_)));
}

#[test]
fn unversion_round_trips() {
    let src = parse_term("unversion (g 1)").unwrap();
    let t = forward_translate(&src);
    assert!(is_girard_shaped(&t));
    assert_eq!(reverse_translate(&t).unwrap(), src);
}

#[test]
fn residual_occurrence_rejected() {
    assert_eq!(
        reverse_translate(&Term::var("mkHash#1")),
        Err(GirardError::ResidualVariable("mkHash#1".into()))
    );
}

#[test]
fn open_cons_chain_reverses_to_operator() {
    let t = Term::Con(Con::Cons, vec![Term::Int(1), Term::var("xs")]);
    assert_eq!(reverse_translate(&t).unwrap(), SurfaceTerm::binop(":", SurfaceTerm::int(1), SurfaceTerm::var("xs")));
}

/// `p : [q, ...]` and `[p, q, ...]` translate to the same core pattern.
fn norm_pattern(p: &SPattern) -> SPattern {
    match p {
        SPattern::Cons(a, b) => match norm_pattern(b) {
            SPattern::List(mut ps) => {
                ps.insert(0, norm_pattern(a));
                SPattern::List(ps)
            }
            b => SPattern::Cons(Box::new(norm_pattern(a)), Box::new(b)),
        },
        SPattern::Pair(a, b) => SPattern::Pair(Box::new(norm_pattern(a)), Box::new(norm_pattern(b))),
        SPattern::List(ps) => SPattern::List(ps.iter().map(norm_pattern).collect()),
        SPattern::Var(_) | SPattern::Int(_) => p.clone(),
    }
}

fn norm(t: &SurfaceTerm) -> SurfaceTerm {
    let b = |t: &SurfaceTerm| Box::new(norm(t));
    SurfaceTerm::new(match &t.kind {
        TermKind::Case(s, alts) => TermKind::Case(b(s), alts.iter().map(|(p, t)| (norm_pattern(p), norm(t))).collect()),
        TermKind::Int(_) | TermKind::Var(_) => t.kind.clone(),
        TermKind::Lam(x, body) => TermKind::Lam(x.clone(), b(body)),
        TermKind::App(f, a) => TermKind::App(b(f), b(a)),
        TermKind::Let(x, a, body) => TermKind::Let(x.clone(), b(a), b(body)),
        TermKind::Pair(x, y) => TermKind::Pair(b(x), b(y)),
        TermKind::List(ts) => TermKind::List(ts.iter().map(norm).collect()),
        TermKind::VerOf(d, body) => TermKind::VerOf(d.clone(), b(body)),
        TermKind::Unversion(body) => TermKind::Unversion(b(body)),
    })
}

proptest! {
    #[test]
    fn reverse_inverts_forward(t in strat::term()) {
        let back = reverse_translate(&forward_translate(&t)).unwrap();
        prop_assert_eq!(back, norm(&t));
    }

    #[test]
    fn forward_output_is_shaped(t in strat::term()) {
        prop_assert!(is_girard_shaped(&forward_translate(&t)));
    }

    #[test]
    fn forward_keeps_free_vars(t in strat::term()) {
        prop_assert_eq!(forward_translate(&t).free_vars(), t.free_vars());
    }
}
