use vl_core::infer::{gen_label_deps, gen_var_deps, grade_context, synth_pattern, unify, Infer, InferError, Rule};
use vl_core::version::{ModuleRegistry, PartialLabel, Resource, Var, Version};
use vl_core::vlmini::{Assumption, DependencyConstraint as C, Kind, Pattern, Term, Type, TypeEnv};

fn env(items: Vec<Assumption>) -> TypeEnv {
    TypeEnv::from_assumptions(items).unwrap()
}

fn graded(x: &str, a: Type, v: Var) -> Assumption {
    Assumption::Graded(x.into(), a, Resource::Var(v))
}

fn hash1() -> PartialLabel {
    PartialLabel::single("Hash", Version::new(1, 0, 0))
}

#[test]
fn literal_synthesizes_int() {
    let mut inf = Infer::new();
    let o = inf.synth_type(&TypeEnv::new(), &Term::Int(42)).unwrap();
    assert_eq!(o.ty, Type::Int);
    assert!(o.usage.is_empty());
    assert!(o.theta.is_empty());
    assert_eq!(o.deps, C::Top);
    assert_eq!(o.sigma_out, 0);
}

#[test]
fn promotion_depends_on_every_free_variable() {
    let mut inf = Infer::new();
    let r = inf.sigma.fresh(Kind::Labels);
    let s = inf.sigma.fresh(Kind::Labels);
    let g = env(vec![graded("f", Type::arrow(Type::Int, Type::Int), r), graded("x", Type::Int, s)]);
    let t = Term::promote(Term::app(Term::var("f"), Term::var("x")));
    let o = inf.synth_type(&g, &t).unwrap();
    let Type::Box(Resource::Var(alpha), _) = o.ty else { panic!("{}", o.ty) };
    assert!(alpha != r && alpha != s);
    assert_eq!(o.deps, C::VarDep(alpha, r).and(C::VarDep(alpha, s)));
    assert_eq!(inf.trace.len(), 1);
    assert_eq!(inf.trace[0].rule, Rule::Pr);
}

#[test]
fn graded_variable_used_with_unit_grade() {
    let mut inf = Infer::new();
    let r = inf.sigma.fresh(Kind::Labels);
    let o = inf.synth_type(&env(vec![graded("x", Type::Int, r)]), &Term::var("x")).unwrap();
    assert_eq!(o.ty, Type::Int);
    assert_eq!(o.usage.iter().cloned().collect::<Vec<_>>(), vec![Assumption::Graded("x".into(), Type::Int, Resource::unit())]);
    assert_eq!(o.deps, C::Top);
}

#[test]
fn unbound_variable() {
    let mut inf = Infer::new();
    assert_eq!(
        inf.synth_type(&TypeEnv::new(), &Term::var("nope")).unwrap_err(),
        InferError::UnboundVariable("nope".into())
    );
}

#[test]
fn ver_generates_label_dependencies() {
    let mut inf = Infer::new();
    let r = inf.sigma.fresh(Kind::Labels);
    let g = env(vec![graded("x", Type::Int, r)]);
    let o = inf.synth_type(&g, &Term::VerOf(hash1(), Box::new(Term::var("x")))).unwrap();
    assert_eq!(o.deps, C::LabelDep(r, hash1()));
    assert_eq!(inf.trace[0].rule, Rule::Ver);
}

#[test]
fn ver_checks_registry() {
    let reg = ModuleRegistry::parse(&[("Hash", &["2.0.0"])]).unwrap();
    let mut inf = Infer::with_registry(reg);
    let e = inf.synth_type(&TypeEnv::new(), &Term::VerOf(hash1(), Box::new(Term::Int(1)))).unwrap_err();
    assert_eq!(e, InferError::UnknownLabel { module: "Hash".into(), version: Version::new(1, 0, 0) });
}

#[test]
fn unversion_needs_a_box() {
    let mut inf = Infer::new();
    let e = inf.synth_type(&TypeEnv::new(), &Term::Unversion(Box::new(Term::Int(3)))).unwrap_err();
    assert_eq!(e, InferError::NotAVersionedValue(Type::Int));
}

#[test]
fn identity_on_promoted_values() {
    let mut inf = Infer::new();
    let t = Term::lam(Pattern::boxed_var("x"), Term::var("x"));
    let o = inf.synth_type(&TypeEnv::new(), &t).unwrap();
    let s = unify(&o.theta).unwrap();
    match s.apply_type(&o.ty) {
        Type::Arrow(a, b) => match *a {
            Type::Box(Resource::Var(_), inner) => assert_eq!(*inner, *b),
            other => panic!("argument {other}"),
        },
        other => panic!("{other}"),
    }
}

#[test]
fn application_unifies_argument() {
    let mut inf = Infer::new();
    let t = Term::app(Term::lam(Pattern::boxed_var("x"), Term::var("x")), Term::promote(Term::Int(5)));
    let o = inf.synth_type(&TypeEnv::new(), &t).unwrap();
    let s = unify(&o.theta).unwrap();
    assert_eq!(s.apply_type(&o.ty), Type::Int);
}

#[test]
fn pattern_synthesis_examples() {
    let mut inf = Infer::new();
    let a = inf.sigma.fresh_type();
    let out = synth_pattern(&mut inf.sigma, None, &Pattern::Var("x".into()), &a).unwrap();
    assert_eq!(out.bindings.iter().cloned().collect::<Vec<_>>(), vec![Assumption::Linear("x".into(), a.clone())]);

    let r = Resource::Var(inf.sigma.fresh(Kind::Labels));
    let out = synth_pattern(&mut inf.sigma, Some(&r), &Pattern::Var("x".into()), &a).unwrap();
    assert_eq!(out.bindings.iter().cloned().collect::<Vec<_>>(), vec![Assumption::Graded("x".into(), a.clone(), r)]);

    let out = synth_pattern(&mut inf.sigma, None, &Pattern::boxed_var("x"), &a).unwrap();
    let [Assumption::Graded(_, beta, alpha)] = &out.bindings.iter().cloned().collect::<Vec<_>>()[..] else {
        panic!("{}", out.bindings)
    };
    assert_eq!(out.theta.len(), 1);
    let s = unify(&out.theta).unwrap();
    assert_eq!(s.apply_type(&a), s.apply_type(&Type::boxed(alpha.clone(), beta.clone())));
}

#[test]
fn nested_promoted_pattern_rejected() {
    let mut inf = Infer::new();
    let a = inf.sigma.fresh_type();
    let p = Pattern::Box(Box::new(Pattern::boxed_var("x")));
    assert!(matches!(synth_pattern(&mut inf.sigma, None, &p, &a), Err(InferError::NestedPromotedPattern(_))));
}

#[test]
fn grading_examples() {
    assert!(grade_context(&TypeEnv::new()).is_empty());
    let g = grade_context(&env(vec![Assumption::Linear("x".into(), Type::Int)]));
    assert_eq!(g.iter().cloned().collect::<Vec<_>>(), vec![Assumption::Graded("x".into(), Type::Int, Resource::unit())]);
    let kept = env(vec![graded("x", Type::Int, Var(4))]);
    assert_eq!(grade_context(&kept).iter().cloned().collect::<Vec<_>>(), kept.iter().cloned().collect::<Vec<_>>());
}

#[test]
fn var_dep_examples() {
    let a = Var(9);
    assert_eq!(gen_var_deps(a, &TypeEnv::new()), C::Top);
    assert_eq!(gen_var_deps(a, &env(vec![graded("x", Type::Int, Var(1))])), C::VarDep(a, Var(1)));
    assert_eq!(
        gen_var_deps(a, &env(vec![graded("x", Type::Int, Var(1)), graded("y", Type::Int, Var(2))])),
        C::VarDep(a, Var(1)).and(C::VarDep(a, Var(2)))
    );
}

#[test]
fn label_dep_examples() {
    let d = hash1();
    assert_eq!(gen_label_deps(&TypeEnv::new(), &d).unwrap(), C::Top);
    assert_eq!(gen_label_deps(&env(vec![graded("x", Type::Int, Var(1))]), &d).unwrap(), C::LabelDep(Var(1), d.clone()));
    assert_eq!(
        gen_label_deps(&env(vec![graded("x", Type::Int, Var(1)), graded("y", Type::Int, Var(2))]), &d).unwrap(),
        C::LabelDep(Var(1), d.clone()).and(C::LabelDep(Var(2), d.clone()))
    );
    let concrete = env(vec![Assumption::Graded("x".into(), Type::Int, Resource::unit())]);
    assert_eq!(gen_label_deps(&concrete, &d).unwrap_err(), InferError::NonVariableGrade("x".into()));
}
