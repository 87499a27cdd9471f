#![allow(dead_code)]

use std::path::PathBuf;

use vl_core::driver::Compilation;
use vl_core::surface::{discover_registry, load_repository, parse_module, Repository};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn repo(name: &str) -> Repository {
    let roots = vec![fixture(name)];
    let reg = discover_registry(&roots).unwrap();
    load_repository(&roots, &reg).unwrap()
}

pub fn compile(case: &str, entry: &str) -> Compilation {
    try_compile(case, entry).unwrap()
}

pub fn try_compile(case: &str, entry: &str) -> Result<Compilation, vl_core::driver::DriverError> {
    let src = std::fs::read_to_string(fixture(case).join(entry)).unwrap();
    Compilation::new(&repo(case), &parse_module(&src).unwrap())
}

pub mod gen {
    //! Seeded generators shared by the property tests and the acceptance
    //! target.

    use std::collections::{BTreeMap, BTreeSet};

    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use vl_core::lambdavl::{LPattern, LTerm};
    use vl_core::version::{ModuleRegistry, PartialLabel, Var, Version, VersionLabel};
    use vl_core::vlmini::{DependencyConstraint as C, Pattern, Term};

    const NAMES: [&str; 3] = ["x", "y", "z"];

    /// Closed VLMini term in the fragment shared with λVL.
    pub fn vlmini_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
        vlmini_in(rng, depth, &mut Vec::new())
    }

    fn vlmini_in(rng: &mut ChaCha8Rng, depth: usize, scope: &mut Vec<String>) -> Term {
        let leaf = depth <= 1 || rng.gen_bool(0.25);
        if leaf {
            if !scope.is_empty() && rng.gen_bool(0.7) {
                return Term::Var(scope[rng.gen_range(0..scope.len())].clone());
            }
            return Term::Int(rng.gen_range(0..3));
        }
        match rng.gen_range(0..4) {
            0 => {
                let f = vlmini_in(rng, depth - 1, scope);
                Term::app(f, vlmini_in(rng, depth - 1, scope))
            }
            1 | 2 => {
                let x = NAMES[rng.gen_range(0..NAMES.len())].to_string();
                let p = if rng.gen_bool(0.5) { Pattern::Var(x.clone()) } else { Pattern::boxed_var(&x) };
                scope.push(x);
                let b = vlmini_in(rng, depth - 1, scope);
                scope.pop();
                Term::lam(p, b)
            }
            _ => Term::promote(vlmini_in(rng, depth - 1, scope)),
        }
    }

    pub fn two_labels() -> [VersionLabel; 2] {
        [
            VersionLabel::new([("A", Version::new(1, 0, 0))]),
            VersionLabel::new([("A", Version::new(2, 0, 0))]),
        ]
    }

    /// Closed λVL term over the labels {A=1.0.0} and {A=2.0.0}.
    pub fn lterm(rng: &mut ChaCha8Rng, depth: usize) -> LTerm {
        lterm_in(rng, depth, &mut Vec::new())
    }

    fn lterm_in(rng: &mut ChaCha8Rng, depth: usize, scope: &mut Vec<String>) -> LTerm {
        let labels = two_labels();
        let leaf = depth <= 1 || rng.gen_bool(0.2);
        if leaf {
            if !scope.is_empty() && rng.gen_bool(0.7) {
                return LTerm::Var(scope[rng.gen_range(0..scope.len())].clone());
            }
            return LTerm::Int(rng.gen_range(0..3));
        }
        let x = NAMES[rng.gen_range(0..NAMES.len())].to_string();
        match rng.gen_range(0..7) {
            0 => {
                let f = lterm_in(rng, depth - 1, scope);
                LTerm::app(f, lterm_in(rng, depth - 1, scope))
            }
            1 => {
                let p = if rng.gen_bool(0.5) { LPattern::Var(x.clone()) } else { LPattern::Box(x.clone()) };
                scope.push(x);
                let b = lterm_in(rng, depth - 1, scope);
                scope.pop();
                LTerm::lam(p, b)
            }
            2 => {
                let a = lterm_in(rng, depth - 1, scope);
                scope.push(x.clone());
                let b = lterm_in(rng, depth - 1, scope);
                scope.pop();
                LTerm::clet(&x, a, b)
            }
            3 => LTerm::promote(lterm_in(rng, depth - 1, scope)),
            4 => {
                let mut m = BTreeMap::new();
                for l in &labels {
                    if m.is_empty() || rng.gen_bool(0.6) {
                        m.insert(l.clone(), lterm_in(rng, depth - 1, scope));
                    }
                }
                LTerm::VRecord(m)
            }
            5 => {
                let l = labels[rng.gen_range(0..2)].clone();
                LTerm::extract(lterm_in(rng, depth - 1, scope), l)
            }
            _ => {
                let a = lterm_in(rng, depth - 1, scope);
                let b = lterm_in(rng, depth - 1, scope);
                LTerm::app(a, b)
            }
        }
    }

    /// Registry with 1..=3 modules of 1..=3 versions.
    pub fn registry(rng: &mut ChaCha8Rng) -> ModuleRegistry {
        let mods = rng.gen_range(1..=3);
        let mut pairs = Vec::new();
        for m in ["A", "B", "C"].iter().take(mods) {
            let n = rng.gen_range(1..=3u64);
            pairs.push((m.to_string(), (1..=n).map(|v| Version::new(v, 0, 0)).collect::<Vec<_>>()));
        }
        ModuleRegistry::from_modules(pairs).unwrap()
    }

    /// Constraint of at most `budget` nodes over variables 0..nvars.
    pub fn constraint(rng: &mut ChaCha8Rng, reg: &ModuleRegistry, nvars: u32, budget: usize) -> C {
        let var = |rng: &mut ChaCha8Rng| Var(rng.gen_range(0..nvars));
        if budget < 3 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..5) {
                0 => C::Top,
                1 | 2 => C::VarDep(var(rng), var(rng)),
                _ => {
                    let mut pairs = Vec::new();
                    for m in reg.modules() {
                        if pairs.is_empty() || rng.gen_bool(0.4) {
                            let vs = reg.versions(m).unwrap();
                            pairs.push((m.clone(), vs[rng.gen_range(0..vs.len())].clone()));
                        }
                    }
                    C::LabelDep(var(rng), PartialLabel::new(pairs))
                }
            };
        }
        let left = rng.gen_range(1..budget - 1);
        let a = constraint(rng, reg, nvars, left);
        let b = constraint(rng, reg, nvars, budget - 1 - left);
        if rng.gen_bool(0.6) {
            C::And(Box::new(a), Box::new(b))
        } else {
            C::Or(Box::new(a), Box::new(b))
        }
    }

    /// Every full label of the registry.
    pub fn universe(reg: &ModuleRegistry) -> Vec<VersionLabel> {
        let mut out = vec![Vec::new()];
        for m in reg.modules() {
            let mut next = Vec::new();
            for partial in &out {
                for v in reg.versions(m).unwrap() {
                    let mut p: Vec<(String, Version)> = partial.clone();
                    p.push((m.clone(), v.clone()));
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(VersionLabel::new).collect()
    }

    pub fn eval(c: &C, a: &BTreeMap<Var, VersionLabel>) -> bool {
        match c {
            C::Top => true,
            C::And(x, y) => eval(x, a) && eval(y, a),
            C::Or(x, y) => eval(x, a) || eval(y, a),
            C::VarDep(x, y) => a[x] == a[y],
            C::LabelDep(x, d) => d.iter().all(|(m, v)| a[x].get(m) == Some(v)),
        }
    }

    /// All satisfying assignments of `vars`, best first under the
    /// newest-preference order.
    pub fn brute_force(c: &C, vars: &BTreeSet<Var>, reg: &ModuleRegistry) -> Vec<BTreeMap<Var, VersionLabel>> {
        let labels = universe(reg);
        let key = |l: &VersionLabel| -> Vec<usize> {
            reg.modules().map(|m| reg.versions(m).unwrap().iter().position(|v| Some(v) == l.get(m)).unwrap()).collect()
        };
        let vars: Vec<Var> = vars.iter().copied().collect();
        let mut sols = Vec::new();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let a: BTreeMap<Var, VersionLabel> = vars.iter().zip(&idx).map(|(v, i)| (*v, labels[*i].clone())).collect();
            if eval(c, &a) {
                sols.push(a);
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < labels.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        sols.sort_by_key(|a| std::cmp::Reverse(vars.iter().map(|v| key(&a[v])).collect::<Vec<_>>()));
        sols
    }
}

pub mod oracle {
    use std::collections::BTreeSet;

    use vl_core::infer::{unify, Infer};
    use vl_core::lambdavl::{check_declarative, eval_step, from_vlmini, synth_declarative, LTerm};
    use vl_core::solver::{solve_items, Assignment};
    use vl_core::version::{ModuleRegistry, Resource, Var};
    use vl_core::vlmini::{Term, Type, TypeEnv};

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum Outcome {
        /// The premise did not hold (ill-typed, unsolvable, ...).
        Skipped,
        Holds,
        Counterexample(String),
    }

    fn ground_resource(r: &Resource, eta: &Assignment, reg: &ModuleRegistry) -> Resource {
        match r {
            Resource::Var(v) => {
                Resource::labels([eta.get(v).cloned().unwrap_or_else(|| reg.newest_label())])
            }
            Resource::Join(vs, ls) => {
                let mut out: BTreeSet<_> = ls.clone();
                out.extend(vs.iter().map(|v| eta.get(v).cloned().unwrap_or_else(|| reg.newest_label())));
                Resource::Labels(out)
            }
            other => other.clone(),
        }
    }

    /// η applied to a type; type variables left open become Int.
    pub fn ground_type(t: &Type, eta: &Assignment, reg: &ModuleRegistry) -> Type {
        match t {
            Type::Int | Type::Var(_) => Type::Int,
            Type::Arrow(a, b) => Type::arrow(ground_type(a, eta, reg), ground_type(b, eta, reg)),
            Type::Box(r, a) => Type::boxed(ground_resource(r, eta, reg), ground_type(a, eta, reg)),
            Type::Con(k, xs) => Type::Con(*k, xs.iter().map(|x| ground_type(x, eta, reg)).collect()),
        }
    }

    /// Inference plus solving, then the declarative judgment on the result.
    pub fn soundness_case(t: &Term, reg: &ModuleRegistry) -> Outcome {
        let mut inf = Infer::with_registry(reg.clone());
        let Ok(res) = inf.synth_type(&TypeEnv::new(), t) else { return Outcome::Skipped };
        let Ok(theta) = unify(&res.theta) else { return Outcome::Skipped };
        let ty = theta.apply_type(&res.ty);
        let Ok(deps) = theta.apply_constraint(&res.deps) else { return Outcome::Skipped };
        let extra: Vec<Var> = ty.resource_vars().into_iter().collect();
        let Ok(eta) = solve_items(&[deps], &extra, reg) else { return Outcome::Skipped };
        let grounded = ground_type(&ty, &eta, reg);
        let lt = match from_vlmini(t) {
            Ok(lt) => lt,
            Err(e) => return Outcome::Counterexample(format!("{t}: {e}")),
        };
        if check_declarative(&TypeEnv::new(), &lt, &grounded) {
            Outcome::Holds
        } else {
            Outcome::Counterexample(format!("⊢ {lt} : {grounded} rejected (inferred {ty})"))
        }
    }

    /// Progress and one-step preservation for a closed term.
    pub fn preservation_case(t: &LTerm) -> Outcome {
        let Some(a) = synth_declarative(&TypeEnv::new(), t) else { return Outcome::Skipped };
        match eval_step(t) {
            None if t.is_value() => Outcome::Holds,
            None => Outcome::Counterexample(format!("{t} : {a} is stuck")),
            Some(next) => {
                if check_declarative(&TypeEnv::new(), &next, &a) {
                    Outcome::Holds
                } else {
                    Outcome::Counterexample(format!("{t} : {a} steps to {next}, which does not check"))
                }
            }
        }
    }
}

pub mod strat {
    //! proptest strategies for surface syntax.

    use proptest::prelude::*;

    use vl_core::surface::{SPattern, SurfaceTerm, TermKind};
    use vl_core::version::{PartialLabel, Version};

    fn name() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["x", "y", "f", "xs", "acc"]).prop_map(String::from)
    }

    fn pattern() -> impl Strategy<Value = SPattern> {
        let leaf = prop_oneof![name().prop_map(SPattern::Var), (0i64..50).prop_map(SPattern::Int)];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SPattern::Pair(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SPattern::Cons(Box::new(a), Box::new(b))),
                prop::collection::vec(inner, 0..3).prop_map(SPattern::List),
            ]
        })
        .prop_filter("distinct binders", |p| {
            let b = p.binders();
            b.iter().collect::<std::collections::BTreeSet<_>>().len() == b.len()
        })
    }

    fn label() -> impl Strategy<Value = PartialLabel> {
        (prop::sample::select(vec!["A", "Hash"]), 1u64..4)
            .prop_map(|(m, v)| PartialLabel::single(m, Version::new(v, 0, 0)))
    }

    /// Terms that never apply a lambda directly and never use `:` as a
    /// value, so the core round trip returns them unchanged.
    pub fn term() -> impl Strategy<Value = SurfaceTerm> {
        let leaf = prop_oneof![
            (0i64..100).prop_map(SurfaceTerm::int),
            name().prop_map(|x| SurfaceTerm::var(&x)),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            let op = prop::sample::select(vec!["+", "*", "==", "++", "<"]);
            prop_oneof![
                (name(), inner.clone()).prop_map(|(x, b)| SurfaceTerm::lam(&x, b)),
                (name(), inner.clone()).prop_map(|(f, a)| SurfaceTerm::app(SurfaceTerm::var(&f), a)),
                (inner.clone(), inner.clone())
                    .prop_filter("no direct redex", |(f, _)| !matches!(f.kind, TermKind::Lam(..)))
                    .prop_map(|(f, a)| SurfaceTerm::app(f, a)),
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| SurfaceTerm::binop(o, a, b)),
                (name(), inner.clone(), inner.clone())
                    .prop_filter("let is not recursive", |(x, a, _)| !a.free_vars().contains(x))
                    .prop_map(|(x, a, b)| SurfaceTerm::let_(&x, a, b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| SurfaceTerm::new(TermKind::Pair(Box::new(a), Box::new(b)))),
                prop::collection::vec(inner.clone(), 0..3).prop_map(|ts| SurfaceTerm::new(TermKind::List(ts))),
                (inner.clone(), prop::collection::vec((pattern(), inner.clone()), 1..3))
                    .prop_map(|(s, bs)| SurfaceTerm::new(TermKind::Case(Box::new(s), bs))),
                (label(), inner.clone()).prop_map(|(d, b)| SurfaceTerm::new(TermKind::VerOf(d, Box::new(b)))),
                inner.prop_map(|b| SurfaceTerm::new(TermKind::Unversion(Box::new(b)))),
            ]
        })
    }
}
