mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::gen;
use vl_core::solver::{export_smt2, holds, prefer_newest, solve, solve_items, SolveError};
use vl_core::version::{ModuleRegistry, PartialLabel, Var, Version, VersionLabel};
use vl_core::vlmini::DependencyConstraint as C;

fn ab() -> ModuleRegistry {
    ModuleRegistry::parse(&[("A", &["1.0.0", "2.0.0"]), ("B", &["1.0.0", "2.0.0"])]).unwrap()
}

fn v(n: u64) -> Version {
    Version::new(n, 0, 0)
}

fn label(a: u64, b: u64) -> VersionLabel {
    VersionLabel::new([("A", v(a)), ("B", v(b))])
}

fn a_is(n: u64) -> PartialLabel {
    PartialLabel::single("A", v(n))
}

#[test]
fn label_dependency_keeps_other_modules_newest() {
    let s = solve(&C::LabelDep(Var(0), a_is(1)), &ab()).unwrap();
    assert_eq!(s[&Var(0)], label(1, 2));
}

#[test]
fn unconstrained_variable_gets_newest() {
    let s = solve_items(&[C::Top], &[Var(0)], &ab()).unwrap();
    assert_eq!(s[&Var(0)], ab().newest_label());
    assert_eq!(s[&Var(0)], label(2, 2));
}

#[test]
fn contradiction_is_unsat() {
    let c = C::LabelDep(Var(0), a_is(1)).and(C::LabelDep(Var(0), a_is(2)));
    assert_eq!(solve(&c, &ab()).unwrap_err(), SolveError::Unsat { core: vec![0, 1] });
}

#[test]
fn unsat_core_is_minimal() {
    let items = [
        C::LabelDep(Var(0), a_is(1)),
        C::LabelDep(Var(2), PartialLabel::single("B", v(1))),
        C::VarDep(Var(0), Var(1)),
        C::LabelDep(Var(1), a_is(2)),
    ];
    assert_eq!(solve_items(&items, &[], &ab()).unwrap_err(), SolveError::Unsat { core: vec![0, 2, 3] });
}

#[test]
fn unknown_version_reported() {
    let d = PartialLabel::single("A", v(9));
    assert_eq!(solve(&C::LabelDep(Var(0), d.clone()), &ab()).unwrap_err(), SolveError::UnknownModule(d));
}

#[test]
fn variable_dependency_is_equality() {
    let c = C::VarDep(Var(0), Var(1)).and(C::LabelDep(Var(1), PartialLabel::single("B", v(1))));
    let s = solve(&c, &ab()).unwrap();
    assert_eq!(s[&Var(0)], label(2, 1));
    assert_eq!(s[&Var(1)], label(2, 1));
}

#[test]
fn disjunction_prefers_newer_branch() {
    let c = C::LabelDep(Var(0), a_is(1)).or(C::LabelDep(Var(0), a_is(2)));
    assert_eq!(solve(&c, &ab()).unwrap()[&Var(0)], label(2, 2));
}

#[test]
fn prefer_newest_examples() {
    let reg = ModuleRegistry::parse(&[("A", &["1.0.0", "2.0.0"])]).unwrap();
    let one = |n| BTreeMap::from([(Var(0), VersionLabel::new([("A", v(n))]))]);
    assert_eq!(prefer_newest(&[one(1), one(2)], &reg), Some(one(2)));
    assert_eq!(prefer_newest(&[one(1)], &reg), Some(one(1)));
    let two = |x, y| BTreeMap::from([(Var(0), VersionLabel::new([("A", v(x))])), (Var(1), VersionLabel::new([("A", v(y))]))]);
    assert_eq!(prefer_newest(&[two(2, 1), two(2, 2), two(1, 2)], &reg), Some(two(2, 2)));
}

#[test]
fn smt2_top() {
    let reg = ModuleRegistry::parse(&[("A", &["1.0.0", "2.0.0"])]).unwrap();
    assert_eq!(export_smt2(&C::Top, &reg), "(set-logic QF_LIA)\n(assert true)\n(check-sat)\n(get-model)\n");
}

#[test]
fn smt2_label_dependency() {
    let reg = ModuleRegistry::parse(&[("A", &["1.0.0", "2.0.0"])]).unwrap();
    let s = export_smt2(&C::LabelDep(Var(0), a_is(1)), &reg);
    assert!(s.contains("(declare-const alpha0_A Int)"), "{s}");
    assert!(s.contains("(assert (and (>= alpha0_A 0) (< alpha0_A 2)))"), "{s}");
    assert!(s.contains("(assert (= alpha0_A 0))"), "{s}");
}

#[test]
fn smt2_variable_dependency() {
    let s = export_smt2(&C::VarDep(Var(0), Var(1)), &ab());
    assert!(s.contains("(assert (and (= alpha0_A alpha1_A) (= alpha0_B alpha1_B)))"), "{s}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = gen::registry(&mut rng);
        let c = gen::constraint(&mut rng, &reg, 3, 20);
        let vars = c.vars();
        let all = gen::brute_force(&c, &vars, &reg);
        match solve(&c, &reg) {
            Ok(a) => {
                prop_assert!(!all.is_empty(), "solver found {a:?} for unsat {c}");
                prop_assert!(gen::eval(&c, &a));
                prop_assert!(holds(&c, &a));
                prop_assert_eq!(&a, &all[0]);
            }
            Err(SolveError::Unsat { .. }) => prop_assert!(all.is_empty(), "missed {:?} for {}", all[0], c),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn unsat_core_is_unsat(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = gen::registry(&mut rng);
        let items: Vec<C> = (0..4).map(|_| gen::constraint(&mut rng, &reg, 2, 6)).collect();
        if let Err(SolveError::Unsat { core }) = solve_items(&items, &[], &reg) {
            let sub: Vec<C> = core.iter().map(|i| items[*i].clone()).collect();
            prop_assert!(solve_items(&sub, &[], &reg).is_err());
        }
    }
}
