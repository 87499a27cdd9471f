use std::collections::BTreeSet;

use proptest::prelude::*;
use vl_core::version::{label_universe, res_add, res_leq, res_mul, ModuleRegistry, Resource, Version, VersionLabel};

fn l(v: u64) -> VersionLabel {
    VersionLabel::new([("A", Version::new(v, 0, 0))])
}

fn set(vs: &[u64]) -> Resource {
    Resource::labels(vs.iter().map(|v| l(*v)))
}

/// ⊥ or any subset of a 4-label universe.
fn resource() -> impl Strategy<Value = Resource> {
    prop_oneof![
        1 => Just(Resource::Bottom),
        6 => (0u8..16).prop_map(|mask| Resource::labels((0..4).filter(|i| mask & (1 << i) != 0).map(|i| l(i + 1)))),
    ]
}

fn add(a: &Resource, b: &Resource) -> Resource {
    res_add(a, b).unwrap()
}

fn mul(a: &Resource, b: &Resource) -> Resource {
    res_mul(a, b).unwrap()
}

fn leq(a: &Resource, b: &Resource) -> bool {
    res_leq(a, b).unwrap()
}

#[test]
fn add_examples() {
    assert_eq!(add(&Resource::Bottom, &set(&[1])), set(&[1]));
    assert_eq!(add(&set(&[1]), &set(&[2])), set(&[1, 2]));
    assert_eq!(add(&set(&[1, 2]), &set(&[2])), set(&[1, 2]));
}

#[test]
fn mul_examples() {
    assert_eq!(mul(&Resource::Bottom, &set(&[1])), Resource::Bottom);
    assert_eq!(mul(&Resource::unit(), &set(&[1])), set(&[1]));
    assert_eq!(mul(&set(&[1]), &set(&[2])), set(&[1, 2]));
}

#[test]
fn leq_examples() {
    assert!(leq(&Resource::Bottom, &set(&[1])));
    assert!(leq(&set(&[1]), &set(&[1, 2])));
    assert!(!leq(&set(&[1, 2]), &set(&[1])));
    assert!(!leq(&set(&[1]), &Resource::Bottom));
}

#[test]
fn unit_is_not_bottom() {
    assert_ne!(Resource::unit(), Resource::Bottom);
    assert!(leq(&Resource::Bottom, &Resource::unit()));
}

#[test]
fn universe_of_hash_and_dir() {
    let reg = ModuleRegistry::parse(&[("Hash", &["1.0.0", "2.0.0"]), ("Dir", &["1.0.0"])]).unwrap();
    let u = label_universe(&reg).unwrap();
    let expected: BTreeSet<VersionLabel> = [
        VersionLabel::new([("Hash", Version::new(1, 0, 0)), ("Dir", Version::new(1, 0, 0))]),
        VersionLabel::new([("Hash", Version::new(2, 0, 0)), ("Dir", Version::new(1, 0, 0))]),
    ]
    .into_iter()
    .collect();
    assert_eq!(u, expected);
}

#[test]
fn universe_sizes() {
    let one = ModuleRegistry::parse(&[("A", &["1.0.0"])]).unwrap();
    assert_eq!(label_universe(&one).unwrap().len(), 1);
    let four = ModuleRegistry::parse(&[("A", &["1.0.0", "2.0.0"]), ("B", &["1.0.0", "2.0.0"])]).unwrap();
    assert_eq!(label_universe(&four).unwrap().len(), 4);
}

#[test]
fn versions_order_numerically() {
    let a: Version = "0.9.0".parse().unwrap();
    let b: Version = "0.15.0".parse().unwrap();
    assert!(a < b);
    assert_eq!(b.mangled(), "0_15_0");
    assert!("1.0".parse::<Version>().is_err());
    assert!("1.0.0-beta".parse::<Version>().is_err());
}

#[test]
fn registry_sorts_and_rejects_duplicates() {
    let reg = ModuleRegistry::parse(&[("M", &["2.0.0", "1.0.0"])]).unwrap();
    assert_eq!(reg.versions("M").unwrap(), &[Version::new(1, 0, 0), Version::new(2, 0, 0)]);
    assert_eq!(reg.newest("M"), Some(&Version::new(2, 0, 0)));
    assert!(ModuleRegistry::parse(&[("M", &["1.0.0", "1.0.0"])]).is_err());
}

#[test]
fn labels_are_canonical() {
    let a = VersionLabel::new([("B", Version::new(1, 0, 0)), ("A", Version::new(2, 0, 0))]);
    let b = VersionLabel::new([("A", Version::new(2, 0, 0)), ("B", Version::new(1, 0, 0))]);
    assert_eq!(a, b);
    assert_eq!(a.to_string(), b.to_string());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn add_is_a_commutative_monoid(a in resource(), b in resource(), c in resource()) {
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(add(&Resource::Bottom, &a), a.clone());
    }

    #[test]
    fn mul_is_a_monoid_with_absorbing_bottom(a in resource(), b in resource(), c in resource()) {
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
        prop_assert_eq!(mul(&Resource::unit(), &a), a.clone());
        prop_assert_eq!(mul(&a, &Resource::unit()), a.clone());
        prop_assert_eq!(mul(&Resource::Bottom, &a), Resource::Bottom);
        prop_assert_eq!(mul(&a, &Resource::Bottom), Resource::Bottom);
    }

    #[test]
    fn mul_distributes(a in resource(), b in resource(), c in resource()) {
        prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
        prop_assert_eq!(mul(&add(&a, &b), &c), add(&mul(&a, &c), &mul(&b, &c)));
    }

    #[test]
    fn leq_is_a_partial_order(a in resource(), b in resource(), c in resource()) {
        prop_assert!(leq(&a, &a));
        if leq(&a, &b) && leq(&b, &a) {
            prop_assert_eq!(&a, &b);
        }
        if leq(&a, &b) && leq(&b, &c) {
            prop_assert!(leq(&a, &c));
        }
    }

    #[test]
    fn add_is_least_upper_bound(a in resource(), b in resource(), c in resource()) {
        let s = add(&a, &b);
        prop_assert!(leq(&a, &s) && leq(&b, &s));
        if leq(&a, &c) && leq(&b, &c) {
            prop_assert!(leq(&s, &c));
        }
    }

    #[test]
    fn operations_are_monotone(a in resource(), b in resource(), c in resource()) {
        if leq(&a, &b) {
            prop_assert!(leq(&add(&a, &c), &add(&b, &c)));
            prop_assert!(leq(&mul(&a, &c), &mul(&b, &c)));
            prop_assert!(leq(&mul(&c, &a), &mul(&c, &b)));
        }
    }
}
