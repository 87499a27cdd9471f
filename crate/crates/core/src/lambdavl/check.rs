//! Declarative λVL typing as a decision procedure.
//!
//! Types are reconstructed by unification, which is exact since λVL has no
//! subtyping on types. Resources left open by the expected type (promotion
//! and binder grades) are then enumerated over ⊥ and every set of labels
//! mentioned by the judgment. For each choice the minimal grade each
//! variable needs is computed bottom-up: dereliction gives ∅, promotion
//! scales, splitting adds, and sub/weak close the result upward.

use std::collections::{BTreeMap, BTreeSet};

use crate::version::{grade_add, grade_mul, res_leq, Resource, Var, VersionLabel};
use crate::vlmini::{Assumption, Type, TypeEnv};

use super::{LPattern, LTerm};

/// Upper bound on resource choices tried per judgment.
const SEARCH_LIMIT: usize = 2_000_000;

#[derive(Default)]
struct Shapes {
    next: u32,
    tys: BTreeMap<Var, Type>,
    res: BTreeMap<Var, Resource>,
    slots: Vec<Resource>,
}

impl Shapes {
    fn fresh(&mut self) -> Var {
        self.next += 1;
        Var(self.next - 1)
    }

    fn fresh_ty(&mut self) -> Type {
        Type::Var(self.fresh())
    }

    fn slot(&mut self) -> Resource {
        let r = Resource::Var(self.fresh());
        self.slots.push(r.clone());
        r
    }

    fn walk_r(&self, r: &Resource) -> Resource {
        let mut r = r.clone();
        while let Resource::Var(v) = r {
            match self.res.get(&v) {
                Some(next) => r = next.clone(),
                None => break,
            }
        }
        r
    }

    fn walk_t(&self, t: &Type) -> Type {
        let mut t = t.clone();
        while let Type::Var(v) = t {
            match self.tys.get(&v) {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Type) -> Type {
        match self.walk_t(t) {
            Type::Arrow(a, b) => Type::arrow(self.resolve(&a), self.resolve(&b)),
            Type::Box(r, a) => Type::boxed(self.walk_r(&r), self.resolve(&a)),
            Type::Con(k, xs) => Type::Con(k, xs.iter().map(|x| self.resolve(x)).collect()),
            other => other,
        }
    }

    fn occurs(&self, v: Var, t: &Type) -> bool {
        match self.walk_t(t) {
            Type::Var(w) => w == v,
            Type::Int => false,
            Type::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            Type::Box(_, a) => self.occurs(v, &a),
            Type::Con(_, xs) => xs.iter().any(|x| self.occurs(v, x)),
        }
    }

    fn unify_r(&mut self, a: &Resource, b: &Resource) -> bool {
        let (a, b) = (self.walk_r(a), self.walk_r(b));
        match (&a, &b) {
            _ if a == b => true,
            (Resource::Var(v), _) => {
                self.res.insert(*v, b);
                true
            }
            (_, Resource::Var(v)) => {
                self.res.insert(*v, a);
                true
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &Type, b: &Type) -> bool {
        let (a, b) = (self.walk_t(a), self.walk_t(b));
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => true,
            (Type::Var(v), t) | (t, Type::Var(v)) => {
                if self.occurs(*v, t) {
                    return false;
                }
                self.tys.insert(*v, t.clone());
                true
            }
            (Type::Int, Type::Int) => true,
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            (Type::Box(r1, a1), Type::Box(r2, a2)) => self.unify_r(r1, r2) && self.unify(a1, a2),
            (Type::Con(k1, x1), Type::Con(k2, x2)) => {
                k1 == k2 && x1.len() == x2.len() && x1.iter().zip(x2).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    /// Type shape of `t`; slots are allocated in pre-order.
    fn shape(&mut self, t: &LTerm, scope: &mut Vec<(String, Type)>) -> Option<Type> {
        match t {
            LTerm::Int(_) => Some(Type::Int),
            LTerm::Var(x) => scope.iter().rev().find(|(y, _)| y == x).map(|(_, a)| a.clone()),
            LTerm::App(f, a) => {
                let tf = self.shape(f, scope)?;
                let ta = self.shape(a, scope)?;
                let b = self.fresh_ty();
                self.unify(&tf, &Type::arrow(ta, b.clone())).then_some(b)
            }
            LTerm::Lam(LPattern::Var(x), body) => {
                let a = self.fresh_ty();
                scope.push((x.clone(), a.clone()));
                let tb = self.shape(body, scope);
                scope.pop();
                Some(Type::arrow(a, tb?))
            }
            LTerm::Lam(LPattern::Box(x), body) => {
                let r = self.slot();
                let a = self.fresh_ty();
                scope.push((x.clone(), a.clone()));
                let tb = self.shape(body, scope);
                scope.pop();
                Some(Type::arrow(Type::boxed(r, a), tb?))
            }
            LTerm::CLet(x, t1, t2) => {
                let r = self.slot();
                let a = self.fresh_ty();
                let t1 = self.shape(t1, scope)?;
                if !self.unify(&t1, &Type::boxed(r, a.clone())) {
                    return None;
                }
                scope.push((x.clone(), a));
                let tb = self.shape(t2, scope);
                scope.pop();
                tb
            }
            LTerm::Promote(body) => {
                let r = self.slot();
                Some(Type::boxed(r, self.shape(body, scope)?))
            }
            LTerm::Extract(u, _) => {
                let r = self.slot();
                let a = self.fresh_ty();
                let tu = self.shape(u, scope)?;
                self.unify(&tu, &Type::boxed(r, a.clone())).then_some(a)
            }
            LTerm::VRecord(m) | LTerm::VRecordAt(m, _) => {
                let a = self.fresh_ty();
                for t in m.values() {
                    let ti = self.shape(t, scope)?;
                    if !self.unify(&ti, &a) {
                        return None;
                    }
                }
                if let LTerm::VRecord(_) = t {
                    Some(Type::boxed(Resource::labels(m.keys().cloned()), a))
                } else {
                    Some(a)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Need {
    Linear,
    Graded(Resource),
}

type Needs = BTreeMap<String, Need>;

fn sum(mut a: Needs, b: Needs) -> Option<Needs> {
    for (x, n) in b {
        let merged = match (a.remove(&x), n) {
            (None, n) => n,
            (Some(Need::Graded(r)), Need::Graded(s)) => Need::Graded(grade_add(&r, &s)),
            _ => return None,
        };
        a.insert(x, merged);
    }
    Some(a)
}

fn scale(r: &Resource, n: Needs) -> Option<Needs> {
    n.into_iter()
        .map(|(x, need)| match need {
            Need::Graded(s) => Some((x, Need::Graded(grade_mul(r, &s)))),
            Need::Linear => None,
        })
        .collect()
}

fn leq(a: &Resource, b: &Resource) -> bool {
    res_leq(a, b).unwrap_or(false)
}

/// Graded binder of grade `r`: an unused variable is weakened, a used one
/// must need no more than `r`.
fn bind_graded(n: &mut Needs, x: &str, r: &Resource) -> bool {
    match n.remove(x) {
        None => true,
        Some(Need::Graded(s)) => leq(&s, r),
        Some(Need::Linear) => false,
    }
}

/// Minimal usage of `t` under ground slot resources. `scope` marks each
/// variable as linear (`false`) or graded (`true`).
fn needs(t: &LTerm, slots: &mut std::slice::Iter<'_, Resource>, scope: &mut Vec<(String, bool)>) -> Option<Needs> {
    match t {
        LTerm::Int(_) => Some(Needs::new()),
        LTerm::Var(x) => {
            let graded = scope.iter().rev().find(|(y, _)| y == x)?.1;
            let need = if graded { Need::Graded(Resource::unit()) } else { Need::Linear };
            Some([(x.clone(), need)].into_iter().collect())
        }
        LTerm::App(a, b) => {
            let na = needs(a, slots, scope)?;
            sum(na, needs(b, slots, scope)?)
        }
        LTerm::Lam(LPattern::Var(x), body) => {
            scope.push((x.clone(), false));
            let n = needs(body, slots, scope);
            scope.pop();
            let mut n = n?;
            (n.remove(x) == Some(Need::Linear)).then_some(n)
        }
        LTerm::Lam(LPattern::Box(x), body) => {
            let r = slots.next()?.clone();
            scope.push((x.clone(), true));
            let n = needs(body, slots, scope);
            scope.pop();
            let mut n = n?;
            bind_graded(&mut n, x, &r).then_some(n)
        }
        LTerm::CLet(x, t1, t2) => {
            let r = slots.next()?.clone();
            let n1 = needs(t1, slots, scope)?;
            scope.push((x.clone(), true));
            let n2 = needs(t2, slots, scope);
            scope.pop();
            let mut n2 = n2?;
            if !bind_graded(&mut n2, x, &r) {
                return None;
            }
            sum(n1, n2)
        }
        LTerm::Promote(body) => {
            let r = slots.next()?.clone();
            scale(&r, needs(body, slots, scope)?)
        }
        LTerm::Extract(u, l) => {
            let r = slots.next()?.clone();
            match &r {
                Resource::Labels(ls) if ls.contains(l) => needs(u, slots, scope),
                _ => None,
            }
        }
        LTerm::VRecord(m) | LTerm::VRecordAt(m, _) => {
            if let LTerm::VRecordAt(_, k) = t {
                if !m.contains_key(k) {
                    return None;
                }
            }
            let mut acc = Needs::new();
            for (l, ti) in m {
                let n = scale(&Resource::labels([l.clone()]), needs(ti, slots, scope)?)?;
                acc = sum(acc, n)?;
            }
            Some(acc)
        }
    }
}

/// Whether the available context covers the computed needs.
fn covers(gamma: &TypeEnv, n: &Needs) -> bool {
    if n.keys().any(|x| gamma.get(x).is_none()) {
        return false;
    }
    gamma.iter().all(|a| match (a, n.get(a.name())) {
        (Assumption::Linear(..), need) => need == Some(&Need::Linear),
        (Assumption::Graded(..), None) => true,
        (Assumption::Graded(_, _, r), Some(Need::Graded(s))) => leq(s, r),
        (Assumption::Graded(_, _, r), Some(Need::Linear)) => leq(&Resource::unit(), r),
    })
}

fn labels_of_resource(r: &Resource, out: &mut BTreeSet<VersionLabel>) {
    if let Resource::Labels(ls) = r {
        out.extend(ls.iter().cloned());
    }
}

fn labels_of_type(t: &Type, out: &mut BTreeSet<VersionLabel>) {
    match t {
        Type::Int | Type::Var(_) => {}
        Type::Arrow(a, b) => {
            labels_of_type(a, out);
            labels_of_type(b, out);
        }
        Type::Box(r, a) => {
            labels_of_resource(r, out);
            labels_of_type(a, out);
        }
        Type::Con(_, xs) => xs.iter().for_each(|x| labels_of_type(x, out)),
    }
}

fn labels_of_term(t: &LTerm, out: &mut BTreeSet<VersionLabel>) {
    match t {
        LTerm::Int(_) | LTerm::Var(_) => {}
        LTerm::App(a, b) | LTerm::CLet(_, a, b) => {
            labels_of_term(a, out);
            labels_of_term(b, out);
        }
        LTerm::Lam(_, b) | LTerm::Promote(b) => labels_of_term(b, out),
        LTerm::Extract(u, l) => {
            out.insert(l.clone());
            labels_of_term(u, out);
        }
        LTerm::VRecord(m) | LTerm::VRecordAt(m, _) => {
            for (l, ti) in m {
                out.insert(l.clone());
                labels_of_term(ti, out);
            }
            if let LTerm::VRecordAt(_, k) = t {
                out.insert(k.clone());
            }
        }
    }
}

/// ⊥ and every subset of `labels`.
fn candidates(labels: &BTreeSet<VersionLabel>) -> Vec<Resource> {
    let ls: Vec<&VersionLabel> = labels.iter().collect();
    let mut out = vec![Resource::Bottom];
    for mask in 0u32..(1 << ls.len()) {
        out.push(Resource::labels((0..ls.len()).filter(|i| mask & (1 << i) != 0).map(|i| ls[i].clone())));
    }
    out
}

/// Searches resource choices for the open slots; returns the resolved
/// type of the first choice under which the usage fits `gamma`.
fn search(gamma: &TypeEnv, t: &LTerm, expected: Option<&Type>) -> Option<Type> {
    let mut sh = Shapes { next: first_free(gamma, expected), ..Default::default() };
    let mut scope: Vec<(String, Type)> = gamma.iter().map(|a| (a.name().to_string(), a.ty().clone())).collect();
    let ty = sh.shape(t, &mut scope)?;
    if let Some(a) = expected {
        if !sh.unify(&ty, a) {
            return None;
        }
    }
    let slots: Vec<Resource> = sh.slots.iter().map(|r| sh.walk_r(r)).collect();
    let open: Vec<Var> = slots
        .iter()
        .filter_map(|r| match r {
            Resource::Var(v) => Some(*v),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut labels = BTreeSet::new();
    for a in gamma.iter() {
        labels_of_type(a.ty(), &mut labels);
        if let Some(r) = a.grade() {
            labels_of_resource(r, &mut labels);
        }
    }
    if let Some(a) = expected {
        labels_of_type(a, &mut labels);
    }
    labels_of_term(t, &mut labels);
    slots.iter().for_each(|r| labels_of_resource(r, &mut labels));
    let cands = candidates(&labels);
    if (cands.len() as f64).powi(open.len() as i32) > SEARCH_LIMIT as f64 {
        return None;
    }
    let base_scope: Vec<(String, bool)> =
        gamma.iter().map(|a| (a.name().to_string(), matches!(a, Assumption::Graded(..)))).collect();
    let mut choice = vec![0usize; open.len()];
    loop {
        let env: BTreeMap<Var, &Resource> = open.iter().zip(&choice).map(|(v, i)| (*v, &cands[*i])).collect();
        let ground: Vec<Resource> = slots
            .iter()
            .map(|r| match r {
                Resource::Var(v) => env[v].clone(),
                other => other.clone(),
            })
            .collect();
        let mut scope = base_scope.clone();
        if let Some(n) = needs(t, &mut ground.iter(), &mut scope) {
            if covers(gamma, &n) {
                return Some(ground_type(&sh.resolve(&ty), &env));
            }
        }
        // Next choice in odometer order.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < cands.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Remaining type variables become Int; remaining grades take the chosen
/// resource.
fn ground_type(t: &Type, env: &BTreeMap<Var, &Resource>) -> Type {
    match t {
        Type::Int | Type::Var(_) => Type::Int,
        Type::Arrow(a, b) => Type::arrow(ground_type(a, env), ground_type(b, env)),
        Type::Box(r, a) => {
            let r = match r {
                Resource::Var(v) => env.get(v).map_or(Resource::Bottom, |r| (*r).clone()),
                other => other.clone(),
            };
            Type::boxed(r, ground_type(a, env))
        }
        Type::Con(k, xs) => Type::Con(*k, xs.iter().map(|x| ground_type(x, env)).collect()),
    }
}

fn first_free(gamma: &TypeEnv, expected: Option<&Type>) -> u32 {
    let mut m = 0;
    let mut note = |t: &Type| {
        for v in t.type_vars().into_iter().chain(t.resource_vars()) {
            m = m.max(v.0 + 1);
        }
    };
    gamma.iter().for_each(|a| note(a.ty()));
    if let Some(a) = expected {
        note(a);
    }
    m
}

/// Γ ⊢ t : A in the declarative system. Γ and A must be ground.
pub fn check_declarative(gamma: &TypeEnv, t: &LTerm, a: &Type) -> bool {
    search(gamma, t, Some(a)).is_some()
}

/// Some ground type A with Γ ⊢ t : A, if the search finds one.
pub fn synth_declarative(gamma: &TypeEnv, t: &LTerm) -> Option<Type> {
    search(gamma, t, None)
}
