use std::collections::BTreeMap;
use std::fmt;

use super::constraint::{DependencyConstraint, TypeConstraint};
use super::context::TypeEnv;
use super::types::Type;
use super::VlminiError;
use crate::version::{grade_add, Resource, Var};

/// Type substitution θ. Type variables and resource variables live in
/// separate maps; a variable bound in one may not be bound in the other.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    types: BTreeMap<Var, Type>,
    resources: BTreeMap<Var, Resource>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.resources.is_empty()
    }

    pub fn len(&self) -> usize {
        self.types.len() + self.resources.len()
    }

    pub fn type_var(v: Var, a: Type) -> Self {
        let mut s = Substitution::new();
        s.types.insert(v, a);
        s
    }

    pub fn resource_var(v: Var, r: Resource) -> Self {
        let mut s = Substitution::new();
        s.resources.insert(v, r);
        s
    }

    pub fn bind_type(&mut self, v: Var, a: Type) -> Result<(), VlminiError> {
        if self.resources.contains_key(&v) {
            return Err(VlminiError::KindError(v));
        }
        self.types.insert(v, a);
        Ok(())
    }

    pub fn bind_resource(&mut self, v: Var, r: Resource) -> Result<(), VlminiError> {
        if self.types.contains_key(&v) {
            return Err(VlminiError::KindError(v));
        }
        self.resources.insert(v, r);
        Ok(())
    }

    pub fn get_type(&self, v: Var) -> Option<&Type> {
        self.types.get(&v)
    }

    pub fn get_resource(&self, v: Var) -> Option<&Resource> {
        self.resources.get(&v)
    }

    pub fn types(&self) -> impl Iterator<Item = (&Var, &Type)> {
        self.types.iter()
    }

    pub fn resources(&self) -> impl Iterator<Item = (&Var, &Resource)> {
        self.resources.iter()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.types.contains_key(&v) || self.resources.contains_key(&v)
    }

    /// θ \ α
    pub fn without(&self, v: Var) -> Substitution {
        let mut s = self.clone();
        s.types.remove(&v);
        s.resources.remove(&v);
        s
    }

    pub fn apply_resource(&self, r: &Resource) -> Resource {
        match r {
            Resource::Bottom | Resource::Labels(_) => r.clone(),
            Resource::Var(v) => self.resources.get(v).cloned().unwrap_or_else(|| r.clone()),
            Resource::Join(vs, ls) => vs
                .iter()
                .map(|v| self.apply_resource(&Resource::Var(*v)))
                .fold(Resource::Labels(ls.clone()), |acc, x| grade_add(&acc, &x)),
        }
    }

    pub fn apply_type(&self, a: &Type) -> Type {
        if self.is_empty() {
            return a.clone();
        }
        match a {
            Type::Int => Type::Int,
            Type::Var(v) => self.types.get(v).cloned().unwrap_or_else(|| a.clone()),
            Type::Arrow(x, y) => Type::arrow(self.apply_type(x), self.apply_type(y)),
            Type::Box(r, x) => Type::boxed(self.apply_resource(r), self.apply_type(x)),
            Type::Con(k, args) => Type::Con(*k, args.iter().map(|x| self.apply_type(x)).collect()),
        }
    }

    pub fn apply_env(&self, g: &TypeEnv) -> TypeEnv {
        g.map_types(|a| self.apply_type(a), |r| self.apply_resource(r))
    }

    pub fn apply_type_constraint(&self, th: &TypeConstraint) -> TypeConstraint {
        TypeConstraint {
            equations: th.equations.iter().map(|(a, b)| (self.apply_type(a), self.apply_type(b))).collect(),
        }
    }

    /// Dependency constraints only mention variables, so a resource variable
    /// may only be renamed to another variable here.
    pub fn apply_constraint(&self, c: &DependencyConstraint) -> Result<DependencyConstraint, VlminiError> {
        use DependencyConstraint as C;
        let var = |v: &Var| match self.resources.get(v) {
            None => Ok(*v),
            Some(Resource::Var(w)) => Ok(*w),
            Some(other) => Err(VlminiError::ConcreteResourceInConstraint(*v, other.clone())),
        };
        Ok(match c {
            C::Top => C::Top,
            C::And(a, b) => C::And(Box::new(self.apply_constraint(a)?), Box::new(self.apply_constraint(b)?)),
            C::Or(a, b) => C::Or(Box::new(self.apply_constraint(a)?), Box::new(self.apply_constraint(b)?)),
            C::VarDep(a, b) => C::VarDep(var(a)?, var(b)?),
            C::LabelDep(a, d) => C::LabelDep(var(a)?, d.clone()),
        })
    }

    /// Rewrites every image under θ itself until nothing changes, which
    /// makes θ idempotent. Fails when a variable would occur in its own image.
    pub fn normalize(mut self) -> Result<Substitution, VlminiError> {
        loop {
            let mut changed = false;
            let keys: Vec<Var> = self.resources.keys().copied().collect();
            for v in keys {
                let img = self.resources[&v].clone();
                let new = self.apply_resource(&img);
                if new == Resource::Var(v) {
                    self.resources.remove(&v);
                    changed = true;
                } else if new.vars().contains(&v) {
                    return Err(VlminiError::OccursCheck(v, new.to_string()));
                } else if new != img {
                    self.resources.insert(v, new);
                    changed = true;
                }
            }
            let keys: Vec<Var> = self.types.keys().copied().collect();
            for v in keys {
                let img = self.types[&v].clone();
                let new = self.apply_type(&img);
                if new == Type::Var(v) {
                    self.types.remove(&v);
                    changed = true;
                } else if new.type_vars().contains(&v) {
                    return Err(VlminiError::OccursCheck(v, new.to_string()));
                } else if new != img {
                    self.types.insert(v, new);
                    changed = true;
                }
            }
            if !changed {
                return Ok(self);
            }
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (v, a) in &self.types {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{v} ↦ {a}")?;
        }
        for (v, r) in &self.resources {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{v} ↦ {r}")?;
        }
        write!(f, "]")
    }
}

/// θ1 ⊎ θ2. When both bind α, their images are unified and the unifier is
/// folded in; otherwise the bindings are united. The result is normalized.
pub fn subst_compose(t1: &Substitution, t2: &Substitution) -> Result<Substitution, VlminiError> {
    let mut out = t2.clone();
    let mut extra = Vec::new();
    for (v, a) in &t1.types {
        match out.types.get(v).cloned() {
            Some(b) => {
                let th = unify_types(a, &b)?;
                out.types.insert(*v, a.clone());
                extra.push(th);
            }
            None => out.bind_type(*v, a.clone())?,
        }
    }
    for (v, r) in &t1.resources {
        match out.resources.get(v).cloned() {
            Some(s) => {
                let th = unify_resources(r, &s)?;
                out.resources.insert(*v, r.clone());
                extra.push(th);
            }
            None => out.bind_resource(*v, r.clone())?,
        }
    }
    for th in extra {
        out = subst_compose(&out, &th)?;
    }
    out.normalize()
}

/// Most general unifier of two types.
pub fn unify_types(a: &Type, b: &Type) -> Result<Substitution, VlminiError> {
    let mut s = Substitution::new();
    unify_into(&mut s, a, b)?;
    s.normalize()
}

/// Unifier of a list of equations, solved left to right.
pub fn unify_all(th: &TypeConstraint) -> Result<Substitution, VlminiError> {
    let mut s = Substitution::new();
    for (a, b) in &th.equations {
        unify_into(&mut s, a, b)?;
    }
    s.normalize()
}

pub fn unify_resources(r1: &Resource, r2: &Resource) -> Result<Substitution, VlminiError> {
    let mut s = Substitution::new();
    unify_res_into(&mut s, r1, r2)?;
    Ok(s)
}

/// Extends `s` so that it also unifies `a` and `b`. Images in `s` are kept
/// fully applied, so `s` stays idempotent throughout.
fn unify_into(s: &mut Substitution, a: &Type, b: &Type) -> Result<(), VlminiError> {
    let a = s.apply_type(a);
    let b = s.apply_type(b);
    match (&a, &b) {
        _ if a == b => Ok(()),
        (Type::Var(v), t) | (t, Type::Var(v)) => bind_type_var(s, *v, t),
        (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
            unify_into(s, a2, a1)?;
            unify_into(s, b1, b2)
        }
        (Type::Box(r1, a1), Type::Box(r2, a2)) => {
            unify_into(s, a1, a2)?;
            let r1 = s.apply_resource(r1);
            let r2 = s.apply_resource(r2);
            unify_res_into(s, &r1, &r2)
        }
        (Type::Con(k1, xs), Type::Con(k2, ys)) if k1 == k2 && xs.len() == ys.len() => {
            for (x, y) in xs.iter().zip(ys) {
                unify_into(s, x, y)?;
            }
            Ok(())
        }
        _ => Err(VlminiError::Mismatch(a.clone(), b.clone())),
    }
}

fn bind_type_var(s: &mut Substitution, v: Var, t: &Type) -> Result<(), VlminiError> {
    if t.type_vars().contains(&v) {
        return Err(VlminiError::OccursCheck(v, t.to_string()));
    }
    let single = Substitution::type_var(v, t.clone());
    for img in s.types.values_mut() {
        *img = single.apply_type(img);
    }
    s.bind_type(v, t.clone())
}

fn unify_res_into(s: &mut Substitution, r1: &Resource, r2: &Resource) -> Result<(), VlminiError> {
    let r1 = s.apply_resource(r1);
    let r2 = s.apply_resource(r2);
    if r1 == r2 {
        return Ok(());
    }
    let (v, r) = match (&r1, &r2) {
        (Resource::Var(v), r) | (r, Resource::Var(v)) => (*v, r.clone()),
        _ => return Err(VlminiError::ResourceMismatch(r1.clone(), r2.clone())),
    };
    if r.vars().contains(&v) {
        return Err(VlminiError::OccursCheck(v, r.to_string()));
    }
    let single = Substitution::resource_var(v, r.clone());
    for img in s.resources.values_mut() {
        *img = single.apply_resource(img);
    }
    for img in s.types.values_mut() {
        *img = single.apply_type(img);
    }
    s.bind_resource(v, r)
}
