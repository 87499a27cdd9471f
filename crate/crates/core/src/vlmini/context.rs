use std::collections::BTreeMap;
use std::fmt;

use super::types::{Kind, Type};
use super::VlminiError;
use crate::version::{grade_add, grade_mul, Resource, Var};

/// Kind context Σ. Variables are numbered densely in creation order, so the
/// context doubles as the fresh-name supply of an inference session.
#[derive(Debug, Clone, Default)]
pub struct KindContext {
    kinds: Vec<Kind>,
}

impl KindContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, kind: Kind) -> Var {
        let v = Var(self.kinds.len() as u32);
        self.kinds.push(kind);
        v
    }

    pub fn fresh_type(&mut self) -> Type {
        Type::Var(self.fresh(Kind::Type))
    }

    pub fn fresh_resource(&mut self) -> Resource {
        Resource::Var(self.fresh(Kind::Labels))
    }

    pub fn kind(&self, v: Var) -> Option<Kind> {
        self.kinds.get(v.0 as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Every variable of kind Labels, in creation order.
    pub fn resource_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.kinds.iter().enumerate().filter(|(_, k)| **k == Kind::Labels).map(|(i, _)| Var(i as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assumption {
    Linear(String, Type),
    Graded(String, Type, Resource),
}

impl Assumption {
    pub fn name(&self) -> &str {
        match self {
            Assumption::Linear(x, _) | Assumption::Graded(x, _, _) => x,
        }
    }

    pub fn ty(&self) -> &Type {
        match self {
            Assumption::Linear(_, a) | Assumption::Graded(_, a, _) => a,
        }
    }

    pub fn grade(&self) -> Option<&Resource> {
        match self {
            Assumption::Linear(..) => None,
            Assumption::Graded(_, _, r) => Some(r),
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::Linear(x, a) => write!(f, "{x} : {a}"),
            Assumption::Graded(x, a, r) => write!(f, "{x} : [{a}]_{r}"),
        }
    }
}

/// Typing context Γ: assumptions in insertion order with unique names.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    entries: Vec<Assumption>,
}

impl PartialEq for TypeEnv {
    /// Order-insensitive.
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.entries.iter().all(|a| other.get(a.name()) == Some(a))
    }
}

impl Eq for TypeEnv {}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_assumptions<I: IntoIterator<Item = Assumption>>(items: I) -> Result<Self, VlminiError> {
        let mut env = TypeEnv::new();
        for a in items {
            env.push(a)?;
        }
        Ok(env)
    }

    pub fn push(&mut self, a: Assumption) -> Result<(), VlminiError> {
        if self.get(a.name()).is_some() {
            return Err(VlminiError::DuplicateAssumption(a.name().to_string()));
        }
        self.entries.push(a);
        Ok(())
    }

    /// Adds or shadows.
    pub fn insert(&mut self, a: Assumption) {
        self.remove(a.name());
        self.entries.push(a);
    }

    pub fn remove(&mut self, x: &str) -> Option<Assumption> {
        let i = self.entries.iter().position(|a| a.name() == x)?;
        Some(self.entries.remove(i))
    }

    pub fn get(&self, x: &str) -> Option<&Assumption> {
        self.entries.iter().find(|a| a.name() == x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assumption> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(Assumption::name)
    }

    /// Keeps only the assumptions whose name satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> TypeEnv {
        TypeEnv { entries: self.entries.iter().filter(|a| keep(a.name())).cloned().collect() }
    }

    /// Γ, Γ' with Γ' shadowing names of Γ.
    pub fn extend(&self, other: &TypeEnv) -> TypeEnv {
        let mut out = self.clone();
        for a in &other.entries {
            out.insert(a.clone());
        }
        out
    }

    pub fn map_types(&self, f: impl Fn(&Type) -> Type, g: impl Fn(&Resource) -> Resource) -> TypeEnv {
        TypeEnv {
            entries: self
                .entries
                .iter()
                .map(|a| match a {
                    Assumption::Linear(x, t) => Assumption::Linear(x.clone(), f(t)),
                    Assumption::Graded(x, t, r) => Assumption::Graded(x.clone(), f(t), g(r)),
                })
                .collect(),
        }
    }

    /// Graded-only contexts, the paper's [Γ].
    pub fn is_graded(&self) -> bool {
        self.entries.iter().all(|a| matches!(a, Assumption::Graded(..)))
    }

    /// Order-insensitive view for tests and diagnostics.
    pub fn as_map(&self) -> BTreeMap<&str, &Assumption> {
        self.entries.iter().map(|a| (a.name(), a)).collect()
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "∅");
        }
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Γ1 + Γ2. Grades may be symbolic; shared graded assumptions are merged
/// with ⊕.
pub fn ctx_concat(g1: &TypeEnv, g2: &TypeEnv) -> Result<TypeEnv, VlminiError> {
    let mut out = g1.clone();
    for b in &g2.entries {
        let Some(i) = out.entries.iter().position(|a| a.name() == b.name()) else {
            out.entries.push(b.clone());
            continue;
        };
        let merged = match (&out.entries[i], b) {
            (Assumption::Graded(x, a1, r1), Assumption::Graded(_, a2, r2)) => {
                if a1 != a2 {
                    return Err(VlminiError::TypeMismatch { var: x.clone(), left: a1.clone(), right: a2.clone() });
                }
                Assumption::Graded(x.clone(), a1.clone(), grade_add(r1, r2))
            }
            _ => return Err(VlminiError::LinearClash(b.name().to_string())),
        };
        out.entries[i] = merged;
    }
    Ok(out)
}

/// r · Γ for a graded-only Γ; every grade is multiplied by r with ⊗.
pub fn ctx_scale(r: &Resource, g: &TypeEnv) -> Result<TypeEnv, VlminiError> {
    let mut out = TypeEnv::new();
    for a in &g.entries {
        match a {
            Assumption::Graded(x, t, s) => out.entries.push(Assumption::Graded(x.clone(), t.clone(), grade_mul(r, s))),
            Assumption::Linear(x, _) => return Err(VlminiError::LinearInScaledContext(x.clone())),
        }
    }
    Ok(out)
}
