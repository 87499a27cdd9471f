use std::collections::BTreeSet;
use std::fmt;

use super::types::Type;
use crate::version::{PartialLabel, Var};

/// Dependency constraints C.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DependencyConstraint {
    Top,
    And(Box<DependencyConstraint>, Box<DependencyConstraint>),
    Or(Box<DependencyConstraint>, Box<DependencyConstraint>),
    /// α ⪯ α'
    VarDep(Var, Var),
    /// α ⪯ D
    LabelDep(Var, PartialLabel),
}

use DependencyConstraint as C;

impl DependencyConstraint {
    /// C1 ∧ C2, dropping ⊤ operands.
    pub fn and(self, other: C) -> C {
        match (self, other) {
            (C::Top, c) | (c, C::Top) => c,
            (a, b) => C::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(self, other: C) -> C {
        C::Or(Box::new(self), Box::new(other))
    }

    /// Balanced conjunction so that very long conjunctions stay shallow.
    pub fn and_all<I: IntoIterator<Item = C>>(items: I) -> C {
        let items: Vec<C> = items.into_iter().filter(|c| *c != C::Top).collect();
        balanced(items, C::Top, |a, b| C::And(Box::new(a), Box::new(b)))
    }

    /// Balanced disjunction. The empty disjunction is not expressible; it
    /// is never requested by callers, and ⊤ is returned for it.
    pub fn or_all<I: IntoIterator<Item = C>>(items: I) -> C {
        balanced(items.into_iter().collect(), C::Top, |a, b| C::Or(Box::new(a), Box::new(b)))
    }

    /// Top-level conjuncts, flattening nested ∧ and dropping ⊤.
    pub fn conjuncts(&self) -> Vec<&C> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            match c {
                C::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                C::Top => {}
                _ => out.push(c),
            }
        }
        out
    }

    /// Top-level disjuncts, flattening nested ∨.
    pub fn disjuncts(&self) -> Vec<&C> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            match c {
                C::Or(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => out.push(c),
            }
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| match c {
            C::VarDep(a, b) => {
                out.insert(*a);
                out.insert(*b);
            }
            C::LabelDep(a, _) => {
                out.insert(*a);
            }
            _ => {}
        });
        out
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a C)) {
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            f(c);
            if let C::And(a, b) | C::Or(a, b) = c {
                stack.push(b);
                stack.push(a);
            }
        }
    }

    /// Renames variables.
    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> C {
        match self {
            C::Top => C::Top,
            C::And(a, b) => C::And(Box::new(a.rename(f)), Box::new(b.rename(f))),
            C::Or(a, b) => C::Or(Box::new(a.rename(f)), Box::new(b.rename(f))),
            C::VarDep(a, b) => C::VarDep(f(*a), f(*b)),
            C::LabelDep(a, d) => C::LabelDep(f(*a), d.clone()),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            C::Top => write!(f, "⊤"),
            C::VarDep(a, b) => write!(f, "{a} ⪯ {b}"),
            C::LabelDep(a, d) => write!(f, "{a} ⪯ {d}"),
            C::And(..) => {
                if prec > 2 {
                    write!(f, "(")?;
                }
                for (i, c) in self.conjuncts().into_iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∧ ")?;
                    }
                    c.fmt_prec(f, 3)?;
                }
                if prec > 2 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            C::Or(..) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                for (i, c) in self.disjuncts().into_iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∨ ")?;
                    }
                    c.fmt_prec(f, 2)?;
                }
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

fn balanced(mut items: Vec<C>, empty: C, join: impl Fn(C, C) -> C + Copy) -> C {
    fn go(items: &mut Vec<C>, lo: usize, hi: usize, join: &impl Fn(C, C) -> C) -> C {
        if hi - lo == 1 {
            return std::mem::replace(&mut items[lo], C::Top);
        }
        let mid = lo + (hi - lo) / 2;
        let a = go(items, lo, mid, join);
        let b = go(items, mid, hi, join);
        join(a, b)
    }
    if items.is_empty() {
        return empty;
    }
    let n = items.len();
    go(&mut items, 0, n, &join)
}

impl fmt::Display for DependencyConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Type constraints Θ: a conjunction of equations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeConstraint {
    pub equations: Vec<(Type, Type)>,
}

impl TypeConstraint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(a: Type, b: Type) -> Self {
        TypeConstraint { equations: vec![(a, b)] }
    }

    pub fn push(&mut self, a: Type, b: Type) {
        self.equations.push((a, b));
    }

    pub fn extend(&mut self, other: TypeConstraint) {
        self.equations.extend(other.equations);
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }
}

impl fmt::Display for TypeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equations.is_empty() {
            return write!(f, "⊤");
        }
        for (i, (a, b)) in self.equations.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{{{a} ∼ {b}}}")?;
        }
        Ok(())
    }
}
