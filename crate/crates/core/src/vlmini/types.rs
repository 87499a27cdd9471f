use std::collections::BTreeSet;
use std::fmt;

use crate::version::{Resource, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Type,
    Labels,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Type => write!(f, "Type"),
            Kind::Labels => write!(f, "Labels"),
        }
    }
}

/// Built-in type constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TyCon {
    Pair,
    List,
}

impl TyCon {
    pub fn arity(self) -> usize {
        match self {
            TyCon::Pair => 2,
            TyCon::List => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Var(Var),
    Arrow(Box<Type>, Box<Type>),
    /// □_r A
    Box(Resource, Box<Type>),
    Con(TyCon, Vec<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn boxed(r: Resource, a: Type) -> Type {
        Type::Box(r, Box::new(a))
    }

    pub fn list(a: Type) -> Type {
        Type::Con(TyCon::List, vec![a])
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Con(TyCon::Pair, vec![a, b])
    }

    /// Free type variables (kind Type).
    pub fn type_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, &mut BTreeSet::new());
        out
    }

    /// Free resource variables (kind Labels) in box positions.
    pub fn resource_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_vars(&self, tys: &mut BTreeSet<Var>, res: &mut BTreeSet<Var>) {
        match self {
            Type::Int => {}
            Type::Var(v) => {
                tys.insert(*v);
            }
            Type::Arrow(a, b) => {
                a.collect_vars(tys, res);
                b.collect_vars(tys, res);
            }
            Type::Box(r, a) => {
                res.extend(r.vars());
                a.collect_vars(tys, res);
            }
            Type::Con(_, args) => args.iter().for_each(|a| a.collect_vars(tys, res)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Int => true,
            Type::Var(_) => false,
            Type::Arrow(a, b) => a.is_ground() && b.is_ground(),
            Type::Box(r, a) => r.is_ground() && a.is_ground(),
            Type::Con(_, args) => args.iter().all(Type::is_ground),
        }
    }

    /// Removes every box layer.
    pub fn erase(&self) -> Type {
        match self {
            Type::Int | Type::Var(_) => self.clone(),
            Type::Arrow(a, b) => Type::arrow(a.erase(), b.erase()),
            Type::Box(_, a) => a.erase(),
            Type::Con(k, args) => Type::Con(*k, args.iter().map(Type::erase).collect()),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Type::Int => write!(f, "Int"),
            Type::Var(v) => write!(f, "{v}"),
            Type::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " → ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Type::Box(r, a) => {
                match r {
                    Resource::Var(_) | Resource::Bottom => write!(f, "□_{r} ")?,
                    _ => write!(f, "□_({r}) ")?,
                }
                a.fmt_prec(f, 2)
            }
            Type::Con(TyCon::Pair, args) => {
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                write!(f, ")")
            }
            Type::Con(TyCon::List, args) => {
                write!(f, "[")?;
                args[0].fmt_prec(f, 0)?;
                write!(f, "]")
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
