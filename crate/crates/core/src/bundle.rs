//! Bundling: merges the interfaces inferred for each version of a module
//! into one interface whose constraints disjoin over the versions.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::version::{ModuleName, PartialLabel, Resource, Var, Version};
use crate::vlmini::{DependencyConstraint as C, Kind, KindContext, Type};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("`{symbol}` has incompatible types across versions {}", versions.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
    ErasedTypeMismatch { symbol: String, versions: Vec<Version> },
    #[error("no interfaces to bundle for module {0}")]
    Empty(ModuleName),
}

/// Interface of one module version: symbol to (type, constraint). The
/// constraint of each entry is self-contained: it includes everything the
/// symbol's definition depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct VersionedInterface {
    pub module: ModuleName,
    pub version: Version,
    pub entries: BTreeMap<String, (Type, C)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundledEntry {
    pub ty: Type,
    /// One disjunct per defining version.
    pub select: C,
    /// Conjunction of the per-version constraints.
    pub carried: C,
    pub versions: Vec<Version>,
}

impl BundledEntry {
    /// The full constraint an occurrence of this symbol contributes.
    pub fn constraint(&self) -> C {
        self.carried.clone().and(self.select.clone())
    }

    /// The resource variable of the outermost box.
    pub fn outer(&self) -> Option<Var> {
        match &self.ty {
            Type::Box(Resource::Var(g), _) => Some(*g),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundledInterface {
    pub module: ModuleName,
    pub entries: BTreeMap<String, BundledEntry>,
}

impl BundledInterface {
    pub fn get(&self, symbol: &str) -> Option<&BundledEntry> {
        self.entries.get(symbol)
    }
}

impl fmt::Display for BundledInterface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in &self.entries {
            writeln!(f, "{}.{name} : {} | {}", self.module, e.ty, e.constraint())?;
        }
        Ok(())
    }
}

/// True iff the types are equal once every box is removed.
pub fn erased_equal(a: &Type, b: &Type) -> bool {
    a.erase() == b.erase()
}

/// Equality up to a consistent renaming of type variables and of box
/// grades. Bundling needs this stronger check: the bundled type mirrors
/// the box structure, so each version must have a box at every position.
fn same_shape(a: &Type, b: &Type, tys: &mut BTreeMap<Var, Var>) -> bool {
    match (a, b) {
        (Type::Int, Type::Int) => true,
        (Type::Var(x), Type::Var(y)) => *tys.entry(*x).or_insert(*y) == *y,
        (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => same_shape(a1, a2, tys) && same_shape(b1, b2, tys),
        (Type::Box(_, a1), Type::Box(_, a2)) => same_shape(a1, a2, tys),
        (Type::Con(k1, as1), Type::Con(k2, as2)) => {
            k1 == k2 && as1.len() == as2.len() && as1.iter().zip(as2).all(|(x, y)| same_shape(x, y, tys))
        }
        _ => false,
    }
}

/// Box grades in pre-order (outer box first, then left to right).
fn grades(a: &Type, out: &mut Vec<Resource>) {
    match a {
        Type::Int | Type::Var(_) => {}
        Type::Arrow(x, y) => {
            grades(x, out);
            grades(y, out);
        }
        Type::Box(r, x) => {
            out.push(r.clone());
            grades(x, out);
        }
        Type::Con(_, xs) => xs.iter().for_each(|x| grades(x, out)),
    }
}

/// Copy of `a` with a fresh resource variable on every box and fresh type
/// variables; the fresh grades are returned in pre-order.
fn rebox(sigma: &mut KindContext, a: &Type, tys: &mut BTreeMap<Var, Type>, gammas: &mut Vec<Var>) -> Type {
    match a {
        Type::Int => Type::Int,
        Type::Var(v) => tys.entry(*v).or_insert_with(|| sigma.fresh_type()).clone(),
        Type::Arrow(x, y) => {
            let x = rebox(sigma, x, tys, gammas);
            Type::arrow(x, rebox(sigma, y, tys, gammas))
        }
        Type::Box(_, x) => {
            let g = sigma.fresh(Kind::Labels);
            gammas.push(g);
            Type::boxed(Resource::Var(g), rebox(sigma, x, tys, gammas))
        }
        Type::Con(k, xs) => Type::Con(*k, xs.iter().map(|x| rebox(sigma, x, tys, gammas)).collect()),
    }
}

pub fn bundle(
    sigma: &mut KindContext,
    module: &str,
    interfaces: &[VersionedInterface],
) -> Result<BundledInterface, BundleError> {
    if interfaces.is_empty() {
        return Err(BundleError::Empty(module.to_string()));
    }
    let mut by_symbol: BTreeMap<&str, Vec<(&Version, &Type, &C)>> = BTreeMap::new();
    for iface in interfaces {
        for (name, (ty, c)) in &iface.entries {
            by_symbol.entry(name).or_default().push((&iface.version, ty, c));
        }
    }
    let mut entries = BTreeMap::new();
    for (symbol, defs) in by_symbol {
        let (_, base, _) = defs[0];
        if defs.iter().any(|(_, ty, _)| !same_shape(base, ty, &mut BTreeMap::new())) {
            return Err(BundleError::ErasedTypeMismatch {
                symbol: symbol.to_string(),
                versions: defs.iter().map(|(v, _, _)| (*v).clone()).collect(),
            });
        }
        let mut gammas = Vec::new();
        let ty = rebox(sigma, base, &mut BTreeMap::new(), &mut gammas);
        let mut disjuncts = Vec::new();
        for (v, vty, _) in &defs {
            let mut alphas = Vec::new();
            grades(vty, &mut alphas);
            let mut parts = Vec::new();
            if let Some(g0) = gammas.first() {
                parts.push(C::LabelDep(*g0, PartialLabel::single(module, (*v).clone())));
            }
            for (g, a) in gammas.iter().zip(&alphas) {
                match a {
                    Resource::Var(a) => parts.push(C::VarDep(*g, *a)),
                    other => panic!("interface type carries a non-variable grade {other}"),
                }
            }
            disjuncts.push(C::and_all(parts));
        }
        entries.insert(
            symbol.to_string(),
            BundledEntry {
                ty,
                select: C::or_all(disjuncts),
                carried: C::and_all(defs.iter().map(|(_, _, c)| (*c).clone())),
                versions: defs.iter().map(|(v, _, _)| (*v).clone()).collect(),
            },
        );
    }
    Ok(BundledInterface { module: module.to_string(), entries })
}
