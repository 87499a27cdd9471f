//! Version specialization: turns a solved definition into a plain program
//! in which every reference names one concrete module version.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::driver::{Compilation, DefKey, Target};
use crate::girard::{reverse_translate, GirardError};
use crate::solver::Assignment;
use crate::surface::{pretty_module, Definition, Span, SurfaceModule, SurfaceTerm, TermKind};
use crate::version::{ModuleName, Var, Version};
use crate::vlmini::{Pattern, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodegenError {
    #[error("`{symbol}` is not defined in {module} {version}")]
    MissingDefinition { symbol: String, module: ModuleName, version: Version },
    #[error(transparent)]
    Girard(#[from] GirardError),
}

/// `mkHash` from Hash 1.0.0 becomes `mkHash__Hash__1_0_0`.
pub fn mangle(name: &str, module: &str, version: &Version) -> String {
    format!("{name}__{module}__{}", version.mangled())
}

/// Renames every free occurrence of a name accepted by `is_top` to a
/// unique `name#k` (k counts from 1 per name). Returns the new term and
/// the (fresh, original) pairs in order of appearance.
pub fn duplicate_externals(t: &Term, is_top: &dyn Fn(&str) -> bool) -> (Term, Vec<(String, String)>) {
    let mut d = Dup { is_top, counts: BTreeMap::new(), occs: Vec::new() };
    let out = d.go(t, &mut Vec::new());
    (out, d.occs)
}

struct Dup<'a> {
    is_top: &'a dyn Fn(&str) -> bool,
    counts: BTreeMap<String, usize>,
    occs: Vec<(String, String)>,
}

impl Dup<'_> {
    fn go(&mut self, t: &Term, bound: &mut Vec<String>) -> Term {
        match t {
            Term::Var(x) if !bound.contains(x) && (self.is_top)(x) => {
                let k = self.counts.entry(x.clone()).or_insert(0);
                *k += 1;
                let fresh = format!("{x}#{k}");
                self.occs.push((fresh.clone(), x.clone()));
                Term::Var(fresh)
            }
            Term::Int(_) | Term::Var(_) => t.clone(),
            Term::App(f, a) => {
                let f = self.go(f, bound);
                Term::app(f, self.go(a, bound))
            }
            Term::Lam(p, b) => Term::lam(p.clone(), scoped(p, bound, |bound| self.go(b, bound))),
            Term::Promote(b) => Term::promote(self.go(b, bound)),
            Term::Con(c, ts) => Term::Con(*c, ts.iter().map(|t| self.go(t, bound)).collect()),
            Term::Case(s, bs) => {
                let s = self.go(s, bound);
                let bs = bs.iter().map(|(p, b)| (p.clone(), scoped(p, bound, |bound| self.go(b, bound)))).collect();
                Term::Case(Box::new(s), bs)
            }
            Term::VerOf(l, b) => Term::VerOf(l.clone(), Box::new(self.go(b, bound))),
            Term::Unversion(b) => Term::Unversion(Box::new(self.go(b, bound))),
        }
    }
}

fn scoped<R>(p: &Pattern, bound: &mut Vec<String>, f: impl FnOnce(&mut Vec<String>) -> R) -> R {
    let n = bound.len();
    bound.extend(p.binders().into_iter().map(String::from));
    let r = f(bound);
    bound.truncate(n);
    r
}

/// Substitutes names for free variables. Occurrence names contain `#`, so
/// no binder can capture them.
fn rename_vars(t: &Term, map: &BTreeMap<String, String>) -> Term {
    let go = |t: &Term| rename_vars(t, map);
    match t {
        Term::Var(x) => Term::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
        Term::Int(_) => t.clone(),
        Term::App(f, a) => Term::app(go(f), go(a)),
        Term::Lam(p, b) => Term::lam(p.clone(), go(b)),
        Term::Promote(b) => Term::promote(go(b)),
        Term::Con(c, ts) => Term::Con(*c, ts.iter().map(go).collect()),
        Term::Case(s, bs) => Term::Case(Box::new(go(s)), bs.iter().map(|(p, b)| (p.clone(), go(b))).collect()),
        Term::VerOf(l, b) => Term::VerOf(l.clone(), Box::new(go(b))),
        Term::Unversion(b) => Term::Unversion(Box::new(go(b))),
    }
}

/// Drops `ver` and `unversion`, which have no run-time effect once every
/// reference is resolved.
pub fn strip_versioning(t: &SurfaceTerm) -> SurfaceTerm {
    let go = |t: &SurfaceTerm| Box::new(strip_versioning(t));
    let kind = match &t.kind {
        TermKind::VerOf(_, b) | TermKind::Unversion(b) => return strip_versioning(b),
        TermKind::Int(_) | TermKind::Var(_) => t.kind.clone(),
        TermKind::Lam(x, b) => TermKind::Lam(x.clone(), go(b)),
        TermKind::App(f, a) => TermKind::App(go(f), go(a)),
        TermKind::Let(x, a, b) => TermKind::Let(x.clone(), go(a), go(b)),
        TermKind::Pair(a, b) => TermKind::Pair(go(a), go(b)),
        TermKind::List(ts) => TermKind::List(ts.iter().map(strip_versioning).collect()),
        TermKind::Case(s, bs) => TermKind::Case(go(s), bs.iter().map(|(p, b)| (p.clone(), strip_versioning(b))).collect()),
    };
    SurfaceTerm::at(kind, t.span)
}

/// True iff `t` has no `ver` or `unversion` node.
pub fn is_version_free(t: &SurfaceTerm) -> bool {
    let mut ok = true;
    t.walk(&mut |s| {
        if matches!(s.kind, TermKind::VerOf(..) | TermKind::Unversion(_)) {
            ok = false;
        }
    });
    ok
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializedProgram {
    pub defs: BTreeMap<String, SurfaceTerm>,
    /// Definitions in dependency order.
    pub order: Vec<String>,
    pub entry: String,
    pub module: String,
}

impl SpecializedProgram {
    pub fn to_module(&self, name: &str) -> SurfaceModule {
        SurfaceModule {
            name: name.to_string(),
            version: None,
            imports: Vec::new(),
            defs: self
                .order
                .iter()
                .map(|n| Definition { name: n.clone(), body: self.defs[n].clone(), span: Span::default() })
                .collect(),
        }
    }
}

impl fmt::Display for SpecializedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", pretty_module(&self.to_module(&self.module)))
    }
}

/// Maps variables of the definition being emitted to variables of the
/// solved root definition.
enum Kappa {
    Identity,
    Map(BTreeMap<Var, Var>),
}

impl Kappa {
    fn get(&self, v: Var) -> Option<Var> {
        match self {
            Kappa::Identity => Some(v),
            Kappa::Map(m) => m.get(&v).copied(),
        }
    }
}

struct Specializer<'a> {
    comp: &'a Compilation,
    assignment: &'a Assignment,
    out: SpecializedProgram,
}

/// Emits `root` and every definition it reaches, each referenced symbol
/// resolved to the version the assignment picks for its occurrence.
pub fn specialize(comp: &Compilation, root: &DefKey, assignment: &Assignment) -> Result<SpecializedProgram, CodegenError> {
    let mut s = Specializer {
        comp,
        assignment,
        out: SpecializedProgram {
            defs: BTreeMap::new(),
            order: Vec::new(),
            entry: String::new(),
            module: comp.entry_module.clone(),
        },
    };
    s.out.entry = s.instance(root, &Kappa::Identity)?;
    Ok(s.out)
}

impl Specializer<'_> {
    fn instance(&mut self, key: &DefKey, kappa: &Kappa) -> Result<String, CodegenError> {
        let d = match self.comp.defs.get(key) {
            Some(d) => d,
            None => {
                let (m, v) = key.0.clone().expect("entry definitions exist");
                return Err(CodegenError::MissingDefinition { symbol: key.1.clone(), module: m, version: v });
            }
        };
        let mut names = BTreeMap::new();
        for o in &d.occurrences {
            let inner = Kappa::Map(o.renaming.iter().filter_map(|(from, to)| Some((*from, kappa.get(*to)?))).collect());
            let target = match &o.target {
                Target::Local => (key.0.clone(), o.symbol.clone()),
                Target::External(m) => {
                    let label = kappa.get(o.outer).and_then(|w| self.assignment.get(&w));
                    let version = label
                        .and_then(|l| l.get(m).cloned())
                        .or_else(|| self.comp.registry.newest(m).cloned())
                        .expect("imported module is registered");
                    (Some((m.clone(), version)), o.symbol.clone())
                }
            };
            let name = self.instance(&target, &inner)?;
            names.insert(o.name.clone(), name);
        }
        let body = strip_versioning(&reverse_translate(&rename_vars(&d.term, &names))?);
        let base = match &key.0 {
            Some((m, v)) => mangle(&key.1, m, v),
            None => key.1.clone(),
        };
        let mut k = 1;
        loop {
            let name = if k == 1 { base.clone() } else { format!("{base}__{k}") };
            match self.out.defs.get(&name) {
                Some(existing) if *existing == body => return Ok(name),
                Some(_) => k += 1,
                None => {
                    self.out.defs.insert(name.clone(), body);
                    self.out.order.push(name.clone());
                    return Ok(name);
                }
            }
        }
    }
}
