//! End-to-end compilation of one entry module against a repository.
//!
//! Library modules are inferred version by version in import order, each
//! version's interface is bundled, and finally the unversioned entry module
//! is inferred against the bundles. Every definition keeps the closure of
//! its dependency constraints, so solving a root definition needs nothing
//! else.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::bundle::{bundle, BundleError, BundledInterface, VersionedInterface};
use crate::codegen::{duplicate_externals, specialize, CodegenError, SpecializedProgram};
use crate::diag::Diagnostic;
use crate::girard::forward_translate;
use crate::infer::{unify, Infer, InferError};
use crate::solver::{export_smt2, solve_items, Assignment, SolveError};
use crate::surface::eval::{run_program, EvalError, Output};
use crate::surface::{Repository, SurfaceError, SurfaceModule};
use crate::version::{ModuleName, ModuleRegistry, Resource, Var, Version};
use crate::vlmini::{
    Assumption, DependencyConstraint as C, Kind, KindContext, Substitution, Term, Type, TypeConstraint, TypeEnv,
};

/// `None` for the entry module.
pub type DefKey = (Option<(ModuleName, Version)>, String);

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("in `{def}` ({place}): {source}")]
    Infer { def: String, place: String, source: InferError },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("`{name}` is exported by several imported modules: {}", modules.join(", "))]
    AmbiguousName { name: String, modules: Vec<ModuleName> },
    #[error("{0}")]
    Inconsistent(Diagnostic),
    #[error(transparent)]
    Solve(SolveError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no definition `{0}` in the entry module")]
    UnknownEntry(String),
}

impl DriverError {
    /// 2 for I/O and parse errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Surface(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Local,
    External(ModuleName),
}

/// One occurrence of a top-level symbol inside a definition body.
#[derive(Debug, Clone)]
pub struct Occurrence {
    /// Unique name in the duplicated body, e.g. `concat#2`.
    pub name: String,
    pub symbol: String,
    pub target: Target,
    /// Variables of the referenced entry to their copies in this definition.
    pub renaming: BTreeMap<Var, Var>,
    /// Version selection for external symbols; ⊤ for local ones.
    pub select: C,
    pub carried: C,
    /// Outer grade of the occurrence's type.
    pub outer: Var,
}

#[derive(Debug, Clone)]
pub struct DefInfo {
    pub key: DefKey,
    /// The translated body with every top-level occurrence renamed apart.
    pub term: Term,
    pub ty: Type,
    pub theta: TypeConstraint,
    pub own: C,
    pub occurrences: Vec<Occurrence>,
}

impl DefInfo {
    /// Own constraint plus everything the occurrences bring in.
    pub fn constraint(&self) -> C {
        C::and_all(
            std::iter::once(self.own.clone())
                .chain(self.occurrences.iter().flat_map(|o| [o.select.clone(), o.carried.clone()])),
        )
    }

    pub fn outer(&self) -> Var {
        match &self.ty {
            Type::Box(Resource::Var(g), _) => *g,
            t => panic!("definition type {t} is not boxed by a variable"),
        }
    }
}

/// Where a solver item came from, for diagnostics.
#[derive(Debug, Clone)]
enum Origin {
    Own,
    Select { symbol: String, module: ModuleName },
    Carried { symbol: String },
}

pub struct Compilation {
    /// Modules reachable from the entry module.
    pub registry: ModuleRegistry,
    pub infer: Infer,
    pub bundles: BTreeMap<ModuleName, BundledInterface>,
    pub interfaces: Vec<VersionedInterface>,
    pub defs: BTreeMap<DefKey, DefInfo>,
    pub entry_module: ModuleName,
    /// Entry definitions in dependency order.
    pub entry_defs: Vec<String>,
}

impl Compilation {
    pub fn new(repo: &Repository, entry: &SurfaceModule) -> Result<Compilation, DriverError> {
        let mut needed = BTreeSet::new();
        for imp in &entry.imports {
            if repo.registry.versions(imp).is_none() {
                return Err(SurfaceError::UnknownImport { module: entry.name.clone(), import: imp.clone() }.into());
            }
            needed.insert(imp.clone());
            needed.extend(repo.transitive_imports(imp));
        }
        let registry = repo.registry.restrict(needed.iter());
        let mut comp = Compilation {
            infer: Infer::with_registry(registry.clone()),
            registry,
            bundles: BTreeMap::new(),
            interfaces: Vec::new(),
            defs: BTreeMap::new(),
            entry_module: entry.name.clone(),
            entry_defs: Vec::new(),
        };
        for m in repo.order.iter().filter(|m| needed.contains(*m)) {
            let mut ifaces = Vec::new();
            for module in repo.versions_of(m) {
                let v = module.version.clone().expect("repository modules carry versions");
                let order = comp.infer_module(Some((m.clone(), v.clone())), module)?;
                let entries = order
                    .into_iter()
                    .map(|name| {
                        let d = &comp.defs[&(Some((m.clone(), v.clone())), name.clone())];
                        (name, (d.ty.clone(), d.constraint()))
                    })
                    .collect();
                ifaces.push(VersionedInterface { module: m.clone(), version: v, entries });
            }
            let b = bundle(&mut comp.infer.sigma, m, &ifaces)?;
            comp.bundles.insert(m.clone(), b);
            comp.interfaces.extend(ifaces);
        }
        comp.entry_defs = comp.infer_module(None, entry)?;
        Ok(comp)
    }

    /// Infers every definition of one module version (or of the entry
    /// module) and returns their names in dependency order.
    fn infer_module(
        &mut self,
        mv: Option<(ModuleName, Version)>,
        module: &SurfaceModule,
    ) -> Result<Vec<String>, DriverError> {
        let place = match &mv {
            Some((m, v)) => format!("{m} {v}"),
            None => module.name.clone(),
        };
        let names: BTreeSet<&str> = module.defs.iter().map(|d| d.name.as_str()).collect();
        let terms: Vec<(String, Term)> =
            module.defs.iter().map(|d| (d.name.clone(), forward_translate(&d.body))).collect();
        let mut done: Vec<String> = Vec::new();
        while done.len() < terms.len() {
            let before = done.len();
            for (name, t) in &terms {
                if done.contains(name) {
                    continue;
                }
                let ready = t
                    .free_vars()
                    .iter()
                    .all(|x| !names.contains(x.as_str()) || x == name || done.contains(x));
                if !ready {
                    continue;
                }
                let info = self.infer_def(&mv, &module.imports, &names, name, t).map_err(|e| match e {
                    DriverError::Infer { def, source, .. } => DriverError::Infer { def, place: place.clone(), source },
                    e => e,
                })?;
                self.defs.insert(info.key.clone(), info);
                done.push(name.clone());
            }
            if done.len() == before {
                let stuck = terms.iter().find(|(n, _)| !done.contains(n)).expect("some definition is pending");
                return Err(SurfaceError::RecursiveDefinition(stuck.0.clone()).into());
            }
        }
        Ok(done)
    }

    fn infer_def(
        &mut self,
        mv: &Option<(ModuleName, Version)>,
        imports: &[ModuleName],
        locals: &BTreeSet<&str>,
        name: &str,
        t: &Term,
    ) -> Result<DefInfo, DriverError> {
        let err = |source: InferError| DriverError::Infer { def: name.to_string(), place: String::new(), source };
        let mut targets: BTreeMap<String, Target> = BTreeMap::new();
        for x in t.free_vars() {
            if locals.contains(x.as_str()) {
                targets.insert(x, Target::Local);
                continue;
            }
            let owners: Vec<ModuleName> =
                imports.iter().filter(|m| self.bundles[*m].get(&x).is_some()).cloned().collect();
            match owners.len() {
                0 => {}
                1 => {
                    targets.insert(x, Target::External(owners[0].clone()));
                }
                _ => return Err(DriverError::AmbiguousName { name: x, modules: owners }),
            }
        }
        let (dup, occs) = duplicate_externals(t, &|x| targets.contains_key(x));

        let mut gamma = TypeEnv::new();
        let mut pending = Vec::new();
        for (occ, symbol) in occs {
            let target = targets[&symbol].clone();
            let (ty, select, carried) = match &target {
                Target::Local => {
                    let d = &self.defs[&(mv.clone(), symbol.clone())];
                    (d.ty.clone(), C::Top, d.constraint())
                }
                Target::External(m) => {
                    let e = &self.bundles[m].entries[&symbol];
                    (e.ty.clone(), e.select.clone(), e.carried.clone())
                }
            };
            let (renaming, ty, select, carried) = clone_fresh(&mut self.infer.sigma, &ty, &select, &carried);
            let Type::Box(grade, inner) = &ty else { panic!("interface type {ty} is not boxed") };
            gamma.push(Assumption::Graded(occ.clone(), (**inner).clone(), grade.clone())).map_err(|e| err(InferError::Context(e)))?;
            pending.push((occ, symbol, target, renaming, select, carried));
        }

        let res = self.infer.synth_type(&gamma, &Term::promote(dup.clone())).map_err(err)?;
        let theta = unify(&res.theta).map_err(err)?;
        let ty = theta.apply_type(&res.ty);
        let own = theta.apply_constraint(&res.deps).map_err(|e| err(InferError::Unify(e)))?;
        let mut occurrences = Vec::new();
        for (occ, symbol, target, renaming, select, carried) in pending {
            let mut ren = BTreeMap::new();
            for (from, to) in renaming {
                if self.infer.sigma.kind(to) != Some(Kind::Labels) {
                    continue;
                }
                match theta.apply_resource(&Resource::Var(to)) {
                    Resource::Var(w) => {
                        ren.insert(from, w);
                    }
                    r => return Err(err(InferError::Unify(crate::vlmini::VlminiError::ConcreteResourceInConstraint(to, r)))),
                }
            }
            let outer = match &gamma.get(&occ) {
                Some(Assumption::Graded(_, _, Resource::Var(g))) => match theta.apply_resource(&Resource::Var(*g)) {
                    Resource::Var(w) => w,
                    _ => *g,
                },
                _ => unreachable!("occurrences are graded by a variable"),
            };
            occurrences.push(Occurrence {
                name: occ,
                symbol,
                target,
                renaming: ren,
                select: theta.apply_constraint(&select).map_err(|e| err(InferError::Unify(e)))?,
                carried: theta.apply_constraint(&carried).map_err(|e| err(InferError::Unify(e)))?,
                outer,
            });
        }
        Ok(DefInfo {
            key: (mv.clone(), name.to_string()),
            term: dup,
            ty,
            theta: res.theta,
            own,
            occurrences,
        })
    }

    pub fn entry_def(&self, name: &str) -> Result<&DefInfo, DriverError> {
        self.defs.get(&(None, name.to_string())).ok_or_else(|| DriverError::UnknownEntry(name.to_string()))
    }

    fn items(&self, d: &DefInfo) -> Vec<(Origin, C)> {
        let mut items = vec![(Origin::Own, d.own.clone())];
        for o in &d.occurrences {
            if let Target::External(m) = &o.target {
                items.push((Origin::Select { symbol: o.symbol.clone(), module: m.clone() }, o.select.clone()));
            }
            items.push((Origin::Carried { symbol: o.symbol.clone() }, o.carried.clone()));
        }
        items
    }

    /// Solves the closure of one entry definition.
    pub fn solve_def(&self, name: &str) -> Result<Assignment, DriverError> {
        let d = self.entry_def(name)?;
        let items = self.items(d);
        let cs: Vec<C> = items.iter().map(|(_, c)| c.clone()).collect();
        match solve_items(&cs, &[d.outer()], &self.registry) {
            Ok(a) => Ok(a),
            Err(SolveError::Unsat { core }) => Err(DriverError::Inconsistent(self.explain(name, &items, &core))),
            Err(e) => Err(DriverError::Solve(e)),
        }
    }

    fn explain(&self, name: &str, items: &[(Origin, C)], core: &[usize]) -> Diagnostic {
        let mut diag = Diagnostic::error(format!("no consistent version assignment for `{name}`"));
        let mut rest = Vec::new();
        for &i in core {
            match &items[i].0 {
                Origin::Select { symbol, module } => {
                    let mut labels = Vec::new();
                    items[i].1.visit(&mut |c| {
                        if let C::LabelDep(_, d) = c {
                            labels.push(d.to_string());
                        }
                    });
                    let req = match labels.len() {
                        1 => labels.remove(0),
                        _ => format!("one of {}", labels.join(", ")),
                    };
                    diag = diag.note(format!("`{symbol}` ({module}) requires {req}"));
                }
                Origin::Own => rest.push(format!("the uses inside `{name}` share one version label")),
                Origin::Carried { symbol } => rest.push(format!("dependencies of `{symbol}`")),
            }
        }
        for r in rest {
            diag = diag.note(r);
        }
        diag
    }

    /// Solves every entry definition.
    pub fn check(&self) -> Result<BTreeMap<String, Assignment>, DriverError> {
        self.entry_defs.iter().map(|n| Ok((n.clone(), self.solve_def(n)?))).collect()
    }

    pub fn specialize(&self, name: &str) -> Result<SpecializedProgram, DriverError> {
        let a = self.solve_def(name)?;
        Ok(specialize(self, &(None, name.to_string()), &a)?)
    }

    pub fn run(&self, name: &str, fuel: u64) -> Result<Output, DriverError> {
        let prog = self.specialize(name)?;
        Ok(run_program(&prog.defs, &prog.entry, fuel)?)
    }

    /// One block per entry definition: its type, Θ and closure.
    pub fn emit_constraints(&self) -> String {
        let mut s = String::new();
        for n in &self.entry_defs {
            let d = &self.defs[&(None, n.clone())];
            let _ = writeln!(s, "{n} : {}", d.ty);
            let _ = writeln!(s, "  theta: {}", d.theta);
            let _ = writeln!(s, "  deps: {}", d.constraint());
        }
        s
    }

    pub fn emit_interface(&self) -> String {
        let mut s = String::new();
        for b in self.bundles.values() {
            let _ = write!(s, "{b}");
        }
        for n in &self.entry_defs {
            let d = &self.defs[&(None, n.clone())];
            let _ = writeln!(s, "{}.{n} : {} | {}", self.entry_module, d.ty, d.constraint());
        }
        s
    }

    pub fn emit_smt2(&self, name: &str) -> Result<String, DriverError> {
        Ok(export_smt2(&self.entry_def(name)?.constraint(), &self.registry))
    }
}

impl fmt::Debug for Compilation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Compilation")
            .field("entry_module", &self.entry_module)
            .field("defs", &self.defs.len())
            .finish()
    }
}

/// Copies an interface entry with fresh variables of the same kinds.
fn clone_fresh(
    sigma: &mut KindContext,
    ty: &Type,
    select: &C,
    carried: &C,
) -> (BTreeMap<Var, Var>, Type, C, C) {
    let mut vars: BTreeSet<Var> = ty.type_vars();
    vars.extend(ty.resource_vars());
    vars.extend(select.vars());
    vars.extend(carried.vars());
    let mut map = BTreeMap::new();
    let mut s = Substitution::new();
    for v in vars {
        let kind = sigma.kind(v).unwrap_or(Kind::Labels);
        let w = sigma.fresh(kind);
        map.insert(v, w);
        let bound = match kind {
            Kind::Type => s.bind_type(v, Type::Var(w)),
            Kind::Labels => s.bind_resource(v, Resource::Var(w)),
        };
        bound.expect("fresh variables are distinct");
    }
    let f = |v: Var| map.get(&v).copied().unwrap_or(v);
    let (select, carried) = (select.rename(&f), carried.rename(&f));
    (map.clone(), s.apply_type(ty), select, carried)
}

/// Parses and compiles `entry` source against `repo`.
pub fn compile_source(repo: &Repository, entry_src: &str) -> Result<Compilation, DriverError> {
    let m = crate::surface::parse_module(entry_src)?;
    Compilation::new(repo, &m)
}
