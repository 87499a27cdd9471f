use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::DiGraph;
use petgraph::Direction;

use super::ast::SurfaceModule;
use super::parser::parse_module;
use super::SurfaceError;
use crate::version::{ModuleName, ModuleRegistry, Version};

/// All parsed module versions plus a dependency-first module order.
#[derive(Debug, Clone)]
pub struct Repository {
    pub registry: ModuleRegistry,
    pub modules: BTreeMap<(ModuleName, Version), SurfaceModule>,
    /// Imports come before importers; ties broken by name.
    pub order: Vec<ModuleName>,
}

impl Repository {
    /// Builds a repository from modules that already carry their version.
    pub fn from_modules(mods: Vec<SurfaceModule>) -> Result<Repository, SurfaceError> {
        let mut by_name: BTreeMap<ModuleName, Vec<Version>> = BTreeMap::new();
        let mut modules = BTreeMap::new();
        for m in mods {
            let v = m.version.clone().expect("module version must be set");
            by_name.entry(m.name.clone()).or_default().push(v.clone());
            modules.insert((m.name.clone(), v), m);
        }
        let registry = ModuleRegistry::from_modules(by_name).map_err(SurfaceError::Version)?;
        let order = import_order(&registry, &modules)?;
        Ok(Repository { registry, modules, order })
    }

    pub fn get(&self, module: &str, version: &Version) -> Option<&SurfaceModule> {
        self.modules.get(&(module.to_string(), version.clone()))
    }

    /// Every module version, for one module, ascending.
    pub fn versions_of<'a>(&'a self, module: &'a str) -> impl Iterator<Item = &'a SurfaceModule> + 'a {
        self.registry
            .versions(module)
            .unwrap_or(&[])
            .iter()
            .filter_map(move |v| self.get(module, v))
    }

    /// Modules reachable through imports from `module`, excluding itself.
    pub fn transitive_imports(&self, module: &str) -> BTreeSet<ModuleName> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<ModuleName> = self.imports_of(module).into_iter().collect();
        while let Some(m) = stack.pop() {
            if m != module && seen.insert(m.clone()) {
                stack.extend(self.imports_of(&m));
            }
        }
        seen
    }

    /// Union of the import lists of all versions of `module`.
    pub fn imports_of(&self, module: &str) -> BTreeSet<ModuleName> {
        self.versions_of(module).flat_map(|m| m.imports.iter().cloned()).collect()
    }
}

/// Scans `root/<Module>/<version>/<Module>.vl` under each root. Versions
/// of a module found under several roots are merged.
pub fn discover_registry(roots: &[PathBuf]) -> Result<ModuleRegistry, SurfaceError> {
    let mut reg = ModuleRegistry::new();
    for root in roots {
        let mut found: BTreeMap<ModuleName, Vec<Version>> = BTreeMap::new();
        for mdir in read_dir(root)? {
            if !mdir.is_dir() {
                continue;
            }
            let Some(name) = mdir.file_name().and_then(|n| n.to_str()).map(String::from) else { continue };
            for vdir in read_dir(&mdir)? {
                let Some(vs) = vdir.file_name().and_then(|n| n.to_str()) else { continue };
                let Ok(v) = vs.parse::<Version>() else { continue };
                if vdir.join(format!("{name}.vl")).is_file() {
                    found.entry(name.clone()).or_default().push(v);
                }
            }
        }
        let part = ModuleRegistry::from_modules(found).map_err(SurfaceError::Version)?;
        reg.merge(&part).map_err(SurfaceError::Version)?;
    }
    Ok(reg)
}

fn read_dir(p: &Path) -> Result<Vec<PathBuf>, SurfaceError> {
    let rd = fs::read_dir(p).map_err(|e| SurfaceError::Io { path: p.to_path_buf(), message: e.to_string() })?;
    let mut out: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
    out.sort();
    Ok(out)
}

/// Parses every registered module version found under the roots.
pub fn load_repository(roots: &[PathBuf], reg: &ModuleRegistry) -> Result<Repository, SurfaceError> {
    let mut mods = Vec::new();
    for m in reg.modules() {
        for v in reg.versions(m).unwrap_or(&[]) {
            let path = roots
                .iter()
                .map(|r| r.join(m).join(v.to_string()).join(format!("{m}.vl")))
                .find(|p| p.is_file())
                .ok_or_else(|| SurfaceError::MissingModuleVersion { module: m.clone(), version: v.clone() })?;
            let src = fs::read_to_string(&path).map_err(|e| SurfaceError::Io { path: path.clone(), message: e.to_string() })?;
            let mut parsed =
                parse_module(&src).map_err(|e| SurfaceError::InFile { path: path.clone(), source: Box::new(e) })?;
            if parsed.name != *m {
                return Err(SurfaceError::InFile {
                    path,
                    source: Box::new(SurfaceError::ModuleNameMismatch { expected: m.clone(), found: parsed.name }),
                });
            }
            parsed.version = Some(v.clone());
            mods.push(parsed);
        }
    }
    Repository::from_modules(mods)
}

fn import_order(
    reg: &ModuleRegistry,
    modules: &BTreeMap<(ModuleName, Version), SurfaceModule>,
) -> Result<Vec<ModuleName>, SurfaceError> {
    let mut g = DiGraph::<ModuleName, ()>::new();
    let idx: BTreeMap<&ModuleName, _> = reg.modules().map(|m| (m, g.add_node(m.clone()))).collect();
    for ((name, _), m) in modules {
        for imp in &m.imports {
            let Some(&to) = idx.get(imp) else {
                return Err(SurfaceError::UnknownImport { module: name.clone(), import: imp.clone() });
            };
            if !g.contains_edge(to, idx[name]) {
                g.add_edge(to, idx[name], ());
            }
        }
    }
    if is_cyclic_directed(&g) {
        let mut cycles: Vec<Vec<ModuleName>> = tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.len() > 1 || g.contains_edge(c[0], c[0]))
            .map(|c| {
                let mut names: Vec<ModuleName> = c.into_iter().map(|n| g[n].clone()).collect();
                names.sort();
                names
            })
            .collect();
        cycles.sort();
        return Err(SurfaceError::ImportCycle(cycles.remove(0)));
    }
    // Repeatedly take the smallest name whose imports are all placed.
    let mut placed: Vec<ModuleName> = Vec::new();
    let mut pending: BTreeSet<&ModuleName> = idx.keys().copied().collect();
    while !pending.is_empty() {
        let next = *pending
            .iter()
            .find(|m| g.neighbors_directed(idx[**m], Direction::Incoming).all(|p| placed.contains(&g[p])))
            .expect("acyclic graph always has a ready node");
        pending.remove(next);
        placed.push(next.clone());
    }
    Ok(placed)
}
