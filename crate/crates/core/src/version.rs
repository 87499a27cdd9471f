//! Version strings, version labels, module registries and the resource
//! semiring that grades types and assumptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

pub type ModuleName = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VersionError {
    #[error("invalid version `{0}`: expected a plain X.Y.Z triple")]
    BadVersion(String),
    #[error("resource variable {0} where a ground resource is required")]
    VariableResource(String),
    #[error("the module registry is empty")]
    EmptyRegistry,
    #[error("module `{0}` has no versions")]
    NoVersions(ModuleName),
    #[error("module `{module}` lists version {version} twice")]
    DuplicateVersion { module: ModuleName, version: Version },
}

/// A semantic version triple, ordered numerically component-wise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Version(semver::Version);

impl Version {
    pub fn new(major: u64, minor: u64, patch: u64) -> Self {
        Version(semver::Version::new(major, minor, patch))
    }

    /// `1.0.0` becomes `1_0_0`, for use inside mangled identifiers.
    pub fn mangled(&self) -> String {
        format!("{}_{}_{}", self.0.major, self.0.minor, self.0.patch)
    }
}

impl FromStr for Version {
    type Err = VersionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = semver::Version::parse(s).map_err(|_| VersionError::BadVersion(s.to_string()))?;
        if !v.pre.is_empty() || !v.build.is_empty() {
            return Err(VersionError::BadVersion(s.to_string()));
        }
        Ok(Version(v))
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Inference variable. Type variables and resource variables share one
/// namespace; the kind context records which is which.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{}", self.0)
    }
}

/// A total assignment of versions to the modules of a registry. Module
/// names are kept sorted so that structural equality is label equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VersionLabel(BTreeMap<ModuleName, Version>);

impl VersionLabel {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Version)>,
        S: Into<ModuleName>,
    {
        VersionLabel(pairs.into_iter().map(|(m, v)| (m.into(), v)).collect())
    }

    pub fn get(&self, module: &str) -> Option<&Version> {
        self.0.get(module)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModuleName, &Version)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every module mentioned by `d` has the same version here.
    pub fn agrees_with(&self, d: &PartialLabel) -> bool {
        d.iter().all(|(m, v)| self.0.get(m) == Some(v))
    }

    /// The same assignment seen as a partial label over all its modules.
    pub fn to_partial(&self) -> PartialLabel {
        PartialLabel(self.0.clone())
    }
}

impl fmt::Display for VersionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (m, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}={v}")?;
        }
        write!(f, "}}")
    }
}

/// A dependent label ⟨M = V, ...⟩: versions fixed for some modules only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialLabel(BTreeMap<ModuleName, Version>);

impl PartialLabel {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Version)>,
        S: Into<ModuleName>,
    {
        PartialLabel(pairs.into_iter().map(|(m, v)| (m.into(), v)).collect())
    }

    pub fn single(module: &str, version: Version) -> Self {
        PartialLabel::new([(module, version)])
    }

    pub fn get(&self, module: &str) -> Option<&Version> {
        self.0.get(module)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModuleName, &Version)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PartialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, (m, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m} = {v}")?;
        }
        write!(f, "⟩")
    }
}

/// Version resource. `Labels(∅)` is the unit 1 and `Bottom` is 0.
///
/// `Join` is a symbolic join of variables and labels. It only shows up in
/// usage contexts during inference, where grades containing variables are
/// added or multiplied. Variables are always solved to non-empty label
/// sets, so both semiring operations reduce to union on such grades.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Bottom,
    Labels(BTreeSet<VersionLabel>),
    Var(Var),
    Join(BTreeSet<Var>, BTreeSet<VersionLabel>),
}

impl Resource {
    pub fn unit() -> Self {
        Resource::Labels(BTreeSet::new())
    }

    pub fn labels<I: IntoIterator<Item = VersionLabel>>(ls: I) -> Self {
        Resource::Labels(ls.into_iter().collect())
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Resource::Bottom | Resource::Labels(_))
    }

    pub fn vars(&self) -> Vec<Var> {
        match self {
            Resource::Var(v) => vec![*v],
            Resource::Join(vs, _) => vs.iter().copied().collect(),
            _ => Vec::new(),
        }
    }

    /// Builds the canonical form of a join of variables and labels.
    pub fn join_of(vars: BTreeSet<Var>, labels: BTreeSet<VersionLabel>) -> Self {
        match (vars.len(), labels.is_empty()) {
            (0, _) => Resource::Labels(labels),
            (1, true) => Resource::Var(*vars.iter().next().unwrap()),
            _ => Resource::Join(vars, labels),
        }
    }

    fn parts(&self) -> Option<(BTreeSet<Var>, BTreeSet<VersionLabel>)> {
        match self {
            Resource::Bottom => None,
            Resource::Labels(ls) => Some((BTreeSet::new(), ls.clone())),
            Resource::Var(v) => Some(([*v].into_iter().collect(), BTreeSet::new())),
            Resource::Join(vs, ls) => Some((vs.clone(), ls.clone())),
        }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Bottom => write!(f, "⊥"),
            Resource::Labels(ls) if ls.is_empty() => write!(f, "∅"),
            Resource::Labels(ls) => write!(f, "{{{}}}", ls.iter().join(", ")),
            Resource::Var(v) => write!(f, "{v}"),
            Resource::Join(vs, ls) => {
                let mut parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                if !ls.is_empty() {
                    parts.push(format!("{{{}}}", ls.iter().join(", ")));
                }
                write!(f, "{}", parts.join(" ⊔ "))
            }
        }
    }
}

fn ground(r: &Resource) -> Result<(), VersionError> {
    if r.is_ground() {
        Ok(())
    } else {
        Err(VersionError::VariableResource(r.to_string()))
    }
}

/// r1 ⊕ r2: ⊥ is the identity, otherwise union.
pub fn res_add(r1: &Resource, r2: &Resource) -> Result<Resource, VersionError> {
    ground(r1)?;
    ground(r2)?;
    Ok(grade_add(r1, r2))
}

/// r1 ⊗ r2: ⊥ absorbs, otherwise union (∅ is the identity).
pub fn res_mul(r1: &Resource, r2: &Resource) -> Result<Resource, VersionError> {
    ground(r1)?;
    ground(r2)?;
    Ok(grade_mul(r1, r2))
}

/// r1 ⊑ r2: ⊥ is least, label sets are ordered by inclusion.
pub fn res_leq(r1: &Resource, r2: &Resource) -> Result<bool, VersionError> {
    ground(r1)?;
    ground(r2)?;
    Ok(match (r1, r2) {
        (Resource::Bottom, _) => true,
        (Resource::Labels(a), Resource::Labels(b)) => a.is_subset(b),
        _ => false,
    })
}

/// ⊕ extended to symbolic grades.
pub fn grade_add(r1: &Resource, r2: &Resource) -> Resource {
    match (r1.parts(), r2.parts()) {
        (None, _) => r2.clone(),
        (_, None) => r1.clone(),
        (Some((v1, l1)), Some((v2, l2))) => {
            Resource::join_of(v1.union(&v2).copied().collect(), l1.union(&l2).cloned().collect())
        }
    }
}

/// ⊗ extended to symbolic grades.
pub fn grade_mul(r1: &Resource, r2: &Resource) -> Resource {
    match (r1.parts(), r2.parts()) {
        (None, _) | (_, None) => Resource::Bottom,
        (Some((v1, l1)), Some((v2, l2))) => {
            Resource::join_of(v1.union(&v2).copied().collect(), l1.union(&l2).cloned().collect())
        }
    }
}

/// Module name to ascending, duplicate-free version list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleRegistry {
    modules: BTreeMap<ModuleName, Vec<Version>>,
}

impl ModuleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_modules<I, S, V>(modules: I) -> Result<Self, VersionError>
    where
        I: IntoIterator<Item = (S, V)>,
        S: Into<ModuleName>,
        V: IntoIterator<Item = Version>,
    {
        let mut reg = ModuleRegistry::new();
        for (m, vs) in modules {
            reg.insert(m.into(), vs.into_iter().collect())?;
        }
        Ok(reg)
    }

    /// Convenience for tests and fixtures: versions given as strings.
    pub fn parse<S: AsRef<str>>(modules: &[(&str, &[S])]) -> Result<Self, VersionError> {
        let mut reg = ModuleRegistry::new();
        for (m, vs) in modules {
            let vs = vs.iter().map(|v| v.as_ref().parse()).collect::<Result<Vec<Version>, _>>()?;
            reg.insert(m.to_string(), vs)?;
        }
        Ok(reg)
    }

    pub fn insert(&mut self, module: ModuleName, mut versions: Vec<Version>) -> Result<(), VersionError> {
        if versions.is_empty() {
            return Err(VersionError::NoVersions(module));
        }
        versions.sort();
        for w in versions.windows(2) {
            if w[0] == w[1] {
                return Err(VersionError::DuplicateVersion { module, version: w[0].clone() });
            }
        }
        self.modules.insert(module, versions);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn modules(&self) -> impl Iterator<Item = &ModuleName> {
        self.modules.keys()
    }

    pub fn versions(&self, module: &str) -> Option<&[Version]> {
        self.modules.get(module).map(|v| v.as_slice())
    }

    pub fn contains(&self, module: &str, version: &Version) -> bool {
        self.versions(module).is_some_and(|vs| vs.contains(version))
    }

    pub fn index_of(&self, module: &str, version: &Version) -> Option<usize> {
        self.versions(module)?.iter().position(|v| v == version)
    }

    pub fn newest(&self, module: &str) -> Option<&Version> {
        self.versions(module)?.last()
    }

    /// The label choosing the newest version of every module.
    pub fn newest_label(&self) -> VersionLabel {
        VersionLabel::new(self.modules.iter().map(|(m, vs)| (m.clone(), vs.last().unwrap().clone())))
    }

    /// Keeps only the named modules.
    pub fn restrict<'a, I: IntoIterator<Item = &'a ModuleName>>(&self, keep: I) -> ModuleRegistry {
        let keep: BTreeSet<&ModuleName> = keep.into_iter().collect();
        ModuleRegistry {
            modules: self.modules.iter().filter(|(m, _)| keep.contains(m)).map(|(m, v)| (m.clone(), v.clone())).collect(),
        }
    }

    /// Adds every module of `other`; versions of shared modules are merged.
    pub fn merge(&mut self, other: &ModuleRegistry) -> Result<(), VersionError> {
        for (m, vs) in &other.modules {
            let mut all = self.modules.get(m).cloned().unwrap_or_default();
            for v in vs {
                if !all.contains(v) {
                    all.push(v.clone());
                }
            }
            self.insert(m.clone(), all)?;
        }
        Ok(())
    }
}

/// Every total label over the registry: the Cartesian product of the
/// per-module version lists.
pub fn label_universe(reg: &ModuleRegistry) -> Result<BTreeSet<VersionLabel>, VersionError> {
    if reg.is_empty() {
        return Err(VersionError::EmptyRegistry);
    }
    let names: Vec<&ModuleName> = reg.modules.keys().collect();
    Ok(reg
        .modules
        .values()
        .map(|vs| vs.iter())
        .multi_cartesian_product()
        .map(|choice| VersionLabel::new(names.iter().map(|m| (*m).clone()).zip(choice.into_iter().cloned())))
        .collect())
}
