//! Algorithmic type synthesis for VLMini.
//!
//! `Infer` is one inference session: it owns the kind context Σ (an
//! append-only counter of fresh variables) and a trace of the dependency
//! constraints each rule generated. Unification runs separately, after a
//! whole definition has been synthesized.

mod gen;
mod pattern;
mod synth;

use thiserror::Error;

pub use gen::{gen_label_deps, gen_var_deps, grade_context};
pub use pattern::{synth_pattern, PatternSynthResult};

use crate::version::{ModuleName, ModuleRegistry, Version};
use crate::vlmini::{
    unify_all, DependencyConstraint, KindContext, Substitution, Type, TypeConstraint, TypeEnv, VlminiError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unversion expects a versioned value, found {0}")]
    NotAVersionedValue(Type),
    #[error("unknown version {module} {version}")]
    UnknownLabel { module: ModuleName, version: Version },
    #[error("assumption `{0}` has a non-variable grade under ver")]
    NonVariableGrade(String),
    #[error("variable `{0}` has grade ⊥ and cannot be used")]
    UnusableVariable(String),
    #[error("linear variable `{0}` {1}")]
    Linearity(String, &'static str),
    #[error("promoted pattern nested in a promoted pattern: {0}")]
    NestedPromotedPattern(String),
    #[error(transparent)]
    Context(VlminiError),
    #[error(transparent)]
    Unify(VlminiError),
}

/// Σ;Γ ⊢ t ⇒ A; Σ'; Δ; Θ; C. Σ' is the session's kind context after the
/// call; `sigma_out` records its size.
#[derive(Debug, Clone)]
pub struct SynthResult {
    pub ty: Type,
    pub sigma_out: usize,
    pub usage: TypeEnv,
    pub theta: TypeConstraint,
    pub deps: DependencyConstraint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Pr,
    Ver,
}

/// One dependency constraint produced by a rule during synthesis.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub rule: Rule,
    pub generated: DependencyConstraint,
}

#[derive(Debug, Default)]
pub struct Infer {
    pub sigma: KindContext,
    registry: Option<ModuleRegistry>,
    pub trace: Vec<TraceEntry>,
}

impl Infer {
    pub fn new() -> Self {
        Infer { sigma: KindContext::new(), registry: None, trace: Vec::new() }
    }

    /// A session that checks `ver` labels against `registry`.
    pub fn with_registry(registry: ModuleRegistry) -> Self {
        Infer { sigma: KindContext::new(), registry: Some(registry), trace: Vec::new() }
    }

    pub fn from_sigma(sigma: KindContext) -> Self {
        Infer { sigma, registry: None, trace: Vec::new() }
    }
}

/// Most general unifier of all equations in Θ.
pub fn unify(theta: &TypeConstraint) -> Result<Substitution, InferError> {
    unify_all(theta).map_err(InferError::Unify)
}
