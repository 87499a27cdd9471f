//! VLMini, the coeffect intermediate language: terms with promotions and
//! promoted patterns, graded types, contexts, dependency constraints and
//! substitutions.

mod constraint;
mod context;
mod subst;
mod term;
mod types;

use thiserror::Error;

pub use constraint::{DependencyConstraint, TypeConstraint};
pub use context::{ctx_concat, ctx_scale, Assumption, KindContext, TypeEnv};
pub use subst::{subst_compose, unify_all, unify_resources, unify_types, Substitution};
pub use term::{Con, Pattern, Term};
pub use types::{Kind, TyCon, Type};

use crate::version::{Resource, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VlminiError {
    #[error("linear variable `{0}` used in both contexts")]
    LinearClash(String),
    #[error("variable `{var}` has type {left} in one context and {right} in the other")]
    TypeMismatch { var: String, left: Type, right: Type },
    #[error("linear assumption `{0}` in a context scaled by a resource")]
    LinearInScaledContext(String),
    #[error("`{0}` is already bound in the context")]
    DuplicateAssumption(String),
    #[error("variable {0} bound at the wrong kind")]
    KindError(Var),
    #[error("occurs check: {0} occurs in {1}")]
    OccursCheck(Var, String),
    #[error("cannot unify {0} with {1}")]
    Mismatch(Type, Type),
    #[error("cannot unify resources {0} and {1}")]
    ResourceMismatch(Resource, Resource),
    #[error("resource variable {0} instantiated to {1} inside a dependency constraint")]
    ConcreteResourceInConstraint(Var, Resource),
}
