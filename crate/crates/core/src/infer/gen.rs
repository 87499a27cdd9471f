use crate::version::{PartialLabel, Resource, Var};
use crate::vlmini::{Assumption, DependencyConstraint as C, TypeEnv};

use super::InferError;

/// [Γ]_Labels: linear assumptions become graded with the unit grade ∅.
pub fn grade_context(gamma: &TypeEnv) -> TypeEnv {
    TypeEnv::from_assumptions(gamma.iter().map(|a| match a {
        Assumption::Linear(x, t) => Assumption::Graded(x.clone(), t.clone(), Resource::unit()),
        g => g.clone(),
    }))
    .expect("grading preserves distinct names")
}

/// α ⊑_c [Γ]: one α ⪯ r per assumption.
///
/// A variable grade gives a variable dependency. The unit grade ∅ (a linear
/// assumption after grading) carries no version and gives ⊤. A non-empty
/// label set requires α to be one of its labels. ⊥ grades are rejected by
/// the caller before this point and contribute ⊤ here.
pub fn gen_var_deps(alpha: Var, gamma: &TypeEnv) -> C {
    C::and_all(gamma.iter().filter_map(Assumption::grade).map(|r| var_dep(alpha, r)))
}

fn var_dep(alpha: Var, r: &Resource) -> C {
    match r {
        Resource::Bottom => C::Top,
        Resource::Var(b) => C::VarDep(alpha, *b),
        Resource::Labels(ls) if ls.is_empty() => C::Top,
        Resource::Labels(ls) => C::or_all(ls.iter().map(|l| C::LabelDep(alpha, l.to_partial()))),
        Resource::Join(vs, ls) => {
            let vars = C::and_all(vs.iter().map(|b| C::VarDep(alpha, *b)));
            if ls.is_empty() {
                vars
            } else {
                vars.and(var_dep(alpha, &Resource::Labels(ls.clone())))
            }
        }
    }
}

/// [Γ] ⊑_c D: one r ⪯ D per assumption; every grade must be a variable.
pub fn gen_label_deps(gamma: &TypeEnv, d: &PartialLabel) -> Result<C, InferError> {
    let mut out = Vec::new();
    for a in gamma.iter() {
        match a.grade() {
            Some(Resource::Var(v)) => out.push(C::LabelDep(*v, d.clone())),
            _ => return Err(InferError::NonVariableGrade(a.name().to_string())),
        }
    }
    Ok(C::and_all(out))
}
