use crate::version::Resource;
use crate::vlmini::{Assumption, Con, Kind, KindContext, Pattern, TyCon, Type, TypeConstraint, TypeEnv};

use super::InferError;

/// Output of Σ; R ⊢ p : A ▷ Γ; Σ'; Θ; C. Pattern synthesis never produces
/// dependency constraints, so C is omitted.
#[derive(Debug, Clone)]
pub struct PatternSynthResult {
    pub bindings: TypeEnv,
    pub theta: TypeConstraint,
}

/// `res` is the resource context R: `None` for "−".
pub fn synth_pattern(
    sigma: &mut KindContext,
    res: Option<&Resource>,
    p: &Pattern,
    a: &Type,
) -> Result<PatternSynthResult, InferError> {
    let mut out = PatternSynthResult { bindings: TypeEnv::new(), theta: TypeConstraint::new() };
    go(sigma, res, p, a, &mut out)?;
    Ok(out)
}

fn go(
    sigma: &mut KindContext,
    res: Option<&Resource>,
    p: &Pattern,
    a: &Type,
    out: &mut PatternSynthResult,
) -> Result<(), InferError> {
    match (p, res) {
        (Pattern::Var(x), None) => out.bindings.insert(Assumption::Linear(x.clone(), a.clone())),
        (Pattern::Var(x), Some(r)) => out.bindings.insert(Assumption::Graded(x.clone(), a.clone(), r.clone())),
        (Pattern::Box(inner), None) => {
            let alpha = Resource::Var(sigma.fresh(Kind::Labels));
            let beta = sigma.fresh_type();
            out.theta.push(a.clone(), Type::boxed(alpha.clone(), beta.clone()));
            go(sigma, Some(&alpha), inner, &beta, out)?;
        }
        (Pattern::Box(_), Some(_)) => return Err(InferError::NestedPromotedPattern(p.to_string())),
        (Pattern::Int(_), _) => out.theta.push(a.clone(), Type::Int),
        (Pattern::Con(Con::Nil, _), _) => {
            let elem = sigma.fresh_type();
            out.theta.push(Type::list(elem), a.clone());
        }
        (Pattern::Con(Con::Cons, ps), _) => {
            let elem = sigma.fresh_type();
            out.theta.push(Type::list(elem.clone()), a.clone());
            go(sigma, res, &ps[0], &elem, out)?;
            go(sigma, res, &ps[1], &Type::list(elem), out)?;
        }
        (Pattern::Con(Con::Pair, ps), _) => {
            let vars: Vec<Type> = ps.iter().map(|_| sigma.fresh_type()).collect();
            out.theta.push(Type::Con(TyCon::Pair, vars.clone()), a.clone());
            for (p, v) in ps.iter().zip(&vars) {
                go(sigma, res, p, v, out)?;
            }
        }
    }
    Ok(())
}
