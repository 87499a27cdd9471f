use crate::builtins::Builtin;
use crate::version::{grade_add, PartialLabel, Resource};
use crate::vlmini::{
    ctx_concat, ctx_scale, unify_all, Assumption, Con, Pattern, DependencyConstraint as C, Kind, TyCon, Type,
    TypeConstraint, TypeEnv, Term, VlminiError,
};

use super::{gen_label_deps, gen_var_deps, grade_context, synth_pattern, Infer, InferError, Rule, SynthResult, TraceEntry};

struct Out {
    ty: Type,
    usage: TypeEnv,
    theta: TypeConstraint,
    deps: C,
}

impl Out {
    fn pure(ty: Type) -> Out {
        Out { ty, usage: TypeEnv::new(), theta: TypeConstraint::new(), deps: C::Top }
    }
}

impl Infer {
    pub fn synth_type(&mut self, gamma: &TypeEnv, t: &Term) -> Result<SynthResult, InferError> {
        let o = self.synth(gamma, t)?;
        Ok(SynthResult { ty: o.ty, sigma_out: self.sigma.len(), usage: o.usage, theta: o.theta, deps: o.deps })
    }

    fn synth(&mut self, gamma: &TypeEnv, t: &Term) -> Result<Out, InferError> {
        match t {
            Term::Int(_) => Ok(Out::pure(Type::Int)),
            Term::Var(x) => match gamma.get(x) {
                Some(Assumption::Linear(_, a)) => Ok(Out {
                    usage: single(Assumption::Linear(x.clone(), a.clone())),
                    ..Out::pure(a.clone())
                }),
                Some(Assumption::Graded(_, _, Resource::Bottom)) => Err(InferError::UnusableVariable(x.clone())),
                Some(Assumption::Graded(_, a, _)) => Ok(Out {
                    usage: single(Assumption::Graded(x.clone(), a.clone(), Resource::unit())),
                    ..Out::pure(a.clone())
                }),
                None => match Builtin::from_name(x) {
                    Some(b) => Ok(Out::pure(b.instantiate(&mut self.sigma))),
                    None => Err(InferError::UnboundVariable(x.clone())),
                },
            },
            Term::Lam(p, body) => self.synth_lam(gamma, p, body),
            Term::App(f, a) => self.synth_app(gamma, f, a),
            Term::Promote(body) => self.synth_promote(gamma, body),
            Term::Con(Con::Nil, _) => Ok(Out::pure(Type::list(self.sigma.fresh_type()))),
            Term::Con(k, ts) => self.synth_con(gamma, k, ts),
            Term::Case(s, branches) => self.synth_case(gamma, s, branches),
            Term::VerOf(d, body) => self.synth_ver(gamma, d, body),
            Term::Unversion(body) => self.synth_unversion(gamma, body),
        }
    }

    #[inline(never)]
    fn synth_lam(&mut self, gamma: &TypeEnv, p: &Pattern, body: &Term) -> Result<Out, InferError> {
        let alpha = self.sigma.fresh_type();
        let ps = synth_pattern(&mut self.sigma, None, p, &alpha)?;
        let inner = gamma.extend(&ps.bindings);
        let mut o = self.synth(&inner, body)?;
        check_linear(&ps.bindings, &o.usage)?;
        let mut theta = ps.theta;
        theta.extend(o.theta);
        for x in ps.bindings.names() {
            o.usage.remove(x);
        }
        Ok(Out { ty: Type::arrow(alpha, o.ty), usage: o.usage, theta, deps: o.deps })
    }

    #[inline(never)]
    fn synth_app(&mut self, gamma: &TypeEnv, f: &Term, a: &Term) -> Result<Out, InferError> {
        let o1 = self.synth(gamma, f)?;
        let o2 = self.synth(gamma, a)?;
        let beta = self.sigma.fresh_type();
        let mut theta = o1.theta;
        theta.extend(o2.theta);
        theta.push(o1.ty, Type::arrow(o2.ty, beta.clone()));
        Ok(Out {
            ty: beta,
            usage: ctx_concat(&o1.usage, &o2.usage).map_err(InferError::Context)?,
            theta,
            deps: o1.deps.and(o2.deps),
        })
    }

    #[inline(never)]
    fn synth_promote(&mut self, gamma: &TypeEnv, body: &Term) -> Result<Out, InferError> {
        let fv = body.free_vars();
        let graded = grade_context(&gamma.restrict(|x| fv.contains(x)));
        reject_bottom(&graded)?;
        let o = self.synth(&graded, body)?;
        let alpha = self.sigma.fresh(Kind::Labels);
        let dv = body.dependency_vars();
        let generated = gen_var_deps(alpha, &graded.restrict(|x| dv.contains(x)));
        self.trace.push(TraceEntry { rule: Rule::Pr, generated: generated.clone() });
        let r = Resource::Var(alpha);
        Ok(Out {
            ty: Type::boxed(r.clone(), o.ty),
            usage: ctx_scale(&r, &o.usage).map_err(InferError::Context)?,
            theta: o.theta,
            deps: o.deps.and(generated),
        })
    }

    #[inline(never)]
    fn synth_con(&mut self, gamma: &TypeEnv, k: &Con, ts: &[Term]) -> Result<Out, InferError> {
        let o1 = self.synth(gamma, &ts[0])?;
        let o2 = self.synth(gamma, &ts[1])?;
        let mut theta = o1.theta;
        theta.extend(o2.theta);
        let ty = if *k == Con::Cons {
            theta.push(o2.ty, Type::list(o1.ty.clone()));
            Type::list(o1.ty)
        } else {
            Type::Con(TyCon::Pair, vec![o1.ty, o2.ty])
        };
        Ok(Out {
            ty,
            usage: ctx_concat(&o1.usage, &o2.usage).map_err(InferError::Context)?,
            theta,
            deps: o1.deps.and(o2.deps),
        })
    }

    #[inline(never)]
    fn synth_case(&mut self, gamma: &TypeEnv, s: &Term, branches: &[(Pattern, Term)]) -> Result<Out, InferError> {
        let os = self.synth(gamma, s)?;
        let mut theta = os.theta;
        let mut deps = os.deps;
        let mut ty: Option<Type> = None;
        let mut branch_usage = TypeEnv::new();
        for (p, body) in branches {
            let ps = synth_pattern(&mut self.sigma, None, p, &os.ty)?;
            let inner = gamma.extend(&ps.bindings);
            let mut ob = self.synth(&inner, body)?;
            check_linear(&ps.bindings, &ob.usage)?;
            theta.extend(ps.theta);
            theta.extend(ob.theta);
            deps = deps.and(ob.deps);
            match &ty {
                Some(b1) => theta.push(ob.ty, b1.clone()),
                None => ty = Some(ob.ty),
            }
            for x in ps.bindings.names() {
                ob.usage.remove(x);
            }
            branch_usage = ctx_union(&branch_usage, &ob.usage)?;
        }
        let ty = ty.unwrap_or_else(|| self.sigma.fresh_type());
        Ok(Out {
            ty,
            usage: ctx_concat(&os.usage, &branch_usage).map_err(InferError::Context)?,
            theta,
            deps,
        })
    }

    #[inline(never)]
    fn synth_ver(&mut self, gamma: &TypeEnv, d: &PartialLabel, body: &Term) -> Result<Out, InferError> {
        if let Some(reg) = &self.registry {
            for (m, v) in d.iter() {
                if !reg.contains(m, v) {
                    return Err(InferError::UnknownLabel { module: m.clone(), version: v.clone() });
                }
            }
        }
        let fv = body.free_vars();
        let graded = grade_context(&gamma.restrict(|x| fv.contains(x)));
        reject_bottom(&graded)?;
        let dv = body.dependency_vars();
        let generated = gen_label_deps(&graded.restrict(|x| dv.contains(x)), d)?;
        self.trace.push(TraceEntry { rule: Rule::Ver, generated: generated.clone() });
        let o = self.synth(&graded, body)?;
        Ok(Out { deps: o.deps.and(generated), ..o })
    }

    #[inline(never)]
    fn synth_unversion(&mut self, gamma: &TypeEnv, body: &Term) -> Result<Out, InferError> {
        let mut o = self.synth(gamma, body)?;
        let inner = match &o.ty {
            Type::Box(_, a) => (**a).clone(),
            Type::Var(_) => {
                let rho = self.sigma.fresh_resource();
                let beta = self.sigma.fresh_type();
                o.theta.push(o.ty.clone(), Type::boxed(rho, beta.clone()));
                beta
            }
            other => {
                let solved = unify_all(&o.theta).map(|s| s.apply_type(other));
                match solved {
                    Ok(Type::Box(_, a)) => *a,
                    _ => return Err(InferError::NotAVersionedValue(other.clone())),
                }
            }
        };
        let alpha = self.sigma.fresh_resource();
        Ok(Out { ty: Type::boxed(alpha, inner), ..o })
    }
}

fn single(a: Assumption) -> TypeEnv {
    let mut g = TypeEnv::new();
    g.insert(a);
    g
}

fn reject_bottom(g: &TypeEnv) -> Result<(), InferError> {
    match g.iter().find(|a| a.grade() == Some(&Resource::Bottom)) {
        Some(a) => Err(InferError::UnusableVariable(a.name().to_string())),
        None => Ok(()),
    }
}

/// Every linear binding of a pattern must be used exactly once, outside
/// any promotion.
fn check_linear(bindings: &TypeEnv, usage: &TypeEnv) -> Result<(), InferError> {
    for b in bindings.iter() {
        if let Assumption::Linear(x, _) = b {
            match usage.get(x) {
                Some(Assumption::Linear(..)) => {}
                Some(Assumption::Graded(..)) => return Err(InferError::Linearity(x.clone(), "is used inside a promotion")),
                None => return Err(InferError::Linearity(x.clone(), "is never used")),
            }
        }
    }
    Ok(())
}

/// Usage of alternative branches: a linear variable may appear in several
/// branches, since only one of them runs.
fn ctx_union(g1: &TypeEnv, g2: &TypeEnv) -> Result<TypeEnv, InferError> {
    let mut out = g1.clone();
    for b in g2.iter() {
        let merged = match (out.get(b.name()), b) {
            (None, _) => b.clone(),
            (Some(Assumption::Linear(x, a1)), Assumption::Linear(_, a2)) if a1 == a2 => {
                Assumption::Linear(x.clone(), a1.clone())
            }
            (Some(Assumption::Graded(x, a1, r1)), Assumption::Graded(_, a2, r2)) if a1 == a2 => {
                Assumption::Graded(x.clone(), a1.clone(), grade_add(r1, r2))
            }
            (Some(a), _) => {
                let err = match (a, b) {
                    (Assumption::Linear(..), Assumption::Linear(..)) | (Assumption::Graded(..), Assumption::Graded(..)) => {
                        VlminiError::TypeMismatch { var: b.name().to_string(), left: a.ty().clone(), right: b.ty().clone() }
                    }
                    _ => VlminiError::LinearClash(b.name().to_string()),
                };
                return Err(InferError::Context(err));
            }
        };
        out.insert(merged);
    }
    Ok(out)
}
