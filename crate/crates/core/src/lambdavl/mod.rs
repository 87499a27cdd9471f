//! λVL, the core calculus with versioned records: terms, small-step
//! evaluation with default version overwriting, and a declarative type
//! checker used as an oracle.

mod check;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use check::{check_declarative, synth_declarative};
pub use parse::parse_lterm;

use crate::version::VersionLabel;
use crate::vlmini::{Pattern, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LambdaVlError {
    #[error("{pos}: expected {expected}")]
    Parse { pos: usize, expected: String },
    #[error("evaluation ran out of fuel")]
    FuelExhausted(LTerm),
    #[error("term is outside the λVL fragment: {0}")]
    NotCore(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LPattern {
    Var(String),
    Box(String),
}

impl LPattern {
    pub fn name(&self) -> &str {
        match self {
            LPattern::Var(x) | LPattern::Box(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LTerm {
    Int(i64),
    Var(String),
    App(Box<LTerm>, Box<LTerm>),
    Lam(LPattern, Box<LTerm>),
    CLet(String, Box<LTerm>, Box<LTerm>),
    Promote(Box<LTerm>),
    VRecord(BTreeMap<VersionLabel, LTerm>),
    VRecordAt(BTreeMap<VersionLabel, LTerm>, VersionLabel),
    Extract(Box<LTerm>, VersionLabel),
}

impl LTerm {
    pub fn var(x: &str) -> LTerm {
        LTerm::Var(x.to_string())
    }

    pub fn app(f: LTerm, a: LTerm) -> LTerm {
        LTerm::App(Box::new(f), Box::new(a))
    }

    pub fn lam(p: LPattern, b: LTerm) -> LTerm {
        LTerm::Lam(p, Box::new(b))
    }

    pub fn promote(t: LTerm) -> LTerm {
        LTerm::Promote(Box::new(t))
    }

    pub fn clet(x: &str, a: LTerm, b: LTerm) -> LTerm {
        LTerm::CLet(x.to_string(), Box::new(a), Box::new(b))
    }

    pub fn extract(u: LTerm, l: VersionLabel) -> LTerm {
        LTerm::Extract(Box::new(u), l)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, LTerm::Int(_) | LTerm::Lam(..) | LTerm::Promote(_) | LTerm::VRecord(_))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            LTerm::Int(_) => {}
            LTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            LTerm::App(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            LTerm::Lam(p, b) => {
                bound.push(p.name().to_string());
                b.collect_free(bound, out);
                bound.pop();
            }
            LTerm::CLet(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            LTerm::Promote(t) | LTerm::Extract(t, _) => t.collect_free(bound, out),
            LTerm::VRecord(m) | LTerm::VRecordAt(m, _) => m.values().for_each(|t| t.collect_free(bound, out)),
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            LTerm::Int(_) | LTerm::Var(_) => 0,
            LTerm::App(a, b) | LTerm::CLet(_, a, b) => a.depth().max(b.depth()),
            LTerm::Lam(_, t) | LTerm::Promote(t) | LTerm::Extract(t, _) => t.depth(),
            LTerm::VRecord(m) | LTerm::VRecordAt(m, _) => m.values().map(LTerm::depth).max().unwrap_or(0),
        }
    }

    /// Capture-avoiding [s/x]t.
    pub fn subst(&self, x: &str, s: &LTerm) -> LTerm {
        let fv = s.free_vars();
        self.subst_with(x, s, &fv)
    }

    fn subst_with(&self, x: &str, s: &LTerm, fv: &BTreeSet<String>) -> LTerm {
        match self {
            LTerm::Int(_) => self.clone(),
            LTerm::Var(y) if y == x => s.clone(),
            LTerm::Var(_) => self.clone(),
            LTerm::App(a, b) => LTerm::app(a.subst_with(x, s, fv), b.subst_with(x, s, fv)),
            LTerm::Lam(p, b) => {
                let (y, b) = under_binder(p.name(), b, x, s, fv);
                let p = match p {
                    LPattern::Var(_) => LPattern::Var(y),
                    LPattern::Box(_) => LPattern::Box(y),
                };
                LTerm::lam(p, b)
            }
            LTerm::CLet(y, a, b) => {
                let a = a.subst_with(x, s, fv);
                let (y, b) = under_binder(y, b, x, s, fv);
                LTerm::CLet(y, Box::new(a), Box::new(b))
            }
            LTerm::Promote(t) => LTerm::promote(t.subst_with(x, s, fv)),
            LTerm::Extract(t, l) => LTerm::extract(t.subst_with(x, s, fv), l.clone()),
            LTerm::VRecord(m) => LTerm::VRecord(subst_map(m, x, s, fv)),
            LTerm::VRecordAt(m, l) => LTerm::VRecordAt(subst_map(m, x, s, fv), l.clone()),
        }
    }

    /// Default version overwriting t@l.
    pub fn overwrite(&self, l: &VersionLabel) -> LTerm {
        match self {
            LTerm::Int(_) | LTerm::Var(_) | LTerm::Promote(_) | LTerm::VRecord(_) => self.clone(),
            LTerm::Lam(p, t) => LTerm::lam(p.clone(), t.overwrite(l)),
            LTerm::App(t, u) => LTerm::app(t.overwrite(l), u.overwrite(l)),
            LTerm::CLet(x, a, b) => LTerm::clet(x, a.overwrite(l), b.overwrite(l)),
            LTerm::Extract(u, l2) => LTerm::extract(u.overwrite(l), l2.clone()),
            LTerm::VRecordAt(m, chosen) => {
                let chosen = if m.contains_key(l) { l.clone() } else { chosen.clone() };
                LTerm::VRecordAt(m.clone(), chosen)
            }
        }
    }
}

fn subst_map(
    m: &BTreeMap<VersionLabel, LTerm>,
    x: &str,
    s: &LTerm,
    fv: &BTreeSet<String>,
) -> BTreeMap<VersionLabel, LTerm> {
    m.iter().map(|(l, t)| (l.clone(), t.subst_with(x, s, fv))).collect()
}

/// Substitutes under binder `y`, renaming it when it would capture.
fn under_binder(y: &str, body: &LTerm, x: &str, s: &LTerm, fv: &BTreeSet<String>) -> (String, LTerm) {
    if y == x {
        return (y.to_string(), body.clone());
    }
    if !fv.contains(y) {
        return (y.to_string(), body.subst_with(x, s, fv));
    }
    let taken: BTreeSet<String> = fv.union(&body.free_vars()).cloned().collect();
    let mut fresh = format!("{y}'");
    while taken.contains(&fresh) {
        fresh.push('\'');
    }
    let renamed = body.subst(y, &LTerm::Var(fresh.clone()));
    (fresh.clone(), renamed.subst_with(x, s, fv))
}

/// How E-clet picks l_k when a versioned record is bound.
pub type RecordChoice = fn(&BTreeMap<VersionLabel, LTerm>) -> VersionLabel;

/// The newest label of the record: the greatest in label order.
pub fn newest_choice(m: &BTreeMap<VersionLabel, LTerm>) -> VersionLabel {
    m.keys().next_back().expect("versioned records are non-empty").clone()
}

/// One reduction step at the redex picked by the evaluation context, or
/// `None` when the term is a value or stuck.
pub fn eval_step(t: &LTerm) -> Option<LTerm> {
    eval_step_with(t, newest_choice)
}

pub fn eval_step_with(t: &LTerm, choose: RecordChoice) -> Option<LTerm> {
    match t {
        LTerm::App(f, a) => match &**f {
            LTerm::Lam(LPattern::Var(x), body) => Some(body.subst(x, a)),
            LTerm::Lam(LPattern::Box(x), body) => Some(LTerm::CLet(x.clone(), a.clone(), body.clone())),
            _ => Some(LTerm::app(eval_step_with(f, choose)?, (**a).clone())),
        },
        LTerm::Extract(u, l) => match &**u {
            LTerm::Promote(t) => Some(t.overwrite(l)),
            LTerm::VRecord(m) => m.get(l).map(|t| t.overwrite(l)),
            _ => Some(LTerm::extract(eval_step_with(u, choose)?, l.clone())),
        },
        LTerm::CLet(x, a, b) => match &**a {
            LTerm::Promote(t) => Some(b.subst(x, t)),
            LTerm::VRecord(m) => Some(b.subst(x, &LTerm::VRecordAt(m.clone(), choose(m)))),
            _ => Some(LTerm::CLet(x.clone(), Box::new(eval_step_with(a, choose)?), b.clone())),
        },
        LTerm::VRecordAt(m, l) => m.get(l).map(|t| t.overwrite(l)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub term: LTerm,
    pub steps: usize,
    /// False when evaluation stopped at a non-value.
    pub value: bool,
}

/// Iterates `eval_step` to a value or a stuck term; `trace` receives every
/// intermediate term.
pub fn eval(t: &LTerm, fuel: usize, trace: &mut dyn FnMut(&LTerm)) -> Result<EvalOutcome, LambdaVlError> {
    let mut cur = t.clone();
    for steps in 0..=fuel {
        trace(&cur);
        match eval_step(&cur) {
            Some(next) if steps < fuel => cur = next,
            Some(_) => break,
            None => {
                let value = cur.is_value();
                return Ok(EvalOutcome { term: cur, steps, value });
            }
        }
    }
    Err(LambdaVlError::FuelExhausted(cur))
}

/// The λVL counterpart of a VLMini term in the shared fragment: integers,
/// variables, application, λx, λ[x] and promotion.
pub fn from_vlmini(t: &Term) -> Result<LTerm, LambdaVlError> {
    Ok(match t {
        Term::Int(n) => LTerm::Int(*n),
        Term::Var(x) => LTerm::Var(x.clone()),
        Term::App(f, a) => LTerm::app(from_vlmini(f)?, from_vlmini(a)?),
        Term::Lam(Pattern::Var(x), b) => LTerm::lam(LPattern::Var(x.clone()), from_vlmini(b)?),
        Term::Lam(Pattern::Box(p), b) => match &**p {
            Pattern::Var(x) => LTerm::lam(LPattern::Box(x.clone()), from_vlmini(b)?),
            _ => return Err(LambdaVlError::NotCore(t.to_string())),
        },
        Term::Promote(b) => LTerm::promote(from_vlmini(b)?),
        _ => return Err(LambdaVlError::NotCore(t.to_string())),
    })
}

impl fmt::Display for LPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LPattern::Var(x) => write!(f, "{x}"),
            LPattern::Box(x) => write!(f, "[{x}]"),
        }
    }
}

fn fmt_record(f: &mut fmt::Formatter<'_>, m: &BTreeMap<VersionLabel, LTerm>) -> fmt::Result {
    write!(f, "<")?;
    for (i, (l, t)) in m.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{l}={t}")?;
    }
    Ok(())
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LTerm::Int(n) if *n < 0 => write!(f, "({n})"),
            LTerm::Int(n) => write!(f, "{n}"),
            LTerm::Var(x) => write!(f, "{x}"),
            LTerm::App(a, b) => {
                match &**a {
                    LTerm::Lam(..) | LTerm::CLet(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match &**b {
                    LTerm::App(..) | LTerm::Lam(..) | LTerm::CLet(..) => write!(f, " ({b})"),
                    _ => write!(f, " {b}"),
                }
            }
            LTerm::Lam(p, b) => write!(f, "\\{p}. {b}"),
            LTerm::CLet(x, a, b) => write!(f, "let [{x}] = {a} in {b}"),
            LTerm::Promote(t) => write!(f, "[{t}]"),
            LTerm::VRecord(m) => {
                fmt_record(f, m)?;
                write!(f, ">")
            }
            LTerm::VRecordAt(m, l) => {
                fmt_record(f, m)?;
                write!(f, " | {l}>")
            }
            LTerm::Extract(u, l) => match &**u {
                LTerm::Promote(_) | LTerm::VRecord(_) | LTerm::Var(_) | LTerm::Extract(..) => write!(f, "{u}.{l}"),
                _ => write!(f, "({u}).{l}"),
            },
        }
    }
}
