//! Call-by-need evaluator for surface terms. Used to run specialized
//! programs; version control terms are transparent here.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::ast::{SPattern, SurfaceTerm, TermKind};
use crate::builtins::Builtin;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("runtime type error: {0}")]
    TypeError(String),
    #[error("no case alternative matched")]
    PatternMatchFailure,
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{0}` applied to an empty list")]
    EmptyList(&'static str),
    #[error("evaluation ran out of fuel")]
    FuelExhausted,
}

type Thunk<'p> = Rc<RefCell<ThunkState<'p>>>;

enum ThunkState<'p> {
    Pending(&'p SurfaceTerm, Env<'p>),
    Forcing,
    Done(Value<'p>),
}

#[derive(Clone, Default)]
struct Env<'p>(Option<Rc<EnvNode<'p>>>);

struct EnvNode<'p> {
    name: &'p str,
    value: Thunk<'p>,
    next: Env<'p>,
}

impl<'p> Env<'p> {
    fn bind(&self, name: &'p str, value: Thunk<'p>) -> Env<'p> {
        Env(Some(Rc::new(EnvNode { name, value, next: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<Thunk<'p>> {
        let mut cur = &self.0;
        while let Some(n) = cur {
            if n.name == name {
                return Some(n.value.clone());
            }
            cur = &n.next.0;
        }
        None
    }
}

#[derive(Clone)]
enum Value<'p> {
    Int(i64),
    Nil,
    Cons(Thunk<'p>, Thunk<'p>),
    Pair(Thunk<'p>, Thunk<'p>),
    Closure(Env<'p>, &'p str, &'p SurfaceTerm),
    Prim(Builtin, Vec<Thunk<'p>>),
}

/// A fully forced result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Int(i64),
    List(Vec<Output>),
    Pair(Box<Output>, Box<Output>),
    Function,
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Int(n) => write!(f, "{n}"),
            Output::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Output::Pair(a, b) => write!(f, "({a}, {b})"),
            Output::Function => write!(f, "<function>"),
        }
    }
}

pub struct Evaluator<'p> {
    globals: BTreeMap<&'p str, Thunk<'p>>,
    fuel: u64,
}

impl<'p> Evaluator<'p> {
    /// Top-level definitions are evaluated lazily, at most once each.
    pub fn new(defs: &'p BTreeMap<String, SurfaceTerm>, fuel: u64) -> Self {
        let globals = defs.iter().map(|(k, t)| (k.as_str(), pending(t, Env::default()))).collect();
        Evaluator { globals, fuel }
    }

    /// Evaluates the named definition and forces the whole result.
    pub fn run(&mut self, entry: &str) -> Result<Output, EvalError> {
        let th = self.globals.get(entry).cloned().ok_or_else(|| EvalError::UnboundVariable(entry.to_string()))?;
        self.deep(&th)
    }

    /// Evaluates a closed term against the global definitions.
    pub fn eval_term(&mut self, t: &'p SurfaceTerm) -> Result<Output, EvalError> {
        let th = pending(t, Env::default());
        self.deep(&th)
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn deep(&mut self, th: &Thunk<'p>) -> Result<Output, EvalError> {
        Ok(match self.force(th)? {
            Value::Int(n) => Output::Int(n),
            Value::Pair(a, b) => Output::Pair(Box::new(self.deep(&a)?), Box::new(self.deep(&b)?)),
            v @ (Value::Nil | Value::Cons(..)) => {
                let items = self.spine(v)?;
                Output::List(items.iter().map(|x| self.deep(x)).collect::<Result<_, _>>()?)
            }
            Value::Closure(..) | Value::Prim(..) => Output::Function,
        })
    }

    fn force(&mut self, th: &Thunk<'p>) -> Result<Value<'p>, EvalError> {
        let state = std::mem::replace(&mut *th.borrow_mut(), ThunkState::Forcing);
        match state {
            ThunkState::Done(v) => {
                *th.borrow_mut() = ThunkState::Done(v.clone());
                Ok(v)
            }
            ThunkState::Forcing => Err(EvalError::TypeError("value depends on itself".into())),
            ThunkState::Pending(t, env) => {
                let r = self.eval(t, &env);
                match &r {
                    Ok(v) => *th.borrow_mut() = ThunkState::Done(v.clone()),
                    Err(_) => *th.borrow_mut() = ThunkState::Pending(t, env),
                }
                r
            }
        }
    }

    fn eval(&mut self, t: &'p SurfaceTerm, env: &Env<'p>) -> Result<Value<'p>, EvalError> {
        self.tick()?;
        match &t.kind {
            TermKind::Int(n) => Ok(Value::Int(*n)),
            TermKind::Var(x) => {
                if let Some(th) = env.lookup(x).or_else(|| self.globals.get(x.as_str()).cloned()) {
                    return self.force(&th);
                }
                match Builtin::from_name(x) {
                    Some(b) => Ok(Value::Prim(b, Vec::new())),
                    None => Err(EvalError::UnboundVariable(x.clone())),
                }
            }
            TermKind::Lam(x, b) => Ok(Value::Closure(env.clone(), x, b)),
            TermKind::App(f, a) => {
                let fv = self.eval(f, env)?;
                self.apply(fv, pending(a, env.clone()))
            }
            TermKind::Let(x, a, b) => {
                let env2 = env.bind(x, pending(a, env.clone()));
                self.eval(b, &env2)
            }
            TermKind::Pair(a, b) => Ok(Value::Pair(pending(a, env.clone()), pending(b, env.clone()))),
            TermKind::List(ts) => {
                let mut v = Value::Nil;
                for t in ts.iter().rev() {
                    v = Value::Cons(pending(t, env.clone()), done(v));
                }
                Ok(v)
            }
            TermKind::Case(s, bs) => {
                let scrut = pending(s, env.clone());
                for (p, body) in bs {
                    let mut env2 = env.clone();
                    if self.matches(p, &scrut, &mut env2)? {
                        return self.eval(body, &env2);
                    }
                }
                Err(EvalError::PatternMatchFailure)
            }
            TermKind::VerOf(_, b) | TermKind::Unversion(b) => self.eval(b, env),
        }
    }

    fn matches(&mut self, p: &'p SPattern, th: &Thunk<'p>, env: &mut Env<'p>) -> Result<bool, EvalError> {
        match p {
            SPattern::Var(x) => {
                *env = env.bind(x, th.clone());
                Ok(true)
            }
            SPattern::Int(n) => Ok(matches!(self.force(th)?, Value::Int(m) if m == *n)),
            SPattern::Pair(a, b) => match self.force(th)? {
                Value::Pair(x, y) => Ok(self.matches(a, &x, env)? && self.matches(b, &y, env)?),
                _ => Err(EvalError::TypeError("expected a pair".into())),
            },
            SPattern::Cons(h, t) => match self.force(th)? {
                Value::Cons(x, y) => Ok(self.matches(h, &x, env)? && self.matches(t, &y, env)?),
                Value::Nil => Ok(false),
                _ => Err(EvalError::TypeError("expected a list".into())),
            },
            SPattern::List(ps) => {
                let mut cur = th.clone();
                for p in ps {
                    match self.force(&cur)? {
                        Value::Cons(x, y) => {
                            if !self.matches(p, &x, env)? {
                                return Ok(false);
                            }
                            cur = y;
                        }
                        Value::Nil => return Ok(false),
                        _ => return Err(EvalError::TypeError("expected a list".into())),
                    }
                }
                Ok(matches!(self.force(&cur)?, Value::Nil))
            }
        }
    }

    fn apply(&mut self, f: Value<'p>, arg: Thunk<'p>) -> Result<Value<'p>, EvalError> {
        self.tick()?;
        match f {
            Value::Closure(env, x, body) => {
                let env2 = env.bind(x, arg);
                self.eval(body, &env2)
            }
            Value::Prim(b, mut args) => {
                args.push(arg);
                if args.len() < b.arity() {
                    Ok(Value::Prim(b, args))
                } else {
                    self.prim(b, args)
                }
            }
            _ => Err(EvalError::TypeError("application of a non-function".into())),
        }
    }

    fn int(&mut self, th: &Thunk<'p>) -> Result<i64, EvalError> {
        match self.force(th)? {
            Value::Int(n) => Ok(n),
            _ => Err(EvalError::TypeError("expected an integer".into())),
        }
    }

    fn list(&mut self, th: &Thunk<'p>) -> Result<Vec<Thunk<'p>>, EvalError> {
        let v = self.force(th)?;
        self.spine(v)
    }

    fn spine(&mut self, mut v: Value<'p>) -> Result<Vec<Thunk<'p>>, EvalError> {
        let mut out = Vec::new();
        loop {
            match v {
                Value::Nil => return Ok(out),
                Value::Cons(h, t) => {
                    out.push(h);
                    v = self.force(&t)?;
                }
                _ => return Err(EvalError::TypeError("expected a list".into())),
            }
        }
    }

    fn call(&mut self, f: &Thunk<'p>, args: Vec<Thunk<'p>>) -> Result<Value<'p>, EvalError> {
        let mut v = self.force(f)?;
        for a in args {
            v = self.apply(v, a)?;
        }
        Ok(v)
    }

    fn prim(&mut self, b: Builtin, args: Vec<Thunk<'p>>) -> Result<Value<'p>, EvalError> {
        use Builtin::*;
        let arith = |this: &mut Self, f: fn(i64, i64) -> Option<i64>| -> Result<Value<'p>, EvalError> {
            let x = this.int(&args[0])?;
            let y = this.int(&args[1])?;
            f(x, y).map(Value::Int).ok_or(EvalError::DivisionByZero)
        };
        match b {
            Add => arith(self, |x, y| Some(x.wrapping_add(y))),
            Sub => arith(self, |x, y| Some(x.wrapping_sub(y))),
            Mul => arith(self, |x, y| Some(x.wrapping_mul(y))),
            Div => arith(self, |x, y| x.checked_div(y)),
            Mod => arith(self, |x, y| x.checked_rem(y)),
            Eq => arith(self, |x, y| Some((x == y) as i64)),
            Ne => arith(self, |x, y| Some((x != y) as i64)),
            Lt => arith(self, |x, y| Some((x < y) as i64)),
            Le => arith(self, |x, y| Some((x <= y) as i64)),
            Gt => arith(self, |x, y| Some((x > y) as i64)),
            Ge => arith(self, |x, y| Some((x >= y) as i64)),
            And => {
                if self.int(&args[0])? == 0 {
                    Ok(Value::Int(0))
                } else {
                    Ok(Value::Int((self.int(&args[1])? != 0) as i64))
                }
            }
            Or => {
                if self.int(&args[0])? != 0 {
                    Ok(Value::Int(1))
                } else {
                    Ok(Value::Int((self.int(&args[1])? != 0) as i64))
                }
            }
            Cons => Ok(Value::Cons(args[0].clone(), args[1].clone())),
            Append => {
                let xs = self.list(&args[0])?;
                let tail = self.force(&args[1])?;
                Ok(rebuild(xs, tail))
            }
            Length => Ok(Value::Int(self.list(&args[0])?.len() as i64)),
            Null => Ok(Value::Int(self.list(&args[0])?.is_empty() as i64)),
            Sum => {
                let mut acc = 0i64;
                for x in self.list(&args[0])? {
                    acc = acc.wrapping_add(self.int(&x)?);
                }
                Ok(Value::Int(acc))
            }
            Sort => {
                let mut ns = Vec::new();
                for x in self.list(&args[0])? {
                    ns.push(self.int(&x)?);
                }
                ns.sort();
                Ok(rebuild(ns.into_iter().map(|n| done(Value::Int(n))).collect(), Value::Nil))
            }
            Reverse => {
                let mut xs = self.list(&args[0])?;
                xs.reverse();
                Ok(rebuild(xs, Value::Nil))
            }
            Head => self.list(&args[0])?.first().map(|h| self.force(h)).unwrap_or(Err(EvalError::EmptyList("head"))),
            Tail => {
                let xs = self.list(&args[0])?;
                if xs.is_empty() {
                    return Err(EvalError::EmptyList("tail"));
                }
                Ok(rebuild(xs[1..].to_vec(), Value::Nil))
            }
            Concat => {
                let mut all = Vec::new();
                for xs in self.list(&args[0])? {
                    all.extend(self.list(&xs)?);
                }
                Ok(rebuild(all, Value::Nil))
            }
            Map => {
                let xs = self.list(&args[1])?;
                let mut out = Vec::new();
                for x in xs {
                    let v = self.call(&args[0], vec![x])?;
                    out.push(done(v));
                }
                Ok(rebuild(out, Value::Nil))
            }
            Filter => {
                let xs = self.list(&args[1])?;
                let mut out = Vec::new();
                for x in xs {
                    match self.call(&args[0], vec![x.clone()])? {
                        Value::Int(0) => {}
                        Value::Int(_) => out.push(x),
                        _ => return Err(EvalError::TypeError("filter predicate must return an integer".into())),
                    }
                }
                Ok(rebuild(out, Value::Nil))
            }
            Foldl => {
                let xs = self.list(&args[2])?;
                let mut acc = args[1].clone();
                for x in xs {
                    acc = done(self.call(&args[0], vec![acc, x])?);
                }
                self.force(&acc)
            }
            Foldr => {
                let xs = self.list(&args[2])?;
                let mut acc = args[1].clone();
                for x in xs.into_iter().rev() {
                    acc = done(self.call(&args[0], vec![x, acc])?);
                }
                self.force(&acc)
            }
        }
    }
}

fn pending<'p>(t: &'p SurfaceTerm, env: Env<'p>) -> Thunk<'p> {
    Rc::new(RefCell::new(ThunkState::Pending(t, env)))
}

fn done(v: Value<'_>) -> Thunk<'_> {
    Rc::new(RefCell::new(ThunkState::Done(v)))
}

fn rebuild<'p>(items: Vec<Thunk<'p>>, tail: Value<'p>) -> Value<'p> {
    items.into_iter().rev().fold(tail, |acc, h| Value::Cons(h, done(acc)))
}

/// Runs `entry` from a set of definitions with a step budget.
pub fn run_program(defs: &BTreeMap<String, SurfaceTerm>, entry: &str, fuel: u64) -> Result<Output, EvalError> {
    Evaluator::new(defs, fuel).run(entry)
}
