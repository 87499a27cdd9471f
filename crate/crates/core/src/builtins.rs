//! Primitive operators and list functions available in every module.
//!
//! Builtins are constants: they are not part of any typing context, use no
//! resources and are instantiated afresh at every occurrence. Each argument
//! position is boxed with its own fresh resource, matching the shape that
//! the translation gives to user functions.

use crate::vlmini::{KindContext, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Append,
    Cons,
    Length,
    Sum,
    Map,
    Foldl,
    Foldr,
    Filter,
    Sort,
    Reverse,
    Concat,
    Head,
    Tail,
    Null,
}

use Builtin::*;

pub const ALL: &[Builtin] = &[
    Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Append, Cons, Length, Sum, Map, Foldl, Foldr, Filter,
    Sort, Reverse, Concat, Head, Tail, Null,
];

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        ALL.iter().copied().find(|b| b.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Eq => "==",
            Ne => "/=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            And => "&&",
            Or => "||",
            Append => "++",
            Cons => ":",
            Length => "length",
            Sum => "sum",
            Map => "map",
            Foldl => "foldl",
            Foldr => "foldr",
            Filter => "filter",
            Sort => "sort",
            Reverse => "reverse",
            Concat => "concat",
            Head => "head",
            Tail => "tail",
            Null => "null",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Length | Sum | Sort | Reverse | Concat | Head | Tail | Null => 1,
            Foldl | Foldr => 3,
            _ => 2,
        }
    }

    /// A fresh instance of the builtin's type.
    pub fn instantiate(self, sigma: &mut KindContext) -> Type {
        let s = sigma;
        let int = || Type::Int;
        let list = Type::list;
        let arr = Type::arrow;
        match self {
            Add | Sub | Mul | Div | Mod | Eq | Ne | Lt | Le | Gt | Ge | And | Or => {
                let a = bx(s, int());
                let b = bx(s, int());
                arr(a, arr(b, int()))
            }
            Append | Cons => {
                let a = s.fresh_type();
                let first = if self == Cons { a.clone() } else { list(a.clone()) };
                let x = bx(s, first);
                let y = bx(s, list(a.clone()));
                arr(x, arr(y, list(a)))
            }
            Length | Null => {
                let a = s.fresh_type();
                arr(bx(s, list(a)), int())
            }
            Sum => arr(bx(s, list(int())), int()),
            Sort => arr(bx(s, list(int())), list(int())),
            Reverse | Tail => {
                let a = s.fresh_type();
                arr(bx(s, list(a.clone())), list(a))
            }
            Head => {
                let a = s.fresh_type();
                arr(bx(s, list(a.clone())), a)
            }
            Concat => {
                let a = s.fresh_type();
                arr(bx(s, list(list(a.clone()))), list(a))
            }
            Map => {
                let a = s.fresh_type();
                let b = s.fresh_type();
                let f = arr(bx(s, a.clone()), b.clone());
                let f = bx(s, f);
                arr(f, arr(bx(s, list(a)), list(b)))
            }
            Filter => {
                let a = s.fresh_type();
                let f = arr(bx(s, a.clone()), int());
                let f = bx(s, f);
                arr(f, arr(bx(s, list(a.clone())), list(a)))
            }
            Foldl => {
                let a = s.fresh_type();
                let b = s.fresh_type();
                let step = arr(bx(s, a.clone()), b.clone());
                let f = arr(bx(s, b.clone()), step);
                let f = bx(s, f);
                let z = bx(s, b.clone());
                arr(f, arr(z, arr(bx(s, list(a)), b)))
            }
            Foldr => {
                let a = s.fresh_type();
                let b = s.fresh_type();
                let step = arr(bx(s, b.clone()), b.clone());
                let f = arr(bx(s, a.clone()), step);
                let f = bx(s, f);
                let z = bx(s, b.clone());
                arr(f, arr(z, arr(bx(s, list(a)), b)))
            }
        }
    }
}

fn bx(sigma: &mut KindContext, a: Type) -> Type {
    Type::boxed(sigma.fresh_resource(), a)
}
