use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::ast::{Definition, SPattern, Span, SurfaceModule, SurfaceTerm, TermKind};
use super::lexer::{lex, Tok, Token};
use super::SurfaceError;
use crate::version::{PartialLabel, Version};

/// Parses and validates one module source file.
pub fn parse_module(source: &str) -> Result<SurfaceModule, SurfaceError> {
    let toks = lex(source)?;
    let mut p = Parser { toks: &toks, pos: 0, end: toks.len() - 1 };
    p.expect(Tok::Module)?;
    let name = p.ident()?;
    p.expect(Tok::Where)?;
    let mut imports = Vec::new();
    while p.peek() == &Tok::Import {
        p.bump();
        imports.push(p.ident()?);
    }
    let mut defs: Vec<Definition> = Vec::new();
    while p.peek() != &Tok::Eof {
        let start = p.pos;
        if p.toks[start].span.col != 1 {
            return Err(p.error(&["a top-level definition starting in column 1"]));
        }
        let end = (start + 1..toks.len() - 1).find(|&i| toks[i].span.col == 1).unwrap_or(toks.len() - 1);
        let mut dp = Parser { toks: &toks, pos: start, end };
        let def = dp.definition()?;
        if dp.peek() != &Tok::Eof {
            return Err(dp.error(&["an operator", "an argument", "end of definition"]));
        }
        if defs.iter().any(|d| d.name == def.name) {
            return Err(SurfaceError::DuplicateDefinition(def.name));
        }
        defs.push(def);
        p.pos = end;
    }
    let module = SurfaceModule { name, version: None, imports, defs };
    validate(&module)?;
    Ok(module)
}

/// Parses a single expression, for tests and tools.
pub fn parse_term(source: &str) -> Result<SurfaceTerm, SurfaceError> {
    let toks = lex(source)?;
    let mut p = Parser { toks: &toks, pos: 0, end: toks.len() - 1 };
    let t = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    check_term(&t)?;
    Ok(t)
}

fn validate(m: &SurfaceModule) -> Result<(), SurfaceError> {
    let names: BTreeMap<&str, usize> = m.defs.iter().enumerate().map(|(i, d)| (d.name.as_str(), i)).collect();
    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..m.defs.len()).map(|i| g.add_node(i)).collect();
    for (i, d) in m.defs.iter().enumerate() {
        check_term(&d.body)?;
        for x in d.body.free_vars() {
            if x == d.name {
                return Err(SurfaceError::RecursiveDefinition(d.name.clone()));
            }
            if let Some(&j) = names.get(x.as_str()) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    for scc in tarjan_scc(&g) {
        if scc.len() > 1 {
            let mut cycle: Vec<&str> = scc.iter().map(|n| m.defs[g[*n]].name.as_str()).collect();
            cycle.sort();
            return Err(SurfaceError::RecursiveDefinition(cycle.join(", ")));
        }
    }
    Ok(())
}

/// Rejects recursive lets and repeated binders in one pattern or lambda.
fn check_term(t: &SurfaceTerm) -> Result<(), SurfaceError> {
    let mut result = Ok(());
    t.walk(&mut |n| {
        if result.is_err() {
            return;
        }
        match &n.kind {
            TermKind::Let(x, t1, _) if t1.free_vars().contains(x) => {
                result = Err(SurfaceError::RecursiveDefinition(x.clone()));
            }
            TermKind::Case(_, bs) => {
                for (p, _) in bs {
                    let mut seen = BTreeSet::new();
                    for x in p.binders() {
                        if x != "_" && !seen.insert(x) {
                            result = Err(SurfaceError::DuplicatePatternVar(x.to_string()));
                        }
                    }
                }
            }
            _ => {}
        }
    });
    result
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Index of the first token past the current declaration.
    end: usize,
}

const EOF: Tok = Tok::Eof;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &Tok {
        if self.pos + k >= self.end {
            &EOF
        } else {
            &self.toks[self.pos + k].tok
        }
    }

    fn span(&self) -> Span {
        let i = self.pos.min(self.end).min(self.toks.len() - 1);
        self.toks[i].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1).min(self.end.saturating_sub(1))].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn error(&self, expected: &[&str]) -> SurfaceError {
        SurfaceError::Syntax {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), SurfaceError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&t.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<String, SurfaceError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn finish(&self, kind: TermKind, start: Span) -> SurfaceTerm {
        SurfaceTerm::at(kind, start.join(self.prev_span()))
    }

    fn definition(&mut self) -> Result<Definition, SurfaceError> {
        let start = self.span();
        let name = self.ident()?;
        let (params, body) = self.binding_rest()?;
        let body = wrap_lams(params, body);
        Ok(Definition { name, body, span: start.join(self.prev_span()) })
    }

    /// `x1 .. xn = e` after the bound name.
    fn binding_rest(&mut self) -> Result<(Vec<(String, Span)>, SurfaceTerm), SurfaceError> {
        let mut params = Vec::new();
        while let Tok::Ident(x) = self.peek().clone() {
            let sp = self.span();
            self.bump();
            if x != "_" && params.iter().any(|(y, _)| *y == x) {
                return Err(SurfaceError::DuplicatePatternVar(x));
            }
            params.push((x, sp));
        }
        self.expect(Tok::Eq)?;
        let body = self.expr()?;
        Ok((params, body))
    }

    fn expr(&mut self) -> Result<SurfaceTerm, SurfaceError> {
        let start = self.span();
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let mut params = Vec::new();
                while let Tok::Ident(x) = self.peek().clone() {
                    let sp = self.span();
                    self.bump();
                    if x != "_" && params.iter().any(|(y, _)| *y == x) {
                        return Err(SurfaceError::DuplicatePatternVar(x));
                    }
                    params.push((x, sp));
                }
                if params.is_empty() {
                    return Err(self.error(&["lambda parameter"]));
                }
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                let mut t = wrap_lams(params, body);
                t.span = start.join(self.prev_span());
                Ok(t)
            }
            Tok::Let => {
                self.bump();
                let mut binds = Vec::new();
                loop {
                    let bstart = self.span();
                    let x = self.ident()?;
                    let (params, rhs) = self.binding_rest()?;
                    binds.push((x, wrap_lams(params, rhs), bstart));
                    if self.peek() == &Tok::Semi {
                        self.bump();
                        continue;
                    }
                    break;
                }
                self.expect(Tok::In)?;
                let mut body = self.expr()?;
                let end = self.prev_span();
                for (x, rhs, bstart) in binds.into_iter().rev() {
                    let sp = bstart.join(end);
                    body = SurfaceTerm::at(TermKind::Let(x, Box::new(rhs), Box::new(body)), sp);
                }
                body.span = start.join(end);
                Ok(body)
            }
            Tok::If => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let a = self.expr()?;
                self.expect(Tok::Else)?;
                let b = self.expr()?;
                Ok(self.finish(
                    TermKind::Case(Box::new(c), vec![(SPattern::Int(0), b), (SPattern::Var("_".into()), a)]),
                    start,
                ))
            }
            Tok::Case => {
                self.bump();
                let s = self.expr()?;
                self.expect(Tok::Of)?;
                self.expect(Tok::LBrace)?;
                let mut alts = Vec::new();
                while self.peek() != &Tok::RBrace {
                    let p = self.pattern()?;
                    self.expect(Tok::Arrow)?;
                    let t = self.expr()?;
                    alts.push((p, t));
                    if self.peek() == &Tok::Semi {
                        self.bump();
                    } else if self.peek() != &Tok::RBrace {
                        return Err(self.error(&["`;`", "`}`"]));
                    }
                }
                self.bump();
                if alts.is_empty() {
                    return Err(self.error(&["case alternative"]));
                }
                Ok(self.finish(TermKind::Case(Box::new(s), alts), start))
            }
            Tok::Ver => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let mut pairs = Vec::new();
                loop {
                    let m = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let v = match self.bump() {
                        Tok::Version(v) => v,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(&["version X.Y.Z"]));
                        }
                    };
                    let v: Version = v.parse().map_err(|_| self.error(&["version X.Y.Z"]))?;
                    pairs.push((m, v));
                    if self.peek() == &Tok::Comma {
                        self.bump();
                        continue;
                    }
                    break;
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Of)?;
                let t = self.expr()?;
                Ok(self.finish(TermKind::VerOf(PartialLabel::new(pairs), Box::new(t)), start))
            }
            _ => self.binary(0),
        }
    }

    fn binary(&mut self, level: usize) -> Result<SurfaceTerm, SurfaceError> {
        const LEVELS: &[(&[&str], Assoc)] = &[
            (&["||"], Assoc::Right),
            (&["&&"], Assoc::Right),
            (&["==", "/=", "<", "<=", ">", ">="], Assoc::None),
            (&[":", "++"], Assoc::Right),
            (&["+", "-"], Assoc::Left),
            (&["*", "/", "%"], Assoc::Left),
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let (ops, assoc) = LEVELS[level];
        let start = self.span();
        let lhs = self.binary(level + 1)?;
        let op_here = |p: &Self| match p.peek() {
            Tok::Op(o) if ops.contains(&o.as_str()) => Some(o.clone()),
            _ => None,
        };
        match assoc {
            Assoc::Left => {
                let mut lhs = lhs;
                while let Some(op) = op_here(self) {
                    let osp = self.span();
                    self.bump();
                    let rhs = self.operand(level + 1)?;
                    let f = SurfaceTerm::at(TermKind::Var(op), osp);
                    let partial = self.finish(TermKind::App(Box::new(f), Box::new(lhs)), start);
                    lhs = self.finish(TermKind::App(Box::new(partial), Box::new(rhs)), start);
                }
                Ok(lhs)
            }
            Assoc::Right | Assoc::None => {
                let Some(op) = op_here(self) else { return Ok(lhs) };
                let osp = self.span();
                self.bump();
                let rhs = if matches!(assoc, Assoc::Right) { self.operand(level)? } else { self.operand(level + 1)? };
                let f = SurfaceTerm::at(TermKind::Var(op), osp);
                let partial = self.finish(TermKind::App(Box::new(f), Box::new(lhs)), start);
                let t = self.finish(TermKind::App(Box::new(partial), Box::new(rhs)), start);
                if matches!(assoc, Assoc::None) && op_here(self).is_some() {
                    return Err(self.error(&["end of comparison (comparisons do not chain)"]));
                }
                Ok(t)
            }
        }
    }

    /// Right operand of a binary operator. A keyword-headed expression may
    /// stand here and extends as far as possible.
    fn operand(&mut self, level: usize) -> Result<SurfaceTerm, SurfaceError> {
        if matches!(self.peek(), Tok::Backslash | Tok::Let | Tok::If | Tok::Case | Tok::Ver) {
            self.expr()
        } else {
            self.binary(level)
        }
    }

    fn unary(&mut self) -> Result<SurfaceTerm, SurfaceError> {
        if self.peek() == &Tok::Op("-".into()) {
            let start = self.span();
            self.bump();
            let t = self.unary()?;
            return Ok(match t.kind {
                TermKind::Int(n) => self.finish(TermKind::Int(-n), start),
                _ => {
                    let f = SurfaceTerm::at(TermKind::Var("-".into()), start);
                    let zero = SurfaceTerm::at(TermKind::Int(0), start);
                    let partial = self.finish(TermKind::App(Box::new(f), Box::new(zero)), start);
                    self.finish(TermKind::App(Box::new(partial), Box::new(t)), start)
                }
            });
        }
        self.application()
    }

    fn application(&mut self) -> Result<SurfaceTerm, SurfaceError> {
        let start = self.span();
        let mut f = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            f = self.finish(TermKind::App(Box::new(f), Box::new(a)), start);
        }
        Ok(f)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_) | Tok::Ident(_) | Tok::True | Tok::False | Tok::LParen | Tok::LBracket | Tok::Unversion
        )
    }

    fn atom(&mut self) -> Result<SurfaceTerm, SurfaceError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(self.finish(TermKind::Int(n), start))
            }
            Tok::True => {
                self.bump();
                Ok(self.finish(TermKind::Int(1), start))
            }
            Tok::False => {
                self.bump();
                Ok(self.finish(TermKind::Int(0), start))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(self.finish(TermKind::Var(x), start))
            }
            Tok::Unversion => {
                self.bump();
                let t = self.atom()?;
                Ok(self.finish(TermKind::Unversion(Box::new(t)), start))
            }
            Tok::LParen => {
                self.bump();
                if let (Tok::Op(o), Tok::RParen) = (self.peek().clone(), self.peek_at(1).clone()) {
                    self.bump();
                    self.bump();
                    return Ok(self.finish(TermKind::Var(o), start));
                }
                let a = self.expr()?;
                match self.bump() {
                    Tok::RParen => {
                        let mut a = a;
                        a.span = start.join(self.prev_span());
                        Ok(a)
                    }
                    Tok::Comma => {
                        let b = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(self.finish(TermKind::Pair(Box::new(a), Box::new(b)), start))
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(&["`)`", "`,`"]))
                    }
                }
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if self.peek() != &Tok::RBracket {
                    loop {
                        items.push(self.expr()?);
                        if self.peek() == &Tok::Comma {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(self.finish(TermKind::List(items), start))
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn pattern(&mut self) -> Result<SPattern, SurfaceError> {
        let head = self.apattern()?;
        if self.peek() == &Tok::Op(":".into()) {
            self.bump();
            let tail = self.pattern()?;
            return Ok(SPattern::Cons(Box::new(head), Box::new(tail)));
        }
        Ok(head)
    }

    fn apattern(&mut self) -> Result<SPattern, SurfaceError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(SPattern::Var(x))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(SPattern::Int(n))
            }
            Tok::Op(o) if o == "-" => {
                self.bump();
                match self.bump() {
                    Tok::Int(n) => Ok(SPattern::Int(-n)),
                    _ => {
                        self.pos -= 1;
                        Err(self.error(&["integer"]))
                    }
                }
            }
            Tok::True => {
                self.bump();
                Ok(SPattern::Int(1))
            }
            Tok::False => {
                self.bump();
                Ok(SPattern::Int(0))
            }
            Tok::LParen => {
                self.bump();
                let a = self.pattern()?;
                match self.bump() {
                    Tok::RParen => Ok(a),
                    Tok::Comma => {
                        let b = self.pattern()?;
                        self.expect(Tok::RParen)?;
                        Ok(SPattern::Pair(Box::new(a), Box::new(b)))
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(&["`)`", "`,`"]))
                    }
                }
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if self.peek() != &Tok::RBracket {
                    loop {
                        items.push(self.pattern()?);
                        if self.peek() == &Tok::Comma {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(SPattern::List(items))
            }
            _ => Err(self.error(&["pattern"])),
        }
    }
}

#[derive(Clone, Copy)]
enum Assoc {
    Left,
    Right,
    None,
}

fn wrap_lams(params: Vec<(String, Span)>, body: SurfaceTerm) -> SurfaceTerm {
    params.into_iter().rev().fold(body, |b, (x, sp)| {
        let span = sp.join(b.span);
        SurfaceTerm::at(TermKind::Lam(x, Box::new(b)), span)
    })
}
