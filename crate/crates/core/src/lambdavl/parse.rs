//! ASCII syntax for λVL terms:
//!
//! ```text
//! t ::= n | x | t t | \x. t | \[x]. t | let [x] = t in t | [t]
//!     | <l = t, ...> | <l = t, ... | l> | t.l
//! l ::= {M=1.0.0, N=2.0.0}
//! ```

use std::collections::BTreeMap;

use crate::version::{Version, VersionLabel};

use super::{LPattern, LTerm, LambdaVlError};

pub fn parse_lterm(src: &str) -> Result<LTerm, LambdaVlError> {
    let mut p = P { s: src.as_bytes(), pos: 0 };
    let t = p.term()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.fail("end of input");
    }
    Ok(t)
}

struct P<'a> {
    s: &'a [u8],
    pos: usize,
}

impl P<'_> {
    fn fail<T>(&self, expected: &str) -> Result<T, LambdaVlError> {
        Err(LambdaVlError::Parse { pos: self.pos, expected: expected.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), LambdaVlError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("`{}`", c as char))
        }
    }

    fn starts_with(&mut self, kw: &str) -> bool {
        self.ws();
        let rest = &self.s[self.pos..];
        rest.starts_with(kw.as_bytes())
            && !rest.get(kw.len()).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
    }

    fn ident(&mut self) -> Result<String, LambdaVlError> {
        self.ws();
        let start = self.pos;
        if !self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            return self.fail("identifier");
        }
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'') {
            self.pos += 1;
        }
        let id = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        if id == "let" || id == "in" {
            self.pos = start;
            return self.fail("identifier");
        }
        Ok(id)
    }

    fn int(&mut self) -> Result<i64, LambdaVlError> {
        self.ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|x| x.parse().ok())
            .map_or_else(|| self.fail("integer"), Ok)
    }

    fn label(&mut self) -> Result<VersionLabel, LambdaVlError> {
        self.expect(b'{')?;
        let mut pairs = Vec::new();
        loop {
            let m = self.ident()?;
            self.expect(b'=')?;
            self.ws();
            let start = self.pos;
            while self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
                self.pos += 1;
            }
            let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
            let v: Version = match text.parse() {
                Ok(v) => v,
                Err(_) => return self.fail("version"),
            };
            pairs.push((m, v));
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b'}')?;
        Ok(VersionLabel::new(pairs))
    }

    fn term(&mut self) -> Result<LTerm, LambdaVlError> {
        if self.eat(b'\\') {
            let pat = if self.eat(b'[') {
                let x = self.ident()?;
                self.expect(b']')?;
                LPattern::Box(x)
            } else {
                LPattern::Var(self.ident()?)
            };
            self.expect(b'.')?;
            return Ok(LTerm::lam(pat, self.term()?));
        }
        if self.starts_with("let") {
            self.pos += 3;
            self.expect(b'[')?;
            let x = self.ident()?;
            self.expect(b']')?;
            self.expect(b'=')?;
            let a = self.term()?;
            if !self.starts_with("in") {
                return self.fail("`in`");
            }
            self.pos += 2;
            let b = self.term()?;
            return Ok(LTerm::clet(&x, a, b));
        }
        let mut t = self.postfix()?;
        while self.at_atom() {
            t = LTerm::app(t, self.postfix()?);
        }
        if self.peek() == Some(b'\\') || self.starts_with("let") {
            t = LTerm::app(t, self.term()?);
        }
        Ok(t)
    }

    fn at_atom(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'(' || c == b'[' || c == b'<' => true,
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => !self.starts_with("in") && !self.starts_with("let"),
            _ => false,
        }
    }

    fn postfix(&mut self) -> Result<LTerm, LambdaVlError> {
        let mut t = self.atom()?;
        loop {
            self.ws();
            if self.s.get(self.pos) == Some(&b'.') && self.s[self.pos + 1..].iter().find(|c| !c.is_ascii_whitespace()) == Some(&b'{') {
                self.pos += 1;
                t = LTerm::extract(t, self.label()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> Result<LTerm, LambdaVlError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(LTerm::Int(self.int()?)),
            Some(b'(') => {
                self.pos += 1;
                if self.peek() == Some(b'-') {
                    let n = self.int()?;
                    self.expect(b')')?;
                    return Ok(LTerm::Int(n));
                }
                let t = self.term()?;
                self.expect(b')')?;
                Ok(t)
            }
            Some(b'[') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(b']')?;
                Ok(LTerm::promote(t))
            }
            Some(b'<') => {
                self.pos += 1;
                let mut m = BTreeMap::new();
                loop {
                    let l = self.label()?;
                    self.expect(b'=')?;
                    m.insert(l, self.term()?);
                    if !self.eat(b',') {
                        break;
                    }
                }
                let t = if self.eat(b'|') {
                    let k = self.label()?;
                    LTerm::VRecordAt(m, k)
                } else {
                    LTerm::VRecord(m)
                };
                self.expect(b'>')?;
                Ok(t)
            }
            _ => Ok(LTerm::Var(self.ident()?)),
        }
    }
}
