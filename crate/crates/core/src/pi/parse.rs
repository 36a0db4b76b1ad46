//! Text syntax: `a(x,y).P`, `a^(x,y).P`, `nu x. P`, `P | Q`, `!a(x).P`, `0`,
//! link constants `Fx(a,b)`, and abstractions `(p). P` at the top. Binder
//! kinds follow the first letter: `p q r k` continuations, `v` value names.

use std::collections::HashMap;

use super::{Agent, Const, Process};
use crate::name::{Kind, Name, Supply};
use crate::syntax::{Cursor, ParseError, Tok};

fn kind_of(s: &str) -> Kind {
    if let Some(n) = Name::parse(s) {
        return n.kind;
    }
    match s.chars().next() {
        Some('p' | 'q' | 'r' | 'k') => Kind::Continuation,
        Some('v') => Kind::ValueName,
        _ => Kind::Variable,
    }
}

struct P {
    c: Cursor,
    supply: Supply,
    free: HashMap<String, Name>,
    scope: Vec<(String, Name)>,
}

impl P {
    fn name(&mut self, s: &str) -> Name {
        if let Some((_, n)) = self.scope.iter().rev().find(|(a, _)| a == s) {
            return *n;
        }
        if let Some(n) = Name::parse(s) {
            return n;
        }
        if let Some(n) = self.free.get(s) {
            return *n;
        }
        let n = self.supply.fresh(kind_of(s));
        self.free.insert(s.to_string(), n);
        n
    }

    fn binders(&mut self) -> Result<Vec<(String, Name)>, ParseError> {
        self.c.expect("(")?;
        let mut v = Vec::new();
        if !self.c.is(")") {
            loop {
                let s = self.c.ident()?;
                let n = self.supply.fresh(kind_of(&s));
                v.push((s, n));
                if !self.c.eat(",") {
                    break;
                }
            }
        }
        self.c.expect(")")?;
        Ok(v)
    }

    fn under<T>(&mut self, bs: &[(String, Name)], f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.scope.len();
        self.scope.extend(bs.iter().cloned());
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn continuation(&mut self, bs: &[(String, Name)]) -> Result<Process, ParseError> {
        if self.c.eat(".") {
            self.under(bs, |p| p.atom())
        } else {
            Ok(Process::Nil)
        }
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut v = vec![self.atom()?];
        while self.c.eat("|") {
            v.push(self.atom()?);
        }
        Ok(if v.len() == 1 {
            v.pop().unwrap()
        } else {
            Process::Par(v)
        })
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        if self.c.eat("(") {
            let p = self.par()?;
            self.c.expect(")")?;
            return Ok(p);
        }
        if self.c.eat("!") {
            let a = self.c.ident()?;
            let a = self.name(&a);
            let bs = self.binders()?;
            let body = self.continuation(&bs)?;
            let ns: Vec<Name> = bs.iter().map(|b| b.1).collect();
            return Ok(Process::rep(a, &ns, body));
        }
        let pos = self.c.position();
        let id = match self.c.peek().clone() {
            Tok::Ident(s) => s,
            t => return Err(self.c.error(format!("expected a process, found {t}"))),
        };
        self.c.next();
        if id == "0" {
            return Ok(Process::Nil);
        }
        if id == "nu" {
            let s = self.c.ident()?;
            let n = self.supply.fresh(kind_of(&s));
            self.c.expect(".")?;
            let body = self.under(&[(s, n)], |p| p.atom())?;
            return Ok(Process::res(n, body));
        }
        if id.starts_with(|c: char| c.is_ascii_uppercase()) {
            let c = Const::from_name(&id).ok_or(ParseError {
                line: pos.0,
                col: pos.1,
                msg: format!("unknown constant `{id}`"),
            })?;
            self.c.expect("(")?;
            let a = self.c.ident()?;
            self.c.expect(",")?;
            let b = self.c.ident()?;
            self.c.expect(")")?;
            let (a, b) = (self.name(&a), self.name(&b));
            return Ok(Process::call(c, a, b));
        }
        let a = self.name(&id);
        let out = self.c.eat("^");
        let bs = self.binders()?;
        let body = self.continuation(&bs)?;
        let ns: Vec<Name> = bs.iter().map(|b| b.1).collect();
        Ok(if out {
            Process::output(a, &ns, body)
        } else {
            Process::input(a, &ns, body)
        })
    }
}

fn explicit_floor(text: &str) -> Result<Supply, ParseError> {
    let mut s = Supply::new();
    for t in crate::syntax::tokenize(text)? {
        if let Tok::Ident(id) = t.tok {
            if let Some(n) = Name::parse(&id) {
                s.observe(n);
            }
        }
    }
    Ok(s)
}

fn is_abstraction(c: &Cursor) -> bool {
    let mut i = 1;
    if !c.is("(") {
        return false;
    }
    loop {
        match c.peek_at(i) {
            Tok::Ident(_) => i += 1,
            _ => return false,
        }
        match c.peek_at(i) {
            Tok::Sym(",") => i += 1,
            Tok::Sym(")") => return matches!(c.peek_at(i + 1), Tok::Sym(".")),
            _ => return false,
        }
    }
}

pub fn parse_agent(text: &str) -> Result<Agent, ParseError> {
    let mut p = P {
        c: Cursor::new(text)?,
        supply: explicit_floor(text)?,
        free: HashMap::new(),
        scope: Vec::new(),
    };
    let agent = if is_abstraction(&p.c) {
        let bs = p.binders()?;
        p.c.expect(".")?;
        let body = p.under(&bs, |p| p.par())?;
        let ns: Vec<Name> = bs.iter().map(|b| b.1).collect();
        Agent::abs(&ns, body)
    } else {
        Agent::Proc(p.par()?)
    };
    p.c.expect_eof()?;
    Ok(agent)
}

pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    match parse_agent(text)? {
        Agent::Proc(p) => Ok(p),
        Agent::Abs(..) => Err(ParseError {
            line: 1,
            col: 1,
            msg: "expected a process, found an abstraction".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::key_agent;

    #[test]
    fn round_trip() {
        for src in [
            "a^(x). 0 | a(y)",
            "(p). p^(y). Fx(y,x0)",
            "nu q. (q(x). x^(w,r) | !b(z,k). z^(u,k2))",
            "x3(p). (Fk(p,p0) | Gv(v1,v2))",
        ] {
            let a = parse_agent(src).unwrap();
            let b = parse_agent(&a.to_string()).unwrap();
            assert_eq!(key_agent(&a), key_agent(&b), "{src} / {a}");
        }
    }

    #[test]
    fn errors() {
        let e = parse_agent("a(x). | b").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        let e = parse_agent("Zz(a,b)").unwrap_err();
        assert!(e.msg.contains("unknown constant"));
    }

    #[test]
    fn kinds_by_letter() {
        let p = parse_process("a(x,p). 0").unwrap();
        match p {
            Process::In(_, k, _) => assert_eq!(k, vec![Kind::Variable, Kind::Continuation]),
            _ => panic!(),
        }
    }
}
