//! Configuration literals:
//! `<p0 |-> M ; x1 |-> V ; q2 |-> (E, p3) | stack: q2 | names: x4, p5>`.
//!
//! Identifiers written as rendered names (`x3`, `p0`, `v2` in call-by-name
//! mode) denote exactly those names. Other identifiers are allocated above
//! them; an entry key starting with `p`, `q`, `r` or `k` is a continuation
//! name, with `v` or `w` a value name (call-by-name only).

use super::config::{AConfig, CConfig, Env, EnvEntry, SConfig, Support, Threads};
use crate::lambda::parse::{raw_term, Raw, Resolver};
use crate::lambda::Term;
use crate::name::{Kind, Name};
use crate::syntax::{Cursor, ParseError, Tok};

#[derive(Clone, Debug, Default)]
pub struct Literal {
    pub initial: Option<Term>,
    pub threads: Vec<(Name, Term)>,
    pub env: Env,
    pub stack: Vec<Name>,
    pub support: Support,
}

enum Rhs {
    Term(Raw),
    Pair(Raw, String),
}

fn key_kind(s: &str, cbn: bool) -> Kind {
    match s.chars().next() {
        Some('p' | 'q' | 'r' | 'k') => Kind::Continuation,
        Some('v' | 'w') if cbn => Kind::ValueName,
        _ => Kind::Variable,
    }
}

fn name_list(c: &mut Cursor) -> Result<Vec<String>, ParseError> {
    let mut v = Vec::new();
    while let Tok::Ident(_) = c.peek() {
        v.push(c.ident()?);
        if !c.eat(",") {
            break;
        }
    }
    Ok(v)
}

fn rhs(c: &mut Cursor) -> Result<Rhs, ParseError> {
    if c.is("(") {
        let save = c.clone();
        c.next();
        if let Ok(e) = raw_term(c, false, true) {
            if c.eat(",") {
                let p = c.ident()?;
                c.expect(")")?;
                return Ok(Rhs::Pair(e, p));
            }
        }
        *c = save;
    }
    Ok(Rhs::Term(raw_term(c, false, false)?))
}

pub fn parse_literal(text: &str, cbn: bool) -> Result<Literal, ParseError> {
    let mut c = Cursor::new(text)?;
    c.expect("<")?;
    let mut initial = None;
    let mut entries: Vec<(String, (usize, usize), Rhs)> = Vec::new();
    let is_entry =
        |c: &Cursor| matches!((c.peek(), c.peek_at(1)), (Tok::Ident(_), Tok::Sym("|->")));
    if is_entry(&c) {
        loop {
            let pos = c.position();
            let k = c.ident()?;
            c.expect("|->")?;
            entries.push((k, pos, rhs(&mut c)?));
            if !c.eat(";") {
                break;
            }
        }
    } else if !c.is(">") && !c.is("|") {
        initial = Some(raw_term(&mut c, false, false)?);
    }
    let mut stack = Vec::new();
    let mut names = Vec::new();
    while c.eat("|") {
        let pos = c.position();
        match c.ident()?.as_str() {
            "stack" => {
                c.expect(":")?;
                stack = name_list(&mut c)?;
            }
            "names" => {
                c.expect(":")?;
                names = name_list(&mut c)?;
            }
            other => {
                return Err(ParseError {
                    line: pos.0,
                    col: pos.1,
                    msg: format!("unknown section `{other}`"),
                });
            }
        }
    }
    c.expect(">")?;
    c.expect_eof()?;

    let mut r = Resolver::new(true, cbn);
    for (k, _, e) in &entries {
        r.observe_ident(k);
        match e {
            Rhs::Term(t) => r.observe_raw(t),
            Rhs::Pair(t, p) => {
                r.observe_raw(t);
                r.observe_ident(p);
            }
        }
    }
    if let Some(t) = &initial {
        r.observe_raw(t);
    }
    for s in stack.iter().chain(&names) {
        r.observe_ident(s);
    }

    let err = |pos: (usize, usize), msg: String| ParseError {
        line: pos.0,
        col: pos.1,
        msg,
    };
    let mut lit = Literal::default();
    if let Some(t) = &initial {
        r.register_free(t, &mut Vec::new());
        lit.initial = Some(r.term(t, &mut Vec::new()).map_err(|m| err((1, 2), m))?);
    }
    for (k, pos, e) in &entries {
        match e {
            Rhs::Pair(ctx, p) => {
                let q = r.free_name(k, Kind::Continuation);
                let p = r.free_name(p, Kind::Continuation);
                if q.kind != Kind::Continuation || p.kind != Kind::Continuation {
                    return Err(err(*pos, format!("`{k}` must be a continuation name")));
                }
                let ctx = r
                    .context(ctx, &mut Vec::new(), cbn)
                    .map_err(|m| err(*pos, m))?;
                lit.env.push(q, EnvEntry::Cont(ctx, p));
            }
            Rhs::Term(t) => {
                let n = r.free_name(k, key_kind(k, cbn));
                let term = r.term(t, &mut Vec::new()).map_err(|m| err(*pos, m))?;
                match n.kind {
                    Kind::Continuation => lit.threads.push((n, term)),
                    Kind::Variable if cbn => lit.env.push(n, EnvEntry::Thunk(term)),
                    _ => {
                        if !term.is_value() {
                            return Err(err(*pos, format!("entry `{k}` must be a value")));
                        }
                        lit.env.push(n, EnvEntry::Value(term))
                    }
                }
            }
        }
    }
    for s in &stack {
        lit.stack.push(r.free_name(s, Kind::Continuation));
    }
    for s in &names {
        lit.support.insert(r.free_name(s, key_kind(s, cbn)));
    }
    if let Some(t) = &lit.initial {
        lit.support.extend(t.free_vars());
    }
    for (p, t) in &lit.threads {
        lit.support.insert(*p);
        lit.support.extend(t.free_vars());
    }
    for (n, e) in lit.env.iter() {
        lit.support.insert(*n);
        lit.support.extend(e.free_names());
    }
    Ok(lit)
}

impl Literal {
    pub fn into_aconfig(self) -> Result<AConfig, String> {
        if let Some(term) = self.initial {
            return Ok(AConfig::Initial {
                term,
                support: self.support,
            });
        }
        match self.threads.len() {
            0 => Ok(AConfig::Passive {
                env: self.env,
                support: self.support,
            }),
            1 => {
                let (cont, term) = self.threads.into_iter().next().unwrap();
                Ok(AConfig::Active {
                    term,
                    cont,
                    env: self.env,
                    support: self.support,
                })
            }
            _ => Err("an alternating configuration has at most one running term".into()),
        }
    }

    pub fn into_cconfig(self) -> CConfig {
        match self.initial {
            Some(term) => CConfig::Initial {
                term,
                support: self.support,
            },
            None => CConfig::Running {
                threads: Threads(self.threads),
                env: self.env,
                support: self.support,
            },
        }
    }

    pub fn into_sconfig(mut self) -> Result<SConfig, String> {
        let stack = std::mem::take(&mut self.stack);
        Ok(SConfig {
            config: self.into_aconfig()?,
            stack,
        })
    }
}

pub fn parse_aconfig(text: &str, cbn: bool) -> Result<AConfig, ParseError> {
    parse_literal(text, cbn)?
        .into_aconfig()
        .map_err(|msg| ParseError {
            line: 1,
            col: 1,
            msg,
        })
}

pub fn parse_cconfig(text: &str, cbn: bool) -> Result<CConfig, ParseError> {
    Ok(parse_literal(text, cbn)?.into_cconfig())
}

pub fn parse_sconfig(text: &str) -> Result<SConfig, ParseError> {
    parse_literal(text, false)?
        .into_sconfig()
        .map_err(|msg| ParseError {
            line: 1,
            col: 1,
            msg,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{EvalContext, Frame};

    #[test]
    fn round_trip_display() {
        let f = parse_aconfig(
            "<p0 |-> x0 \\y. y ; q |-> ([] (\\z. z), p0) | names: x0>",
            false,
        )
        .unwrap();
        let g = parse_aconfig(&f.to_string(), false).unwrap();
        assert_eq!(f.key(), g.key());
        f.validate().unwrap();
    }

    #[test]
    fn explicit_and_allocated_names() {
        let f = parse_cconfig("<p1 |-> x ; p2 |-> y>", false).unwrap();
        assert_eq!(f.threads().len(), 2);
        assert_eq!(f.threads()[0].0, Name::cont(1));
        assert_eq!(f.threads()[0].1, Term::Var(Name::var(0)));
        assert_eq!(f.threads()[1].1, Term::Var(Name::var(1)));
        f.validate().unwrap();
    }

    #[test]
    fn contexts_and_stack() {
        let f = parse_sconfig("<q |-> ((\\z. z) [], p) | stack: q>").unwrap();
        let q = f.stack[0];
        match f.config.env().unwrap().get(q) {
            Some(EnvEntry::Cont(e, _)) => {
                assert_eq!(
                    e,
                    &EvalContext::hole()
                        .wrap(Frame::AppRight(crate::lambda::parse_cbv("\\z. z").unwrap()))
                )
            }
            other => panic!("{other:?}"),
        }
        f.validate().unwrap();
    }

    #[test]
    fn initial() {
        let f = parse_aconfig("<\\x. x>", false).unwrap();
        assert!(matches!(f, AConfig::Initial { .. }));
        let e = parse_aconfig("<p0 |-> x ; p1 |-> y>", false).unwrap_err();
        assert!(e.msg.contains("at most one"));
    }
}
