//! Term parser. Text is first read into a raw tree of identifiers, then
//! resolved to kinded names.

use std::collections::{BTreeMap, HashMap};

use super::rho::{Loc, RhoTerm};
use super::term::{EvalContext, Frame, Term};
use crate::name::{Kind, Name, Supply};
use crate::syntax::{Cursor, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Cbv,
    Cbn,
    Rho,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Term(Term),
    Rho(RhoTerm),
}

#[derive(Clone, Debug)]
pub(crate) enum Raw {
    Var(String, (usize, usize)),
    Lam(String, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
    Hole,
    New(Vec<(String, Raw)>, Box<Raw>),
    Assign(String, Box<Raw>, Box<Raw>),
    Deref(String, (usize, usize)),
}

impl Raw {
    fn is_value(&self) -> bool {
        matches!(self, Raw::Var(..) | Raw::Lam(..))
    }
}

fn is_term_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && s != "rho"
}

pub(crate) fn raw_term(c: &mut Cursor, rho: bool, holes: bool) -> Result<Raw, ParseError> {
    if c.eat("\\") || c.eat("λ") {
        let (l, col) = c.position();
        let x = c.ident()?;
        if !is_term_ident(&x) {
            return Err(ParseError {
                line: l,
                col,
                msg: format!("bad binder `{x}`"),
            });
        }
        c.expect(".")?;
        let body = raw_term(c, rho, holes)?;
        return Ok(Raw::Lam(x, Box::new(body)));
    }
    if rho && c.is_kw("rho") {
        c.next();
        c.expect("{")?;
        let mut cells = Vec::new();
        if !c.is("}") {
            loop {
                let l = c.ident()?;
                c.expect("=")?;
                let v = raw_term(c, rho, holes)?;
                if !v.is_value() {
                    return Err(c.error(format!("store cell `{l}` must hold a value")));
                }
                cells.push((l, v));
                if !c.eat(",") {
                    break;
                }
            }
        }
        c.expect("}")?;
        c.expect(".")?;
        let body = raw_term(c, rho, holes)?;
        return Ok(Raw::New(cells, Box::new(body)));
    }
    if rho && matches!(c.peek_at(1), crate::syntax::Tok::Sym(":=")) {
        let l = c.ident()?;
        c.expect(":=")?;
        let v = raw_app(c, rho, holes)?;
        if !v.is_value() {
            return Err(c.error(format!("assignment to `{l}` needs a value")));
        }
        c.expect(";")?;
        let body = raw_term(c, rho, holes)?;
        return Ok(Raw::Assign(l, Box::new(v), Box::new(body)));
    }
    raw_app(c, rho, holes)
}

fn starts_atom(c: &Cursor, rho: bool, holes: bool) -> bool {
    use crate::syntax::Tok;
    match c.peek() {
        Tok::Ident(s) => is_term_ident(s) && !(rho && matches!(c.peek_at(1), Tok::Sym(":="))),
        Tok::Sym("(") => true,
        Tok::Sym("!") => rho,
        Tok::Sym("[]") => holes,
        _ => false,
    }
}

fn raw_app(c: &mut Cursor, rho: bool, holes: bool) -> Result<Raw, ParseError> {
    let mut acc = raw_atom(c, rho, holes)?;
    loop {
        if c.is("\\")
            || c.is("λ")
            || (rho && (c.is_kw("rho") || matches!(c.peek_at(1), crate::syntax::Tok::Sym(":="))))
        {
            let arg = raw_term(c, rho, holes)?;
            return Ok(Raw::App(Box::new(acc), Box::new(arg)));
        }
        if !starts_atom(c, rho, holes) {
            return Ok(acc);
        }
        let arg = raw_atom(c, rho, holes)?;
        acc = Raw::App(Box::new(acc), Box::new(arg));
    }
}

fn raw_atom(c: &mut Cursor, rho: bool, holes: bool) -> Result<Raw, ParseError> {
    let pos = c.position();
    if c.eat("(") {
        let t = raw_term(c, rho, holes)?;
        c.expect(")")?;
        return Ok(t);
    }
    if holes && c.eat("[]") {
        return Ok(Raw::Hole);
    }
    if rho && c.eat("!") {
        let pos = c.position();
        let l = c.ident()?;
        return Ok(Raw::Deref(l, pos));
    }
    if c.is("\\") || c.is("λ") {
        return raw_term(c, rho, holes);
    }
    match c.peek().clone() {
        crate::syntax::Tok::Ident(s) if is_term_ident(&s) => {
            c.next();
            Ok(Raw::Var(s, pos))
        }
        t => Err(c.error(format!("expected a term, found {t}"))),
    }
}

/// Maps identifiers to names. In literal mode the rendered forms `x3`,
/// `p0` (and `v2` for call-by-name) denote exactly those names; anything else
/// is allocated above every explicit name.
pub(crate) struct Resolver {
    pub literal: bool,
    pub cbn: bool,
    pub supply: Supply,
    free: HashMap<(String, Kind), Name>,
}

impl Resolver {
    pub fn new(literal: bool, cbn: bool) -> Self {
        Resolver {
            literal,
            cbn,
            supply: Supply::new(),
            free: HashMap::new(),
        }
    }

    pub fn explicit(&self, s: &str) -> Option<Name> {
        if !self.literal {
            return None;
        }
        let n = Name::parse(s)?;
        if n.kind == Kind::ValueName && !self.cbn {
            return None;
        }
        Some(n)
    }

    /// First pass over every identifier so that allocated names avoid the
    /// explicit ones.
    pub fn observe_ident(&mut self, s: &str) {
        if let Some(n) = self.explicit(s) {
            self.supply.observe(n);
        }
    }

    pub fn observe_raw(&mut self, r: &Raw) {
        match r {
            Raw::Var(s, _) => self.observe_ident(s),
            Raw::Lam(x, b) => {
                self.observe_ident(x);
                self.observe_raw(b);
            }
            Raw::App(f, a) => {
                self.observe_raw(f);
                self.observe_raw(a);
            }
            Raw::New(cells, b) => {
                for (_, v) in cells {
                    self.observe_raw(v);
                }
                self.observe_raw(b);
            }
            Raw::Assign(_, v, b) => {
                self.observe_raw(v);
                self.observe_raw(b);
            }
            Raw::Hole | Raw::Deref(..) => {}
        }
    }

    pub fn free_name(&mut self, s: &str, kind: Kind) -> Name {
        if let Some(n) = self.explicit(s) {
            return n;
        }
        if let Some(n) = self.free.get(&(s.to_string(), kind)) {
            return *n;
        }
        let n = self.supply.fresh(kind);
        self.free.insert((s.to_string(), kind), n);
        n
    }

    fn binder(&mut self, s: &str) -> Name {
        match self.explicit(s) {
            Some(n) if n.kind == Kind::Variable => n,
            _ => self.supply.fresh(Kind::Variable),
        }
    }

    fn var_kind(&self, s: &str) -> Kind {
        match self.explicit(s) {
            Some(n) => n.kind,
            None => Kind::Variable,
        }
    }

    /// Registers free identifiers in order of first occurrence.
    pub fn register_free(&mut self, r: &Raw, scope: &mut Vec<String>) {
        match r {
            Raw::Var(s, _) => {
                if !scope.contains(s) {
                    let k = self.var_kind(s);
                    self.free_name(s, k);
                }
            }
            Raw::Lam(x, b) => {
                scope.push(x.clone());
                self.register_free(b, scope);
                scope.pop();
            }
            Raw::App(f, a) => {
                self.register_free(f, scope);
                self.register_free(a, scope);
            }
            Raw::New(cells, b) => {
                for (_, v) in cells {
                    self.register_free(v, scope);
                }
                self.register_free(b, scope);
            }
            Raw::Assign(_, v, b) => {
                self.register_free(v, scope);
                self.register_free(b, scope);
            }
            Raw::Hole | Raw::Deref(..) => {}
        }
    }

    pub fn term(&mut self, r: &Raw, scope: &mut Vec<(String, Name)>) -> Result<Term, String> {
        Ok(match r {
            Raw::Var(s, (line, col)) => match scope.iter().rev().find(|(a, _)| a == s) {
                Some((_, n)) => Term::Var(*n),
                None => {
                    let k = self.var_kind(s);
                    if k == Kind::Continuation {
                        return Err(format!(
                            "continuation name `{s}` used as a term at {line}:{col}"
                        ));
                    }
                    Term::Var(self.free_name(s, k))
                }
            },
            Raw::Lam(x, b) => {
                let n = self.binder(x);
                scope.push((x.clone(), n));
                let body = self.term(b, scope);
                scope.pop();
                Term::lam(n, body?)
            }
            Raw::App(f, a) => Term::app(self.term(f, scope)?, self.term(a, scope)?),
            Raw::Hole => return Err("unexpected hole `[]`".into()),
            Raw::New(..) | Raw::Assign(..) | Raw::Deref(..) => {
                return Err("store operation outside rho mode".into())
            }
        })
    }

    /// A term with exactly one hole on the evaluation path.
    pub fn context(
        &mut self,
        r: &Raw,
        scope: &mut Vec<(String, Name)>,
        cbn: bool,
    ) -> Result<EvalContext, String> {
        fn holes(r: &Raw) -> usize {
            match r {
                Raw::Hole => 1,
                Raw::Lam(_, b) => holes(b),
                Raw::App(f, a) => holes(f) + holes(a),
                _ => 0,
            }
        }
        let mut frames = Vec::new();
        let mut cur = r;
        loop {
            match cur {
                Raw::Hole => break,
                Raw::App(f, a) if holes(f) == 1 && holes(a) == 0 => {
                    frames.push(Frame::AppLeft(self.term(a, scope)?));
                    cur = f;
                }
                Raw::App(f, a) if !cbn && holes(a) == 1 && holes(f) == 0 && f.is_value() => {
                    frames.push(Frame::AppRight(self.term(f, scope)?));
                    cur = a;
                }
                _ => return Err("not an evaluation context".into()),
            }
        }
        frames.reverse();
        Ok(EvalContext { frames })
    }
}

pub fn parse_term(text: &str, mode: Mode) -> Result<Parsed, ParseError> {
    let mut c = Cursor::new(text)?;
    let raw = raw_term(&mut c, mode == Mode::Rho, false)?;
    c.expect_eof()?;
    let mut r = Resolver::new(false, mode == Mode::Cbn);
    r.register_free(&raw, &mut Vec::new());
    match mode {
        Mode::Cbv | Mode::Cbn => {
            let t = r.term(&raw, &mut Vec::new()).map_err(|msg| ParseError {
                line: 1,
                col: 1,
                msg,
            })?;
            Ok(Parsed::Term(t))
        }
        Mode::Rho => {
            let mut locs = BTreeMap::new();
            collect_locs(&raw, &mut locs);
            check_locs(&raw, &locs)?;
            Ok(Parsed::Rho(rho_term(&mut r, &raw, &mut Vec::new(), &locs)))
        }
    }
}

/// Parses a plain call-by-value term.
pub fn parse_cbv(text: &str) -> Result<Term, ParseError> {
    match parse_term(text, Mode::Cbv)? {
        Parsed::Term(t) => Ok(t),
        Parsed::Rho(_) => unreachable!(),
    }
}

pub fn parse_rho(text: &str) -> Result<RhoTerm, ParseError> {
    match parse_term(text, Mode::Rho)? {
        Parsed::Rho(t) => Ok(t),
        Parsed::Term(_) => unreachable!(),
    }
}

fn collect_locs(r: &Raw, out: &mut BTreeMap<String, Loc>) {
    match r {
        Raw::New(cells, b) => {
            for (l, v) in cells {
                let next = Loc(out.len() as u32);
                out.entry(l.clone()).or_insert(next);
                collect_locs(v, out);
            }
            collect_locs(b, out);
        }
        Raw::Lam(_, b) => collect_locs(b, out),
        Raw::App(f, a) => {
            collect_locs(f, out);
            collect_locs(a, out);
        }
        Raw::Assign(_, v, b) => {
            collect_locs(v, out);
            collect_locs(b, out);
        }
        _ => {}
    }
}

fn check_locs(r: &Raw, locs: &BTreeMap<String, Loc>) -> Result<(), ParseError> {
    match r {
        Raw::Deref(l, (line, col)) if !locs.contains_key(l) => Err(ParseError {
            line: *line,
            col: *col,
            msg: format!("location `{l}` is never introduced"),
        }),
        Raw::Assign(l, v, b) => {
            if !locs.contains_key(l) {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    msg: format!("location `{l}` is never introduced"),
                });
            }
            check_locs(v, locs)?;
            check_locs(b, locs)
        }
        Raw::New(cells, b) => {
            for (_, v) in cells {
                check_locs(v, locs)?;
            }
            check_locs(b, locs)
        }
        Raw::Lam(_, b) => check_locs(b, locs),
        Raw::App(f, a) => {
            check_locs(f, locs)?;
            check_locs(a, locs)
        }
        _ => Ok(()),
    }
}

fn rho_term(
    r: &mut Resolver,
    raw: &Raw,
    scope: &mut Vec<(String, Name)>,
    locs: &BTreeMap<String, Loc>,
) -> RhoTerm {
    match raw {
        Raw::Var(s, _) => match scope.iter().rev().find(|(a, _)| a == s) {
            Some((_, n)) => RhoTerm::Var(*n),
            None => RhoTerm::Var(r.free_name(s, Kind::Variable)),
        },
        Raw::Lam(x, b) => {
            let n = r.binder(x);
            scope.push((x.clone(), n));
            let body = rho_term(r, b, scope, locs);
            scope.pop();
            RhoTerm::Lam(n, Box::new(body))
        }
        Raw::App(f, a) => RhoTerm::App(
            Box::new(rho_term(r, f, scope, locs)),
            Box::new(rho_term(r, a, scope, locs)),
        ),
        Raw::New(cells, b) => {
            let store = cells
                .iter()
                .map(|(l, v)| (locs[l], rho_term(r, v, scope, locs)))
                .collect();
            RhoTerm::New(store, Box::new(rho_term(r, b, scope, locs)))
        }
        Raw::Assign(l, v, b) => RhoTerm::Assign(
            locs[l],
            Box::new(rho_term(r, v, scope, locs)),
            Box::new(rho_term(r, b, scope, locs)),
        ),
        Raw::Deref(l, _) => RhoTerm::Deref(locs[l]),
        Raw::Hole => unreachable!("holes are rejected outside contexts"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Name {
        Name::var(i)
    }

    #[test]
    fn identity() {
        assert_eq!(
            parse_cbv("\\x. x").unwrap(),
            Term::lam(v(0), Term::Var(v(0)))
        );
        assert_eq!(
            parse_cbv("λx. x").unwrap(),
            Term::lam(v(0), Term::Var(v(0)))
        );
    }

    #[test]
    fn free_identifiers_come_first() {
        let t = parse_cbv("(\\z. z) (x y)").unwrap();
        assert_eq!(
            t,
            Term::app(
                Term::lam(v(2), Term::Var(v(2))),
                Term::app(Term::Var(v(0)), Term::Var(v(1)))
            )
        );
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_cbv("a b c").unwrap();
        let (a, b, c) = (Term::Var(v(0)), Term::Var(v(1)), Term::Var(v(2)));
        assert_eq!(t, Term::app(Term::app(a, b), c));
    }

    #[test]
    fn trailing_lambda_is_an_argument() {
        let t = parse_cbv("x \\y. y").unwrap();
        assert_eq!(
            t,
            Term::app(Term::Var(v(0)), Term::lam(v(1), Term::Var(v(1))))
        );
    }

    #[test]
    fn omega() {
        let t = parse_cbv("(\\x. x x)(\\x. x x)").unwrap();
        match t {
            Term::App(a, b) => {
                assert!(matches!(*a, Term::Lam(..)));
                assert!(matches!(*b, Term::Lam(..)));
                assert!(a.alpha_eq(&b));
            }
            _ => panic!("not an application"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_cbv("\\x.\n  (x").unwrap_err();
        assert_eq!((e.line, e.col), (2, 5));
        let e = parse_cbv("x )").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }

    #[test]
    fn rho_grammar() {
        let t = parse_rho("rho {l = \\x.x}. (!l) (\\y.y)").unwrap();
        let id0 = RhoTerm::Lam(v(0), Box::new(RhoTerm::Var(v(0))));
        let id1 = RhoTerm::Lam(v(1), Box::new(RhoTerm::Var(v(1))));
        let expected = RhoTerm::New(
            [(Loc(0), id0)].into(),
            Box::new(RhoTerm::App(
                Box::new(RhoTerm::Deref(Loc(0))),
                Box::new(id1),
            )),
        );
        assert_eq!(t, expected);
        let t = parse_rho("rho {l = \\x.x}. l := \\y.y; !l").unwrap();
        assert!(matches!(t, RhoTerm::New(_, ref b) if matches!(**b, RhoTerm::Assign(..))));
    }

    #[test]
    fn rho_unbound_location() {
        let e = parse_rho("(\\x. x) !l").unwrap_err();
        assert_eq!((e.line, e.col), (1, 10));
        assert!(e.msg.contains("never introduced"));
    }
}
