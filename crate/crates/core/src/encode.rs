//! Translations of λ-terms and game configurations into the internal
//! π-calculus.

use crate::lambda::{decompose_cbn, CbnDecomp, EvalContext, Frame, Term};
use crate::name::{Kind, Name, Supply};
use crate::ogs::{AConfig, CConfig, Env, EnvEntry, OgsError};
use crate::pi::{Agent, Const, Process};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Opt,
}

fn fk(a: Name, b: Name) -> Process {
    Process::call(Const::Fk, a, b)
}

fn fx(a: Name, b: Name) -> Process {
    Process::call(Const::Fx, a, b)
}

fn term_supply(t: &Term) -> Supply {
    let mut s = Supply::new();
    t.observe_names(&mut s);
    s
}

struct Cbv {
    s: Supply,
    variant: Variant,
}

impl Cbv {
    fn var(&mut self) -> Name {
        self.s.fresh(Kind::Variable)
    }

    fn cont(&mut self) -> Name {
        self.s.fresh(Kind::Continuation)
    }

    /// `y^(w',p').(w' ↪ w | p' ↪ p)`
    fn call_tail(&mut self, y: Name, w: Name, p: Name) -> Process {
        let (w2, p2) = (self.var(), self.cont());
        Process::output(y, &[w2, p2], Process::par(vec![fx(w2, w), fk(p2, p)]))
    }

    fn value(&mut self, v: &Term, y: Name) -> Process {
        match v {
            Term::Var(x) => fx(y, *x),
            Term::Lam(x, body) => {
                let q = self.cont();
                let b = self.term(body, q);
                Process::rep(y, &[*x, q], b)
            }
            Term::App(..) => unreachable!("not a value"),
        }
    }

    fn term(&mut self, m: &Term, p: Name) -> Process {
        match m {
            Term::Var(_) | Term::Lam(..) => {
                let y = self.var();
                let b = self.value(m, y);
                Process::output(p, &[y], b)
            }
            Term::App(f, a) => match self.variant {
                Variant::Plain => self.app_plain(f, a, p),
                Variant::Opt => self.app_opt(f, a, p),
            },
        }
    }

    fn app_plain(&mut self, f: &Term, a: &Term, p: Name) -> Process {
        let (q, y, r, w) = (self.cont(), self.var(), self.cont(), self.var());
        let left = self.term(f, q);
        let right = self.term(a, r);
        let tail = self.call_tail(y, w, p);
        Process::res(
            q,
            Process::par(vec![
                left,
                Process::input(
                    q,
                    &[y],
                    Process::res(r, Process::par(vec![right, Process::input(r, &[w], tail)])),
                ),
            ]),
        )
    }

    fn app_opt(&mut self, f: &Term, a: &Term, p: Name) -> Process {
        match (f, f.is_value(), a.is_value()) {
            (Term::Var(x), _, true) => {
                let (z, q) = (self.var(), self.cont());
                let v = self.value(a, z);
                Process::output(*x, &[z, q], Process::par(vec![v, fk(q, p)]))
            }
            (_, true, true) => {
                let (y, w) = (self.var(), self.var());
                let vf = self.value(f, y);
                let va = self.value(a, w);
                let tail = self.call_tail(y, w, p);
                Process::res_all(&[y, w], Process::par(vec![vf, va, tail]))
            }
            (_, true, false) => {
                let (y, r, w) = (self.var(), self.cont(), self.var());
                let vf = self.value(f, y);
                let ma = self.term(a, r);
                let tail = self.call_tail(y, w, p);
                Process::res(
                    y,
                    Process::par(vec![
                        vf,
                        Process::res(r, Process::par(vec![ma, Process::input(r, &[w], tail)])),
                    ]),
                )
            }
            (_, false, true) => {
                let (q, y, w) = (self.cont(), self.var(), self.var());
                let mf = self.term(f, q);
                let va = self.value(a, w);
                let tail = self.call_tail(y, w, p);
                Process::res(
                    q,
                    Process::par(vec![
                        mf,
                        Process::input(q, &[y], Process::res(w, Process::par(vec![va, tail]))),
                    ]),
                )
            }
            (_, false, false) => self.app_plain(f, a, p),
        }
    }

    fn env(&mut self, env: &Env) -> Result<Vec<Process>, OgsError> {
        let mut out = Vec::new();
        for (n, e) in env.iter() {
            out.push(match e {
                EnvEntry::Value(v) => self.value(v, *n),
                EnvEntry::Cont(ctx, p) => {
                    let x = self.var();
                    let body = self.term(&ctx.plug(Term::Var(x)), *p);
                    Process::input(*n, &[x], body)
                }
                EnvEntry::Thunk(_) => {
                    return Err(OgsError::InvalidConfiguration(format!(
                        "thunk {n} in a call-by-value environment"
                    )))
                }
            });
        }
        Ok(out)
    }
}

fn cbv(m: &Term, variant: Variant) -> Agent {
    let mut e = Cbv {
        s: term_supply(m),
        variant,
    };
    let p = e.cont();
    let body = e.term(m, p);
    Agent::abs(&[p], body)
}

/// The call-by-value encoding `(p) ⟦M⟧p`.
pub fn encode_cbv(m: &Term) -> Agent {
    cbv(m, Variant::Plain)
}

/// The optimised call-by-value encoding.
pub fn encode_cbv_opt(m: &Term) -> Agent {
    cbv(m, Variant::Opt)
}

pub fn encode_cbv_with(m: &Term, variant: Variant) -> Agent {
    cbv(m, variant)
}

fn env_supply(env: &Env, s: &mut Supply) {
    for (n, e) in env.iter() {
        s.observe(*n);
        match e {
            EnvEntry::Value(t) | EnvEntry::Thunk(t) => t.observe_names(s),
            EnvEntry::Cont(ctx, p) => {
                ctx.observe_names(s);
                s.observe(*p);
            }
        }
    }
}

fn a_supply(f: &AConfig) -> Supply {
    let mut s = Supply::above(f.support());
    match f {
        AConfig::Initial { term, .. } => term.observe_names(&mut s),
        AConfig::Active {
            term, cont, env, ..
        } => {
            term.observe_names(&mut s);
            s.observe(*cont);
            env_supply(env, &mut s);
        }
        AConfig::Passive { env, .. } => env_supply(env, &mut s),
    }
    s
}

fn c_supply(f: &CConfig) -> Supply {
    let mut s = Supply::above(f.support());
    match f {
        CConfig::Initial { term, .. } => term.observe_names(&mut s),
        CConfig::Running { threads, env, .. } => {
            for (p, t) in &threads.0 {
                s.observe(*p);
                t.observe_names(&mut s);
            }
            env_supply(env, &mut s);
        }
    }
    s
}

/// Encodes an alternating configuration. Initial configurations become the
/// abstraction `⟦M⟧`; the others are processes.
pub fn encode_config(f: &AConfig, variant: Variant) -> Result<Agent, OgsError> {
    f.validate()?;
    let mut e = Cbv {
        s: a_supply(f),
        variant,
    };
    Ok(match f {
        AConfig::Initial { term, .. } => {
            let p = e.cont();
            let body = e.term(term, p);
            Agent::abs(&[p], body)
        }
        AConfig::Active {
            term, cont, env, ..
        } => {
            let mut ps = vec![e.term(term, *cont)];
            ps.extend(e.env(env)?);
            Agent::Proc(Process::par(ps))
        }
        AConfig::Passive { env, .. } => Agent::Proc(Process::par(e.env(env)?)),
    })
}

/// Encodes a concurrent configuration: `⟦[p↦M]·A⟧ = ⟦M⟧p | ⟦A⟧`.
pub fn encode_cconfig(f: &CConfig, variant: Variant) -> Result<Agent, OgsError> {
    f.validate()?;
    let mut e = Cbv {
        s: c_supply(f),
        variant,
    };
    Ok(match f {
        CConfig::Initial { term, .. } => {
            let p = e.cont();
            let body = e.term(term, p);
            Agent::abs(&[p], body)
        }
        CConfig::Running { threads, env, .. } => {
            let mut ps = Vec::new();
            for (p, t) in &threads.0 {
                ps.push(e.term(t, *p));
            }
            ps.extend(e.env(env)?);
            Agent::Proc(Process::par(ps))
        }
    })
}

// ---------------------------------------------------------------- call-by-name

struct Cbn {
    s: Supply,
}

impl Cbn {
    fn fresh(&mut self, k: Kind) -> Name {
        self.s.fresh(k)
    }

    fn term(&mut self, l: &Term, p: Name) -> Result<Process, OgsError> {
        match decompose_cbn(l) {
            CbnDecomp::ValueApp { ctx, head, arg } => {
                let (x, r) = (self.fresh(Kind::Variable), self.fresh(Kind::Continuation));
                let k = self.cont_entry(r, &ctx, p)?;
                let srv = self.thunk(x, &arg)?;
                Ok(Process::output(head, &[x, r], Process::par(vec![k, srv])))
            }
            _ => self.structural(l, p),
        }
    }

    fn structural(&mut self, l: &Term, p: Name) -> Result<Process, OgsError> {
        Ok(match l {
            Term::Lam(x, m) => {
                let (v, q) = (self.fresh(Kind::ValueName), self.fresh(Kind::Continuation));
                let body = self.term(m, q)?;
                Process::output(p, &[v], Process::input(v, &[*x, q], body))
            }
            Term::Var(v) if v.kind == Kind::ValueName => {
                let w = self.fresh(Kind::ValueName);
                Process::output(p, &[w], Process::call(Const::Gv, w, *v))
            }
            Term::Var(x) => {
                let r = self.fresh(Kind::Continuation);
                Process::output(*x, &[r], Process::call(Const::Gk, r, p))
            }
            Term::App(m, n) => {
                let q = self.fresh(Kind::Continuation);
                let v = self.fresh(Kind::ValueName);
                let (x, p2) = (self.fresh(Kind::Variable), self.fresh(Kind::Continuation));
                let left = self.term(m, q)?;
                let srv = self.thunk(x, n)?;
                Process::res(
                    q,
                    Process::par(vec![
                        left,
                        Process::input(
                            q,
                            &[v],
                            Process::output(
                                v,
                                &[x, p2],
                                Process::par(vec![Process::call(Const::Gk, p2, p), srv]),
                            ),
                        ),
                    ]),
                )
            }
        })
    }

    /// `!x(q).⟦M⟧q`
    fn thunk(&mut self, x: Name, m: &Term) -> Result<Process, OgsError> {
        let q = self.fresh(Kind::Continuation);
        let body = self.term(m, q)?;
        Ok(Process::rep(x, &[q], body))
    }

    fn cont_entry(&mut self, q: Name, ctx: &EvalContext, p: Name) -> Result<Process, OgsError> {
        match ctx.split_inner() {
            None => Ok(Process::call(Const::Gk, q, p)),
            Some((Frame::AppLeft(m), rest)) => {
                let v = self.fresh(Kind::ValueName);
                let (x, r) = (self.fresh(Kind::Variable), self.fresh(Kind::Continuation));
                let k = self.cont_entry(r, &rest, p)?;
                let srv = self.thunk(x, m)?;
                Ok(Process::input(
                    q,
                    &[v],
                    Process::output(v, &[x, r], Process::par(vec![k, srv])),
                ))
            }
            Some((Frame::AppRight(_), _)) => Err(OgsError::InvalidConfiguration(format!(
                "call-by-value context in the entry of {q}"
            ))),
        }
    }

    fn env(&mut self, env: &Env) -> Result<Vec<Process>, OgsError> {
        let mut out = Vec::new();
        for (n, e) in env.iter() {
            out.push(match e {
                EnvEntry::Value(Term::Lam(x, m)) => {
                    let q = self.fresh(Kind::Continuation);
                    let body = self.term(m, q)?;
                    Process::input(*n, &[*x, q], body)
                }
                EnvEntry::Value(Term::Var(w)) => Process::call(Const::Gv, *n, *w),
                EnvEntry::Value(_) => {
                    return Err(OgsError::InvalidConfiguration(format!(
                        "entry of {n} is not a value"
                    )));
                }
                EnvEntry::Thunk(m) => self.thunk(*n, m)?,
                EnvEntry::Cont(ctx, p) => self.cont_entry(*n, ctx, *p)?,
            });
        }
        Ok(out)
    }
}

/// The call-by-name encoding of an extended term.
pub fn encode_cbn(l: &Term) -> Agent {
    let mut e = Cbn { s: term_supply(l) };
    let p = e.fresh(Kind::Continuation);
    let body = e.term(l, p).expect("terms carry no call-by-value contexts");
    Agent::abs(&[p], body)
}

pub fn encode_cbn_config(f: &AConfig) -> Result<Agent, OgsError> {
    f.validate()?;
    let mut e = Cbn { s: a_supply(f) };
    Ok(match f {
        AConfig::Initial { term, .. } => {
            let p = e.fresh(Kind::Continuation);
            Agent::abs(&[p], e.term(term, p)?)
        }
        AConfig::Active {
            term, cont, env, ..
        } => {
            let mut ps = vec![e.term(term, *cont)?];
            ps.extend(e.env(env)?);
            Agent::Proc(Process::par(ps))
        }
        AConfig::Passive { env, .. } => Agent::Proc(Process::par(e.env(env)?)),
    })
}

pub fn encode_cbn_cconfig(f: &CConfig) -> Result<Agent, OgsError> {
    f.validate()?;
    let mut e = Cbn { s: c_supply(f) };
    Ok(match f {
        CConfig::Initial { term, .. } => {
            let p = e.fresh(Kind::Continuation);
            Agent::abs(&[p], e.term(term, p)?)
        }
        CConfig::Running { threads, env, .. } => {
            let mut ps = Vec::new();
            for (p, t) in &threads.0 {
                ps.push(e.term(t, *p)?);
            }
            ps.extend(e.env(env)?);
            Agent::Proc(Process::par(ps))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_cbv;
    use crate::pi::{key, key_agent, parse_agent, parse_process};

    fn t(s: &str) -> Term {
        parse_cbv(s).unwrap()
    }

    #[test]
    fn variable() {
        let a = encode_cbv(&Term::Var(Name::var(0)));
        let expected = parse_agent("(p). p^(y). Fx(y, x0)").unwrap();
        assert_eq!(key_agent(&a), key_agent(&expected));
    }

    #[test]
    fn identity() {
        let a = encode_cbv(&t("\\x. x"));
        let expected = parse_agent("(p). p^(y). !y(x,q). q^(z). Fx(z,x)").unwrap();
        assert_eq!(key_agent(&a), key_agent(&expected));
    }

    #[test]
    fn opt_variable_call() {
        let a = encode_cbv_opt(&t("x0 (\\y. y)"));
        let expected = parse_agent("(p). x0^(z,q). (!z(y,r). r^(u). Fx(u,y) | Fk(q,p))").unwrap();
        assert_eq!(key_agent(&a), key_agent(&expected));
    }

    #[test]
    fn configurations() {
        let x = Name::var(0);
        let f = AConfig::Passive {
            env: Env::new().with(x, EnvEntry::Value(t("\\y. y"))),
            support: [x].into(),
        };
        let e = encode_config(&f, Variant::Plain).unwrap();
        let expected = parse_process("!x0(y,q). q^(z). Fx(z,y)").unwrap();
        assert_eq!(key(e.process().unwrap()), key(&expected));
        let empty = encode_config(&AConfig::empty(), Variant::Plain).unwrap();
        assert_eq!(key(empty.process().unwrap()), "0");
        assert!(matches!(
            encode_config(&AConfig::initial(t("\\x. x")), Variant::Opt).unwrap(),
            Agent::Abs(..)
        ));
    }

    #[test]
    fn cbn_clauses() {
        let a = encode_cbn(&Term::Var(Name::var(0)));
        let expected = parse_agent("(p). x0^(r). Gk(r,p)").unwrap();
        assert_eq!(key_agent(&a), key_agent(&expected));
        let v = Name::val(0);
        let a = encode_cbn(&Term::Var(v));
        let expected = parse_agent("(p). p^(v). Gv(v, v0)").unwrap();
        assert_eq!(key_agent(&a), key_agent(&expected));
        let mut e = Cbn {
            s: Supply::above([&Name::cont(0), &Name::cont(1)]),
        };
        let k = e
            .cont_entry(Name::cont(1), &EvalContext::hole(), Name::cont(0))
            .unwrap();
        assert_eq!(k, Process::call(Const::Gk, Name::cont(1), Name::cont(0)));
    }
}
