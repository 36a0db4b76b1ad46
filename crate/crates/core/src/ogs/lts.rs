//! The game transition systems. Each `*_step` function takes a floor supply
//! so that two configurations explored side by side draw equal fresh names.

use super::config::{AConfig, CConfig, Env, EnvEntry, OgsError, SConfig, Threads};
use crate::action::Action;
use crate::lambda::{decompose_cbn, decompose_cbv, CbnDecomp, Decomp, Term};
use crate::name::{Kind, Name, Supply};

pub type Step<C> = (Action, C);

fn with(support: &super::Support, names: &[Name]) -> super::Support {
    let mut s = support.clone();
    s.extend(names.iter().copied());
    s
}

/// Player move of a single running term answering on `p` (CBV).
enum PMove {
    Tau(Term),
    Answer {
        x: Name,
        value: Term,
    },
    Question {
        x: Name,
        y: Name,
        q: Name,
        arg: Term,
        ctx: crate::lambda::EvalContext,
    },
}

fn cbv_player(term: &Term, s: &mut Supply) -> PMove {
    match decompose_cbv(term) {
        Decomp::Redex {
            ctx,
            param,
            body,
            arg,
        } => PMove::Tau(ctx.plug(body.subst(param, &arg))),
        Decomp::Value => PMove::Answer {
            x: s.fresh(Kind::Variable),
            value: term.clone(),
        },
        Decomp::Stuck { ctx, head, arg } => {
            let y = s.fresh(Kind::Variable);
            let q = s.fresh(Kind::Continuation);
            PMove::Question {
                x: head,
                y,
                q,
                arg,
                ctx,
            }
        }
    }
}

pub fn aogs_transitions(f: &AConfig) -> Result<Vec<Step<AConfig>>, OgsError> {
    f.validate()?;
    Ok(aogs_step(f, Supply::new()))
}

pub fn aogs_step(f: &AConfig, floor: Supply) -> Vec<Step<AConfig>> {
    let mut s = f.supply().join(floor);
    match f {
        AConfig::Initial { term, support } => {
            let p = s.fresh(Kind::Continuation);
            vec![(
                Action::ioq(p),
                AConfig::Active {
                    term: term.clone(),
                    cont: p,
                    env: Env::new(),
                    support: with(support, &[p]),
                },
            )]
        }
        AConfig::Active {
            term,
            cont,
            env,
            support,
        } => match cbv_player(term, &mut s) {
            PMove::Tau(t) => {
                vec![(
                    Action::Tau,
                    AConfig::Active {
                        term: t,
                        cont: *cont,
                        env: env.clone(),
                        support: support.clone(),
                    },
                )]
            }
            PMove::Answer { x, value } => vec![(
                Action::pa(*cont, x),
                AConfig::Passive {
                    env: env.clone().with(x, EnvEntry::Value(value)),
                    support: with(support, &[x]),
                },
            )],
            PMove::Question { x, y, q, arg, ctx } => vec![(
                Action::pq(x, y, q),
                AConfig::Passive {
                    env: env
                        .clone()
                        .with(y, EnvEntry::Value(arg))
                        .with(q, EnvEntry::Cont(ctx, *cont)),
                    support: with(support, &[y, q]),
                },
            )],
        },
        AConfig::Passive { env, support } => {
            let mut out = Vec::new();
            for (n, e) in env.iter() {
                match e {
                    EnvEntry::Cont(ctx, p) => {
                        let x = s.peek(Kind::Variable);
                        out.push((
                            Action::oa(*n, x),
                            AConfig::Active {
                                term: ctx.plug(Term::Var(x)),
                                cont: *p,
                                env: env.without(*n),
                                support: with(support, &[x]),
                            },
                        ));
                    }
                    EnvEntry::Value(v) => {
                        let mut s2 = s;
                        let y = s2.fresh(Kind::Variable);
                        let q = s2.fresh(Kind::Continuation);
                        out.push((
                            Action::oq(*n, y, q),
                            AConfig::Active {
                                term: Term::app(v.clone(), Term::Var(y)),
                                cont: q,
                                env: env.clone(),
                                support: with(support, &[y, q]),
                            },
                        ));
                    }
                    EnvEntry::Thunk(_) => {}
                }
            }
            out
        }
    }
}

pub fn cogs_transitions(f: &CConfig) -> Result<Vec<Step<CConfig>>, OgsError> {
    f.validate()?;
    Ok(cogs_step(f, Supply::new()))
}

pub fn cogs_step(f: &CConfig, floor: Supply) -> Vec<Step<CConfig>> {
    let s = f.supply().join(floor);
    match f {
        CConfig::Initial { term, support } => {
            let mut s = s;
            let p = s.fresh(Kind::Continuation);
            vec![(
                Action::ioq(p),
                CConfig::Running {
                    threads: Threads(vec![(p, term.clone())]),
                    env: Env::new(),
                    support: with(support, &[p]),
                },
            )]
        }
        CConfig::Running {
            threads,
            env,
            support,
        } => {
            let mut out = Vec::new();
            for (i, (p, m)) in threads.0.iter().enumerate() {
                let mut s = s;
                let others = || {
                    let mut t = threads.0.clone();
                    t.remove(i);
                    t
                };
                match cbv_player(m, &mut s) {
                    PMove::Tau(t) => {
                        let mut ts = threads.0.clone();
                        ts[i].1 = t;
                        out.push((
                            Action::Tau,
                            CConfig::Running {
                                threads: Threads(ts),
                                env: env.clone(),
                                support: support.clone(),
                            },
                        ));
                    }
                    PMove::Answer { x, value } => out.push((
                        Action::pa(*p, x),
                        CConfig::Running {
                            threads: Threads(others()),
                            env: env.clone().with(x, EnvEntry::Value(value)),
                            support: with(support, &[x]),
                        },
                    )),
                    PMove::Question { x, y, q, arg, ctx } => out.push((
                        Action::pq(x, y, q),
                        CConfig::Running {
                            threads: Threads(others()),
                            env: env
                                .clone()
                                .with(y, EnvEntry::Value(arg))
                                .with(q, EnvEntry::Cont(ctx, *p)),
                            support: with(support, &[y, q]),
                        },
                    )),
                }
            }
            for (n, e) in env.iter() {
                let mut s = s;
                match e {
                    EnvEntry::Cont(ctx, p) => {
                        let x = s.fresh(Kind::Variable);
                        let mut ts = threads.0.clone();
                        ts.push((*p, ctx.plug(Term::Var(x))));
                        out.push((
                            Action::oa(*n, x),
                            CConfig::Running {
                                threads: Threads(ts),
                                env: env.without(*n),
                                support: with(support, &[x]),
                            },
                        ));
                    }
                    EnvEntry::Value(v) => {
                        let y = s.fresh(Kind::Variable);
                        let q = s.fresh(Kind::Continuation);
                        let mut ts = threads.0.clone();
                        ts.push((q, Term::app(v.clone(), Term::Var(y))));
                        out.push((
                            Action::oq(*n, y, q),
                            CConfig::Running {
                                threads: Threads(ts),
                                env: env.clone(),
                                support: with(support, &[y, q]),
                            },
                        ));
                    }
                    EnvEntry::Thunk(_) => {}
                }
            }
            out
        }
    }
}

pub fn wbogs_transitions(f: &SConfig) -> Result<Vec<Step<SConfig>>, OgsError> {
    f.validate()?;
    Ok(wbogs_step(f, Supply::new()))
}

pub fn wbogs_step(f: &SConfig, floor: Supply) -> Vec<Step<SConfig>> {
    let mut s = f.config.supply().join(floor);
    for n in &f.stack {
        s.observe(*n);
    }
    match &f.config {
        AConfig::Initial { .. } | AConfig::Active { .. } => aogs_step(&f.config, s)
            .into_iter()
            .map(|(a, c)| {
                let mut stack = f.stack.clone();
                if let Action::Out { objects, .. } = &a {
                    if objects.len() == 2 {
                        stack.insert(0, objects[1]);
                    }
                }
                (a, SConfig { config: c, stack })
            })
            .collect(),
        AConfig::Passive { env, support } => {
            let mut out = Vec::new();
            for (n, e) in env.iter() {
                match e {
                    EnvEntry::Cont(ctx, p) => {
                        if f.stack.first() != Some(n) {
                            continue;
                        }
                        let x = s.peek(Kind::Variable);
                        out.push((
                            Action::oa(*n, x),
                            SConfig {
                                config: AConfig::Active {
                                    term: ctx.plug(Term::Var(x)),
                                    cont: *p,
                                    env: env.clone(),
                                    support: with(support, &[x]),
                                },
                                stack: f.stack[1..].to_vec(),
                            },
                        ));
                    }
                    EnvEntry::Value(v) => {
                        let mut s2 = s;
                        let y = s2.fresh(Kind::Variable);
                        let q = s2.fresh(Kind::Continuation);
                        out.push((
                            Action::oq(*n, y, q),
                            SConfig {
                                config: AConfig::Active {
                                    term: Term::app(v.clone(), Term::Var(y)),
                                    cont: q,
                                    env: env.clone(),
                                    support: with(support, &[y, q]),
                                },
                                stack: f.stack.clone(),
                            },
                        ));
                    }
                    EnvEntry::Thunk(_) => {}
                }
            }
            out
        }
    }
}

// ------------------------------------------------------------ call-by-name

enum CbnMove {
    Tau(Term),
    Answer {
        v: Name,
        value: Term,
    },
    VarQuestion {
        x: Name,
        q: Name,
        ctx: crate::lambda::EvalContext,
    },
    ValueQuestion {
        v: Name,
        y: Name,
        q: Name,
        arg: Term,
        ctx: crate::lambda::EvalContext,
    },
}

fn cbn_player(term: &Term, s: &mut Supply) -> CbnMove {
    match decompose_cbn(term) {
        CbnDecomp::Redex {
            ctx,
            param,
            body,
            arg,
        } => CbnMove::Tau(ctx.plug(body.subst(param, &arg))),
        CbnDecomp::Value => CbnMove::Answer {
            v: s.fresh(Kind::ValueName),
            value: term.clone(),
        },
        CbnDecomp::Var { ctx, head } => CbnMove::VarQuestion {
            x: head,
            q: s.fresh(Kind::Continuation),
            ctx,
        },
        CbnDecomp::ValueApp { ctx, head, arg } => {
            let y = s.fresh(Kind::Variable);
            let q = s.fresh(Kind::Continuation);
            CbnMove::ValueQuestion {
                v: head,
                y,
                q,
                arg,
                ctx,
            }
        }
    }
}

/// Player effect of a CBN move on the environment; `None` for τ.
fn cbn_effect(m: CbnMove, p: Name, env: &Env) -> (Action, Option<Term>, Env, Vec<Name>) {
    match m {
        CbnMove::Tau(t) => (Action::Tau, Some(t), env.clone(), vec![]),
        CbnMove::Answer { v, value } => (
            Action::pa(p, v),
            None,
            env.clone().with(v, EnvEntry::Value(value)),
            vec![v],
        ),
        CbnMove::VarQuestion { x, q, ctx } => (
            Action::Out {
                subject: x,
                objects: vec![q],
            },
            None,
            env.clone().with(q, EnvEntry::Cont(ctx, p)),
            vec![q],
        ),
        CbnMove::ValueQuestion { v, y, q, arg, ctx } => (
            Action::Out {
                subject: v,
                objects: vec![y, q],
            },
            None,
            env.clone()
                .with(y, EnvEntry::Thunk(arg))
                .with(q, EnvEntry::Cont(ctx, p)),
            vec![y, q],
        ),
    }
}

/// Opponent moves of a CBN environment: `(action, new thread, env after)`.
fn cbn_opponent(env: &Env, s: Supply) -> Vec<(Action, (Name, Term), Env, Vec<Name>)> {
    let mut out = Vec::new();
    for (n, e) in env.iter() {
        let mut s = s;
        match e {
            EnvEntry::Cont(ctx, p) => {
                let v = s.fresh(Kind::ValueName);
                out.push((
                    Action::oa(*n, v),
                    (*p, ctx.plug(Term::Var(v))),
                    env.without(*n),
                    vec![v],
                ));
            }
            EnvEntry::Value(val) => {
                let y = s.fresh(Kind::Variable);
                let q = s.fresh(Kind::Continuation);
                out.push((
                    Action::In {
                        subject: *n,
                        objects: vec![y, q],
                    },
                    (q, Term::app(val.clone(), Term::Var(y))),
                    env.without(*n),
                    vec![y, q],
                ));
            }
            EnvEntry::Thunk(m) => {
                let q = s.fresh(Kind::Continuation);
                out.push((
                    Action::In {
                        subject: *n,
                        objects: vec![q],
                    },
                    (q, m.clone()),
                    env.clone(),
                    vec![q],
                ));
            }
        }
    }
    out
}

pub fn cbn_alternating(f: &AConfig) -> Result<Vec<Step<AConfig>>, OgsError> {
    f.validate()?;
    Ok(cbn_alternating_step(f, Supply::new()))
}

pub fn cbn_alternating_step(f: &AConfig, floor: Supply) -> Vec<Step<AConfig>> {
    let mut s = f.supply().join(floor);
    match f {
        AConfig::Initial { term, support } => {
            let p = s.fresh(Kind::Continuation);
            vec![(
                Action::ioq(p),
                AConfig::Active {
                    term: term.clone(),
                    cont: p,
                    env: Env::new(),
                    support: with(support, &[p]),
                },
            )]
        }
        AConfig::Active {
            term,
            cont,
            env,
            support,
        } => {
            let (a, t, env2, new) = cbn_effect(cbn_player(term, &mut s), *cont, env);
            let c = match t {
                Some(t) => AConfig::Active {
                    term: t,
                    cont: *cont,
                    env: env2,
                    support: support.clone(),
                },
                None => AConfig::Passive {
                    env: env2,
                    support: with(support, &new),
                },
            };
            vec![(a, c)]
        }
        AConfig::Passive { support, env } => cbn_opponent(env, s)
            .into_iter()
            .map(|(a, (p, t), env2, new)| {
                (
                    a,
                    AConfig::Active {
                        term: t,
                        cont: p,
                        env: env2,
                        support: with(support, &new),
                    },
                )
            })
            .collect(),
    }
}

pub fn cbn_concurrent(f: &CConfig) -> Result<Vec<Step<CConfig>>, OgsError> {
    f.validate()?;
    Ok(cbn_concurrent_step(f, Supply::new()))
}

pub fn cbn_concurrent_step(f: &CConfig, floor: Supply) -> Vec<Step<CConfig>> {
    let s = f.supply().join(floor);
    match f {
        CConfig::Initial { term, support } => {
            let mut s = s;
            let p = s.fresh(Kind::Continuation);
            vec![(
                Action::ioq(p),
                CConfig::Running {
                    threads: Threads(vec![(p, term.clone())]),
                    env: Env::new(),
                    support: with(support, &[p]),
                },
            )]
        }
        CConfig::Running {
            threads,
            env,
            support,
        } => {
            let mut out = Vec::new();
            for (i, (p, m)) in threads.0.iter().enumerate() {
                let mut s = s;
                let (a, t, env2, new) = cbn_effect(cbn_player(m, &mut s), *p, env);
                let mut ts = threads.0.clone();
                match t {
                    Some(t) => ts[i].1 = t,
                    None => {
                        ts.remove(i);
                    }
                }
                out.push((
                    a,
                    CConfig::Running {
                        threads: Threads(ts),
                        env: env2,
                        support: with(support, &new),
                    },
                ));
            }
            for (a, th, env2, new) in cbn_opponent(env, s) {
                let mut ts = threads.0.clone();
                ts.push(th);
                out.push((
                    a,
                    CConfig::Running {
                        threads: Threads(ts),
                        env: env2,
                        support: with(support, &new),
                    },
                ));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{parse_cbv, EvalContext, Frame};

    fn id(i: u32) -> Term {
        Term::lam(Name::var(i), Term::Var(Name::var(i)))
    }

    #[test]
    fn ioq_then_pa_then_oq() {
        // hand application of the rules
        let f0 = AConfig::initial(id(0));
        let t = aogs_transitions(&f0).unwrap();
        let p0 = Name::cont(0);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::ioq(p0));
        let f1 = AConfig::Active {
            term: id(0),
            cont: p0,
            env: Env::new(),
            support: [p0].into(),
        };
        assert_eq!(t[0].1, f1);

        let t = aogs_transitions(&f1).unwrap();
        let x0 = Name::var(0);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::pa(p0, x0));
        let f2 = AConfig::Passive {
            env: Env::new().with(x0, EnvEntry::Value(id(0))),
            support: [p0, x0].into(),
        };
        assert_eq!(t[0].1, f2);

        let t = aogs_transitions(&f2).unwrap();
        let (y, q) = (Name::var(1), Name::cont(1));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::oq(x0, y, q));
        let f3 = AConfig::Active {
            term: Term::app(id(0), Term::Var(y)),
            cont: q,
            env: f2.env().unwrap().clone(),
            support: [p0, x0, y, q].into(),
        };
        assert_eq!(t[0].1, f3);
    }

    #[test]
    fn oa_consumes_entry() {
        let (q, p, x) = (Name::cont(1), Name::cont(0), Name::var(0));
        let ctx = EvalContext::hole().wrap(Frame::AppRight(id(5)));
        let f = AConfig::Passive {
            env: Env::new().with(q, EnvEntry::Cont(ctx.clone(), p)),
            support: [p, q].into(),
        };
        let t = aogs_transitions(&f).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::oa(q, x));
        match &t[0].1 {
            AConfig::Active {
                env, cont, term, ..
            } => {
                assert!(env.is_empty());
                assert_eq!(*cont, p);
                assert_eq!(*term, ctx.plug(Term::Var(x)));
            }
            c => panic!("{c}"),
        }
    }

    #[test]
    fn invalid_configuration_rejected() {
        let p = Name::cont(0);
        // the free variable x9 is missing from the support
        let f = AConfig::Active {
            term: Term::Var(Name::var(9)),
            cont: p,
            env: Env::new(),
            support: [p].into(),
        };
        assert!(matches!(
            aogs_transitions(&f),
            Err(OgsError::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn cogs_pa_and_oq() {
        let p0 = Name::cont(0);
        let f = CConfig::Running {
            threads: Threads(vec![(p0, id(0))]),
            env: Env::new(),
            support: [p0].into(),
        };
        let t = cogs_transitions(&f).unwrap();
        let x0 = Name::var(0);
        assert!(t.iter().any(|(a, c)| *a == Action::pa(p0, x0)
            && c.threads().is_empty()
            && c.env().unwrap().get(x0) == Some(&EnvEntry::Value(id(0)))));
        let g = CConfig::Running {
            threads: Threads::default(),
            env: Env::new().with(x0, EnvEntry::Value(id(0))),
            support: [x0].into(),
        };
        let t = cogs_transitions(&g).unwrap();
        let (y, q) = (Name::var(1), Name::cont(0));
        assert!(t.iter().any(|(a, c)| *a == Action::oq(x0, y, q)
            && c.threads() == [(q, Term::app(id(0), Term::Var(y)))]
            && c.env().unwrap().get(x0).is_some()));
    }

    #[test]
    fn cogs_omega_only_taus() {
        let omega = parse_cbv("(\\x. x x)(\\x. x x)").unwrap();
        let p = Name::cont(0);
        let mut f = CConfig::Running {
            threads: Threads(vec![(p, omega)]),
            env: Env::new(),
            support: [p].into(),
        };
        for _ in 0..5 {
            let t = cogs_transitions(&f).unwrap();
            assert_eq!(t.len(), 1);
            assert!(t[0].0.is_tau());
            f = t[0].1.clone();
        }
    }

    #[test]
    fn wbogs_question_pushes_and_answer_pops() {
        let m = parse_cbv("(\\z. z) (x \\y. y)").unwrap();
        let x = Name::var(0);
        let p = Name::cont(0);
        let f = SConfig::new(
            AConfig::Active {
                term: m,
                cont: p,
                env: Env::new(),
                support: [x, p].into(),
            },
            vec![],
        );
        let t = wbogs_transitions(&f).unwrap();
        assert_eq!(t.len(), 1);
        let (y0, q0) = (Name::var(1), Name::cont(1));
        assert_eq!(t[0].0, Action::pq(x, y0, q0));
        assert_eq!(t[0].1.stack, vec![q0]);
        let t = wbogs_transitions(&t[0].1).unwrap();
        // OA on the top of the stack and OQ on y0
        assert_eq!(t.len(), 2);
        let (_, after_oa) = t
            .iter()
            .find(|(a, _)| a.is_input() && a.is_answer())
            .unwrap();
        assert!(after_oa.stack.is_empty());
        // the continuation entry is kept
        assert!(after_oa.config.env().unwrap().get(q0).is_some());
    }

    #[test]
    fn wbogs_oa_only_on_top() {
        let (q0, q1, p) = (Name::cont(1), Name::cont(2), Name::cont(0));
        let env = Env::new()
            .with(q0, EnvEntry::Cont(EvalContext::hole(), p))
            .with(q1, EnvEntry::Cont(EvalContext::hole(), p));
        let f = SConfig::new(
            AConfig::Passive {
                env,
                support: [p, q0, q1].into(),
            },
            vec![q1, q0],
        );
        let t = wbogs_transitions(&f).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0.subject(), Some(&q1));
    }

    #[test]
    fn cbn_rules() {
        let p = Name::cont(0);
        let lam = id(0);
        let f = AConfig::Active {
            term: lam.clone(),
            cont: p,
            env: Env::new(),
            support: [p].into(),
        };
        let t = cbn_alternating(&f).unwrap();
        assert_eq!(t[0].0, Action::pa(p, Name::val(0)));
        assert_eq!(
            t[0].1.env().unwrap().get(Name::val(0)),
            Some(&EnvEntry::Value(lam))
        );

        // E[x] with E = [] (λy.y)
        let x = Name::var(0);
        let term = Term::app(Term::Var(x), id(1));
        let f = AConfig::Active {
            term,
            cont: p,
            env: Env::new(),
            support: [p, x].into(),
        };
        let t = cbn_alternating(&f).unwrap();
        let q0 = Name::cont(1);
        assert_eq!(
            t[0].0,
            Action::Out {
                subject: x,
                objects: vec![q0]
            }
        );
        assert_eq!(t[0].0.label(), "PTQ");
        let ctx = EvalContext::hole().wrap(Frame::AppLeft(id(1)));
        assert_eq!(t[0].1.env().unwrap().get(q0), Some(&EnvEntry::Cont(ctx, p)));

        // OTQ spawns the thunk and keeps it
        let f = AConfig::Passive {
            env: Env::new().with(x, EnvEntry::Thunk(id(1))),
            support: [x].into(),
        };
        let t = cbn_alternating(&f).unwrap();
        assert_eq!(
            t[0].0,
            Action::In {
                subject: x,
                objects: vec![Name::cont(0)]
            }
        );
        match &t[0].1 {
            AConfig::Active {
                term, cont, env, ..
            } => {
                assert_eq!(*term, id(1));
                assert_eq!(*cont, Name::cont(0));
                assert_eq!(env.len(), 1);
            }
            c => panic!("{c}"),
        }
    }
}
