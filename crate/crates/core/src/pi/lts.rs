use std::collections::BTreeSet;

use super::{Agent, Chan, PiError, Process};
use crate::action::Action;
use crate::name::{Kind, Name, Supply};

/// Restricted names are opened into this id range while computing
/// transitions; they are closed again before a result is returned.
pub(crate) const RES_BASE: u32 = 1 << 30;

struct Ctx {
    floor: Supply,
    res: u32,
}

impl Ctx {
    fn objects(&self, kinds: &[Kind]) -> Vec<Name> {
        let mut s = self.floor;
        kinds.iter().map(|k| s.fresh(*k)).collect()
    }
}

type Steps = Vec<(Action, Process)>;

fn free(c: &Chan) -> Name {
    match c {
        Chan::Free(n) => *n,
        Chan::Bound(..) => panic!("transition on an open binder"),
    }
}

fn trans(p: &Process, cx: &mut Ctx) -> Result<Steps, PiError> {
    Ok(match p {
        Process::Nil => vec![],
        Process::In(a, kinds, body) => {
            let objs = cx.objects(kinds);
            let next = Process::open(body, &objs);
            vec![(
                Action::In {
                    subject: free(a),
                    objects: objs,
                },
                next,
            )]
        }
        Process::Out(a, kinds, body) => {
            let objs = cx.objects(kinds);
            let next = Process::open(body, &objs);
            vec![(
                Action::Out {
                    subject: free(a),
                    objects: objs,
                },
                next,
            )]
        }
        Process::Rep(a, kinds, body) => {
            let objs = cx.objects(kinds);
            let next = Process::par(vec![Process::open(body, &objs), p.clone()]);
            vec![(
                Action::In {
                    subject: free(a),
                    objects: objs,
                },
                next,
            )]
        }
        Process::Res(k, body) => {
            let n = Name::new(*k, RES_BASE + cx.res);
            cx.res += 1;
            let inner = trans(&Process::open(body, &[n]), cx)?;
            inner
                .into_iter()
                .filter(|(a, _)| a.subject() != Some(&n))
                .map(|(a, q)| (a, Process::res(n, q)))
                .collect()
        }
        Process::Par(ps) => {
            let per: Vec<Steps> = ps.iter().map(|q| trans(q, cx)).collect::<Result<_, _>>()?;
            let mut out = Vec::new();
            for (i, steps) in per.iter().enumerate() {
                for (a, q) in steps {
                    let mut v = ps.clone();
                    v[i] = q.clone();
                    out.push((a.clone(), Process::Par(v)));
                }
            }
            for (i, si) in per.iter().enumerate() {
                for (a, qi) in si {
                    let Action::In { subject, objects } = a else {
                        continue;
                    };
                    for (j, sj) in per.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        for (b, qj) in sj {
                            let Action::Out {
                                subject: s2,
                                objects: o2,
                            } = b
                            else {
                                continue;
                            };
                            if s2 != subject {
                                continue;
                            }
                            if o2 != objects {
                                return Err(PiError::ArityMismatch(*subject));
                            }
                            let mut v = ps.clone();
                            v[i] = Process::res_all(
                                objects,
                                Process::Par(vec![qi.clone(), qj.clone()]),
                            );
                            v.remove(j);
                            out.push((Action::Tau, Process::par(v)));
                        }
                    }
                }
            }
            out
        }
        Process::Call(c, a, b) => trans(&c.unfold(free(a), free(b)), cx)?,
    })
}

/// Opens the restrictions reachable through parallel composition, scope
/// extrusion style, leaving the prefixed components.
fn flatten(p: &Process, cx: &mut Ctx, restricted: &mut Vec<Name>, comps: &mut Vec<Process>) {
    match p {
        Process::Nil => {}
        Process::Par(ps) => ps.iter().for_each(|q| flatten(q, cx, restricted, comps)),
        Process::Res(k, body) => {
            let n = Name::new(*k, RES_BASE + cx.res);
            cx.res += 1;
            restricted.push(n);
            flatten(&Process::open(body, &[n]), cx, restricted, comps);
        }
        q => comps.push(q.clone()),
    }
}

/// `res_all(names, body)` in a single traversal.
fn close_nested(names: &[Name], body: Process) -> Process {
    if names.is_empty() {
        return body;
    }
    let k = names.len() as u32;
    let closed = super::map_chans(&body, 0, &mut |c, lvl| match c {
        Chan::Free(n) => match names.iter().position(|m| *m == n) {
            Some(i) => Chan::Bound(lvl + (k - 1 - i as u32), 0),
            None => c,
        },
        b => b,
    });
    names
        .iter()
        .rev()
        .fold(closed, |b, n| Process::Res(n.kind, Box::new(b)))
}

/// One-step transitions of a process, drawing bound names above `floor` and
/// its free names.
pub fn proc_transitions(p: &Process, floor: Supply) -> Result<Steps, PiError> {
    let mut cx = Ctx {
        floor: Supply::above(&p.free_names()).join(floor),
        res: 0,
    };
    let mut restricted = Vec::new();
    let mut comps = Vec::new();
    flatten(p, &mut cx, &mut restricted, &mut comps);
    let hidden = |a: &Action| a.subject().is_some_and(|n| restricted.contains(n));
    let per: Vec<Steps> = comps
        .iter()
        .map(|q| trans(q, &mut cx))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (i, steps) in per.iter().enumerate() {
        for (a, q) in steps {
            if hidden(a) {
                continue;
            }
            let mut v = comps.clone();
            v[i] = q.clone();
            out.push((a.clone(), close_nested(&restricted, Process::par(v))));
        }
    }
    for (i, si) in per.iter().enumerate() {
        for (a, qi) in si {
            let Action::In { subject, objects } = a else {
                continue;
            };
            for (j, sj) in per.iter().enumerate() {
                if i == j {
                    continue;
                }
                for (b, qj) in sj {
                    let Action::Out {
                        subject: s2,
                        objects: o2,
                    } = b
                    else {
                        continue;
                    };
                    if s2 != subject {
                        continue;
                    }
                    if o2 != objects {
                        return Err(PiError::ArityMismatch(*subject));
                    }
                    let mut v = comps.clone();
                    v[i] = Process::res_all(objects, Process::Par(vec![qi.clone(), qj.clone()]));
                    v.remove(j);
                    out.push((Action::Tau, close_nested(&restricted, Process::par(v))));
                }
            }
        }
    }
    Ok(out)
}

pub fn pi_step(a: &Agent, floor: Supply) -> Result<Vec<(Action, Agent)>, PiError> {
    match a {
        Agent::Proc(p) => Ok(proc_transitions(p, floor)?
            .into_iter()
            .map(|(a, q)| (a, Agent::Proc(q)))
            .collect()),
        Agent::Abs(kinds, body) => {
            let mut s = Supply::above(&body.free_names()).join(floor);
            let objs: Vec<Name> = kinds.iter().map(|k| s.fresh(*k)).collect();
            let next = Process::open(body, &objs);
            Ok(vec![(Action::Abs(objs), Agent::Proc(next))])
        }
    }
}

pub fn pi_transitions(a: &Agent) -> Result<Vec<(Action, Agent)>, PiError> {
    pi_step(a, Supply::new())
}

/// Every immediate transition is an input.
pub fn is_input_reactive(p: &Process) -> Result<bool, PiError> {
    Ok(proc_transitions(p, Supply::new())?
        .iter()
        .all(|(a, _)| a.is_input()))
}

/// Inputs are offered only by input-reactive processes.
pub fn pi_op_step(a: &Agent, floor: Supply) -> Result<Vec<(Action, Agent)>, PiError> {
    let all = pi_step(a, floor)?;
    if all
        .iter()
        .all(|(a, _)| a.is_input() || matches!(a, Action::Abs(_)))
    {
        return Ok(all);
    }
    Ok(all.into_iter().filter(|(a, _)| !a.is_input()).collect())
}

pub fn pi_op_transitions(a: &Agent) -> Result<Vec<(Action, Agent)>, PiError> {
    pi_op_step(a, Supply::new())
}

/// No free name is used with opposite polarities by the two processes.
pub fn cannot_interact(p: &Process, q: &Process) -> bool {
    let (pi, po) = p.subject_names();
    let (qi, qo) = q.subject_names();
    pi.is_disjoint(&qo) && po.is_disjoint(&qi)
}

#[allow(dead_code)]
pub(crate) fn subjects(steps: &[(Action, Process)]) -> BTreeSet<Name> {
    steps
        .iter()
        .filter_map(|(a, _)| a.subject().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::{key, Const};

    fn a() -> Name {
        Name::var(0)
    }

    #[test]
    fn com_restricts_the_payload() {
        let x = Name::var(5);
        let p = Process::par(vec![
            Process::output(a(), &[x], Process::Nil),
            Process::input(a(), &[x], Process::Nil),
        ]);
        let t = proc_transitions(&p, Supply::new()).unwrap();
        let taus: Vec<_> = t.iter().filter(|(a, _)| a.is_tau()).collect();
        assert_eq!(taus.len(), 1);
        match &taus[0].1 {
            Process::Res(Kind::Variable, b) => {
                assert_eq!(**b, Process::Par(vec![Process::Nil, Process::Nil]))
            }
            other => panic!("{other}"),
        }
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn abstraction_step() {
        let p = Name::cont(0);
        let ag = Agent::abs(&[p], Process::output(p, &[Name::var(0)], Process::Nil));
        let t = pi_transitions(&ag).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::Abs(vec![Name::cont(0)]));
    }

    #[test]
    fn replication_keeps_the_server() {
        let (b, y) = (Name::var(1), Name::var(2));
        let server = Process::rep(a(), &[b], Process::output(b, &[y], Process::Nil));
        let t = proc_transitions(&server, Supply::new()).unwrap();
        assert_eq!(t.len(), 1);
        let fresh = Name::var(1);
        assert_eq!(
            t[0].0,
            Action::In {
                subject: a(),
                objects: vec![fresh]
            }
        );
        let expected = Process::par(vec![
            Process::output(fresh, &[y], Process::Nil),
            server.clone(),
        ]);
        assert_eq!(key(&t[0].1), key(&expected));
    }

    #[test]
    fn output_prioritised() {
        let (b, x) = (Name::var(1), Name::var(2));
        let p = Process::par(vec![
            Process::output(a(), &[x], Process::Nil),
            Process::input(b, &[x], Process::Nil),
        ]);
        let t = pi_op_transitions(&Agent::Proc(p.clone())).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].0.is_output());
        assert!(!is_input_reactive(&p).unwrap());
        assert!(is_input_reactive(&Process::Nil).unwrap());
        let q = Process::par(vec![
            Process::input(a(), &[x], Process::Nil),
            Process::input(b, &[x], Process::Nil),
        ]);
        assert!(is_input_reactive(&q).unwrap());
    }

    #[test]
    fn tau_loop_hides_inputs() {
        // νc (Fx(c,c) | c^(x,p)) keeps reducing forever
        let c = Name::var(9);
        let (x, p) = (Name::var(10), Name::cont(0));
        let lp = Process::res(
            c,
            Process::par(vec![
                Process::call(Const::Fx, c, c),
                Process::output(c, &[x, p], Process::Nil),
            ]),
        );
        let proc = Process::par(vec![Process::input(a(), &[Name::var(3)], Process::Nil), lp]);
        let t = pi_op_transitions(&Agent::Proc(proc)).unwrap();
        assert!(!t.is_empty());
        assert!(t.iter().all(|(a, _)| a.is_tau()));
    }

    #[test]
    fn arity_mismatch() {
        let p = Process::par(vec![
            Process::output(a(), &[Name::var(3)], Process::Nil),
            Process::input(a(), &[Name::cont(3)], Process::Nil),
        ]);
        assert_eq!(
            proc_transitions(&p, Supply::new()).unwrap_err(),
            PiError::ArityMismatch(a())
        );
    }

    #[test]
    fn non_interaction() {
        let (b, x) = (Name::var(1), Name::var(2));
        let out_a = Process::output(a(), &[x], Process::Nil);
        let in_a = Process::input(a(), &[x], Process::Nil);
        let out_b = Process::output(b, &[x], Process::Nil);
        assert!(!cannot_interact(&out_a, &in_a));
        assert!(cannot_interact(&out_a, &out_b));
        assert!(cannot_interact(&Process::Nil, &in_a));
    }
}
