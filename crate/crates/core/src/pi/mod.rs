//! The internal π-calculus: locally nameless processes, constants, the
//! standard and output-prioritised transition systems.

mod key;
mod lts;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::name::{Kind, Name, Supply};

pub use key::{collect, collect_agent, key, key_agent, normalize};
pub use lts::{
    cannot_interact, is_input_reactive, pi_op_step, pi_op_transitions, pi_step, pi_transitions,
    proc_transitions,
};
pub use parse::{parse_agent, parse_process};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PiError {
    #[error("arity mismatch on {0}")]
    ArityMismatch(Name),
    #[error("cannot link {0} to {1}: kinds differ")]
    KindMismatch(Name, Name),
}

/// A channel occurrence: free, or bound by the `depth`-th enclosing binder
/// (innermost is 0) at position `pos` of its tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Chan {
    Free(Name),
    Bound(u32, u32),
}

/// Defined constants: the links of both encodings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Const {
    /// CBV continuation link `(p,q) p(x).q^(y).Fx(y,x)`
    Fk,
    /// CBV variable link `(x,y) !x(z,p).y^(w,q).(Fk(q,p) | Fx(w,z))`
    Fx,
    /// CBN variable link `(x,y) !x(p).y^(q).Gk(q,p)`
    Gx,
    /// CBN continuation link `(p,q) p(v).q^(w).Gv(w,v)`
    Gk,
    /// CBN value link `(v,w) v(x,p).w^(y,q).(Gx(y,x) | Gk(q,p))`
    Gv,
}

impl Const {
    pub fn name(self) -> &'static str {
        match self {
            Const::Fk => "Fk",
            Const::Fx => "Fx",
            Const::Gx => "Gx",
            Const::Gk => "Gk",
            Const::Gv => "Gv",
        }
    }

    pub fn from_name(s: &str) -> Option<Const> {
        [Const::Fk, Const::Fx, Const::Gx, Const::Gk, Const::Gv]
            .into_iter()
            .find(|c| c.name() == s)
    }

    pub fn param_kind(self) -> Kind {
        match self {
            Const::Fk | Const::Gk => Kind::Continuation,
            Const::Fx | Const::Gx => Kind::Variable,
            Const::Gv => Kind::ValueName,
        }
    }

    /// The defining body instantiated at `a, b`.
    pub fn unfold(self, a: Name, b: Name) -> Process {
        let mut s = Supply::above([&a, &b]);
        let v = |s: &mut Supply| s.fresh(Kind::Variable);
        let k = |s: &mut Supply| s.fresh(Kind::Continuation);
        match self {
            Const::Fk => {
                let (x, y) = (v(&mut s), v(&mut s));
                Process::input(
                    a,
                    &[x],
                    Process::output(b, &[y], Process::call(Const::Fx, y, x)),
                )
            }
            Const::Fx => {
                let (z, p, w, q) = (v(&mut s), k(&mut s), v(&mut s), k(&mut s));
                Process::rep(
                    a,
                    &[z, p],
                    Process::output(
                        b,
                        &[w, q],
                        Process::par(vec![
                            Process::call(Const::Fk, q, p),
                            Process::call(Const::Fx, w, z),
                        ]),
                    ),
                )
            }
            Const::Gx => {
                let (p, q) = (k(&mut s), k(&mut s));
                Process::rep(
                    a,
                    &[p],
                    Process::output(b, &[q], Process::call(Const::Gk, q, p)),
                )
            }
            Const::Gk => {
                let (v1, w1) = (s.fresh(Kind::ValueName), s.fresh(Kind::ValueName));
                Process::input(
                    a,
                    &[v1],
                    Process::output(b, &[w1], Process::call(Const::Gv, w1, v1)),
                )
            }
            Const::Gv => {
                let (x, p, y, q) = (v(&mut s), k(&mut s), v(&mut s), k(&mut s));
                Process::input(
                    a,
                    &[x, p],
                    Process::output(
                        b,
                        &[y, q],
                        Process::par(vec![
                            Process::call(Const::Gx, y, x),
                            Process::call(Const::Gk, q, p),
                        ]),
                    ),
                )
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Calculus {
    Cbv,
    Cbn,
}

/// Builds the link `a ↪ b` for names of the same kind.
pub fn make_forwarder(a: Name, b: Name, calc: Calculus) -> Result<Process, PiError> {
    if a.kind != b.kind {
        return Err(PiError::KindMismatch(a, b));
    }
    let c = match (calc, a.kind) {
        (Calculus::Cbv, Kind::Continuation) => Const::Fk,
        (Calculus::Cbv, _) => Const::Fx,
        (Calculus::Cbn, Kind::Continuation) => Const::Gk,
        (Calculus::Cbn, Kind::Variable) => Const::Gx,
        (Calculus::Cbn, Kind::ValueName) => Const::Gv,
    };
    Ok(Process::call(c, a, b))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    Nil,
    In(Chan, Vec<Kind>, Box<Process>),
    /// Bound output.
    Out(Chan, Vec<Kind>, Box<Process>),
    /// Replicated input.
    Rep(Chan, Vec<Kind>, Box<Process>),
    Res(Kind, Box<Process>),
    Par(Vec<Process>),
    Call(Const, Chan, Chan),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Agent {
    Proc(Process),
    Abs(Vec<Kind>, Process),
}

pub(crate) fn map_chans(p: &Process, lvl: u32, f: &mut dyn FnMut(Chan, u32) -> Chan) -> Process {
    let sub =
        |b: &Process, f: &mut dyn FnMut(Chan, u32) -> Chan| Box::new(map_chans(b, lvl + 1, f));
    match p {
        Process::Nil => Process::Nil,
        Process::In(a, k, b) => Process::In(f(*a, lvl), k.clone(), sub(b, f)),
        Process::Out(a, k, b) => Process::Out(f(*a, lvl), k.clone(), sub(b, f)),
        Process::Rep(a, k, b) => Process::Rep(f(*a, lvl), k.clone(), sub(b, f)),
        Process::Res(k, b) => Process::Res(*k, sub(b, f)),
        Process::Par(ps) => Process::Par(ps.iter().map(|q| map_chans(q, lvl, f)).collect()),
        Process::Call(c, a, b) => Process::Call(*c, f(*a, lvl), f(*b, lvl)),
    }
}

impl Process {
    /// Abstracts `names` into the binder enclosing `body`.
    pub fn close(body: &Process, names: &[Name]) -> Process {
        map_chans(body, 0, &mut |c, lvl| match c {
            Chan::Free(n) => match names.iter().position(|m| *m == n) {
                Some(i) => Chan::Bound(lvl, i as u32),
                None => c,
            },
            b => b,
        })
    }

    /// Instantiates the outermost binder of `body` with `names`.
    pub fn open(body: &Process, names: &[Name]) -> Process {
        map_chans(body, 0, &mut |c, lvl| match c {
            Chan::Bound(d, i) if d == lvl => Chan::Free(names[i as usize]),
            b => b,
        })
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> Process {
        map_chans(self, 0, &mut |c, _| match c {
            Chan::Free(n) => Chan::Free(f(n)),
            b => b,
        })
    }

    fn kinds(names: &[Name]) -> Vec<Kind> {
        names.iter().map(|n| n.kind).collect()
    }

    pub fn input(a: Name, params: &[Name], body: Process) -> Process {
        Process::In(
            Chan::Free(a),
            Self::kinds(params),
            Box::new(Process::close(&body, params)),
        )
    }

    pub fn output(a: Name, params: &[Name], body: Process) -> Process {
        Process::Out(
            Chan::Free(a),
            Self::kinds(params),
            Box::new(Process::close(&body, params)),
        )
    }

    pub fn rep(a: Name, params: &[Name], body: Process) -> Process {
        Process::Rep(
            Chan::Free(a),
            Self::kinds(params),
            Box::new(Process::close(&body, params)),
        )
    }

    pub fn res(n: Name, body: Process) -> Process {
        Process::Res(n.kind, Box::new(Process::close(&body, &[n])))
    }

    pub fn res_all(names: &[Name], body: Process) -> Process {
        names.iter().rev().fold(body, |b, n| Process::res(*n, b))
    }

    pub fn par(ps: Vec<Process>) -> Process {
        let mut out = Vec::new();
        for p in ps {
            match p {
                Process::Nil => {}
                Process::Par(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Process::Nil,
            1 => out.pop().unwrap(),
            _ => Process::Par(out),
        }
    }

    pub fn call(c: Const, a: Name, b: Name) -> Process {
        Process::Call(c, Chan::Free(a), Chan::Free(b))
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        map_chans(self, 0, &mut |c, _| {
            if let Chan::Free(n) = c {
                s.insert(n);
            }
            c
        });
        s
    }

    /// Free names in input-subject and output-subject position. Links
    /// receive on their first argument and send on the second.
    pub fn subject_names(&self) -> (BTreeSet<Name>, BTreeSet<Name>) {
        let (mut ins, mut outs) = (BTreeSet::new(), BTreeSet::new());
        fn go(p: &Process, ins: &mut BTreeSet<Name>, outs: &mut BTreeSet<Name>) {
            match p {
                Process::Nil => {}
                Process::In(a, _, b) | Process::Rep(a, _, b) => {
                    if let Chan::Free(n) = a {
                        ins.insert(*n);
                    }
                    go(b, ins, outs);
                }
                Process::Out(a, _, b) => {
                    if let Chan::Free(n) = a {
                        outs.insert(*n);
                    }
                    go(b, ins, outs);
                }
                Process::Res(_, b) => go(b, ins, outs),
                Process::Par(ps) => ps.iter().for_each(|q| go(q, ins, outs)),
                Process::Call(_, a, b) => {
                    if let Chan::Free(n) = a {
                        ins.insert(*n);
                    }
                    if let Chan::Free(n) = b {
                        outs.insert(*n);
                    }
                }
            }
        }
        go(self, &mut ins, &mut outs);
        (ins, outs)
    }

    pub fn size(&self) -> usize {
        match self {
            Process::Nil | Process::Call(..) => 1,
            Process::In(_, _, b)
            | Process::Out(_, _, b)
            | Process::Rep(_, _, b)
            | Process::Res(_, b) => 1 + b.size(),
            Process::Par(ps) => 1 + ps.iter().map(Process::size).sum::<usize>(),
        }
    }
}

impl Agent {
    pub fn abs(params: &[Name], body: Process) -> Agent {
        Agent::Abs(Process::kinds(params), Process::close(&body, params))
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        match self {
            Agent::Proc(p) | Agent::Abs(_, p) => p.free_names(),
        }
    }

    /// Applies an abstraction to names; a process is returned unchanged.
    pub fn apply(&self, args: &[Name]) -> Process {
        match self {
            Agent::Proc(p) => p.clone(),
            Agent::Abs(_, b) => Process::open(b, args),
        }
    }

    pub fn process(&self) -> Option<&Process> {
        match self {
            Agent::Proc(p) => Some(p),
            Agent::Abs(..) => None,
        }
    }
}

impl From<Process> for Agent {
    fn from(p: Process) -> Agent {
        Agent::Proc(p)
    }
}

// ------------------------------------------------------------- printing

struct Printer {
    supply: Supply,
}

impl Printer {
    fn binders(&mut self, kinds: &[Kind]) -> Vec<Name> {
        kinds.iter().map(|k| self.supply.fresh(*k)).collect()
    }

    fn chan(c: &Chan) -> String {
        match c {
            Chan::Free(n) => n.to_string(),
            Chan::Bound(d, i) => format!("#{d}.{i}"),
        }
    }

    fn list(ns: &[Name]) -> String {
        ns.iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn prefix(&mut self, out: &mut String, a: &Chan, kinds: &[Kind], body: &Process, hat: bool) {
        let ns = self.binders(kinds);
        out.push_str(&Self::chan(a));
        if hat {
            out.push('^');
        }
        out.push('(');
        out.push_str(&Self::list(&ns));
        out.push(')');
        let b = Process::open(body, &ns);
        if b != Process::Nil {
            out.push_str(". ");
            self.atom(out, &b);
        }
    }

    fn atom(&mut self, out: &mut String, p: &Process) {
        if let Process::Par(_) = p {
            out.push('(');
            self.proc(out, p);
            out.push(')');
        } else {
            self.proc(out, p);
        }
    }

    fn proc(&mut self, out: &mut String, p: &Process) {
        match p {
            Process::Nil => out.push('0'),
            Process::In(a, k, b) => self.prefix(out, a, k, b, false),
            Process::Out(a, k, b) => self.prefix(out, a, k, b, true),
            Process::Rep(a, k, b) => {
                out.push('!');
                self.prefix(out, a, k, b, false)
            }
            Process::Res(k, b) => {
                let n = self.supply.fresh(*k);
                out.push_str(&format!("nu {n}. "));
                self.atom(out, &Process::open(b, &[n]));
            }
            Process::Par(ps) => {
                for (i, q) in ps.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    self.atom(out, q);
                }
            }
            Process::Call(c, a, b) => out.push_str(&format!(
                "{}({},{})",
                c.name(),
                Self::chan(a),
                Self::chan(b)
            )),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pr = Printer {
            supply: Supply::above(&self.free_names()),
        };
        let mut s = String::new();
        pr.proc(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Proc(p) => write!(f, "{p}"),
            Agent::Abs(kinds, body) => {
                let mut pr = Printer {
                    supply: Supply::above(&body.free_names()),
                };
                let ns = pr.binders(kinds);
                let mut s = format!("({}). ", Printer::list(&ns));
                pr.atom(&mut s, &Process::open(body, &ns));
                f.write_str(&s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_open_round_trip() {
        let (a, x, y) = (Name::var(0), Name::var(1), Name::var(2));
        let p = Process::input(a, &[x], Process::output(x, &[y], Process::Nil));
        match &p {
            Process::In(Chan::Free(s), k, b) => {
                assert_eq!(*s, a);
                assert_eq!(k, &vec![Kind::Variable]);
                assert!(matches!(**b, Process::Out(Chan::Bound(0, 0), _, _)));
            }
            _ => panic!(),
        }
        assert_eq!(p.free_names(), [a].into());
    }

    #[test]
    fn forwarder_shapes() {
        let (p, q) = (Name::cont(0), Name::cont(1));
        let f = make_forwarder(p, q, Calculus::Cbv).unwrap();
        let body = match f {
            Process::Call(c, Chan::Free(a), Chan::Free(b)) => c.unfold(a, b),
            _ => panic!(),
        };
        assert!(matches!(&body, Process::In(Chan::Free(s), k, b)
            if *s == p && k == &vec![Kind::Variable] && matches!(**b, Process::Out(Chan::Free(t), _, _) if t == q)));
        let (x, y) = (Name::var(0), Name::var(1));
        let g = Const::Fx.unfold(x, y);
        assert!(matches!(&g, Process::Rep(_, k, b)
            if k == &vec![Kind::Variable, Kind::Continuation] && matches!(**b, Process::Out(_, _, _))));
        assert_eq!(
            make_forwarder(p, x, Calculus::Cbv),
            Err(PiError::KindMismatch(p, x))
        );
    }

    #[test]
    fn display() {
        let (a, x) = (Name::var(0), Name::var(1));
        let p = Process::par(vec![
            Process::output(a, &[x], Process::Nil),
            Process::input(a, &[x], Process::Nil),
        ]);
        assert_eq!(p.to_string(), "x0^(x1) | x0(x2)");
    }
}
