use std::collections::BTreeSet;
use std::fmt;

use crate::name::{Kind, Name, Supply};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(n: Name) -> Term {
        Term::Var(n)
    }
    pub fn lam(x: Name, body: Term) -> Term {
        Term::Lam(x, Box::new(body))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn is_value(&self) -> bool {
        !matches!(self, Term::App(..))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(n) => {
                if !bound.contains(n) {
                    out.insert(*n);
                }
            }
            Term::Lam(x, b) => {
                bound.push(*x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    pub fn has_free(&self, x: Name) -> bool {
        match self {
            Term::Var(n) => *n == x,
            Term::Lam(y, b) => *y != x && b.has_free(x),
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn observe_names(&self, s: &mut Supply) {
        match self {
            Term::Var(n) => s.observe(*n),
            Term::Lam(x, b) => {
                s.observe(*x);
                b.observe_names(s);
            }
            Term::App(f, a) => {
                f.observe_names(s);
                a.observe_names(s);
            }
        }
    }

    /// Capture-avoiding `self{x := v}`.
    pub fn subst(&self, x: Name, v: &Term) -> Term {
        let fv = v.free_vars();
        self.subst_in(x, v, &fv)
    }

    fn subst_in(&self, x: Name, v: &Term, fv: &BTreeSet<Name>) -> Term {
        match self {
            Term::Var(n) if *n == x => v.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, a) => Term::app(f.subst_in(x, v, fv), a.subst_in(x, v, fv)),
            Term::Lam(y, b) => {
                if *y == x || !b.has_free(x) {
                    self.clone()
                } else if fv.contains(y) {
                    let mut s = Supply::above(fv.iter().chain([&x, y]));
                    b.observe_names(&mut s);
                    v.observe_names(&mut s);
                    let z = s.fresh(Kind::Variable);
                    let b = b.subst_in(*y, &Term::Var(z), &BTreeSet::from([z]));
                    Term::lam(z, b.subst_in(x, v, fv))
                } else {
                    Term::lam(*y, b.subst_in(x, v, fv))
                }
            }
        }
    }

    /// Renames free occurrences of names by `f`; binders are freshened where
    /// a renamed name would be captured.
    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> Term {
        let mut t = self.clone();
        let fv = self.free_vars();
        let moved: Vec<(Name, Name)> = fv
            .iter()
            .map(|n| (*n, f(*n)))
            .filter(|(a, b)| a != b)
            .collect();
        if moved.is_empty() {
            return t;
        }
        // Route through placeholders so that swaps do not collide.
        let mut s = Supply::above(moved.iter().flat_map(|(a, b)| [a, b]));
        t.observe_names(&mut s);
        let temps: Vec<Name> = moved.iter().map(|(a, _)| s.fresh(a.kind)).collect();
        for ((a, _), tmp) in moved.iter().zip(&temps) {
            t = t.subst(*a, &Term::Var(*tmp));
        }
        for ((_, b), tmp) in moved.iter().zip(&temps) {
            t = t.subst(*tmp, &Term::Var(*b));
        }
        t
    }

    /// Alpha-normal form: each binder is renamed after its nesting depth, in
    /// a range no free name uses.
    pub fn canonical(&self) -> Term {
        fn go(t: &Term, env: &mut Vec<(Name, Name)>) -> Term {
            match t {
                Term::Var(n) => match env.iter().rev().find(|(a, _)| a == n) {
                    Some((_, b)) => Term::Var(*b),
                    None => Term::Var(*n),
                },
                Term::Lam(x, b) => {
                    let c = Name::new(x.kind, CANON_BASE - env.len() as u32);
                    env.push((*x, c));
                    let r = Term::lam(c, go(b, env));
                    env.pop();
                    r
                }
                Term::App(f, a) => Term::app(go(f, env), go(a, env)),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }
}

pub(crate) const CANON_BASE: u32 = u32::MAX - 1;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Frame {
    /// `V [.]`
    AppRight(Term),
    /// `[.] M`
    AppLeft(Term),
}

/// Evaluation context as a list of frames, innermost first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EvalContext {
    pub frames: Vec<Frame>,
}

impl EvalContext {
    pub fn hole() -> Self {
        EvalContext::default()
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn plug(&self, t: Term) -> Term {
        self.frames.iter().fold(t, |acc, f| match f {
            Frame::AppLeft(m) => Term::app(acc, m.clone()),
            Frame::AppRight(v) => Term::app(v.clone(), acc),
        })
    }

    /// Wraps the context in one more frame on the outside.
    pub fn wrap(mut self, f: Frame) -> Self {
        self.frames.push(f);
        self
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for f in &self.frames {
            match f {
                Frame::AppLeft(t) | Frame::AppRight(t) => out.extend(t.free_vars()),
            }
        }
        out
    }

    pub fn observe_names(&self, s: &mut Supply) {
        for f in &self.frames {
            match f {
                Frame::AppLeft(t) | Frame::AppRight(t) => t.observe_names(s),
            }
        }
    }

    fn map(&self, g: impl Fn(&Term) -> Term) -> EvalContext {
        EvalContext {
            frames: self
                .frames
                .iter()
                .map(|f| match f {
                    Frame::AppLeft(t) => Frame::AppLeft(g(t)),
                    Frame::AppRight(t) => Frame::AppRight(g(t)),
                })
                .collect(),
        }
    }

    pub fn canonical(&self) -> EvalContext {
        self.map(Term::canonical)
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> EvalContext {
        self.map(|t| t.rename(f))
    }

    /// Splits off the innermost frame: `E'[F[.]]` gives `(F, E')`.
    pub fn split_inner(&self) -> Option<(&Frame, EvalContext)> {
        let (first, rest) = self.frames.split_first()?;
        Some((
            first,
            EvalContext {
                frames: rest.to_vec(),
            },
        ))
    }
}

/// CBV decomposition of a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomp {
    Value,
    /// `E[(λx.body) arg]`
    Redex {
        ctx: EvalContext,
        param: Name,
        body: Term,
        arg: Term,
    },
    /// `E[x v]`
    Stuck {
        ctx: EvalContext,
        head: Name,
        arg: Term,
    },
}

/// Function position is evaluated before the argument.
pub fn decompose_cbv(t: &Term) -> Decomp {
    let mut outer = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Var(_) | Term::Lam(..) => {
                if outer.is_empty() {
                    return Decomp::Value;
                }
                unreachable!("values are never descended into");
            }
            Term::App(f, a) => {
                if !f.is_value() {
                    outer.push(Frame::AppLeft((**a).clone()));
                    cur = f;
                } else if !a.is_value() {
                    outer.push(Frame::AppRight((**f).clone()));
                    cur = a;
                } else {
                    outer.reverse();
                    let ctx = EvalContext { frames: outer };
                    return match &**f {
                        Term::Lam(x, b) => Decomp::Redex {
                            ctx,
                            param: *x,
                            body: (**b).clone(),
                            arg: (**a).clone(),
                        },
                        Term::Var(h) => Decomp::Stuck {
                            ctx,
                            head: *h,
                            arg: (**a).clone(),
                        },
                        Term::App(..) => unreachable!(),
                    };
                }
            }
        }
    }
}

pub fn step_cbv(t: &Term) -> Option<Term> {
    match decompose_cbv(t) {
        Decomp::Redex {
            ctx,
            param,
            body,
            arg,
        } => Some(ctx.plug(body.subst(param, &arg))),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enf {
    Value(Term),
    Stuck(EvalContext, Name, Term),
    FuelExhausted,
}

pub fn eval_enf(t: &Term, fuel: usize) -> Enf {
    let mut cur = t.clone();
    let mut left = fuel;
    loop {
        match decompose_cbv(&cur) {
            Decomp::Value => return Enf::Value(cur),
            Decomp::Stuck { ctx, head, arg } => return Enf::Stuck(ctx, head, arg),
            Decomp::Redex {
                ctx,
                param,
                body,
                arg,
            } => {
                if left == 0 {
                    return Enf::FuelExhausted;
                }
                left -= 1;
                cur = ctx.plug(body.subst(param, &arg));
            }
        }
    }
}

/// CBN decomposition of an extended term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbnDecomp {
    /// `λx.M` or a value name.
    Value,
    Redex {
        ctx: EvalContext,
        param: Name,
        body: Term,
        arg: Term,
    },
    /// `E[x]` with `x` a variable.
    Var { ctx: EvalContext, head: Name },
    /// `E[v M]` with `v` a value name.
    ValueApp {
        ctx: EvalContext,
        head: Name,
        arg: Term,
    },
}

pub fn decompose_cbn(t: &Term) -> CbnDecomp {
    let mut outer = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, a) => {
                if let Term::Var(v) = &**f {
                    if v.kind == Kind::ValueName {
                        outer.reverse();
                        return CbnDecomp::ValueApp {
                            ctx: EvalContext { frames: outer },
                            head: *v,
                            arg: (**a).clone(),
                        };
                    }
                }
                outer.push(Frame::AppLeft((**a).clone()));
                cur = f;
            }
            Term::Var(x) if x.kind == Kind::ValueName => {
                debug_assert!(outer.is_empty());
                return CbnDecomp::Value;
            }
            Term::Var(x) => {
                outer.reverse();
                return CbnDecomp::Var {
                    ctx: EvalContext { frames: outer },
                    head: *x,
                };
            }
            Term::Lam(x, b) => {
                if outer.is_empty() {
                    return CbnDecomp::Value;
                }
                let arg = match outer.pop() {
                    Some(Frame::AppLeft(m)) => m,
                    _ => unreachable!(),
                };
                outer.reverse();
                return CbnDecomp::Redex {
                    ctx: EvalContext { frames: outer },
                    param: *x,
                    body: (**b).clone(),
                    arg,
                };
            }
        }
    }
}

pub fn step_cbn(t: &Term) -> Option<Term> {
    match decompose_cbn(t) {
        CbnDecomp::Redex {
            ctx,
            param,
            body,
            arg,
        } => Some(ctx.plug(body.subst(param, &arg))),
        _ => None,
    }
}

// ---------------------------------------------------------------- printing

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show(self, Prec::Top))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Top,
    Fun,
    Arg,
}

fn show(t: &Term, p: Prec) -> String {
    match t {
        Term::Var(n) => n.to_string(),
        Term::Lam(x, b) => {
            let s = format!("\\{}. {}", x, show(b, Prec::Top));
            if p > Prec::Top {
                format!("({s})")
            } else {
                s
            }
        }
        Term::App(a, b) => {
            let s = format!("{} {}", show(a, Prec::Fun), show(b, Prec::Arg));
            if p == Prec::Arg {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

impl fmt::Display for EvalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // (text, is_application)
        let mut acc = ("[]".to_string(), false);
        for fr in &self.frames {
            acc = match fr {
                Frame::AppLeft(m) => (format!("{} {}", acc.0, show(m, Prec::Arg)), true),
                Frame::AppRight(v) => {
                    let inner = if acc.1 { format!("({})", acc.0) } else { acc.0 };
                    (format!("{} {}", show(v, Prec::Fun), inner), true)
                }
            };
        }
        f.write_str(&acc.0)
    }
}

impl fmt::Debug for EvalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
