use std::collections::HashMap;

use super::{Reason, Side, Verdict};
use crate::lambda::{eval_enf, Enf, Term};
use crate::name::{Kind, Supply};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Res {
    Eq,
    Dist,
    Inc,
}

fn both(a: Res, b: Res) -> Res {
    match (a, b) {
        (Res::Dist, _) | (_, Res::Dist) => Res::Dist,
        (Res::Inc, _) | (_, Res::Inc) => Res::Inc,
        _ => Res::Eq,
    }
}

struct Game {
    fuel: usize,
    memo: HashMap<(Term, Term, usize), Res>,
    exhausted: bool,
}

fn fresh(m: &Term, n: &Term) -> Term {
    let mut s = Supply::new();
    m.observe_names(&mut s);
    n.observe_names(&mut s);
    Term::var(s.fresh(Kind::Variable))
}

impl Game {
    fn terms(&mut self, m: &Term, n: &Term, depth: usize) -> Res {
        if depth == 0 || m.alpha_eq(n) {
            return Res::Eq;
        }
        let key = (m.canonical(), n.canonical(), depth);
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = match (eval_enf(m, self.fuel), eval_enf(n, self.fuel)) {
            (Enf::FuelExhausted, Enf::FuelExhausted) => {
                self.exhausted = true;
                Res::Inc
            }
            (Enf::FuelExhausted, _) | (_, Enf::FuelExhausted) => {
                self.exhausted = true;
                Res::Dist
            }
            (Enf::Value(v), Enf::Value(w)) => self.values(&v, &w, depth - 1),
            (Enf::Stuck(e1, x1, v1), Enf::Stuck(e2, x2, v2)) if x1 == x2 => {
                let vs = self.values(&v1, &v2, depth - 1);
                if vs == Res::Dist {
                    Res::Dist
                } else {
                    let h1 = Term::app(Term::var(x1), v1);
                    let h2 = Term::app(Term::var(x2), v2);
                    let z = fresh(&e1.plug(h1), &e2.plug(h2));
                    both(vs, self.terms(&e1.plug(z.clone()), &e2.plug(z), depth - 1))
                }
            }
            _ => Res::Dist,
        };
        if r != Res::Inc {
            self.memo.insert(key, r);
        }
        r
    }

    fn values(&mut self, v: &Term, w: &Term, depth: usize) -> Res {
        if depth == 0 || v.alpha_eq(w) {
            return Res::Eq;
        }
        let z = fresh(v, w);
        self.terms(
            &Term::app(v.clone(), z.clone()),
            &Term::app(w.clone(), z),
            depth,
        )
    }
}

/// Depth-bounded eager normal-form bisimulation. Each value or context
/// comparison consumes one unit of depth; two terms that both exhaust
/// `fuel` are treated as possibly divergent and yield an inconclusive
/// verdict unless something else already tells them apart. A
/// distinguishing verdict carries an empty witness.
pub fn enf_bisim(m: &Term, n: &Term, depth: usize, fuel: usize) -> Verdict {
    let mut g = Game {
        fuel,
        memo: HashMap::new(),
        exhausted: false,
    };
    match g.terms(m, n, depth) {
        Res::Eq => Verdict::equivalent(depth, g.exhausted),
        Res::Dist => Verdict::distinguished(depth, Vec::new(), Side::Left, g.exhausted),
        Res::Inc => Verdict::inconclusive(depth, Reason::Fuel),
    }
}
