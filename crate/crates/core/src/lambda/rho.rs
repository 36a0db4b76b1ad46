//! The λρ-calculus: CBV terms with a higher-order store.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::term::Term;
use crate::name::{Kind, Name, Supply};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc(pub u32);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

impl fmt::Debug for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Store = BTreeMap<Loc, RhoTerm>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RhoTerm {
    Var(Name),
    Lam(Name, Box<RhoTerm>),
    App(Box<RhoTerm>, Box<RhoTerm>),
    New(Store, Box<RhoTerm>),
    Assign(Loc, Box<RhoTerm>, Box<RhoTerm>),
    Deref(Loc),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RhoError {
    #[error("stuck dereference of {0}")]
    StuckDeref(Loc),
}

impl From<&Term> for RhoTerm {
    fn from(t: &Term) -> Self {
        match t {
            Term::Var(n) => RhoTerm::Var(*n),
            Term::Lam(x, b) => RhoTerm::Lam(*x, Box::new((&**b).into())),
            Term::App(f, a) => RhoTerm::App(Box::new((&**f).into()), Box::new((&**a).into())),
        }
    }
}

impl RhoTerm {
    pub fn app(f: RhoTerm, a: RhoTerm) -> RhoTerm {
        RhoTerm::App(Box::new(f), Box::new(a))
    }
    pub fn lam(x: Name, b: RhoTerm) -> RhoTerm {
        RhoTerm::Lam(x, Box::new(b))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, RhoTerm::Var(_) | RhoTerm::Lam(..))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(t: &RhoTerm, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                RhoTerm::Var(n) => {
                    if !bound.contains(n) {
                        out.insert(*n);
                    }
                }
                RhoTerm::Lam(x, b) => {
                    bound.push(*x);
                    go(b, bound, out);
                    bound.pop();
                }
                RhoTerm::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                RhoTerm::New(s, b) => {
                    for v in s.values() {
                        go(v, bound, out);
                    }
                    go(b, bound, out);
                }
                RhoTerm::Assign(_, v, b) => {
                    go(v, bound, out);
                    go(b, bound, out);
                }
                RhoTerm::Deref(_) => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn observe_names(&self, s: &mut Supply) {
        match self {
            RhoTerm::Var(n) => s.observe(*n),
            RhoTerm::Lam(x, b) => {
                s.observe(*x);
                b.observe_names(s);
            }
            RhoTerm::App(f, a) => {
                f.observe_names(s);
                a.observe_names(s);
            }
            RhoTerm::New(st, b) => {
                st.values().for_each(|v| v.observe_names(s));
                b.observe_names(s);
            }
            RhoTerm::Assign(_, v, b) => {
                v.observe_names(s);
                b.observe_names(s);
            }
            RhoTerm::Deref(_) => {}
        }
    }

    /// Every location mentioned anywhere in the term.
    pub fn locations(&self, out: &mut BTreeSet<Loc>) {
        match self {
            RhoTerm::Var(_) => {}
            RhoTerm::Lam(_, b) => b.locations(out),
            RhoTerm::App(f, a) => {
                f.locations(out);
                a.locations(out);
            }
            RhoTerm::New(s, b) => {
                for (l, v) in s {
                    out.insert(*l);
                    v.locations(out);
                }
                b.locations(out);
            }
            RhoTerm::Assign(l, v, b) => {
                out.insert(*l);
                v.locations(out);
                b.locations(out);
            }
            RhoTerm::Deref(l) => {
                out.insert(*l);
            }
        }
    }

    /// Locations not bound by an enclosing allocation.
    pub fn free_locations(&self, out: &mut BTreeSet<Loc>) {
        match self {
            RhoTerm::Var(_) => {}
            RhoTerm::Lam(_, b) => b.free_locations(out),
            RhoTerm::App(f, a) => {
                f.free_locations(out);
                a.free_locations(out);
            }
            RhoTerm::New(s, b) => {
                let mut inner = BTreeSet::new();
                for v in s.values() {
                    v.free_locations(&mut inner);
                }
                b.free_locations(&mut inner);
                out.extend(inner.into_iter().filter(|l| !s.contains_key(l)));
            }
            RhoTerm::Assign(l, v, b) => {
                out.insert(*l);
                v.free_locations(out);
                b.free_locations(out);
            }
            RhoTerm::Deref(l) => {
                out.insert(*l);
            }
        }
    }

    pub fn subst(&self, x: Name, v: &RhoTerm) -> RhoTerm {
        let fv = v.free_vars();
        self.subst_in(x, v, &fv)
    }

    fn subst_in(&self, x: Name, v: &RhoTerm, fv: &BTreeSet<Name>) -> RhoTerm {
        match self {
            RhoTerm::Var(n) if *n == x => v.clone(),
            RhoTerm::Var(_) | RhoTerm::Deref(_) => self.clone(),
            RhoTerm::App(f, a) => RhoTerm::app(f.subst_in(x, v, fv), a.subst_in(x, v, fv)),
            RhoTerm::New(s, b) => RhoTerm::New(
                s.iter().map(|(l, w)| (*l, w.subst_in(x, v, fv))).collect(),
                Box::new(b.subst_in(x, v, fv)),
            ),
            RhoTerm::Assign(l, w, b) => RhoTerm::Assign(
                *l,
                Box::new(w.subst_in(x, v, fv)),
                Box::new(b.subst_in(x, v, fv)),
            ),
            RhoTerm::Lam(y, b) => {
                if *y == x {
                    self.clone()
                } else if fv.contains(y) {
                    let mut s = Supply::above(fv.iter().chain([&x, y]));
                    b.observe_names(&mut s);
                    v.observe_names(&mut s);
                    let z = s.fresh(Kind::Variable);
                    let b = b.subst_in(*y, &RhoTerm::Var(z), &BTreeSet::from([z]));
                    RhoTerm::lam(z, b.subst_in(x, v, fv))
                } else {
                    RhoTerm::lam(*y, b.subst_in(x, v, fv))
                }
            }
        }
    }

    fn rename_locs(&self, m: &BTreeMap<Loc, Loc>) -> RhoTerm {
        let r = |l: &Loc| *m.get(l).unwrap_or(l);
        match self {
            RhoTerm::Var(_) => self.clone(),
            RhoTerm::Lam(x, b) => RhoTerm::lam(*x, b.rename_locs(m)),
            RhoTerm::App(f, a) => RhoTerm::app(f.rename_locs(m), a.rename_locs(m)),
            RhoTerm::New(s, b) => {
                // Inner allocations shadow the renaming for their own cells.
                let mut inner = m.clone();
                for l in s.keys() {
                    inner.remove(l);
                }
                RhoTerm::New(
                    s.iter().map(|(l, v)| (*l, v.rename_locs(&inner))).collect(),
                    Box::new(b.rename_locs(&inner)),
                )
            }
            RhoTerm::Assign(l, v, b) => {
                RhoTerm::Assign(r(l), Box::new(v.rename_locs(m)), Box::new(b.rename_locs(m)))
            }
            RhoTerm::Deref(l) => RhoTerm::Deref(r(l)),
        }
    }
}

/// One reduction step of `(M, S)`. `Ok(None)` means `M` is a normal form
/// (a value or a stuck call).
pub fn step_rho(t: &RhoTerm, store: &Store) -> Result<Option<(RhoTerm, Store)>, RhoError> {
    let mut avoid: BTreeSet<Loc> = store.keys().copied().collect();
    t.free_locations(&mut avoid);
    for v in store.values() {
        v.free_locations(&mut avoid);
    }
    let mut all = avoid.clone();
    t.locations(&mut all);
    let mut alloc = Alloc {
        avoid,
        next: all.iter().next_back().map_or(0, |l| l.0 + 1),
    };
    let mut s = store.clone();
    match step_in(t, &mut s, &mut alloc)? {
        Some(t2) => Ok(Some((t2, s))),
        None => Ok(None),
    }
}

struct Alloc {
    avoid: BTreeSet<Loc>,
    next: u32,
}

fn step_in(t: &RhoTerm, s: &mut Store, alloc: &mut Alloc) -> Result<Option<RhoTerm>, RhoError> {
    match t {
        RhoTerm::Var(_) | RhoTerm::Lam(..) => Ok(None),
        RhoTerm::App(f, a) => {
            if !f.is_value() {
                return Ok(step_in(f, s, alloc)?.map(|f2| RhoTerm::app(f2, (**a).clone())));
            }
            if !a.is_value() {
                return Ok(step_in(a, s, alloc)?.map(|a2| RhoTerm::app((**f).clone(), a2)));
            }
            match &**f {
                RhoTerm::Lam(x, b) => Ok(Some(b.subst(*x, a))),
                _ => Ok(None),
            }
        }
        RhoTerm::Deref(l) => match s.get(l) {
            Some(v) => Ok(Some(v.clone())),
            None => Err(RhoError::StuckDeref(*l)),
        },
        RhoTerm::Assign(l, v, b) => {
            if !s.contains_key(l) {
                return Err(RhoError::StuckDeref(*l));
            }
            s.insert(*l, (**v).clone());
            Ok(Some((**b).clone()))
        }
        RhoTerm::New(cells, b) => {
            // Cells clashing with the store or with locations of the
            // surrounding term are renamed apart.
            let mut m = BTreeMap::new();
            for l in cells.keys() {
                if alloc.avoid.contains(l) {
                    m.insert(*l, Loc(alloc.next));
                    alloc.next += 1;
                }
            }
            for (l, v) in cells {
                s.insert(*m.get(l).unwrap_or(l), v.rename_locs(&m));
            }
            Ok(Some(b.rename_locs(&m)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhoOutcome {
    Converges(RhoTerm),
    Stuck(Loc),
    FuelExhausted,
}

pub fn eval_rho(t: &RhoTerm, store: &Store, fuel: usize) -> RhoOutcome {
    let (mut t, mut s) = (t.clone(), store.clone());
    for _ in 0..=fuel {
        match step_rho(&t, &s) {
            Ok(None) => return RhoOutcome::Converges(t),
            Ok(Some((t2, s2))) => {
                t = t2;
                s = s2;
            }
            Err(RhoError::StuckDeref(l)) => return RhoOutcome::Stuck(l),
        }
    }
    RhoOutcome::FuelExhausted
}

impl fmt::Display for RhoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show(self, 0))
    }
}

impl fmt::Debug for RhoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// 0: top, 1: function position, 2: argument position
fn show(t: &RhoTerm, p: u8) -> String {
    let (s, open) = match t {
        RhoTerm::Var(n) => return n.to_string(),
        RhoTerm::Deref(l) => return format!("!{l}"),
        RhoTerm::Lam(x, b) => (format!("\\{}. {}", x, show(b, 0)), true),
        RhoTerm::New(st, b) => {
            let cells: Vec<String> = st
                .iter()
                .map(|(l, v)| format!("{l} = {}", show(v, 0)))
                .collect();
            (
                format!("rho {{{}}}. {}", cells.join(", "), show(b, 0)),
                true,
            )
        }
        RhoTerm::Assign(l, v, b) => (format!("{l} := {}; {}", show(v, 2), show(b, 0)), true),
        RhoTerm::App(a, b) => {
            let s = format!("{} {}", show(a, 1), show(b, 2));
            return if p == 2 { format!("({s})") } else { s };
        }
    };
    if open && p > 0 {
        format!("({s})")
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(i: u32) -> RhoTerm {
        RhoTerm::lam(Name::var(i), RhoTerm::Var(Name::var(i)))
    }

    #[test]
    fn allocate_then_read() {
        let t = RhoTerm::New([(Loc(0), id(0))].into(), Box::new(RhoTerm::Deref(Loc(0))));
        let (t1, s1) = step_rho(&t, &Store::new()).unwrap().unwrap();
        assert_eq!(t1, RhoTerm::Deref(Loc(0)));
        assert_eq!(s1, Store::from([(Loc(0), id(0))]));
        let (t2, s2) = step_rho(&t1, &s1).unwrap().unwrap();
        assert_eq!(t2, id(0));
        assert_eq!(s2, s1);
    }

    #[test]
    fn assignment() {
        let t = RhoTerm::Assign(Loc(0), Box::new(id(1)), Box::new(RhoTerm::Deref(Loc(0))));
        let (t1, s1) = step_rho(&t, &Store::from([(Loc(0), id(0))]))
            .unwrap()
            .unwrap();
        assert_eq!(t1, RhoTerm::Deref(Loc(0)));
        assert_eq!(s1, Store::from([(Loc(0), id(1))]));
    }

    #[test]
    fn missing_location_is_stuck() {
        assert_eq!(
            step_rho(&RhoTerm::Deref(Loc(0)), &Store::new()),
            Err(RhoError::StuckDeref(Loc(0)))
        );
    }

    #[test]
    fn allocation_avoids_existing_cells() {
        let t = RhoTerm::New([(Loc(0), id(0))].into(), Box::new(RhoTerm::Deref(Loc(0))));
        let old = Store::from([(Loc(0), id(5))]);
        let (t1, s1) = step_rho(&t, &old).unwrap().unwrap();
        assert_eq!(t1, RhoTerm::Deref(Loc(1)));
        assert_eq!(s1[&Loc(0)], id(5));
        // no clash: the cell keeps its name
        let (t2, _) = step_rho(&t, &Store::new()).unwrap().unwrap();
        assert_eq!(t2, RhoTerm::Deref(Loc(0)));
        assert_eq!(s1[&Loc(1)], id(0));
    }
}
