use crate::lambda::{eval_rho, Loc, RhoOutcome, RhoTerm, Store, Term};
use crate::name::{Kind, Name, Supply};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoWitness {
    /// The context with `[]` for the hole.
    pub context: String,
    pub left_converges: bool,
}

struct Pool {
    values: Vec<RhoTerm>,
}

fn omega(s: &mut Supply) -> RhoTerm {
    let w = s.fresh(Kind::Variable);
    let d = RhoTerm::lam(w, RhoTerm::app(RhoTerm::Var(w), RhoTerm::Var(w)));
    RhoTerm::app(d.clone(), d)
}

/// Values the context may pass around: identities, projections, a
/// diverging thunk, and closures writing or reading the single location.
fn pool(s: &mut Supply, l: Loc) -> Pool {
    let lam = |s: &mut Supply, body: &dyn Fn(Name, &mut Supply) -> RhoTerm| {
        let y = s.fresh(Kind::Variable);
        RhoTerm::lam(y, body(y, s))
    };
    let id = lam(s, &|y, _| RhoTerm::Var(y));
    let k = lam(s, &|y, s| {
        let w = s.fresh(Kind::Variable);
        RhoTerm::lam(w, RhoTerm::Var(y))
    });
    let ki = lam(s, &|_, s| {
        let w = s.fresh(Kind::Variable);
        RhoTerm::lam(w, RhoTerm::Var(w))
    });
    let div = lam(s, &|_, s| omega(s));
    let idc = id.clone();
    let apply_id = lam(s, &|y, _| RhoTerm::app(RhoTerm::Var(y), idc.clone()));
    let set = lam(s, &|y, _| {
        RhoTerm::Assign(l, Box::new(RhoTerm::Var(y)), Box::new(RhoTerm::Var(y)))
    });
    let get = lam(s, &|y, _| RhoTerm::app(RhoTerm::Deref(l), RhoTerm::Var(y)));
    Pool {
        values: vec![id, k, ki, div, apply_id, set, get],
    }
}

fn converges(t: &RhoTerm, fuel: usize) -> Option<bool> {
    match eval_rho(t, &Store::new(), fuel) {
        RhoOutcome::Converges(_) => Some(true),
        RhoOutcome::FuelExhausted => Some(false),
        RhoOutcome::Stuck(_) => None,
    }
}

/// Searches contexts `new l := I in ((λφ.[]) V…) V1 … Vk` with `k ≤ args`
/// for one under which exactly one of `m`, `n` converges within `fuel`.
pub fn rho_distinguish(m: &Term, n: &Term, args: usize, fuel: usize) -> Option<RhoWitness> {
    let mut s = Supply::new();
    m.observe_names(&mut s);
    n.observe_names(&mut s);
    let mut phi: Vec<Name> = m.free_vars().union(&n.free_vars()).copied().collect();
    phi.sort();
    let l = Loc(0);
    let pool = pool(&mut s, l);
    let vs = &pool.values;
    let mut closings: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in &phi {
        closings = closings
            .iter()
            .flat_map(|c| (0..vs.len()).map(move |i| [c.clone(), vec![i]].concat()))
            .collect();
    }
    let mut spines: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = spines.clone();
    for _ in 0..args {
        frontier = frontier
            .iter()
            .flat_map(|c| (0..vs.len()).map(move |i| [c.clone(), vec![i]].concat()))
            .collect();
        spines.extend(frontier.iter().cloned());
    }
    let init = pool.values[0].clone();
    let plug = |t: &Term, close: &[usize], spine: &[usize]| {
        let mut body: RhoTerm = t.into();
        for (x, i) in phi.iter().zip(close).rev() {
            body = RhoTerm::app(RhoTerm::lam(*x, body), vs[*i].clone());
        }
        for i in spine {
            body = RhoTerm::app(body, vs[*i].clone());
        }
        RhoTerm::New(Store::from([(l, init.clone())]), Box::new(body))
    };
    let hole = Term::var(s.fresh(Kind::Variable));
    for close in &closings {
        for spine in &spines {
            let (a, b) = (
                converges(&plug(m, close, spine), fuel),
                converges(&plug(n, close, spine), fuel),
            );
            if let (Some(a), Some(b)) = (a, b) {
                if a != b {
                    let ctx = plug(&hole, close, spine)
                        .to_string()
                        .replace(&hole.to_string(), "[]");
                    return Some(RhoWitness {
                        context: ctx,
                        left_converges: a,
                    });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_cbv;

    #[test]
    fn booleans_are_told_apart() {
        let w = rho_distinguish(
            &parse_cbv("\\x. \\y. x").unwrap(),
            &parse_cbv("\\x. \\y. y").unwrap(),
            3,
            200,
        );
        assert!(w.is_some());
    }

    #[test]
    fn identical_terms_are_not() {
        let i = parse_cbv("\\x. x").unwrap();
        assert!(rho_distinguish(&i, &i, 2, 200).is_none());
    }
}
