use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::{closure, Lts, LtsError, Reason, Side, Verdict};
use crate::action::{recanonical, Action, CTrace, TName, Trace};
use crate::name::{Name, Supply};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: BTreeSet<CTrace>,
    /// A τ-closure was cut short by the fuel bound somewhere.
    pub divergence_suspected: bool,
}

struct Node {
    traces: BTreeSet<CTrace>,
    clipped: bool,
}

struct Enumerator<'a, L: Lts> {
    sys: &'a L,
    fuel: usize,
    complete: bool,
    memo: HashMap<(L::Key, usize), Rc<Node>>,
}

fn prepend(a: &Action, t: &CTrace) -> CTrace {
    let mut v = Vec::with_capacity(t.len() + 1);
    v.push(a.map(&mut |n| TName::Free(*n)));
    v.extend(t.iter().cloned());
    recanonical(&v)
}

impl<L: Lts> Enumerator<'_, L> {
    fn go(&mut self, s: &L::State, depth: usize) -> Result<Rc<Node>, LtsError> {
        if depth == 0 && !self.complete {
            return Ok(Rc::new(Node {
                traces: BTreeSet::from([Vec::new()]),
                clipped: false,
            }));
        }
        let key = (self.sys.key(s), depth);
        if let Some(n) = self.memo.get(&key) {
            return Ok(n.clone());
        }
        let cl = closure(self.sys, s, self.fuel, Supply::new())?;
        let mut traces = BTreeSet::new();
        let mut clipped = cl.clipped;
        if !self.complete || cl.states.iter().any(|st| self.sys.is_final(st)) {
            traces.insert(Vec::new());
        }
        if depth > 0 {
            for (a, s2) in &cl.visible {
                let sub = self.go(s2, depth - 1)?;
                clipped |= sub.clipped;
                for t in &sub.traces {
                    traces.insert(prepend(a, t));
                }
            }
        }
        let node = Rc::new(Node { traces, clipped });
        self.memo.insert(key, node.clone());
        Ok(node)
    }
}

fn enumerate<L: Lts>(
    sys: &L,
    s0: &L::State,
    depth: usize,
    fuel: usize,
    complete: bool,
) -> Result<TraceSet, LtsError> {
    sys.validate(s0)?;
    let mut e = Enumerator {
        sys,
        fuel,
        complete,
        memo: HashMap::new(),
    };
    let n = e.go(s0, depth)?;
    Ok(TraceSet {
        traces: n.traces.clone(),
        divergence_suspected: n.clipped,
    })
}

/// Weak traces of length at most `depth`, with bound names canonicalised.
pub fn enumerate_traces<L: Lts>(
    sys: &L,
    s0: &L::State,
    depth: usize,
    fuel: usize,
) -> Result<TraceSet, LtsError> {
    enumerate(sys, s0, depth, fuel, false)
}

/// Traces ending in a final state: strongly passive configurations, or
/// processes without free continuation names.
pub fn enumerate_complete_traces<L: Lts>(
    sys: &L,
    s0: &L::State,
    depth: usize,
    fuel: usize,
) -> Result<TraceSet, LtsError> {
    enumerate(sys, s0, depth, fuel, true)
}

fn shortest(ts: impl Iterator<Item = CTrace>) -> Option<CTrace> {
    ts.min_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| format!("{a:?}").cmp(&format!("{b:?}")))
    })
}

/// A difference is only trusted when the side lacking the trace explored
/// everything.
fn compare(a: &TraceSet, b: &TraceSet, depth: usize) -> Verdict {
    let left_only = a.traces.difference(&b.traces);
    let right_only = b.traces.difference(&a.traces);
    let mut real = Vec::new();
    let mut doubtful = false;
    for t in left_only {
        if b.divergence_suspected {
            doubtful = true;
        } else {
            real.push((t.clone(), Side::Left));
        }
    }
    for t in right_only {
        if a.divergence_suspected {
            doubtful = true;
        } else {
            real.push((t.clone(), Side::Right));
        }
    }
    let suspected = a.divergence_suspected || b.divergence_suspected;
    if let Some(w) = shortest(real.iter().map(|(t, _)| t.clone())) {
        let side = real.iter().find(|(t, _)| *t == w).unwrap().1;
        return Verdict::distinguished(depth, w, side, suspected);
    }
    if doubtful || suspected {
        return Verdict::inconclusive(depth, Reason::Fuel);
    }
    Verdict::equivalent(depth, false)
}

pub fn trace_equiv<A: Lts, B: Lts>(
    sa: &A,
    a: &A::State,
    sb: &B,
    b: &B::State,
    depth: usize,
    fuel: usize,
) -> Result<Verdict, LtsError> {
    let ta = enumerate_traces(sa, a, depth, fuel)?;
    let tb = enumerate_traces(sb, b, depth, fuel)?;
    Ok(compare(&ta, &tb, depth))
}

pub fn complete_trace_equiv<A: Lts, B: Lts>(
    sa: &A,
    a: &A::State,
    sb: &B,
    b: &B::State,
    depth: usize,
    fuel: usize,
) -> Result<Verdict, LtsError> {
    let ta = enumerate_complete_traces(sa, a, depth, fuel)?;
    let tb = enumerate_complete_traces(sb, b, depth, fuel)?;
    Ok(compare(&ta, &tb, depth))
}

/// Concrete runs: each weak trace of length at most `depth` with the state
/// reached right after its last visible action.
pub fn enumerate_runs<L: Lts>(
    sys: &L,
    s0: &L::State,
    depth: usize,
    fuel: usize,
) -> Result<Vec<(Trace, L::State)>, LtsError> {
    sys.validate(s0)?;
    let mut out = vec![(Vec::new(), s0.clone())];
    let mut frontier = vec![(Vec::new(), s0.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (t, s) in frontier {
            for (a, s2) in closure(sys, &s, fuel, Supply::new())?.visible {
                let mut t2: Trace = t.clone();
                t2.push(a);
                next.push((t2, s2));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

fn matches(a: &Action, pat: &Action<TName>, map: &HashMap<TName, Name>) -> bool {
    let subj_ok = match (a.subject(), pat.subject()) {
        (None, None) => true,
        (Some(n), Some(TName::Free(m))) => n == m,
        (Some(n), Some(b)) => map.get(b) == Some(n),
        _ => false,
    };
    let same_shape = matches!(
        (a, pat),
        (Action::Abs(_), Action::Abs(_))
            | (Action::Out { .. }, Action::Out { .. })
            | (Action::In { .. }, Action::In { .. })
    );
    subj_ok
        && same_shape
        && a.objects().len() == pat.objects().len()
        && a.objects()
            .iter()
            .zip(pat.objects())
            .all(|(o, p)| crate::action::Kinded::kind(p) == o.kind)
}

/// Whether `s` can perform the canonical trace `t`.
pub fn accepts_trace<L: Lts>(
    sys: &L,
    s: &L::State,
    t: &CTrace,
    fuel: usize,
) -> Result<bool, LtsError> {
    fn go<L: Lts>(
        sys: &L,
        s: &L::State,
        t: &[Action<TName>],
        map: &HashMap<TName, Name>,
        fuel: usize,
    ) -> Result<bool, LtsError> {
        let Some(pat) = t.first() else {
            return Ok(true);
        };
        for (a, s2) in closure(sys, s, fuel, Supply::new())?.visible {
            if !matches(&a, pat, map) {
                continue;
            }
            let mut m = map.clone();
            for (o, p) in a.objects().iter().zip(pat.objects()) {
                m.insert(*p, *o);
            }
            if go(sys, &s2, &t[1..], &m, fuel)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    go(sys, s, t, &HashMap::new(), fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::show_trace;
    use crate::equiv::{Aogs, PiOp};
    use crate::lambda::parse_cbv;
    use crate::ogs::AConfig;

    fn init(s: &str) -> AConfig {
        AConfig::initial(parse_cbv(s).unwrap())
    }

    fn shown(ts: &TraceSet) -> Vec<String> {
        ts.traces.iter().map(|t| show_trace(t)).collect()
    }

    #[test]
    fn identity_depth_two() {
        let ts = enumerate_traces(&Aogs, &init("\\x. x"), 2, 64).unwrap();
        assert_eq!(shown(&ts), vec!["ε", "(_p0)", "(_p0) · _p0^(_x0)"]);
        assert!(!ts.divergence_suspected);
    }

    #[test]
    fn omega_and_depth_zero() {
        let ts = enumerate_traces(&Aogs, &init("(\\x. x x)(\\x. x x)"), 3, 64).unwrap();
        assert_eq!(shown(&ts), vec!["ε", "(_p0)"]);
        let ts = enumerate_traces(&Aogs, &init("\\x. x"), 0, 64).unwrap();
        assert_eq!(shown(&ts), vec!["ε"]);
    }

    #[test]
    fn remark_pair_distinguished() {
        let a = init("(\\z. (\\x. x x)(\\x. x x)) (x (\\y. (\\x. x x)(\\x. x x)))");
        let b = init("(\\z. (\\x. x x)(\\x. x x)) (x (\\y. y))");
        let v = trace_equiv(&Aogs, &a, &Aogs, &b, 4, 64).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(
            show_trace(w),
            "(_p0) · x0^(_x0,_p1) · _x0(_x1,_p2) · _p2^(_x2)"
        );
        assert!(accepts_trace(&Aogs, &b, w, 64).unwrap());
        assert!(!accepts_trace(&Aogs, &a, w, 64).unwrap());
    }

    #[test]
    fn complete_traces_of_identity() {
        let ts = enumerate_complete_traces(&Aogs, &init("\\x. x"), 3, 64).unwrap();
        assert_eq!(shown(&ts), vec!["(_p0) · _p0^(_x0)"]);
        let omega = enumerate_complete_traces(&Aogs, &init("(\\x. x x)(\\x. x x)"), 3, 64).unwrap();
        assert!(omega.traces.is_empty());
        let pi = crate::encode::encode_cbv(&parse_cbv("\\x. x").unwrap());
        let v = complete_trace_equiv(&Aogs, &init("\\x. x"), &PiOp, &pi, 3, 64).unwrap();
        assert!(v.is_equivalent(), "{v}");
    }
}
