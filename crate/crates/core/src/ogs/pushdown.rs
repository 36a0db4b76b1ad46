//! The well-bracketing pushdown and complete traces.

use std::collections::BTreeSet;

use super::config::{AConfig, CConfig, EnvEntry, OgsError, SConfig};
use crate::action::{Action, Kinded};
use crate::name::Name;

/// Pending Player and Opponent continuation names of a stacked
/// configuration, top first.
pub fn full_stack(f: &SConfig) -> Result<Vec<Name>, OgsError> {
    let mut out = Vec::new();
    let env = match &f.config {
        AConfig::Initial { .. } => return Ok(out),
        AConfig::Active { cont, env, .. } => {
            out.push(*cont);
            env
        }
        AConfig::Passive { env, .. } => env,
    };
    for p in &f.stack {
        match env.get(*p) {
            Some(EnvEntry::Cont(_, q)) => {
                out.push(*p);
                out.push(*q);
            }
            _ => return Err(OgsError::MissingContinuationEntry(*p)),
        }
    }
    Ok(out)
}

/// Runs a visible trace through the pushdown. Questions push the continuation
/// they introduce, answers pop their subject.
pub fn pushdown_accepts<N: Clone + Eq + Kinded>(t: &[Action<N>], init: &[N]) -> Option<Vec<N>> {
    let mut stack: Vec<N> = init.to_vec();
    stack.reverse();
    for a in t {
        if a.is_tau() {
            continue;
        }
        if a.is_answer() {
            if stack.pop().as_ref() != a.subject() {
                return None;
            }
        } else if let Some(q) = a.question_continuation() {
            stack.push(q.clone());
        }
    }
    stack.reverse();
    Some(stack)
}

/// Answers whose subject is not bound earlier in the trace must be exactly
/// `pending`; every continuation a question introduces must be answered.
pub fn complete_by_justification<N: Clone + Ord + Kinded>(
    t: &[Action<N>],
    pending: &BTreeSet<N>,
) -> bool {
    let mut bound = BTreeSet::new();
    let mut unjustified = BTreeSet::new();
    let mut asked = BTreeSet::new();
    let mut answered = BTreeSet::new();
    for a in t {
        if a.is_answer() {
            let s = a.subject().unwrap().clone();
            if !bound.contains(&s) {
                unjustified.insert(s.clone());
            }
            answered.insert(s);
        } else if let Some(q) = a.question_continuation() {
            asked.insert(q.clone());
        }
        bound.extend(a.objects().iter().cloned());
    }
    &unjustified == pending && asked.is_subset(&answered)
}

/// An initial configuration has not been interrogated yet, so its complete
/// traces must contain the initial question.
fn asked_if_initial(t: &[Action], initial: bool) -> bool {
    !initial || t.iter().any(|a| matches!(a, Action::Abs(_)))
}

pub fn is_complete_trace_a(t: &[Action], f: &AConfig) -> bool {
    asked_if_initial(t, matches!(f, AConfig::Initial { .. }))
        && complete_by_justification(t, &f.available_conts())
}

pub fn is_complete_trace_c(t: &[Action], f: &CConfig) -> bool {
    asked_if_initial(t, matches!(f, CConfig::Initial { .. }))
        && complete_by_justification(t, &f.available_conts())
}

pub fn is_complete_trace_s(t: &[Action], f: &SConfig) -> bool {
    if !asked_if_initial(t, matches!(f.config, AConfig::Initial { .. })) {
        return false;
    }
    match full_stack(f) {
        Ok(s) => pushdown_accepts(t, &s).is_some_and(|rest| rest.is_empty()),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{EvalContext, Term};
    use crate::ogs::config::Env;

    fn n(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    #[test]
    fn full_stack_cases() {
        let (p, q0, q1) = (n("p0"), n("p1"), n("p2"));
        let env = Env::new().with(q0, EnvEntry::Cont(EvalContext::hole(), p));
        let passive = SConfig::new(
            AConfig::Passive {
                env: env.clone(),
                support: [p, q0].into(),
            },
            vec![q0],
        );
        assert_eq!(full_stack(&passive).unwrap(), vec![q0, p]);
        let active = SConfig::new(
            AConfig::Active {
                term: Term::Var(n("x0")),
                cont: q1,
                env,
                support: [p, q0, q1, n("x0")].into(),
            },
            vec![q0],
        );
        assert_eq!(full_stack(&active).unwrap(), vec![q1, q0, p]);
        let bad = SConfig::new(
            AConfig::Passive {
                env: Env::new(),
                support: [q0].into(),
            },
            vec![q0],
        );
        assert_eq!(
            full_stack(&bad),
            Err(OgsError::MissingContinuationEntry(q0))
        );
    }

    #[test]
    fn fold_examples() {
        let (p, x) = (n("p0"), n("x0"));
        let t = vec![Action::ioq(p), Action::pa(p, x)];
        assert_eq!(pushdown_accepts(&t, &[]), Some(vec![]));
        let (y, q, z) = (n("x1"), n("p1"), n("x2"));
        let t = vec![Action::pq(x, y, q), Action::pa(p, z)];
        assert_eq!(pushdown_accepts(&t, &[p]), None);
    }
}
