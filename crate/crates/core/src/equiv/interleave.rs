use std::collections::BTreeSet;

use crate::action::{Action, Kinded, Polarity};
use crate::ogs::pushdown_accepts;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interleaving<N> {
    Free,
    /// Polarities alternate; when a component starts with an output the
    /// interleaving does too.
    Alternating,
    /// Alternating and well-bracketed with respect to the given stack, top
    /// first.
    WellBracketed(Vec<N>),
}

fn shuffles<N: Clone>(
    a: &[Action<N>],
    b: &[Action<N>],
    prefix: &mut Vec<Action<N>>,
    out: &mut Vec<Vec<Action<N>>>,
) {
    match (a.split_first(), b.split_first()) {
        (None, None) => out.push(prefix.clone()),
        (x, y) => {
            if let Some((h, rest)) = x {
                prefix.push(h.clone());
                shuffles(rest, b, prefix, out);
                prefix.pop();
            }
            if let Some((h, rest)) = y {
                prefix.push(h.clone());
                shuffles(a, rest, prefix, out);
                prefix.pop();
            }
        }
    }
}

fn alternating<N>(t: &[Action<N>], starts_with_output: bool) -> bool {
    if starts_with_output && t.first().is_some_and(|a| a.polarity() != Some(Polarity::P)) {
        return false;
    }
    t.windows(2).all(|w| w[0].polarity() != w[1].polarity())
}

/// Order-preserving shuffles of two traces with disjoint bound names,
/// restricted according to `mode`.
pub fn interleavings<N: Clone + Ord + Kinded>(
    t1: &[Action<N>],
    t2: &[Action<N>],
    mode: &Interleaving<N>,
) -> BTreeSet<Vec<Action<N>>> {
    let mut all = Vec::new();
    shuffles(t1, t2, &mut Vec::new(), &mut all);
    let out_start = [t1, t2]
        .iter()
        .any(|t| t.first().is_some_and(|a| a.is_output()));
    all.into_iter()
        .filter(|t| match mode {
            Interleaving::Free => true,
            Interleaving::Alternating => alternating(t, out_start),
            Interleaving::WellBracketed(stack) => {
                alternating(t, out_start) && pushdown_accepts(t, stack).is_some()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;

    #[test]
    fn free_counts() {
        let (p, x) = (Name::cont(0), Name::var(0));
        let a = Action::pa(p, x);
        let b = Action::oa(Name::cont(1), Name::var(1));
        let c = Action::oq(x, Name::var(2), Name::cont(2));
        let e: Vec<Action> = Vec::new();
        assert_eq!(
            interleavings(&e, &[a.clone()], &Interleaving::Free),
            BTreeSet::from([vec![a.clone()]])
        );
        assert_eq!(
            interleavings(&[a.clone(), b.clone()], &[c.clone()], &Interleaving::Free).len(),
            3
        );
        let alt = interleavings(&[a.clone(), b.clone()], &[c], &Interleaving::Alternating);
        assert!(alt.iter().all(|t| alternating(t, true)));
        assert_eq!(alt.len(), 0);
    }

    #[test]
    fn alternating_shuffle() {
        let p = Name::cont(0);
        let q = Name::cont(1);
        let a = Action::pa(p, Name::var(0));
        let b = Action::oq(Name::var(5), Name::var(1), Name::cont(2));
        let c = Action::pa(q, Name::var(2));
        let r = interleavings(
            &[a.clone(), b.clone()],
            &[c.clone()],
            &Interleaving::Alternating,
        );
        assert_eq!(r, BTreeSet::from([vec![a, b, c]]));
    }
}
