//! Seeded corpora and the property suites run by `ogspi check` and the
//! acceptance target.

mod corpus;
mod report;
mod rho_ctx;
mod suites;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::action::{recanonical, CTrace, TName};
use crate::equiv::{interleavings, Interleaving, LtsError};
use crate::lambda::{step_cbv, Term};
use crate::name::{Kind, Name, Supply};

pub use corpus::{fixtures, gen_corpus, Corpus, CorpusMode, Fixture, OMEGA};
pub use report::{Counts, Item, Report, Status};
pub use rho_ctx::{rho_distinguish, RhoWitness};
pub use suites::{beta_redexes, swap_pair, REMARK_M, REMARK_WITNESS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    pub count: usize,
    pub size: usize,
    pub depth: usize,
    pub fuel: usize,
    pub jobs: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            seed: 1,
            count: 25,
            size: 6,
            depth: 3,
            fuel: 64,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

pub const SUITES: [&str; 12] = [
    "aogs-pi-op",
    "cogs-pi",
    "alternating-subset",
    "wb-filter",
    "complete-iff-sp",
    "tensor-interleave",
    "ct-coincide",
    "beta-v",
    "enf-vs-ogs",
    "pi-noninteract",
    "counterexamples",
    "rho-context",
];

pub fn run_suite(name: &str, p: &Params) -> Result<Report, HarnessError> {
    let items = match name {
        "aogs-pi-op" => suites::aogs_pi_op(p)?,
        "cogs-pi" => suites::cogs_pi(p)?,
        "alternating-subset" => suites::alternating_subset(p)?,
        "wb-filter" => suites::wb_filter(p)?,
        "complete-iff-sp" => suites::complete_iff_sp(p)?,
        "tensor-interleave" => suites::tensor_interleave(p)?,
        "ct-coincide" => suites::ct_coincide(p)?,
        "beta-v" => suites::beta_v(p)?,
        "enf-vs-ogs" => suites::enf_vs_ogs(p)?,
        "pi-noninteract" => suites::pi_noninteract(p)?,
        "counterexamples" => suites::counterexamples(p)?,
        "rho-context" => suites::rho_context(p)?,
        _ => return Err(HarnessError::UnknownSuite(name.to_string())),
    };
    Ok(Report {
        suite: name.to_string(),
        params: *p,
        items,
    })
}

/// Maps `f` over `xs` on up to `jobs` threads; results keep input order.
pub(crate) fn par_map<T: Sync, R: Send>(
    xs: &[T],
    jobs: usize,
    f: impl Fn(usize, &T) -> R + Sync,
) -> Vec<R> {
    let jobs = jobs.clamp(1, xs.len().max(1));
    if jobs == 1 {
        return xs.iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let f = &f;
    let mut slots: Vec<Option<R>> = std::iter::repeat_with(|| None).take(xs.len()).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                s.spawn(move || {
                    xs.iter()
                        .enumerate()
                        .skip(w)
                        .step_by(jobs)
                        .map(|(i, x)| (i, f(i, x)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

/// The corpus terms followed by the fixtures, with display labels.
pub(crate) fn subjects(p: &Params, mode: CorpusMode) -> Vec<(String, Term)> {
    let c = gen_corpus(p.seed, p.count, p.size, mode);
    let mut out: Vec<(String, Term)> = c.terms.into_iter().map(|t| (t.to_string(), t)).collect();
    out.extend(c.fixtures.into_iter().map(|f| (f.name.to_string(), f.term)));
    out
}

/// Term pairs mixing related and unrelated terms: fixture pairs first,
/// then for each corpus term its βv reduct, a βv expansion, or the next
/// corpus term, in turn.
pub fn term_pairs(seed: u64, count: usize, size: usize) -> Vec<(Term, Term)> {
    let c = gen_corpus(seed, count.max(2), size, CorpusMode::Mixed);
    let fx = |n: &str| c.fixture(n).clone();
    let mut out = vec![
        (fx("I"), fx("I-eta")),
        (fx("remark-omega"), fx("remark-id")),
        (fx("true"), fx("false")),
        (fx("I"), fx("Omega")),
    ];
    let n = c.terms.len();
    let mut i = 0;
    while out.len() < count && n > 0 {
        let m = c.terms[i % n].clone();
        let other = match i % 3 {
            0 => step_cbv(&m).unwrap_or_else(|| expand(&m)),
            1 => expand(&m),
            _ => c.terms[(i + 1) % n].clone(),
        };
        out.push((m, other));
        i += 1;
    }
    out.truncate(count);
    out
}

/// `(λz.z) M`, or the η-expansion `λz.V z` of a value.
fn expand(m: &Term) -> Term {
    let mut s = Supply::new();
    m.observe_names(&mut s);
    let z = s.fresh(Kind::Variable);
    if m.is_value() {
        Term::lam(z, Term::app(m.clone(), Term::var(z)))
    } else {
        Term::app(Term::lam(z, Term::var(z)), m.clone())
    }
}

/// Moves every bound placeholder of `t` out of the way of small indices.
fn shift(t: &CTrace) -> CTrace {
    const OFF: u32 = 1 << 20;
    t.iter()
        .map(|a| {
            a.map(&mut |n| match n {
                TName::Bound(k, i) => TName::Bound(*k, i + OFF),
                f => *f,
            })
        })
        .collect()
}

/// All interleavings of length at most `depth` of a trace from `a` with
/// a trace from `b`, canonicalized.
pub(crate) fn interleave_sets(
    a: &BTreeSet<CTrace>,
    b: &BTreeSet<CTrace>,
    depth: usize,
    mode: &Interleaving<TName>,
) -> BTreeSet<CTrace> {
    let mut out = BTreeSet::new();
    for t1 in a {
        for t2 in b {
            if t1.len() + t2.len() > depth {
                continue;
            }
            for s in interleavings(t1, &shift(t2), mode) {
                out.insert(recanonical(&s));
            }
        }
    }
    out
}

pub(crate) fn free(ns: &[Name]) -> Vec<TName> {
    ns.iter().map(|n| TName::Free(*n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", &Params::default()).unwrap_err(),
            HarnessError::UnknownSuite("nope".into())
        );
    }

    #[test]
    fn par_map_keeps_order() {
        let xs: Vec<usize> = (0..17).collect();
        assert_eq!(
            par_map(&xs, 4, |_, x| x * 2),
            xs.iter().map(|x| x * 2).collect::<Vec<_>>()
        );
    }

    #[test]
    fn pairs_are_deterministic() {
        let a = term_pairs(3, 12, 6);
        assert_eq!(a.len(), 12);
        assert_eq!(a, term_pairs(3, 12, 6));
    }
}
