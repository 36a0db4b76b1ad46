use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lambda::{parse_cbv, Term};
use crate::name::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusMode {
    Closed,
    /// One free variable, `x0`.
    Open,
    Mixed,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub term: Term,
}

/// Seeded terms within the size bound, plus the fixed fixtures (which may
/// exceed it).
#[derive(Clone, Debug)]
pub struct Corpus {
    pub fixtures: Vec<Fixture>,
    pub terms: Vec<Term>,
}

impl Corpus {
    pub fn fixture(&self, name: &str) -> &Term {
        &self
            .fixtures
            .iter()
            .find(|f| f.name == name)
            .expect("known fixture")
            .term
    }
}

pub const OMEGA: &str = "(\\w. w w)(\\w. w w)";

const FIXTURES: [(&str, &str); 7] = [
    ("I", "\\x. x"),
    ("Omega", OMEGA),
    (
        "remark-omega",
        "(\\z. (\\w. w w)(\\w. w w)) (x0 (\\y. (\\w. w w)(\\w. w w)))",
    ),
    ("remark-id", "(\\z. (\\w. w w)(\\w. w w)) (x0 (\\y. y))"),
    ("true", "\\x. \\y. x"),
    ("false", "\\x. \\y. y"),
    ("I-eta", "\\x. (\\y. y) x"),
];

pub fn fixtures() -> Vec<Fixture> {
    FIXTURES
        .iter()
        .map(|(name, src)| Fixture {
            name,
            term: parse_cbv(src).expect("fixture parses"),
        })
        .collect()
}

struct Gen {
    rng: ChaCha8Rng,
    next: u32,
}

impl Gen {
    fn term(&mut self, size: usize, scope: &mut Vec<Name>) -> Option<Term> {
        match size {
            0 => None,
            1 if scope.is_empty() => None,
            1 => Some(Term::var(scope[self.rng.gen_range(0..scope.len())])),
            2 => self.lam(size, scope),
            _ => {
                if self.rng.gen_bool(0.5) {
                    self.lam(size, scope)
                } else {
                    let left = self.rng.gen_range(1..size - 1);
                    let f = self.term(left, scope)?;
                    let a = self.term(size - 1 - left, scope)?;
                    Some(Term::app(f, a))
                }
            }
        }
    }

    fn lam(&mut self, size: usize, scope: &mut Vec<Name>) -> Option<Term> {
        let x = Name::var(self.next);
        self.next += 1;
        scope.push(x);
        let body = self.term(size - 1, scope);
        scope.pop();
        Some(Term::lam(x, body?))
    }
}

/// Deterministic pseudo-random λ-terms of at most `max_size` nodes. Closed
/// terms have no free variables; open ones have exactly `x0` free.
pub fn gen_corpus(seed: u64, count: usize, max_size: usize, mode: CorpusMode) -> Corpus {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        next: 1,
    };
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let min_size = match mode {
        CorpusMode::Closed => 2,
        _ => 1,
    };
    while terms.len() < count && max_size >= min_size {
        attempts += 1;
        let open = match mode {
            CorpusMode::Closed => false,
            CorpusMode::Open => true,
            CorpusMode::Mixed => g.rng.gen_bool(0.5),
        };
        let size = g.rng.gen_range(min_size..=max_size);
        g.next = 1;
        let mut scope = if open { vec![Name::var(0)] } else { Vec::new() };
        let Some(t) = g.term(size, &mut scope) else {
            continue;
        };
        if open && !t.has_free(Name::var(0)) {
            continue;
        }
        // distinct terms first; repeats only once the space looks exhausted
        if seen.insert(t.canonical()) || attempts > 200 * (count + 1) {
            terms.push(t);
        }
    }
    Corpus {
        fixtures: fixtures(),
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replayable_and_bounded() {
        let a = gen_corpus(1, 10, 6, CorpusMode::Mixed);
        let b = gen_corpus(1, 10, 6, CorpusMode::Mixed);
        assert_eq!(a.terms, b.terms);
        assert_eq!(a.terms.len(), 10);
        assert!(a.terms.iter().all(|t| t.size() <= 6));
        assert_ne!(gen_corpus(2, 10, 6, CorpusMode::Mixed).terms, a.terms);
    }

    #[test]
    fn modes() {
        let c = gen_corpus(7, 20, 5, CorpusMode::Closed);
        assert!(c.terms.iter().all(|t| t.free_vars().is_empty()));
        let o = gen_corpus(7, 20, 5, CorpusMode::Open);
        assert!(o
            .terms
            .iter()
            .all(|t| t.free_vars() == [Name::var(0)].into()));
    }

    #[test]
    fn fixtures_present() {
        for seed in [0, 1, 99] {
            let c = gen_corpus(seed, 3, 4, CorpusMode::Closed);
            let names: Vec<_> = c.fixtures.iter().map(|f| f.name).collect();
            assert!(
                names.contains(&"Omega") && names.contains(&"remark-id") && names.contains(&"true")
            );
        }
    }
}
