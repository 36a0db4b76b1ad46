//! Inputs shared by the benchmarks in `benches/`.

use ogspi::harness::{beta_redexes, gen_corpus, CorpusMode, Params};
use ogspi::lambda::{parse_cbv, Term};

pub const SEED: u64 = 1;

/// Closed corpus terms of size at most 6.
pub fn closed_terms(count: usize) -> Vec<Term> {
    gen_corpus(SEED, count, 6, CorpusMode::Closed).terms
}

/// `(λx.M) V` with its contractum.
pub fn redexes(count: usize) -> Vec<(Term, Term)> {
    beta_redexes(&Params { count, ..Params::default() })
}

pub fn term(src: &str) -> Term {
    parse_cbv(src).expect("benchmark terms parse")
}
