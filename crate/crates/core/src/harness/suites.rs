use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{
    free, interleave_sets, par_map, rho_distinguish, subjects, term_pairs, CorpusMode,
    HarnessError, Item, Params, Status,
};
use crate::action::{show_trace, CTrace, Polarity};
use crate::encode::encode_cbv;
use crate::equiv::{
    accepts_trace, bisim_upto_composition, bounded_weak_bisim, bounded_weak_bisim_confluent,
    complete_trace_equiv, enf_bisim, enumerate_runs, enumerate_traces, trace_equiv, Aogs, Cogs,
    Interleaving, Lts, LtsError, PiOp, PiStd, TraceSet, Verdict, Wbogs,
};
use crate::harness::gen_corpus;
use crate::lambda::Term;
use crate::name::{Kind, Name, Supply};
use crate::ogs::{
    full_stack, is_complete_trace_a, is_complete_trace_c, is_complete_trace_s,
    is_strongly_passive_a, is_strongly_passive_s, parse_cconfig, pushdown_accepts, tensor_a,
    tensor_c, tensor_s, AConfig, CConfig, Env, EnvEntry, SConfig, Support, Threads,
};
use crate::pi::{cannot_interact, pi_step, Agent, Process};

type Outcome = (Status, String);

fn items(subjects: Vec<String>, results: Vec<Outcome>) -> Vec<Item> {
    subjects
        .into_iter()
        .zip(results)
        .enumerate()
        .map(|(index, (subject, (status, detail)))| Item {
            index,
            subject,
            status,
            detail,
        })
        .collect()
}

fn error(e: LtsError) -> Outcome {
    (Status::Fail, format!("error: {e}"))
}

fn shortest<'a>(ts: impl Iterator<Item = &'a CTrace>) -> Option<&'a CTrace> {
    ts.min_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| format!("{a:?}").cmp(&format!("{b:?}")))
    })
}

/// Exact comparison of two trace sets; a difference is only a failure when
/// neither enumeration was cut short by the fuel bound.
fn compare(left: &BTreeSet<CTrace>, right: &BTreeSet<CTrace>, clipped: bool) -> Outcome {
    if left == right {
        let note = if clipped { " (fuel-clipped)" } else { "" };
        return (Status::Pass, format!("{} traces{note}", left.len()));
    }
    let l = shortest(left.difference(right));
    let r = shortest(right.difference(left));
    let (side, w) = match (l, r) {
        (Some(a), Some(b)) if b.len() < a.len() => ("right only", b),
        (Some(a), _) => ("left only", a),
        (None, Some(b)) => ("right only", b),
        (None, None) => unreachable!(),
    };
    let status = if clipped {
        Status::Inconclusive
    } else {
        Status::Fail
    };
    (status, format!("{side}: {}", show_trace(w)))
}

fn compare_sets(a: &TraceSet, b: &TraceSet) -> Outcome {
    compare(
        &a.traces,
        &b.traces,
        a.divergence_suspected || b.divergence_suspected,
    )
}

fn per_term(p: &Params, f: impl Fn(&Term) -> Result<Outcome, LtsError> + Sync) -> Vec<Item> {
    let subs = subjects(p, CorpusMode::Mixed);
    let results = par_map(&subs, p.jobs, |_, (_, t)| f(t).unwrap_or_else(error));
    items(subs.into_iter().map(|(s, _)| s).collect(), results)
}

pub fn aogs_pi_op(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_term(p, |t| {
        let a = enumerate_traces(&Aogs, &AConfig::initial(t.clone()), p.depth, p.fuel)?;
        let b = enumerate_traces(&PiOp, &encode_cbv(t), p.depth, p.fuel)?;
        Ok(compare_sets(&a, &b))
    }))
}

pub fn cogs_pi(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_term(p, |t| {
        let a = enumerate_traces(&Cogs, &CConfig::initial(t.clone()), p.depth, p.fuel)?;
        let b = enumerate_traces(&PiStd, &encode_cbv(t), p.depth, p.fuel)?;
        Ok(compare_sets(&a, &b))
    }))
}

fn alternating(t: &CTrace) -> bool {
    t.windows(2).all(|w| w[0].polarity() != w[1].polarity())
}

pub fn alternating_subset(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_term(p, |t| {
        let a = enumerate_traces(&Aogs, &AConfig::initial(t.clone()), p.depth, p.fuel)?;
        let c = enumerate_traces(&Cogs, &CConfig::initial(t.clone()), p.depth, p.fuel)?;
        let alt: BTreeSet<CTrace> = c
            .traces
            .iter()
            .filter(|t| alternating(t))
            .cloned()
            .collect();
        Ok(compare(
            &a.traces,
            &alt,
            a.divergence_suspected || c.divergence_suspected,
        ))
    }))
}

pub fn wb_filter(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_term(p, |t| {
        let s = SConfig::initial(t.clone());
        let stack = free(&full_stack(&s)?);
        let w = enumerate_traces(&Wbogs, &s, p.depth, p.fuel)?;
        let a = enumerate_traces(&Aogs, &AConfig::initial(t.clone()), p.depth, p.fuel)?;
        let filtered: BTreeSet<CTrace> = a
            .traces
            .iter()
            .filter(|t| pushdown_accepts(t, &stack).is_some())
            .cloned()
            .collect();
        Ok(compare(
            &w.traces,
            &filtered,
            w.divergence_suspected || a.divergence_suspected,
        ))
    }))
}

fn dual_oracle<L: Lts>(
    sys: &L,
    s0: &L::State,
    p: &Params,
    complete: impl Fn(&[crate::action::Action]) -> bool,
    sp: impl Fn(&L::State) -> bool,
) -> Result<Option<String>, LtsError> {
    for (t, s) in enumerate_runs(sys, s0, p.depth, p.fuel)? {
        let (c, f) = (complete(&t), sp(&s));
        if c != f {
            return Ok(Some(format!(
                "{}: {} but {}",
                sys.name(),
                show_trace(&crate::action::canonical(&t)),
                if c {
                    "endpoint not strongly passive"
                } else {
                    "strongly passive endpoint"
                }
            )));
        }
    }
    Ok(None)
}

pub fn complete_iff_sp(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_term(p, |t| {
        let a = AConfig::initial(t.clone());
        let c = CConfig::initial(t.clone());
        let s = SConfig::initial(t.clone());
        let checks = [
            dual_oracle(
                &Aogs,
                &a,
                p,
                |tr| is_complete_trace_a(tr, &a),
                is_strongly_passive_a,
            )?,
            dual_oracle(
                &Cogs,
                &c,
                p,
                |tr| is_complete_trace_c(tr, &c),
                CConfig::is_strongly_passive,
            )?,
            dual_oracle(
                &Wbogs,
                &s,
                p,
                |tr| is_complete_trace_s(tr, &s),
                is_strongly_passive_s,
            )?,
        ];
        Ok(match checks.into_iter().flatten().next() {
            Some(m) => (Status::Fail, m),
            None => (Status::Pass, String::new()),
        })
    }))
}

struct TensorCase {
    c: (CConfig, CConfig),
    a: (AConfig, AConfig),
    active: bool,
}

/// `F` runs or stores `m` (on even items it is active), `G` stores `λz.n`
/// under a fresh variable.
fn tensor_case(i: usize, m: &Term, n: &Term) -> TensorCase {
    let mut s = Supply::new();
    m.observe_names(&mut s);
    n.observe_names(&mut s);
    let (p, xa, xb, z) = (
        s.fresh(Kind::Continuation),
        s.fresh(Kind::Variable),
        s.fresh(Kind::Variable),
        s.fresh(Kind::Variable),
    );
    let thunk = |t: &Term| EnvEntry::Value(Term::lam(z, t.clone()));
    let with = |t: &Term, own: Name| {
        let mut sup: Support = t.free_vars();
        sup.insert(own);
        sup
    };
    let g_env = Env::new().with(xb, thunk(n));
    let g_a = AConfig::Passive {
        env: g_env.clone(),
        support: with(n, xb),
    };
    let g_c = CConfig::Running {
        threads: Threads::default(),
        env: g_env,
        support: with(n, xb),
    };
    let active = i % 2 == 0;
    let (f_a, f_c) = if active {
        (
            AConfig::Active {
                term: m.clone(),
                cont: p,
                env: Env::new(),
                support: with(m, p),
            },
            CConfig::Running {
                threads: Threads(vec![(p, m.clone())]),
                env: Env::new(),
                support: with(m, p),
            },
        )
    } else {
        let env = Env::new().with(xa, thunk(m));
        (
            AConfig::Passive {
                env: env.clone(),
                support: with(m, xa),
            },
            CConfig::Running {
                threads: Threads::default(),
                env,
                support: with(m, xa),
            },
        )
    };
    TensorCase {
        c: (f_c, g_c),
        a: (f_a, g_a),
        active,
    }
}

fn starts_right(t: &CTrace, active: bool) -> bool {
    !active || t.first().is_none_or(|a| a.polarity() == Some(Polarity::P))
}

fn tensor_item(case: &TensorCase, p: &Params) -> Result<Outcome, LtsError> {
    let d = p.depth;
    // concurrent
    let (f, g) = &case.c;
    let fg = tensor_c(f, g)?;
    let (tf, tg, tfg) = (
        enumerate_traces(&Cogs, f, d, p.fuel)?,
        enumerate_traces(&Cogs, g, d, p.fuel)?,
        enumerate_traces(&Cogs, &fg, d, p.fuel)?,
    );
    let clipped = tf.divergence_suspected || tg.divergence_suspected || tfg.divergence_suspected;
    let out = compare(
        &tfg.traces,
        &interleave_sets(&tf.traces, &tg.traces, d, &Interleaving::Free),
        clipped,
    );
    if out.0 != Status::Pass {
        return Ok((out.0, format!("COGS {}", out.1)));
    }
    // alternating
    let (f, g) = &case.a;
    let fg = tensor_a(f, g)?;
    let (tf, tg, tfg) = (
        enumerate_traces(&Aogs, f, d, p.fuel)?,
        enumerate_traces(&Aogs, g, d, p.fuel)?,
        enumerate_traces(&Aogs, &fg, d, p.fuel)?,
    );
    let clipped = tf.divergence_suspected || tg.divergence_suspected || tfg.divergence_suspected;
    let expect: BTreeSet<CTrace> =
        interleave_sets(&tf.traces, &tg.traces, d, &Interleaving::Alternating)
            .into_iter()
            .filter(|t| starts_right(t, case.active))
            .collect();
    let out = compare(&tfg.traces, &expect, clipped);
    if out.0 != Status::Pass {
        return Ok((out.0, format!("AOGS {}", out.1)));
    }
    // well-bracketed
    let (f, g) = (
        SConfig::new(f.clone(), Vec::new()),
        SConfig::new(g.clone(), Vec::new()),
    );
    let fg = tensor_s(&f, &g, Vec::new())?;
    let sigma = free(&full_stack(&fg)?);
    let (tf, tg, tfg) = (
        enumerate_traces(&Wbogs, &f, d, p.fuel)?,
        enumerate_traces(&Wbogs, &g, d, p.fuel)?,
        enumerate_traces(&Wbogs, &fg, d, p.fuel)?,
    );
    let clipped = tf.divergence_suspected || tg.divergence_suspected || tfg.divergence_suspected;
    let expect: BTreeSet<CTrace> = interleave_sets(
        &tf.traces,
        &tg.traces,
        d,
        &Interleaving::WellBracketed(sigma),
    )
    .into_iter()
    .filter(|t| starts_right(t, case.active))
    .collect();
    let out = compare(&tfg.traces, &expect, clipped);
    Ok(if out.0 != Status::Pass {
        (out.0, format!("WBOGS {}", out.1))
    } else {
        out
    })
}

pub fn tensor_interleave(p: &Params) -> Result<Vec<Item>, HarnessError> {
    let c = gen_corpus(p.seed, (2 * p.count).max(2), p.size, CorpusMode::Mixed);
    let n = c.terms.len();
    let cases: Vec<(String, TensorCase)> = (0..p.count)
        .filter(|_| n > 0)
        .map(|i| {
            let (m, k) = (&c.terms[(2 * i) % n], &c.terms[(2 * i + 1) % n]);
            let case = tensor_case(i, m, k);
            (format!("{} ⊗ {}", case.a.0, case.a.1), case)
        })
        .collect();
    let results = par_map(&cases, p.jobs, |_, (_, case)| {
        tensor_item(case, p).unwrap_or_else(error)
    });
    Ok(items(cases.into_iter().map(|(s, _)| s).collect(), results))
}

fn per_pair(p: &Params, f: impl Fn(&Term, &Term) -> Result<Outcome, LtsError> + Sync) -> Vec<Item> {
    let pairs = term_pairs(p.seed, p.count, p.size);
    let results = par_map(&pairs, p.jobs, |_, (m, n)| f(m, n).unwrap_or_else(error));
    items(
        pairs.iter().map(|(m, n)| format!("{m}  ~  {n}")).collect(),
        results,
    )
}

fn decisive(v: &Verdict) -> Option<bool> {
    if v.is_inconclusive() {
        None
    } else {
        Some(v.is_equivalent())
    }
}

/// Decisive verdicts must coincide; anything undecided makes the item
/// inconclusive.
fn agree(named: &[(&str, &Verdict)]) -> Outcome {
    let detail = named
        .iter()
        .map(|(n, v)| format!("{n}={}", v.label()))
        .collect::<Vec<_>>()
        .join(" ");
    let ds: Vec<bool> = named.iter().filter_map(|(_, v)| decisive(v)).collect();
    if ds.windows(2).any(|w| w[0] != w[1]) {
        (Status::Fail, detail)
    } else if ds.len() < named.len() {
        (Status::Inconclusive, detail)
    } else {
        (Status::Pass, detail)
    }
}

pub fn ct_coincide(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_pair(p, |m, n| {
        let (d, fuel) = (p.depth, p.fuel);
        let a = complete_trace_equiv(
            &Aogs,
            &AConfig::initial(m.clone()),
            &Aogs,
            &AConfig::initial(n.clone()),
            d,
            fuel,
        )?;
        let c = complete_trace_equiv(
            &Cogs,
            &CConfig::initial(m.clone()),
            &Cogs,
            &CConfig::initial(n.clone()),
            d,
            fuel,
        )?;
        let s = complete_trace_equiv(
            &Wbogs,
            &SConfig::initial(m.clone()),
            &Wbogs,
            &SConfig::initial(n.clone()),
            d,
            fuel,
        )?;
        Ok(agree(&[("AOGS", &a), ("COGS", &c), ("WBOGS", &s)]))
    }))
}

/// `(λx0.M) V` against `M{x0:=V}` for open bodies `M` and closed values `V`.
pub fn beta_redexes(p: &Params) -> Vec<(Term, Term)> {
    let bodies = gen_corpus(p.seed, p.count, p.size, CorpusMode::Open).terms;
    let args = gen_corpus(p.seed.wrapping_add(1), p.count, p.size, CorpusMode::Closed).terms;
    let x = Name::var(0);
    bodies
        .iter()
        .zip(args.iter().cycle())
        .map(|(b, a)| {
            let v = if a.is_value() {
                a.clone()
            } else {
                let mut s = Supply::new();
                a.observe_names(&mut s);
                Term::lam(s.fresh(Kind::Variable), a.clone())
            };
            (
                Term::app(Term::lam(x, b.clone()), v.clone()),
                b.subst(x, &v),
            )
        })
        .collect()
}

/// Silent π steps allowed per unit of λ-level fuel.
pub const PI_FUEL_FACTOR: usize = 2;

pub fn beta_v(p: &Params) -> Result<Vec<Item>, HarnessError> {
    let pairs = beta_redexes(p);
    let results = par_map(&pairs, p.jobs, |_, (r, c)| {
        let fuel = p.fuel * PI_FUEL_FACTOR;
        bounded_weak_bisim_confluent(
            &PiStd,
            &encode_cbv(r),
            &PiStd,
            &encode_cbv(c),
            p.depth,
            fuel,
        )
        .map(|v| {
            let st = if v.is_equivalent() {
                Status::Pass
            } else if v.is_inconclusive() {
                Status::Inconclusive
            } else {
                Status::Fail
            };
            let w = v
                .witness()
                .map(|w| format!(" {}", show_trace(w)))
                .unwrap_or_default();
            (st, format!("{}{w}", v.label()))
        })
        .unwrap_or_else(error)
    });
    Ok(items(
        pairs.iter().map(|(r, c)| format!("{r}  →  {c}")).collect(),
        results,
    ))
}

pub fn enf_vs_ogs(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_pair(p, |m, n| {
        let e = enf_bisim(m, n, p.depth, p.fuel);
        let o = bounded_weak_bisim(
            &Cogs,
            &CConfig::initial(m.clone()),
            &Cogs,
            &CConfig::initial(n.clone()),
            2 * p.depth,
            p.fuel,
        )?;
        Ok(agree(&[("enf", &e), ("COGS", &o)]))
    }))
}

/// Explores `P | Q` componentwise and checks that no reachable pair of
/// residuals can interact.
fn noninteract_invariant(
    pp: &Process,
    qq: &Process,
    steps: usize,
    cap: usize,
) -> Result<Option<String>, LtsError> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(pp.clone(), qq.clone(), 0usize)]);
    while let Some((a, b, k)) = queue.pop_front() {
        if !cannot_interact(&a, &b) {
            return Ok(Some(format!("residuals interact: {a}  |  {b}")));
        }
        if k == steps || seen.len() >= cap || !seen.insert((crate::pi::key(&a), crate::pi::key(&b)))
        {
            continue;
        }
        let (aa, bb) = (Agent::Proc(a.clone()), Agent::Proc(b.clone()));
        let floor = PiStd.supply(&aa).join(PiStd.supply(&bb));
        for (_, a2) in pi_step(&aa, floor)? {
            if let Agent::Proc(a2) = a2 {
                queue.push_back((a2, b.clone(), k + 1));
            }
        }
        for (_, b2) in pi_step(&bb, floor)? {
            if let Agent::Proc(b2) = b2 {
                queue.push_back((a.clone(), b2, k + 1));
            }
        }
    }
    Ok(None)
}

pub fn pi_noninteract(p: &Params) -> Result<Vec<Item>, HarnessError> {
    let c = gen_corpus(p.seed, (p.count + 1).max(2), p.size, CorpusMode::Mixed);
    let n = c.terms.len();
    let pairs: Vec<(Process, Process)> = (0..p.count)
        .filter(|_| n > 0)
        .map(|i| {
            let pp = encode_cbv(&c.terms[i % n]).apply(&[Name::cont(1)]);
            let qq = encode_cbv(&c.terms[(i + 1) % n]).apply(&[Name::cont(2)]);
            (pp, qq)
        })
        .collect();
    let results = par_map(&pairs, p.jobs, |_, (pp, qq)| {
        (|| -> Result<Outcome, LtsError> {
            if !cannot_interact(pp, qq) {
                return Ok((Status::Fail, "components can interact".into()));
            }
            if let Some(m) = noninteract_invariant(pp, qq, 2 * p.depth + 2, 4000)? {
                return Ok((Status::Fail, m));
            }
            let d = p.depth;
            let both = Agent::Proc(Process::par(vec![pp.clone(), qq.clone()]));
            let (ta, tb, tab) = (
                enumerate_traces(&PiStd, &Agent::Proc(pp.clone()), d, p.fuel)?,
                enumerate_traces(&PiStd, &Agent::Proc(qq.clone()), d, p.fuel)?,
                enumerate_traces(&PiStd, &both, d, p.fuel)?,
            );
            let clipped =
                ta.divergence_suspected || tb.divergence_suspected || tab.divergence_suspected;
            Ok(compare(
                &tab.traces,
                &interleave_sets(&ta.traces, &tb.traces, d, &Interleaving::Free),
                clipped,
            ))
        })()
        .unwrap_or_else(error)
    });
    Ok(items(
        pairs.iter().map(|(a, b)| format!("{a}  |  {b}")).collect(),
        results,
    ))
}

pub const REMARK_M: &str = "(\\z. (\\w. w w)(\\w. w w)) (x0 (\\y. (\\w. w w)(\\w. w w)))";

/// The two concurrent configurations running `M` and `Ω` on swapped
/// continuation names.
pub fn swap_pair() -> (CConfig, CConfig) {
    let om = super::OMEGA;
    let f = parse_cconfig(
        &format!("<p1 |-> {REMARK_M} ; p2 |-> {om} | names: x0>"),
        false,
    )
    .expect("literal parses");
    let g = parse_cconfig(
        &format!("<p1 |-> {om} ; p2 |-> {REMARK_M} | names: x0>"),
        false,
    )
    .expect("literal parses");
    (f, g)
}

pub const REMARK_WITNESS: &str = "(_p0) · x0^(_x0,_p1) · _x0(_x1,_p2) · _p2^(_x2)";

pub fn counterexamples(p: &Params) -> Result<Vec<Item>, HarnessError> {
    let c = gen_corpus(p.seed, 0, p.size, CorpusMode::Closed);
    let (a, b) = (
        c.fixture("remark-omega").clone(),
        c.fixture("remark-id").clone(),
    );
    let (f, g) = swap_pair();
    let fuel = p.fuel;
    let mut out: Vec<(String, Outcome)> = Vec::new();

    let (v, stats) = bisim_upto_composition(&f, &g, 5, fuel).map_err(HarnessError::from)?;
    out.push((
        "COGS swap pair, up-to-composition bisimulation, depth 5".into(),
        (
            if v.is_equivalent() {
                Status::Pass
            } else {
                Status::Fail
            },
            format!(
                "{} (pairs={} memo-hits={})",
                v.label(),
                stats.pairs,
                stats.memo_hits
            ),
        ),
    ));

    let v = trace_equiv(&Cogs, &f, &Cogs, &g, 5, fuel)?;
    out.push((
        "COGS swap pair, traces, depth 5".into(),
        (
            if v.is_equivalent() {
                Status::Pass
            } else {
                Status::Fail
            },
            v.label().into(),
        ),
    ));

    let (fa, fb) = (AConfig::initial(a.clone()), AConfig::initial(b.clone()));
    let v = trace_equiv(&Aogs, &fa, &Aogs, &fb, 4, fuel)?;
    let st = match v.witness() {
        Some(w)
            if show_trace(w) == REMARK_WITNESS
                && !accepts_trace(&Aogs, &fa, w, fuel)?
                && accepts_trace(&Aogs, &fb, w, fuel)? =>
        {
            Status::Pass
        }
        _ => Status::Fail,
    };
    let w = v.witness().map(|w| show_trace(w)).unwrap_or_default();
    out.push((
        "AOGS (λz.Ω)(x0 (λy.Ω)) vs (λz.Ω)(x0 (λy.y)), traces, depth 4".into(),
        (st, format!("{} {w}", v.label())),
    ));

    let (sa, sb) = (SConfig::initial(a), SConfig::initial(b));
    let v = trace_equiv(&Wbogs, &sa, &Wbogs, &sb, 4, fuel)?;
    let w = v
        .witness()
        .map(|w| format!(" {}", show_trace(w)))
        .unwrap_or_default();
    out.push((
        "WBOGS same pair, traces, depth 4".into(),
        (Status::Info, format!("{}{w}", v.label())),
    ));

    let (subs, results): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok(items(subs, results))
}

pub fn rho_context(p: &Params) -> Result<Vec<Item>, HarnessError> {
    Ok(per_pair(p, |m, n| {
        let v = complete_trace_equiv(
            &Wbogs,
            &SConfig::initial(m.clone()),
            &Wbogs,
            &SConfig::initial(n.clone()),
            2 * p.depth,
            p.fuel,
        )?;
        if !v.is_distinguished() {
            return Ok((Status::Info, format!("complete WB traces: {}", v.label())));
        }
        Ok(match rho_distinguish(m, n, 3, 4 * p.fuel) {
            Some(w) => (
                Status::Pass,
                format!(
                    "{} converges under {}",
                    if w.left_converges { "left" } else { "right" },
                    w.context
                ),
            ),
            None => (
                Status::Inconclusive,
                "no distinguishing context within the template bound".into(),
            ),
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_pair_parses_with_shared_free_name() {
        let (f, g) = swap_pair();
        assert_eq!(f.support(), g.support());
        assert!(f.support().contains(&Name::var(0)));
    }

    #[test]
    fn beta_redexes_are_closed() {
        let p = Params {
            count: 5,
            ..Params::default()
        };
        for (r, _) in beta_redexes(&p) {
            assert!(r.free_vars().is_empty(), "{r}");
        }
    }
}
