//! Randomised invariants over generated terms and the states they reach.

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;

use ogspi::action::{canonical, Action, CTrace, TName};
use ogspi::encode::{encode_cbv, encode_cconfig, encode_config, Variant};
use ogspi::equiv::{
    accepts_trace, bisim_upto_composition, bounded_weak_bisim, enumerate_runs, enumerate_traces,
    interleavings, trace_equiv, Aogs, Cogs, Interleaving, Lts, Outcome, PiOp, PiStd, Side, Wbogs,
};
use ogspi::harness::{run_suite, Params};
use ogspi::lambda::{decompose_cbv, step_cbn, step_cbv, step_rho, Decomp, RhoTerm, Store};
use ogspi::ogs::{
    decompose_singletons, full_stack, is_complete_trace_a, is_strongly_passive_a, pushdown_accepts,
    tensor_c,
};
use ogspi::pi::{self, cannot_interact};
use ogspi::{AConfig, Agent, CConfig, Name, Polarity, Process, SConfig, Term};

const FUEL: usize = 48;

#[derive(Clone, Debug)]
enum Shape {
    Var(usize),
    Lam(Box<Shape>),
    App(Box<Shape>, Box<Shape>),
}

fn shape(depth: u32, size: u32) -> impl Strategy<Value = Shape> {
    (0usize..4).prop_map(Shape::Var).prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| Shape::Lam(Box::new(b))),
            (inner.clone(), inner).prop_map(|(f, a)| Shape::App(Box::new(f), Box::new(a))),
        ]
    })
}

/// Variables pick a binder in scope; with none in scope they are the free `x0`.
fn build(s: &Shape, scope: &mut Vec<Name>, next: &mut u32) -> Term {
    match s {
        Shape::Var(i) if scope.is_empty() => {
            let _ = i;
            Term::var(Name::var(0))
        }
        Shape::Var(i) => Term::var(scope[scope.len() - 1 - i % scope.len()]),
        Shape::Lam(b) => {
            let x = Name::var(*next);
            *next += 1;
            scope.push(x);
            let body = build(b, scope, next);
            scope.pop();
            Term::lam(x, body)
        }
        Shape::App(f, a) => {
            let f = build(f, scope, next);
            Term::app(f, build(a, scope, next))
        }
    }
}

fn to_term(s: &Shape) -> Term {
    build(s, &mut Vec::new(), &mut 1)
}

fn term() -> impl Strategy<Value = Term> {
    shape(4, 10).prop_map(|s| to_term(&s))
}

fn small_term() -> impl Strategy<Value = Term> {
    shape(3, 6).prop_map(|s| to_term(&s))
}

fn closed_term() -> impl Strategy<Value = Term> {
    shape(3, 6).prop_map(|s| Term::lam(Name::var(0), to_term(&s)))
}

/// States reachable by at most `steps` strong transitions, capped in number.
fn reach<L: Lts>(sys: &L, s0: &L::State, steps: usize) -> Vec<L::State> {
    reach_above(sys, s0, steps, ogspi::Supply::new())
}

/// As `reach`, with fresh names also kept above `floor`.
fn reach_above<L: Lts>(sys: &L, s0: &L::State, steps: usize, floor: ogspi::Supply) -> Vec<L::State> {
    let mut seen = std::collections::HashSet::from([sys.key(s0)]);
    let mut out = vec![s0.clone()];
    let mut frontier = vec![s0.clone()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for s in &frontier {
            for (_, s2) in sys.step(s, sys.supply(s).join(floor)).unwrap() {
                if out.len() < 150 && seen.insert(sys.key(&s2)) {
                    out.push(s2.clone());
                    next.push(s2);
                }
            }
        }
        frontier = next;
    }
    out
}

fn fresh_objects<L: Lts>(sys: &L, s: &L::State) -> bool {
    let sup = sys.supply(s);
    sys.step(s, sup).unwrap().iter().all(|(a, _)| {
        let objs = a.objects();
        let distinct: BTreeSet<_> = objs.iter().collect();
        distinct.len() == objs.len() && objs.iter().all(|o| o.id >= sup.peek(o.kind).id)
    })
}

fn alternating(t: &CTrace) -> bool {
    t.windows(2).all(|w| w[0].polarity() != w[1].polarity())
}

fn step_set<L: Lts>(sys: &L, s: &L::State, floor: ogspi::Supply) -> BTreeSet<(String, String)>
where
    L::Key: std::fmt::Debug,
{
    sys.step(s, floor)
        .unwrap()
        .into_iter()
        .map(|(a, s2)| (format!("{a:?}"), format!("{:?}", sys.key(&s2))))
        .collect()
}

fn has_prefix(t: &CTrace, p: &CTrace) -> bool {
    t.len() >= p.len() && t[..p.len()] == p[..]
}

fn free_subject_names(t: &[Action]) -> BTreeSet<Name> {
    let mut bound = BTreeSet::new();
    let mut free = BTreeSet::new();
    for a in t {
        if let Some(s) = a.subject() {
            if !bound.contains(s) {
                free.insert(*s);
            }
        }
        bound.extend(a.objects().iter().copied());
    }
    free
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cbv_decomposition_is_unique(m in term()) {
        match decompose_cbv(&m) {
            Decomp::Value => {
                prop_assert!(m.is_value());
                prop_assert_eq!(step_cbv(&m), None);
            }
            Decomp::Redex { ctx, param, body, arg } => {
                prop_assert!(arg.is_value());
                prop_assert_eq!(ctx.plug(Term::app(Term::lam(param, body.clone()), arg.clone())), m.clone());
                let next = step_cbv(&m).unwrap();
                prop_assert!(next.alpha_eq(&ctx.plug(body.subst(param, &arg))));
            }
            Decomp::Stuck { ctx, head, arg } => {
                prop_assert!(arg.is_value());
                prop_assert_eq!(ctx.plug(Term::app(Term::var(head), arg)), m.clone());
                prop_assert_eq!(step_cbv(&m), None);
            }
        }
    }

    #[test]
    fn reduction_adds_no_free_variables(m in term()) {
        if let Some(n) = step_cbv(&m) {
            prop_assert!(n.free_vars().is_subset(&m.free_vars()));
        }
        if let Some(n) = step_cbn(&m) {
            prop_assert!(n.free_vars().is_subset(&m.free_vars()));
        }
    }

    #[test]
    fn reduction_is_a_function(m in term()) {
        prop_assert_eq!(step_cbv(&m), step_cbv(&m.clone()));
        prop_assert_eq!(step_cbn(&m), step_cbn(&m.clone()));
        let r = RhoTerm::from(&m);
        prop_assert_eq!(step_rho(&r, &Store::new()), step_rho(&r.clone(), &Store::new()));
    }

    #[test]
    fn substitution_free_variables(m in term(), v in closed_term(), free in any::<bool>()) {
        let x = Name::var(0);
        let v = if free { Term::app(v, Term::var(Name::var(99))) } else { v };
        prop_assume!(v.is_value() || !free);
        let mut expected: BTreeSet<Name> = m.free_vars();
        expected.remove(&x);
        if m.has_free(x) {
            expected.extend(v.free_vars());
        }
        prop_assert_eq!(m.subst(x, &v).free_vars(), expected);
    }

    #[test]
    fn pure_terms_reduce_alike_with_a_store(m in term()) {
        let r = step_rho(&RhoTerm::from(&m), &Store::new()).unwrap();
        match (step_cbv(&m), r) {
            (None, None) => {}
            (Some(n), Some((rn, store))) => {
                prop_assert!(store.is_empty());
                prop_assert_eq!(RhoTerm::from(&n).to_string(), rn.to_string());
            }
            (a, b) => prop_assert!(false, "cbv {:?} vs rho {:?}", a, b),
        }
    }

    #[test]
    fn allocation_avoids_existing_locations(v in closed_term(), w in closed_term()) {
        let m = ogspi::lambda::parse_rho(&format!("rho {{a = {v}}}. rho {{b = {w}}}. !a")).unwrap();
        let mut store = Store::new();
        let mut cur = m;
        let mut sizes = Vec::new();
        while let Some((n, s)) = step_rho(&cur, &store).unwrap() {
            prop_assert!(store.keys().all(|l| s.contains_key(l)));
            cur = n;
            store = s;
            sizes.push(store.len());
        }
        prop_assert_eq!(store.len(), 2);
        prop_assert_eq!(cur.to_string(), RhoTerm::from(&v).to_string());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn game_moves_bind_fresh_names(m in small_term()) {
        for s in reach(&Aogs, &AConfig::initial(m.clone()), 6) {
            prop_assert!(fresh_objects(&Aogs, &s));
        }
        for s in reach(&Cogs, &CConfig::initial(m.clone()), 5) {
            prop_assert!(fresh_objects(&Cogs, &s));
        }
        for s in reach(&Wbogs, &SConfig::initial(m), 6) {
            prop_assert!(fresh_objects(&Wbogs, &s));
        }
    }

    #[test]
    fn active_alternating_configurations_have_one_move(m in small_term()) {
        for s in reach(&Aogs, &AConfig::initial(m), 8) {
            let n = Aogs.step(&s, Aogs.supply(&s)).unwrap().len();
            match s {
                AConfig::Active { .. } | AConfig::Initial { .. } => prop_assert_eq!(n, 1),
                AConfig::Passive { .. } => {}
            }
        }
    }

    #[test]
    fn alternating_traces_are_the_alternating_concurrent_ones(m in small_term()) {
        let a = enumerate_traces(&Aogs, &AConfig::initial(m.clone()), 4, FUEL).unwrap();
        let c = enumerate_traces(&Cogs, &CConfig::initial(m), 4, FUEL).unwrap();
        prop_assume!(!a.divergence_suspected && !c.divergence_suspected);
        let filtered: BTreeSet<CTrace> = c.traces.into_iter().filter(alternating).collect();
        prop_assert_eq!(a.traces, filtered);
    }

    #[test]
    fn well_bracketed_traces_are_the_accepted_alternating_ones(m in small_term()) {
        for f in reach(&Aogs, &AConfig::initial(m), 3) {
            let s = SConfig::new(f.clone(), Vec::new());
            if ogspi::ogs::is_strongly_passive_a(&f) || matches!(f, AConfig::Initial { .. }) {
                let stack: Vec<TName> = full_stack(&s).unwrap().into_iter().map(TName::Free).collect();
                let wb = enumerate_traces(&Wbogs, &s, 4, FUEL).unwrap();
                let al = enumerate_traces(&Aogs, &f, 4, FUEL).unwrap();
                prop_assume!(!wb.divergence_suspected && !al.divergence_suspected);
                let accepted: BTreeSet<CTrace> = al
                    .traces
                    .into_iter()
                    .filter(|t| pushdown_accepts(t, &stack).is_some())
                    .collect();
                prop_assert_eq!(wb.traces, accepted);
            }
        }
    }

    #[test]
    fn complete_traces_end_strongly_passive(m in small_term()) {
        let f = AConfig::initial(m);
        for (t, end) in enumerate_runs(&Aogs, &f, 4, FUEL).unwrap() {
            prop_assert_eq!(is_complete_trace_a(&t, &f), is_strongly_passive_a(&end), "{:?}", t);
        }
    }

    #[test]
    fn singletons_tensor_back(m in small_term()) {
        for f in reach(&Cogs, &CConfig::initial(m), 5) {
            let parts = decompose_singletons(&f);
            if let CConfig::Running { .. } = f {
                if let Some((first, rest)) = parts.split_first() {
                    let mut acc = first.clone();
                    for g in rest {
                        acc = tensor_c(&acc, g).unwrap();
                    }
                    prop_assert_eq!(acc, f);
                }
            }
        }
    }
}

fn encoded(m: &Term, p: u32) -> Agent {
    Agent::Proc(encode_cbv(m).apply(&[Name::cont(p)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn output_prioritised_steps_are_standard_steps(m in small_term()) {
        for s in reach(&PiStd, &encoded(&m, 0), 4) {
            let floor = PiStd.supply(&s);
            let std = step_set(&PiStd, &s, floor);
            let op = step_set(&PiOp, &s, floor);
            prop_assert!(op.is_subset(&std));
            let non_input: BTreeSet<_> = PiStd
                .step(&s, floor)
                .unwrap()
                .into_iter()
                .filter(|(a, _)| !a.is_input())
                .map(|(a, s2)| (format!("{a:?}"), format!("{:?}", PiStd.key(&s2))))
                .collect();
            prop_assert!(non_input.is_subset(&op));
            prop_assert!(fresh_objects(&PiStd, &s));
        }
    }

    #[test]
    fn separated_processes_stay_separated(m in closed_term(), n in closed_term()) {
        let q = encoded(&n, 1);
        let floor = PiStd.supply(&q);
        let q = q.apply(&[]);
        for s in reach_above(&PiStd, &encoded(&m, 0), 5, floor) {
            let p = s.apply(&[]);
            prop_assert!(cannot_interact(&p, &q));
        }
    }

    #[test]
    fn separated_processes_interleave(m in closed_term(), n in closed_term()) {
        let depth = 3;
        let p = encoded(&m, 0);
        let q = encoded(&n, 1);
        let both = Agent::Proc(Process::par(vec![p.apply(&[]), q.apply(&[])]));
        let whole = enumerate_traces(&PiStd, &both, depth, FUEL).unwrap();
        prop_assume!(!whole.divergence_suspected);

        let runs_p = enumerate_runs(&PiStd, &p, depth, FUEL).unwrap();
        let runs_q = enumerate_runs(&PiStd, &q, depth, FUEL).unwrap();
        // shift the bound names of the right-hand traces apart from the left,
        // each from its binding occurrence onwards
        let shift = |t: &Vec<Action>| -> Vec<Action> {
            let mut map = HashMap::new();
            t.iter()
                .map(|a| {
                    for o in a.objects() {
                        map.insert(*o, Name::new(o.kind, o.id + 10_000));
                    }
                    a.map(&mut |n: &Name| *map.get(n).unwrap_or(n))
                })
                .collect()
        };
        let mut expected = BTreeSet::new();
        for (tp, _) in &runs_p {
            for (tq, _) in &runs_q {
                if tp.len() + tq.len() > depth {
                    continue;
                }
                for s in interleavings(tp, &shift(tq), &Interleaving::Free) {
                    expected.insert(canonical(&s));
                }
            }
        }
        prop_assert_eq!(whole.traces, expected);
    }

    #[test]
    fn encodings_respect_name_polarity(m in small_term()) {
        for f in reach(&Aogs, &AConfig::initial(m), 6) {
            if let AConfig::Initial { .. } = f {
                continue;
            }
            let proc = encode_config(&f, Variant::Plain).unwrap().apply(&[]);
            let pol = f.polarity();
            prop_assert!(proc.free_names().iter().all(|n| f.support().contains(n)));
            let (ins, outs) = proc.subject_names();
            for n in &ins {
                prop_assert_eq!(pol.get(n), Some(&Polarity::P), "input on {}", n);
            }
            for n in &outs {
                prop_assert_eq!(pol.get(n), Some(&Polarity::O), "output on {}", n);
            }
        }
    }

    #[test]
    fn encoding_distributes_over_tensor(m in small_term()) {
        for f in reach(&Cogs, &CConfig::initial(m), 5) {
            if let CConfig::Initial { .. } = f {
                continue;
            }
            let parts: Vec<Process> = decompose_singletons(&f)
                .iter()
                .map(|g| encode_cconfig(g, Variant::Plain).unwrap().apply(&[]))
                .collect();
            let whole = encode_cconfig(&f, Variant::Plain).unwrap().apply(&[]);
            prop_assert_eq!(pi::key(&whole), pi::key(&Process::par(parts)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_traces_ignore_bound_names(m in small_term(), offset in 1u32..50) {
        for (t, _) in enumerate_runs(&Aogs, &AConfig::initial(m), 4, FUEL).unwrap() {
            let bound: BTreeSet<Name> = t.iter().flat_map(|a| a.objects().to_vec()).collect();
            let mut map = HashMap::new();
            for n in &bound {
                map.insert(*n, Name::new(n.kind, n.id * 7 + 100 + offset));
            }
            let renamed: Vec<Action> = t.iter().map(|a| a.map(&mut |n: &Name| *map.get(n).unwrap_or(n))).collect();
            prop_assert_eq!(canonical(&renamed), canonical(&t));

            let free = free_subject_names(&t);
            if let Some(x) = free.iter().next() {
                let y = Name::new(x.kind, x.id + 500);
                let moved: Vec<Action> = t.iter().map(|a| a.map(&mut |n: &Name| if n == x { y } else { *n })).collect();
                prop_assert_ne!(canonical(&moved), canonical(&t));
            }
        }
    }

    #[test]
    fn witnesses_replay(m in small_term(), n in small_term()) {
        let (a, b) = (AConfig::initial(m), AConfig::initial(n));
        let v = trace_equiv(&Aogs, &a, &Aogs, &b, 3, FUEL).unwrap();
        if let Outcome::Distinguished { witness, side } = &v.outcome {
            let (yes, no) = match side {
                Side::Left => (&a, &b),
                Side::Right => (&b, &a),
            };
            prop_assert!(accepts_trace(&Aogs, yes, witness, FUEL).unwrap());
            prop_assert!(!accepts_trace(&Aogs, no, witness, FUEL).unwrap());
        }
    }

    #[test]
    fn verdicts_are_monotone_in_depth(m in small_term(), n in small_term()) {
        let (a, b) = (AConfig::initial(m), AConfig::initial(n));
        let mut prev = trace_equiv(&Aogs, &a, &Aogs, &b, 1, FUEL).unwrap();
        for d in 2..=4 {
            let v = trace_equiv(&Aogs, &a, &Aogs, &b, d, FUEL).unwrap();
            if v.is_equivalent() {
                prop_assert!(prev.is_equivalent());
            }
            if prev.is_distinguished() {
                prop_assert!(v.is_distinguished());
                prop_assert!(has_prefix(v.witness().unwrap(), prev.witness().unwrap()) || v.witness().unwrap().len() <= prev.witness().unwrap().len());
            }
            prev = v;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn up_to_composition_agrees_with_the_plain_game(m in closed_term(), n in closed_term()) {
        let (f, g) = (CConfig::initial(m), CConfig::initial(n));
        let (u, _) = bisim_upto_composition(&f, &g, 3, FUEL).unwrap();
        let b = bounded_weak_bisim(&Cogs, &f, &Cogs, &g, 3, FUEL).unwrap();
        if !u.is_inconclusive() && !b.is_inconclusive() {
            prop_assert_eq!(u.label(), b.label());
        }
    }

    #[test]
    fn suite_reports_replay(seed in 0u64..1000) {
        let p = Params { seed, count: 3, depth: 3, ..Params::default() };
        for s in ["wb-filter", "tensor-interleave"] {
            let a = run_suite(s, &p).unwrap().to_text();
            let b = run_suite(s, &Params { jobs: 3, ..p }).unwrap().to_text();
            prop_assert_eq!(a, b);
        }
    }
}
