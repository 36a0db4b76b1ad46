//! Normal forms used for state deduplication. None of this is applied to the
//! transition relation itself.

use std::collections::{BTreeSet, HashMap};

use super::lts::RES_BASE;
use super::{Agent, Chan, Process};
use crate::name::{Kind, Name};

fn uses_level(p: &Process, lvl: u32) -> bool {
    let hit = |c: &Chan| matches!(c, Chan::Bound(d, _) if *d == lvl);
    match p {
        Process::Nil => false,
        Process::In(a, _, b) | Process::Out(a, _, b) | Process::Rep(a, _, b) => {
            hit(a) || uses_level(b, lvl + 1)
        }
        Process::Res(_, b) => uses_level(b, lvl + 1),
        Process::Par(ps) => ps.iter().any(|q| uses_level(q, lvl)),
        Process::Call(_, a, b) => hit(a) || hit(b),
    }
}

/// Removes a binder that is not referenced: outer references drop a level.
fn drop_level(p: &Process, lvl: u32) -> Process {
    let f = |c: &Chan, lvl: u32| match c {
        Chan::Bound(d, i) if *d > lvl => Chan::Bound(d - 1, *i),
        c => *c,
    };
    match p {
        Process::Nil => Process::Nil,
        Process::In(a, k, b) => Process::In(f(a, lvl), k.clone(), Box::new(drop_level(b, lvl + 1))),
        Process::Out(a, k, b) => {
            Process::Out(f(a, lvl), k.clone(), Box::new(drop_level(b, lvl + 1)))
        }
        Process::Rep(a, k, b) => {
            Process::Rep(f(a, lvl), k.clone(), Box::new(drop_level(b, lvl + 1)))
        }
        Process::Res(k, b) => Process::Res(*k, Box::new(drop_level(b, lvl + 1))),
        Process::Par(ps) => Process::Par(ps.iter().map(|q| drop_level(q, lvl)).collect()),
        Process::Call(c, a, b) => Process::Call(*c, f(a, lvl), f(b, lvl)),
    }
}

/// Drops `0` components, flattens parallel compositions and removes unused
/// restrictions.
pub fn normalize(p: &Process) -> Process {
    match p {
        Process::Nil | Process::Call(..) => p.clone(),
        Process::In(a, k, b) => Process::In(*a, k.clone(), Box::new(normalize(b))),
        Process::Out(a, k, b) => Process::Out(*a, k.clone(), Box::new(normalize(b))),
        Process::Rep(a, k, b) => Process::Rep(*a, k.clone(), Box::new(normalize(b))),
        Process::Res(k, b) => {
            let b = normalize(b);
            if uses_level(&b, 0) {
                Process::Res(*k, Box::new(b))
            } else {
                drop_level(&b, 0)
            }
        }
        Process::Par(ps) => Process::par(ps.iter().map(normalize).collect()),
    }
}

/// Drops the top-level components that can never fire, as in keys, and
/// returns an equivalent process.
pub fn collect(p: &Process) -> Process {
    let mut cx = KeyCx {
        next: 0,
        labels: HashMap::new(),
    };
    let mut restricted = Vec::new();
    let mut comps = Vec::new();
    flatten(p, &mut cx, &mut restricted, &mut comps);
    collect_garbage(&restricted, &mut comps);
    normalize(&Process::res_all(&restricted, Process::par(comps)))
}

pub fn collect_agent(a: &Agent) -> Agent {
    match a {
        Agent::Proc(p) => Agent::Proc(collect(p)),
        a => a.clone(),
    }
}

// ---------------------------------------------------------------- keys

const MARK_OPEN: char = '\u{1}';
const MARK_CLOSE: char = '\u{2}';

struct KeyCx {
    next: u32,
    labels: HashMap<Name, String>,
}

impl KeyCx {
    fn fresh(&mut self, k: Kind) -> Name {
        self.next += 1;
        Name::new(k, RES_BASE + self.next)
    }

    fn name(&self, n: Name) -> String {
        if let Some(l) = self.labels.get(&n) {
            return l.clone();
        }
        if n.id >= RES_BASE {
            format!("{MARK_OPEN}{}{MARK_CLOSE}", n.id)
        } else {
            n.to_string()
        }
    }
}

fn chan_name(c: &Chan) -> Name {
    match c {
        Chan::Free(n) => *n,
        Chan::Bound(..) => unreachable!("keys are computed on opened processes"),
    }
}

fn flatten(p: &Process, cx: &mut KeyCx, restricted: &mut Vec<Name>, comps: &mut Vec<Process>) {
    match p {
        Process::Nil => {}
        Process::Par(ps) => ps.iter().for_each(|q| flatten(q, cx, restricted, comps)),
        Process::Res(k, b) => {
            let n = cx.fresh(*k);
            restricted.push(n);
            flatten(&Process::open(b, &[n]), cx, restricted, comps);
        }
        q => comps.push(q.clone()),
    }
}

/// Input servers on restricted names nobody sends on, and outputs on
/// restricted names nobody listens to, can never fire.
fn collect_garbage(restricted: &[Name], comps: &mut Vec<Process>) {
    loop {
        let mut ins = BTreeSet::new();
        let mut outs = BTreeSet::new();
        for c in comps.iter() {
            let (i, o) = c.subject_names();
            ins.extend(i);
            outs.extend(o);
        }
        let dead = |c: &Process| match c {
            Process::In(a, ..) | Process::Rep(a, ..) | Process::Call(_, a, _) => {
                let n = chan_name(a);
                restricted.contains(&n) && !outs.contains(&n)
            }
            Process::Out(a, ..) => {
                let n = chan_name(a);
                restricted.contains(&n) && !ins.contains(&n)
            }
            _ => false,
        };
        let before = comps.len();
        comps.retain(|c| !dead(c));
        if comps.len() == before {
            return;
        }
    }
}

fn kinds_str(k: &[Kind]) -> String {
    k.iter().map(|k| k.letter()).collect()
}

fn render_prefix(
    tag: &str,
    a: &Chan,
    kinds: &[Kind],
    body: &Process,
    level: usize,
    cx: &mut KeyCx,
) -> String {
    let params: Vec<Name> = kinds.iter().map(|k| cx.fresh(*k)).collect();
    for (i, n) in params.iter().enumerate() {
        cx.labels.insert(*n, format!("b{level}.{i}"));
    }
    let inner = key_at(&Process::open(body, &params), level + 1, cx);
    for n in &params {
        cx.labels.remove(n);
    }
    format!(
        "{tag}{}({}).{{{inner}}}",
        cx.name(chan_name(a)),
        kinds_str(kinds)
    )
}

fn render(p: &Process, level: usize, cx: &mut KeyCx) -> String {
    match p {
        Process::In(a, k, b) => render_prefix("", a, k, b, level, cx),
        Process::Out(a, k, b) => render_prefix("^", a, k, b, level, cx),
        Process::Rep(a, k, b) => render_prefix("!", a, k, b, level, cx),
        Process::Call(c, a, b) => format!(
            "{}({},{})",
            c.name(),
            cx.name(chan_name(a)),
            cx.name(chan_name(b))
        ),
        Process::Nil | Process::Par(_) | Process::Res(..) => unreachable!("flattened"),
    }
}

/// Rewrites the markers of `mine` with `f`, leaving other markers alone.
fn replace_marks(
    s: &str,
    mine: &HashMap<u32, usize>,
    f: &mut dyn FnMut(usize) -> String,
) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find(MARK_OPEN) {
        out.push_str(&rest[..i]);
        let j = rest[i..].find(MARK_CLOSE).unwrap() + i;
        let id: u32 = rest[i + 1..j].parse().unwrap();
        match mine.get(&id) {
            Some(idx) => out.push_str(&f(*idx)),
            None => out.push_str(&rest[i..=j]),
        }
        rest = &rest[j + 1..];
    }
    out.push_str(rest);
    out
}

fn key_at(p: &Process, level: usize, cx: &mut KeyCx) -> String {
    let mut restricted = Vec::new();
    let mut comps = Vec::new();
    flatten(p, cx, &mut restricted, &mut comps);
    collect_garbage(&restricted, &mut comps);
    let rendered: Vec<String> = comps.iter().map(|c| render(c, level, cx)).collect();
    let mine: HashMap<u32, usize> = restricted
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id, i))
        .collect();
    let mut sorted: Vec<(String, String)> = rendered
        .into_iter()
        .map(|r| (replace_marks(&r, &mine, &mut |_| "*".into()), r))
        .collect();
    sorted.sort();
    // restricted names are numbered by first occurrence in the sorted order
    let mut order: HashMap<usize, usize> = HashMap::new();
    let mut kinds = Vec::new();
    let mut parts = Vec::new();
    for (_, r) in &sorted {
        parts.push(replace_marks(r, &mine, &mut |idx| {
            let next = order.len();
            let i = *order.entry(idx).or_insert_with(|| {
                kinds.push(restricted[idx].kind.letter());
                next
            });
            format!("r{level}.{i}")
        }));
    }
    let body = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" | ")
    };
    if kinds.is_empty() {
        body
    } else {
        format!("nu[{}]({body})", kinds.into_iter().collect::<String>())
    }
}

/// A string identifying `p` up to α-conversion, the monoid laws of `|`,
/// scope extrusion and removal of unreachable components.
pub fn key(p: &Process) -> String {
    key_at(
        p,
        0,
        &mut KeyCx {
            next: 0,
            labels: HashMap::new(),
        },
    )
}

pub fn key_agent(a: &Agent) -> String {
    match a {
        Agent::Proc(p) => key(p),
        Agent::Abs(kinds, body) => {
            let mut cx = KeyCx {
                next: 0,
                labels: HashMap::new(),
            };
            let params: Vec<Name> = kinds.iter().map(|k| cx.fresh(*k)).collect();
            for (i, n) in params.iter().enumerate() {
                cx.labels.insert(*n, format!("a.{i}"));
            }
            format!(
                "({}).{}",
                kinds_str(kinds),
                key_at(&Process::open(body, &params), 0, &mut cx)
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::Const;

    #[test]
    fn normalize_examples() {
        let (a, y) = (Name::var(0), Name::var(1));
        let p = Process::output(a, &[y], Process::Nil);
        assert_eq!(normalize(&Process::Par(vec![p.clone(), Process::Nil])), p);
        assert_eq!(normalize(&Process::res(a, Process::Nil)), Process::Nil);
    }

    #[test]
    fn keys_ignore_order_and_alpha() {
        let (a, b, x) = (Name::var(0), Name::var(1), Name::var(7));
        let p = Process::par(vec![
            Process::input(a, &[x], Process::Nil),
            Process::output(b, &[x], Process::Nil),
        ]);
        let q = Process::par(vec![
            Process::output(b, &[Name::var(9)], Process::Nil),
            Process::input(a, &[Name::var(3)], Process::Nil),
        ]);
        assert_eq!(key(&p), key(&q));
        assert_ne!(key(&p), key(&Process::input(a, &[x], Process::Nil)));
    }

    #[test]
    fn dead_servers_are_dropped() {
        let (c, d) = (Name::var(5), Name::var(6));
        let p = Process::res(
            c,
            Process::par(vec![Process::call(Const::Fx, c, d), Process::Nil]),
        );
        assert_eq!(key(&p), "0");
        let live = Process::res(
            c,
            Process::par(vec![
                Process::call(Const::Fx, c, d),
                Process::output(c, &[Name::var(7), Name::cont(0)], Process::Nil),
            ]),
        );
        assert_ne!(key(&live), "0");
    }

    #[test]
    fn collect_keeps_the_key() {
        let (c, d, e) = (Name::var(5), Name::var(6), Name::var(7));
        let live = Process::output(e, &[Name::var(8)], Process::Nil);
        let p = Process::res(
            c,
            Process::par(vec![Process::call(Const::Fx, c, d), live.clone()]),
        );
        assert_eq!(collect(&p), live);
        assert_eq!(key(&collect(&p)), key(&p));
    }

    #[test]
    fn extrusion() {
        let (a, c, x) = (Name::var(0), Name::var(5), Name::var(7));
        let inner = Process::output(a, &[x], Process::Nil);
        let srv = |c| Process::input(c, &[x], Process::Nil);
        let p = Process::par(vec![
            inner.clone(),
            Process::res(
                c,
                Process::par(vec![srv(c), Process::output(c, &[x], Process::Nil)]),
            ),
        ]);
        let q = Process::res(
            c,
            Process::par(vec![Process::output(c, &[x], Process::Nil), srv(c), inner]),
        );
        assert_eq!(key(&p), key(&q));
    }
}
