use std::collections::HashMap;
use std::rc::Rc;

use super::{closure, Closure, Lts, LtsError, Reason, Side, Verdict};
use crate::action::{canonical, Action};
use crate::name::Supply;

#[derive(Clone, Debug)]
enum Res {
    Eq,
    /// Challenges played, the side of the first visible one.
    Dist(Vec<Action>, Side),
    Inc,
}

struct Out {
    res: Res,
    /// Lowest stack index of an in-progress pair assumed equivalent.
    low: usize,
}

const NONE: usize = usize::MAX;

fn merge_dist(acc: &mut Option<(Vec<Action>, Side)>, w: Vec<Action>, side: Side) {
    let better = match acc {
        None => true,
        Some((old, _)) => w.len() < old.len(),
    };
    if better {
        *acc = Some((w, side));
    }
}

struct Game<'a, A: Lts, B: Lts> {
    a: &'a A,
    b: &'a B,
    fuel: usize,
    memo: HashMap<(A::Key, B::Key, usize), Res>,
    active: HashMap<(A::Key, B::Key, usize), usize>,
    closures_a: HashMap<(A::Key, Supply), Rc<Closure<A::State>>>,
    closures_b: HashMap<(B::Key, Supply), Rc<Closure<B::State>>>,
    clipped: bool,
}

impl<A: Lts, B: Lts> Game<'_, A, B> {
    fn closure_a(
        &mut self,
        s: &A::State,
        floor: Supply,
    ) -> Result<Rc<Closure<A::State>>, LtsError> {
        let k = (self.a.key(s), floor);
        if let Some(c) = self.closures_a.get(&k) {
            return Ok(c.clone());
        }
        let c = Rc::new(closure(self.a, s, self.fuel, floor)?);
        self.clipped |= c.clipped;
        self.closures_a.insert(k, c.clone());
        Ok(c)
    }

    fn closure_b(
        &mut self,
        t: &B::State,
        floor: Supply,
    ) -> Result<Rc<Closure<B::State>>, LtsError> {
        let k = (self.b.key(t), floor);
        if let Some(c) = self.closures_b.get(&k) {
            return Ok(c.clone());
        }
        let c = Rc::new(closure(self.b, t, self.fuel, floor)?);
        self.clipped |= c.clipped;
        self.closures_b.insert(k, c.clone());
        Ok(c)
    }

    fn play(
        &mut self,
        s: &A::State,
        t: &B::State,
        depth: usize,
        taus: usize,
    ) -> Result<Out, LtsError> {
        if depth == 0 {
            return Ok(Out {
                res: Res::Eq,
                low: NONE,
            });
        }
        let key = (self.a.key(s), self.b.key(t), depth);
        if let Some(r) = self.memo.get(&key) {
            return Ok(Out {
                res: r.clone(),
                low: NONE,
            });
        }
        if let Some(&idx) = self.active.get(&key) {
            return Ok(Out {
                res: Res::Eq,
                low: idx,
            });
        }
        let idx = self.active.len();
        self.active.insert(key.clone(), idx);
        let r = self.challenges(s, t, depth, taus);
        self.active.remove(&key);
        let out = r?;
        match out.res {
            Res::Dist(..) => {
                self.memo.insert(key, out.res.clone());
                Ok(Out {
                    res: out.res,
                    low: NONE,
                })
            }
            Res::Eq if out.low >= idx => {
                self.memo.insert(key, Res::Eq);
                Ok(Out {
                    res: Res::Eq,
                    low: NONE,
                })
            }
            _ => Ok(out),
        }
    }

    fn challenges(
        &mut self,
        s: &A::State,
        t: &B::State,
        depth: usize,
        taus: usize,
    ) -> Result<Out, LtsError> {
        let floor = self.a.supply(s).join(self.b.supply(t));
        let mut low = NONE;
        let mut inc = false;
        let mut dist: Option<(Vec<Action>, Side)> = None;

        // left challenges, answered by the right
        for (act, s2) in self.a.step(s, floor)? {
            let cl = self.closure_b(t, floor)?;
            let mut answered = false;
            let mut child_dist: Option<(Vec<Action>, Side)> = None;
            let mut child_inc = cl.clipped;
            if act.is_tau() {
                if taus == 0 {
                    inc = true;
                    continue;
                }
                for t2 in &cl.states {
                    let o = self.play(&s2, t2, depth, taus - 1)?;
                    low = low.min(o.low);
                    match o.res {
                        Res::Eq => {
                            answered = true;
                            break;
                        }
                        Res::Dist(w, side) => merge_dist(&mut child_dist, w, side),
                        Res::Inc => child_inc = true,
                    }
                }
            } else {
                for t2 in self.answers_b(&cl, &act, floor)? {
                    let o = self.play(&s2, &t2, depth - 1, self.fuel)?;
                    low = low.min(o.low);
                    match o.res {
                        Res::Eq => {
                            answered = true;
                            break;
                        }
                        Res::Dist(w, side) => merge_dist(&mut child_dist, w, side),
                        Res::Inc => child_inc = true,
                    }
                }
            }
            if answered {
                continue;
            }
            if child_inc {
                inc = true;
                continue;
            }
            let (mut w, side) = child_dist.unwrap_or((Vec::new(), Side::Left));
            let side = if act.is_tau() { side } else { Side::Left };
            if act.is_visible() {
                w.insert(0, act);
            }
            merge_dist(&mut dist, w, side);
            break;
        }
        if let Some((w, side)) = dist {
            return Ok(Out {
                res: Res::Dist(w, side),
                low,
            });
        }

        // right challenges, answered by the left
        for (act, t2) in self.b.step(t, floor)? {
            let cl = self.closure_a(s, floor)?;
            let mut answered = false;
            let mut child_dist: Option<(Vec<Action>, Side)> = None;
            let mut child_inc = cl.clipped;
            if act.is_tau() {
                if taus == 0 {
                    inc = true;
                    continue;
                }
                for s2 in &cl.states {
                    let o = self.play(s2, &t2, depth, taus - 1)?;
                    low = low.min(o.low);
                    match o.res {
                        Res::Eq => {
                            answered = true;
                            break;
                        }
                        Res::Dist(w, side) => merge_dist(&mut child_dist, w, side),
                        Res::Inc => child_inc = true,
                    }
                }
            } else {
                for s2 in self.answers_a(&cl, &act, floor)? {
                    let o = self.play(&s2, &t2, depth - 1, self.fuel)?;
                    low = low.min(o.low);
                    match o.res {
                        Res::Eq => {
                            answered = true;
                            break;
                        }
                        Res::Dist(w, side) => merge_dist(&mut child_dist, w, side),
                        Res::Inc => child_inc = true,
                    }
                }
            }
            if answered {
                continue;
            }
            if child_inc {
                inc = true;
                continue;
            }
            let (mut w, side) = child_dist.unwrap_or((Vec::new(), Side::Right));
            let side = if act.is_tau() { side } else { Side::Right };
            if act.is_visible() {
                w.insert(0, act);
            }
            merge_dist(&mut dist, w, side);
            break;
        }
        if let Some((w, side)) = dist {
            return Ok(Out {
                res: Res::Dist(w, side),
                low,
            });
        }
        Ok(Out {
            res: if inc { Res::Inc } else { Res::Eq },
            low,
        })
    }

    /// States reached by `⇒ act ⇒`, deduplicated.
    fn answers_b(
        &mut self,
        cl: &Closure<B::State>,
        act: &Action,
        floor: Supply,
    ) -> Result<Vec<B::State>, LtsError> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (b, t1) in &cl.visible {
            if b != act {
                continue;
            }
            let after = self.closure_b(t1, floor)?;
            for t2 in &after.states {
                if seen.insert(self.b.key(t2)) {
                    out.push(t2.clone());
                }
            }
        }
        Ok(out)
    }

    fn answers_a(
        &mut self,
        cl: &Closure<A::State>,
        act: &Action,
        floor: Supply,
    ) -> Result<Vec<A::State>, LtsError> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (b, s1) in &cl.visible {
            if b != act {
                continue;
            }
            let after = self.closure_a(s1, floor)?;
            for s2 in &after.states {
                if seen.insert(self.a.key(s2)) {
                    out.push(s2.clone());
                }
            }
        }
        Ok(out)
    }
}

/// Depth-bounded weak bisimulation game: challenges are single steps,
/// answers are weak. Depth counts visible challenges; chains of silent
/// challenges are bounded by `fuel`. Depths are tried in increasing order so
/// a reported challenge sequence is as short as possible.
pub fn bounded_weak_bisim<A: Lts, B: Lts>(
    sa: &A,
    a: &A::State,
    sb: &B,
    b: &B::State,
    depth: usize,
    fuel: usize,
) -> Result<Verdict, LtsError> {
    sa.validate(a)?;
    sb.validate(b)?;
    let mut g = Game {
        a: sa,
        b: sb,
        fuel,
        memo: HashMap::new(),
        active: HashMap::new(),
        closures_a: HashMap::new(),
        closures_b: HashMap::new(),
        clipped: false,
    };
    let mut last = Res::Eq;
    for d in 1..=depth {
        last = g.play(a, b, d, fuel)?.res;
        if !matches!(last, Res::Eq) {
            break;
        }
    }
    Ok(match last {
        Res::Eq => Verdict::equivalent(depth, g.clipped),
        Res::Dist(w, side) => Verdict::distinguished(depth, canonical(&w), side, g.clipped),
        Res::Inc => Verdict::inconclusive(depth, Reason::Fuel),
    })
}

/// A state reached by following silent steps deterministically, with the
/// visible steps it offers. `normal` is false when `fuel` ran out first.
struct Normal<S> {
    key_state: S,
    visible: Vec<(Action, S)>,
    normal: bool,
}

fn normalize<L: Lts>(
    l: &L,
    s: &L::State,
    fuel: usize,
    floor: Supply,
) -> Result<Normal<L::State>, LtsError> {
    let mut cur = s.clone();
    for i in 0..=fuel {
        let mut steps = l.step(&cur, floor)?;
        match steps.iter().position(|(a, _)| a.is_tau()) {
            Some(k) if i < fuel => cur = l.compact(&steps.swap_remove(k).1),
            found => {
                steps.retain(|(a, _)| !a.is_tau());
                return Ok(Normal {
                    key_state: cur,
                    visible: steps,
                    normal: found.is_none(),
                });
            }
        }
    }
    unreachable!()
}

struct Confluent<'a, A: Lts, B: Lts> {
    a: &'a A,
    b: &'a B,
    fuel: usize,
    memo: HashMap<(A::Key, B::Key, usize), Res>,
    norm_a: HashMap<(A::Key, Supply), Rc<Normal<A::State>>>,
    norm_b: HashMap<(B::Key, Supply), Rc<Normal<B::State>>>,
    clipped: bool,
}

impl<A: Lts, B: Lts> Confluent<'_, A, B> {
    fn norm_a(&mut self, s: &A::State, floor: Supply) -> Result<Rc<Normal<A::State>>, LtsError> {
        let k = (self.a.key(s), floor);
        if let Some(n) = self.norm_a.get(&k) {
            return Ok(n.clone());
        }
        let n = Rc::new(normalize(self.a, s, self.fuel, floor)?);
        self.norm_a.insert(k, n.clone());
        Ok(n)
    }

    fn norm_b(&mut self, t: &B::State, floor: Supply) -> Result<Rc<Normal<B::State>>, LtsError> {
        let k = (self.b.key(t), floor);
        if let Some(n) = self.norm_b.get(&k) {
            return Ok(n.clone());
        }
        let n = Rc::new(normalize(self.b, t, self.fuel, floor)?);
        self.norm_b.insert(k, n.clone());
        Ok(n)
    }

    fn play(&mut self, s: &A::State, t: &B::State, depth: usize) -> Result<Res, LtsError> {
        if depth == 0 {
            return Ok(Res::Eq);
        }
        let floor = self.a.supply(s).join(self.b.supply(t));
        let ns = self.norm_a(s, floor)?;
        let nt = self.norm_b(t, floor)?;
        self.clipped |= !ns.normal || !nt.normal;
        let key = (self.a.key(&ns.key_state), self.b.key(&nt.key_state), depth);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let mut inc = false;
        let mut res = None;
        'sides: for side in [Side::Left, Side::Right] {
            let n = if side == Side::Left {
                ns.visible.len()
            } else {
                nt.visible.len()
            };
            for i in 0..n {
                let act = if side == Side::Left {
                    &ns.visible[i].0
                } else {
                    &nt.visible[i].0
                };
                let other_normal = if side == Side::Left {
                    nt.normal
                } else {
                    ns.normal
                };
                let mut answered = false;
                let mut child_inc = false;
                let mut best: Option<Vec<Action>> = None;
                let answers: Vec<usize> = if side == Side::Left {
                    (0..nt.visible.len())
                        .filter(|&j| &nt.visible[j].0 == act)
                        .collect()
                } else {
                    (0..ns.visible.len())
                        .filter(|&j| &ns.visible[j].0 == act)
                        .collect()
                };
                for j in answers {
                    let (x, y) = if side == Side::Left { (i, j) } else { (j, i) };
                    match self.play(&ns.visible[x].1, &nt.visible[y].1, depth - 1)? {
                        Res::Eq => {
                            answered = true;
                            break;
                        }
                        Res::Inc => child_inc = true,
                        Res::Dist(w, _) => {
                            if best.as_ref().is_none_or(|o| w.len() < o.len()) {
                                best = Some(w);
                            }
                        }
                    }
                }
                if answered {
                    continue;
                }
                if child_inc || (best.is_none() && !other_normal) {
                    inc = true;
                    continue;
                }
                let mut w = best.unwrap_or_default();
                w.insert(0, act.clone());
                res = Some(Res::Dist(w, side));
                break 'sides;
            }
        }
        let res = res.unwrap_or(if inc { Res::Inc } else { Res::Eq });
        self.memo.insert(key, res.clone());
        Ok(res)
    }
}

/// The bounded weak bisimulation game for systems whose silent steps are
/// confluent and inert, such as encodings of λ-terms, where internal
/// communication happens on private names with a unique receiver. Each
/// state is replaced by the end of one maximal silent run and only visible
/// steps are played. A silent run longer than `fuel` marks the verdict as
/// possibly divergent, and a challenge that such a state cannot answer is
/// inconclusive. On systems without confluent silent steps the verdict can
/// be wrong; [`bounded_weak_bisim`] makes no such assumption.
pub fn bounded_weak_bisim_confluent<A: Lts, B: Lts>(
    sa: &A,
    a: &A::State,
    sb: &B,
    b: &B::State,
    depth: usize,
    fuel: usize,
) -> Result<Verdict, LtsError> {
    sa.validate(a)?;
    sb.validate(b)?;
    let mut g = Confluent {
        a: sa,
        b: sb,
        fuel,
        memo: HashMap::new(),
        norm_a: HashMap::new(),
        norm_b: HashMap::new(),
        clipped: false,
    };
    let mut last = Res::Eq;
    for d in 1..=depth {
        last = g.play(a, b, d)?;
        if !matches!(last, Res::Eq) {
            break;
        }
    }
    Ok(match last {
        Res::Eq => Verdict::equivalent(depth, g.clipped),
        Res::Dist(w, side) => Verdict::distinguished(depth, canonical(&w), side, g.clipped),
        Res::Inc => Verdict::inconclusive(depth, Reason::Fuel),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::encode_cbv;
    use crate::equiv::{Aogs, PiStd};
    use crate::lambda::parse_cbv;
    use crate::pi::{parse_agent, Agent};

    fn enc(s: &str) -> Agent {
        encode_cbv(&parse_cbv(s).unwrap())
    }

    #[test]
    fn beta_redex() {
        let v = bounded_weak_bisim(
            &PiStd,
            &enc("(\\x. x)(\\y. y)"),
            &PiStd,
            &enc("\\y. y"),
            4,
            64,
        )
        .unwrap();
        assert!(v.is_equivalent(), "{v}");
    }

    #[test]
    fn output_versus_nil() {
        let v = bounded_weak_bisim(
            &PiStd,
            &parse_agent("a^(x). 0").unwrap(),
            &PiStd,
            &parse_agent("0").unwrap(),
            3,
            8,
        )
        .unwrap();
        assert!(v.is_distinguished());
        assert_eq!(crate::action::show_trace(v.witness().unwrap()), "x0^(_x0)");
    }

    #[test]
    fn omega_against_stuck() {
        let om = crate::ogs::AConfig::initial(parse_cbv("(\\x. x x)(\\x. x x)").unwrap());
        let stuck = crate::ogs::AConfig::initial(parse_cbv("x (\\y. y)").unwrap());
        let v = bounded_weak_bisim(&Aogs, &om, &Aogs, &stuck, 3, 16).unwrap();
        assert!(v.is_distinguished(), "{v}");
        assert_eq!(v.witness().unwrap().len(), 2);
    }

    #[test]
    fn confluent_game_agrees_on_encodings() {
        let cases = [
            ("(\\x. x)(\\y. y)", "\\y. y"),
            ("(\\x. \\y. x)(\\z. z)", "\\y. \\z. z"),
            ("\\x. x", "\\x. \\y. y"),
            ("(\\x. x x)(\\y. y)", "\\y. y"),
        ];
        for (m, n) in cases {
            let (a, b) = (enc(m), enc(n));
            for d in 1..=3 {
                let slow = bounded_weak_bisim(&PiStd, &a, &PiStd, &b, d, 32).unwrap();
                let fast = bounded_weak_bisim_confluent(&PiStd, &a, &PiStd, &b, d, 32).unwrap();
                assert_eq!(slow.outcome, fast.outcome, "{m} vs {n} at {d}");
                assert_eq!(slow.witness(), fast.witness(), "{m} vs {n} at {d}");
            }
        }
    }
}
