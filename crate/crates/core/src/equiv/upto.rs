use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{closure, Cogs, LtsError, Reason, Side, Verdict};
use crate::action::{canonical, Action};
use crate::name::{Kind, Name};
use crate::ogs::{decompose_singletons, support_equivalent, CConfig, OgsError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UptoStats {
    pub memo_hits: usize,
    pub pairs: usize,
}

#[derive(Clone, Debug)]
enum Res {
    Eq,
    Dist(Vec<Action>, Side),
    Inc,
}

#[derive(Default)]
struct Entry {
    eq_depth: Option<usize>,
    dist: Option<(usize, Vec<Action>, Side)>,
}

type JointKey = (CConfig, CConfig);

struct Upto {
    fuel: usize,
    memo: HashMap<JointKey, Entry>,
    stats: UptoStats,
    clipped: bool,
}

fn all_names(f: &CConfig, out: &mut BTreeSet<Name>) {
    out.extend(f.support().iter().copied());
}

/// Renames the support names of both configurations together, per kind in
/// increasing order, so pairs differing only in their free names share a key.
fn joint_key(f: &CConfig, g: &CConfig) -> JointKey {
    let mut names = BTreeSet::new();
    all_names(f, &mut names);
    all_names(g, &mut names);
    let mut next: BTreeMap<Kind, u32> = BTreeMap::new();
    let mut map: HashMap<Name, Name> = HashMap::new();
    for n in names {
        let c = next.entry(n.kind).or_insert(0);
        map.insert(n, Name::new(n.kind, *c));
        *c += 1;
    }
    let r = |n: Name| map.get(&n).copied().unwrap_or(n);
    (f.rename(&r).key(), g.rename(&r).key())
}

impl Upto {
    fn game(&mut self, f: &CConfig, g: &CConfig, depth: usize) -> Result<Res, LtsError> {
        if depth == 0 {
            return Ok(Res::Eq);
        }
        let key = joint_key(f, g);
        if let Some(e) = self.memo.get(&key) {
            if e.eq_depth.is_some_and(|d| d >= depth) {
                self.stats.memo_hits += 1;
                return Ok(Res::Eq);
            }
            if let Some((d, w, side)) = &e.dist {
                if *d <= depth {
                    self.stats.memo_hits += 1;
                    return Ok(Res::Dist(w.clone(), *side));
                }
            }
        }
        self.stats.pairs += 1;
        let mut res = None;
        if let Some(r) = self.composed(f, g, depth)? {
            res = Some(r);
        }
        let res = match res {
            Some(r) => r,
            None => self.whole(f, g, depth)?,
        };
        let e = self.memo.entry(key).or_default();
        match &res {
            Res::Eq => e.eq_depth = Some(e.eq_depth.map_or(depth, |d| d.max(depth))),
            Res::Dist(w, side) => {
                if e.dist.as_ref().is_none_or(|(d, ..)| depth < *d) {
                    e.dist = Some((depth, w.clone(), *side));
                }
            }
            Res::Inc => {}
        }
        Ok(res)
    }

    /// Splits both sides into singletons paired by Player name. Only a
    /// positive answer is conclusive: a failing pair may still be matched
    /// by a coarser decomposition.
    fn composed(
        &mut self,
        f: &CConfig,
        g: &CConfig,
        depth: usize,
    ) -> Result<Option<Res>, LtsError> {
        let fs = decompose_singletons(f);
        let gs = decompose_singletons(g);
        if fs.len() < 2 || fs.len() != gs.len() {
            return Ok(None);
        }
        let own = |c: &CConfig| c.p_names().into_iter().next();
        let by_name: HashMap<Option<Name>, &CConfig> = gs.iter().map(|c| (own(c), c)).collect();
        let mut pairs = Vec::new();
        for c in &fs {
            match by_name.get(&own(c)) {
                Some(d) if support_equivalent(c, *d) => pairs.push((c, *d)),
                _ => return Ok(None),
            }
        }
        let mut inc = false;
        for (c, d) in pairs {
            match self.game(c, d, depth)? {
                Res::Eq => {}
                Res::Inc => inc = true,
                Res::Dist(..) => return Ok(None),
            }
        }
        Ok(if inc { None } else { Some(Res::Eq) })
    }

    fn weak_visible(
        &mut self,
        f: &CConfig,
        floor: crate::name::Supply,
    ) -> Result<(Vec<(Action, CConfig)>, bool), LtsError> {
        let cl = closure(&Cogs, f, self.fuel, floor)?;
        self.clipped |= cl.clipped;
        Ok((cl.visible, cl.clipped))
    }

    /// Visible-only game on the whole configurations, up to reduction.
    fn whole(&mut self, f: &CConfig, g: &CConfig, depth: usize) -> Result<Res, LtsError> {
        let floor = f.supply().join(g.supply());
        let (fv, fclip) = self.weak_visible(f, floor)?;
        let (gv, gclip) = self.weak_visible(g, floor)?;
        let mut inc = fclip || gclip;
        for (challenger, mine, theirs, their_clip, side) in [
            (0, &fv, &gv, gclip, Side::Left),
            (1, &gv, &fv, fclip, Side::Right),
        ] {
            for (a, c1) in mine.iter() {
                let mut answered = false;
                let mut child_inc = their_clip;
                let mut best: Option<Vec<Action>> = None;
                for (b, c2) in theirs.iter() {
                    if a != b {
                        continue;
                    }
                    let r = if challenger == 0 {
                        self.game(c1, c2, depth - 1)?
                    } else {
                        self.game(c2, c1, depth - 1)?
                    };
                    match r {
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
                if child_inc {
                    inc = true;
                    continue;
                }
                let mut w = best.unwrap_or_default();
                w.insert(0, a.clone());
                return Ok(Res::Dist(w, side));
            }
        }
        Ok(if inc { Res::Inc } else { Res::Eq })
    }
}

/// Bounded singleton bisimulation up to composition on concurrent
/// configurations: after each matched visible step the game continues on
/// the Player-name-indexed components when they can be matched, and on the
/// whole configurations otherwise.
pub fn bisim_upto_composition(
    f: &CConfig,
    g: &CConfig,
    depth: usize,
    fuel: usize,
) -> Result<(Verdict, UptoStats), LtsError> {
    f.validate()?;
    g.validate()?;
    if !support_equivalent(f, g) {
        return Err(OgsError::IncompatibleConfigurations("the supports differ".into()).into());
    }
    let mut u = Upto {
        fuel,
        memo: HashMap::new(),
        stats: UptoStats::default(),
        clipped: false,
    };
    let mut last = Res::Eq;
    for d in 1..=depth {
        last = u.game(f, g, d)?;
        if !matches!(last, Res::Eq) {
            break;
        }
    }
    let v = match last {
        Res::Eq => Verdict::equivalent(depth, u.clipped),
        Res::Dist(w, side) => Verdict::distinguished(depth, canonical(&w), side, u.clipped),
        Res::Inc => Verdict::inconclusive(depth, Reason::Fuel),
    };
    Ok((v, u.stats))
}
