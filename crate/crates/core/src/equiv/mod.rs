//! Bounded equivalence checking over any of the transition systems.

mod bisim;
mod enf;
mod interleave;
mod traces;
mod upto;

use std::collections::HashSet;
use std::hash::Hash;

use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{Action, CTrace};
use crate::name::{Kind, Supply};
use crate::ogs::{self, AConfig, CConfig, OgsError, SConfig};
use crate::pi::{self, Agent, PiError};

pub use bisim::{bounded_weak_bisim, bounded_weak_bisim_confluent};
pub use enf::enf_bisim;
pub use interleave::{interleavings, Interleaving};
pub use traces::{
    accepts_trace, complete_trace_equiv, enumerate_complete_traces, enumerate_runs,
    enumerate_traces, trace_equiv, TraceSet,
};
pub use upto::{bisim_upto_composition, UptoStats};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error(transparent)]
    Ogs(#[from] OgsError),
    #[error(transparent)]
    Pi(#[from] PiError),
}

/// A labelled transition system with states that can be deduplicated.
///
/// `step` draws the bound names of each transition above `floor` and the
/// names of the state, so two states stepped with the same floor agree on
/// the names they pick.
pub trait Lts {
    type State: Clone;
    type Key: Clone + Eq + Hash;

    fn name(&self) -> &'static str;
    fn key(&self, s: &Self::State) -> Self::Key;
    fn supply(&self, s: &Self::State) -> Supply;
    fn step(&self, s: &Self::State, floor: Supply) -> Result<Vec<(Action, Self::State)>, LtsError>;
    /// Endpoint of a complete trace.
    fn is_final(&self, s: &Self::State) -> bool;
    fn validate(&self, _s: &Self::State) -> Result<(), LtsError> {
        Ok(())
    }
    /// An equivalent, possibly smaller, representation of `s`.
    fn compact(&self, s: &Self::State) -> Self::State {
        s.clone()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Aogs;
#[derive(Clone, Copy, Debug, Default)]
pub struct Cogs;
#[derive(Clone, Copy, Debug, Default)]
pub struct Wbogs;
#[derive(Clone, Copy, Debug, Default)]
pub struct CbnAogs;
#[derive(Clone, Copy, Debug, Default)]
pub struct CbnCogs;
#[derive(Clone, Copy, Debug, Default)]
pub struct PiStd;
#[derive(Clone, Copy, Debug, Default)]
pub struct PiOp;

impl Lts for Aogs {
    type State = AConfig;
    type Key = AConfig;
    fn name(&self) -> &'static str {
        "aogs"
    }
    fn key(&self, s: &AConfig) -> AConfig {
        s.key()
    }
    fn supply(&self, s: &AConfig) -> Supply {
        s.supply()
    }
    fn step(&self, s: &AConfig, floor: Supply) -> Result<Vec<(Action, AConfig)>, LtsError> {
        Ok(ogs::aogs_step(s, floor))
    }
    fn is_final(&self, s: &AConfig) -> bool {
        ogs::is_strongly_passive_a(s)
    }
    fn validate(&self, s: &AConfig) -> Result<(), LtsError> {
        Ok(s.validate()?)
    }
}

impl Lts for Cogs {
    type State = CConfig;
    type Key = CConfig;
    fn name(&self) -> &'static str {
        "cogs"
    }
    fn key(&self, s: &CConfig) -> CConfig {
        s.key()
    }
    fn supply(&self, s: &CConfig) -> Supply {
        s.supply()
    }
    fn step(&self, s: &CConfig, floor: Supply) -> Result<Vec<(Action, CConfig)>, LtsError> {
        Ok(ogs::cogs_step(s, floor))
    }
    fn is_final(&self, s: &CConfig) -> bool {
        s.is_strongly_passive()
    }
    fn validate(&self, s: &CConfig) -> Result<(), LtsError> {
        Ok(s.validate()?)
    }
}

impl Lts for Wbogs {
    type State = SConfig;
    type Key = SConfig;
    fn name(&self) -> &'static str {
        "wbogs"
    }
    fn key(&self, s: &SConfig) -> SConfig {
        s.key()
    }
    fn supply(&self, s: &SConfig) -> Supply {
        let mut sup = s.config.supply();
        s.stack.iter().for_each(|n| sup.observe(*n));
        sup
    }
    fn step(&self, s: &SConfig, floor: Supply) -> Result<Vec<(Action, SConfig)>, LtsError> {
        Ok(ogs::wbogs_step(s, floor))
    }
    fn is_final(&self, s: &SConfig) -> bool {
        ogs::is_strongly_passive_s(s)
    }
    fn validate(&self, s: &SConfig) -> Result<(), LtsError> {
        Ok(s.validate()?)
    }
}

impl Lts for CbnAogs {
    type State = AConfig;
    type Key = AConfig;
    fn name(&self) -> &'static str {
        "cbn-aogs"
    }
    fn key(&self, s: &AConfig) -> AConfig {
        s.key()
    }
    fn supply(&self, s: &AConfig) -> Supply {
        s.supply()
    }
    fn step(&self, s: &AConfig, floor: Supply) -> Result<Vec<(Action, AConfig)>, LtsError> {
        Ok(ogs::cbn_alternating_step(s, floor))
    }
    fn is_final(&self, s: &AConfig) -> bool {
        ogs::is_strongly_passive_a(s)
    }
    fn validate(&self, s: &AConfig) -> Result<(), LtsError> {
        Ok(s.validate()?)
    }
}

impl Lts for CbnCogs {
    type State = CConfig;
    type Key = CConfig;
    fn name(&self) -> &'static str {
        "cbn-cogs"
    }
    fn key(&self, s: &CConfig) -> CConfig {
        s.key()
    }
    fn supply(&self, s: &CConfig) -> Supply {
        s.supply()
    }
    fn step(&self, s: &CConfig, floor: Supply) -> Result<Vec<(Action, CConfig)>, LtsError> {
        Ok(ogs::cbn_concurrent_step(s, floor))
    }
    fn is_final(&self, s: &CConfig) -> bool {
        s.is_strongly_passive()
    }
    fn validate(&self, s: &CConfig) -> Result<(), LtsError> {
        Ok(s.validate()?)
    }
}

fn pi_final(a: &Agent) -> bool {
    match a {
        Agent::Proc(p) => p.free_names().iter().all(|n| n.kind != Kind::Continuation),
        Agent::Abs(..) => false,
    }
}

impl Lts for PiStd {
    type State = Agent;
    type Key = String;
    fn name(&self) -> &'static str {
        "pi"
    }
    fn key(&self, s: &Agent) -> String {
        pi::key_agent(s)
    }
    fn supply(&self, s: &Agent) -> Supply {
        Supply::above(&s.free_names())
    }
    fn step(&self, s: &Agent, floor: Supply) -> Result<Vec<(Action, Agent)>, LtsError> {
        Ok(pi::pi_step(s, floor)?)
    }
    fn compact(&self, s: &Agent) -> Agent {
        pi::collect_agent(s)
    }
    fn is_final(&self, s: &Agent) -> bool {
        pi_final(s)
    }
}

impl Lts for PiOp {
    type State = Agent;
    type Key = String;
    fn name(&self) -> &'static str {
        "pi-op"
    }
    fn key(&self, s: &Agent) -> String {
        pi::key_agent(s)
    }
    fn supply(&self, s: &Agent) -> Supply {
        Supply::above(&s.free_names())
    }
    fn step(&self, s: &Agent, floor: Supply) -> Result<Vec<(Action, Agent)>, LtsError> {
        Ok(pi::pi_op_step(s, floor)?)
    }
    fn compact(&self, s: &Agent) -> Agent {
        pi::collect_agent(s)
    }
    fn is_final(&self, s: &Agent) -> bool {
        pi_final(s)
    }
}

// ---------------------------------------------------------------- τ-closure

/// States reachable by silent steps, with the visible steps leaving them.
pub(crate) struct Closure<S> {
    pub states: Vec<S>,
    pub visible: Vec<(Action, S)>,
    /// Some silent successor was left unexplored.
    pub clipped: bool,
}

/// Breadth-first τ-closure, at most `fuel` silent steps deep.
pub(crate) fn closure<L: Lts>(
    sys: &L,
    s: &L::State,
    fuel: usize,
    floor: Supply,
) -> Result<Closure<L::State>, LtsError> {
    let mut seen: HashSet<L::Key> = HashSet::from([sys.key(s)]);
    let mut frontier = vec![s.clone()];
    let mut out = Closure {
        states: Vec::new(),
        visible: Vec::new(),
        clipped: false,
    };
    let mut level = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for st in frontier {
            for (a, s2) in sys.step(&st, floor)? {
                if a.is_visible() {
                    out.visible.push((a, s2));
                    continue;
                }
                let k = sys.key(&s2);
                if seen.contains(&k) {
                    continue;
                }
                if level < fuel {
                    seen.insert(k);
                    next.push(s2);
                } else {
                    out.clipped = true;
                }
            }
            out.states.push(st);
        }
        frontier = next;
        level += 1;
    }
    Ok(out)
}

// ---------------------------------------------------------------- verdicts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    Fuel,
    Depth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Equivalent,
    /// `witness` is exhibited by `side` and not matched by the other.
    Distinguished {
        witness: CTrace,
        side: Side,
    },
    Inconclusive {
        reason: Reason,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub depth: usize,
    pub divergence_suspected: bool,
}

impl Verdict {
    pub fn equivalent(depth: usize, divergence_suspected: bool) -> Self {
        Verdict {
            outcome: Outcome::Equivalent,
            depth,
            divergence_suspected,
        }
    }

    pub fn distinguished(
        depth: usize,
        witness: CTrace,
        side: Side,
        divergence_suspected: bool,
    ) -> Self {
        Verdict {
            outcome: Outcome::Distinguished { witness, side },
            depth,
            divergence_suspected,
        }
    }

    pub fn inconclusive(depth: usize, reason: Reason) -> Self {
        Verdict {
            outcome: Outcome::Inconclusive { reason },
            depth,
            divergence_suspected: reason == Reason::Fuel,
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self.outcome, Outcome::Equivalent)
    }

    pub fn is_distinguished(&self) -> bool {
        matches!(self.outcome, Outcome::Distinguished { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, Outcome::Inconclusive { .. })
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Equivalent => "equivalent",
            Outcome::Distinguished { .. } => "distinguished",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn witness(&self) -> Option<&CTrace> {
        match &self.outcome {
            Outcome::Distinguished { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let witness: Vec<&Action<_>> = self
            .witness()
            .map(|w| w.iter().collect())
            .unwrap_or_default();
        let mut v = json!({
            "verdict": self.label(),
            "depth": self.depth,
            "witness": witness,
            "divergence_suspected": self.divergence_suspected,
        });
        match &self.outcome {
            Outcome::Distinguished { side, .. } => v["side"] = json!(side.as_str()),
            Outcome::Inconclusive { reason } => {
                v["reason"] = json!(match reason {
                    Reason::Fuel => "fuel",
                    Reason::Depth => "depth",
                })
            }
            Outcome::Equivalent => {}
        }
        v
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.outcome {
            Outcome::Equivalent => write!(f, "equivalent up to depth {}", self.depth),
            Outcome::Distinguished { witness, side } => {
                write!(
                    f,
                    "distinguished by {} ({} side)",
                    crate::action::show_trace(witness),
                    side.as_str()
                )
            }
            Outcome::Inconclusive {
                reason: Reason::Fuel,
            } => write!(f, "inconclusive (fuel)"),
            Outcome::Inconclusive {
                reason: Reason::Depth,
            } => write!(f, "inconclusive (depth)"),
        }
    }
}
