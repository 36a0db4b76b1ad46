use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::action::Polarity;
use crate::lambda::{EvalContext, Term};
use crate::name::{Kind, Name, Supply};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OgsError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("no continuation entry for {0}")]
    MissingContinuationEntry(Name),
    #[error("incompatible configurations: {0}")]
    IncompatibleConfigurations(String),
    #[error("stack is not an interleaving of the component stacks")]
    InvalidInterleaving,
}

fn invalid(msg: impl Into<String>) -> OgsError {
    OgsError::InvalidConfiguration(msg.into())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum EnvEntry {
    /// A value given to Opponent (CBV variable, CBN value name).
    Value(Term),
    /// A pending context and the continuation it returns to.
    Cont(EvalContext, Name),
    /// A CBN argument, re-evaluated on every call.
    Thunk(Term),
}

impl EnvEntry {
    pub fn free_names(&self) -> BTreeSet<Name> {
        match self {
            EnvEntry::Value(t) | EnvEntry::Thunk(t) => t.free_vars(),
            EnvEntry::Cont(e, p) => {
                let mut s = e.free_vars();
                s.insert(*p);
                s
            }
        }
    }

    fn canonical(&self) -> EnvEntry {
        match self {
            EnvEntry::Value(t) => EnvEntry::Value(t.canonical()),
            EnvEntry::Thunk(t) => EnvEntry::Thunk(t.canonical()),
            EnvEntry::Cont(e, p) => EnvEntry::Cont(e.canonical(), *p),
        }
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> EnvEntry {
        match self {
            EnvEntry::Value(t) => EnvEntry::Value(t.rename(f)),
            EnvEntry::Thunk(t) => EnvEntry::Thunk(t.rename(f)),
            EnvEntry::Cont(e, p) => EnvEntry::Cont(e.rename(f), f(*p)),
        }
    }
}

/// Ordered environment; equality and hashing ignore the order.
#[derive(Clone, Default, Debug)]
pub struct Env {
    entries: Vec<(Name, EnvEntry)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn from_entries(entries: Vec<(Name, EnvEntry)>) -> Self {
        Env { entries }
    }

    pub fn push(&mut self, n: Name, e: EnvEntry) {
        self.entries.push((n, e));
    }

    pub fn with(mut self, n: Name, e: EnvEntry) -> Self {
        self.push(n, e);
        self
    }

    pub fn get(&self, n: Name) -> Option<&EnvEntry> {
        self.entries.iter().find(|(a, _)| *a == n).map(|(_, e)| e)
    }

    pub fn remove(&mut self, n: Name) -> Option<EnvEntry> {
        let i = self.entries.iter().position(|(a, _)| *a == n)?;
        Some(self.entries.remove(i).1)
    }

    pub fn without(&self, n: Name) -> Env {
        let mut e = self.clone();
        e.remove(n);
        e
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, EnvEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dom(&self) -> BTreeSet<Name> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    /// Continuation structure: pairs `(q, p)` with `γ(q) = (_, p)`.
    pub fn cs(&self) -> BTreeSet<(Name, Name)> {
        self.entries
            .iter()
            .filter_map(|(q, e)| match e {
                EnvEntry::Cont(_, p) => Some((*q, *p)),
                _ => None,
            })
            .collect()
    }

    pub fn concat(&self, other: &Env) -> Env {
        let mut e = self.clone();
        e.entries.extend(other.entries.iter().cloned());
        e
    }

    fn sorted(&self) -> Vec<&(Name, EnvEntry)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort();
        v
    }

    pub fn canonical(&self) -> Env {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|(n, e)| (*n, e.canonical()))
            .collect();
        entries.sort();
        Env { entries }
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> Env {
        Env {
            entries: self
                .entries
                .iter()
                .map(|(n, e)| (f(*n), e.rename(f)))
                .collect(),
        }
    }

    fn observe(&self, s: &mut Supply) {
        for (n, e) in &self.entries {
            s.observe(*n);
            for m in e.free_names() {
                s.observe(m);
            }
        }
    }
}

impl PartialEq for Env {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len() && self.sorted() == other.sorted()
    }
}

impl Eq for Env {}

impl Hash for Env {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sorted().hash(state);
    }
}

pub type Support = BTreeSet<Name>;

/// Alternating configurations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AConfig {
    Initial {
        term: Term,
        support: Support,
    },
    Active {
        term: Term,
        cont: Name,
        env: Env,
        support: Support,
    },
    Passive {
        env: Env,
        support: Support,
    },
}

/// Concurrent configurations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CConfig {
    Initial {
        term: Term,
        support: Support,
    },
    Running {
        threads: Threads,
        env: Env,
        support: Support,
    },
}

/// Running terms indexed by continuation name; equality ignores order.
#[derive(Clone, Default, Debug)]
pub struct Threads(pub Vec<(Name, Term)>);

impl Threads {
    fn sorted(&self) -> Vec<&(Name, Term)> {
        let mut v: Vec<_> = self.0.iter().collect();
        v.sort();
        v
    }
    pub fn dom(&self) -> BTreeSet<Name> {
        self.0.iter().map(|(n, _)| *n).collect()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl PartialEq for Threads {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.sorted() == other.sorted()
    }
}
impl Eq for Threads {}
impl Hash for Threads {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sorted().hash(state);
    }
}

/// Stacked configuration of the well-bracketed game; the stack is top first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SConfig {
    pub config: AConfig,
    pub stack: Vec<Name>,
}

fn term_names(t: &Term, s: &mut Supply) {
    for n in t.free_vars() {
        s.observe(n);
    }
}

/// Builds the polarity function from Player names, the support and the
/// available continuation names.
fn polarity_of(
    p_names: &BTreeSet<Name>,
    support: &Support,
    avail_conts: &BTreeSet<Name>,
) -> BTreeMap<Name, Polarity> {
    let mut m = BTreeMap::new();
    for n in support {
        if p_names.contains(n) {
            m.insert(*n, Polarity::P);
        } else if n.kind != Kind::Continuation || avail_conts.contains(n) {
            m.insert(*n, Polarity::O);
        }
    }
    m
}

fn check_o_names(
    what: &str,
    names: &BTreeSet<Name>,
    pol: &BTreeMap<Name, Polarity>,
) -> Result<(), OgsError> {
    for n in names {
        if pol.get(n) != Some(&Polarity::O) {
            return Err(invalid(format!("{n} in {what} is not an Opponent name")));
        }
    }
    Ok(())
}

fn check_env(env: &Env, support: &Support, pol: &BTreeMap<Name, Polarity>) -> Result<(), OgsError> {
    let mut seen = BTreeSet::new();
    for (n, e) in env.iter() {
        if !seen.insert(*n) {
            return Err(invalid(format!("{n} bound twice in the environment")));
        }
        if !support.contains(n) {
            return Err(invalid(format!("{n} is not in the support")));
        }
        let ok_kind = match e {
            EnvEntry::Value(_) => n.kind != Kind::Continuation,
            EnvEntry::Thunk(_) => n.kind == Kind::Variable,
            EnvEntry::Cont(_, p) => n.kind == Kind::Continuation && p.kind == Kind::Continuation,
        };
        if !ok_kind {
            return Err(invalid(format!("entry for {n} has the wrong kind")));
        }
        check_o_names(&format!("the entry of {n}"), &e.free_names(), pol)?;
    }
    Ok(())
}

impl AConfig {
    pub fn initial(term: Term) -> AConfig {
        let support = term.free_vars();
        AConfig::Initial { term, support }
    }

    pub fn support(&self) -> &Support {
        match self {
            AConfig::Initial { support, .. }
            | AConfig::Active { support, .. }
            | AConfig::Passive { support, .. } => support,
        }
    }

    pub fn env(&self) -> Option<&Env> {
        match self {
            AConfig::Initial { .. } => None,
            AConfig::Active { env, .. } | AConfig::Passive { env, .. } => Some(env),
        }
    }

    pub fn is_active(&self) -> bool {
        matches!(self, AConfig::Active { .. })
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, AConfig::Passive { .. })
    }

    pub fn empty() -> AConfig {
        AConfig::Passive {
            env: Env::new(),
            support: Support::new(),
        }
    }

    pub fn p_names(&self) -> BTreeSet<Name> {
        self.env().map(Env::dom).unwrap_or_default()
    }

    /// Continuation names still in play: the toplevel one and those of the
    /// continuation structure.
    pub fn available_conts(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        if let AConfig::Active { cont, .. } = self {
            s.insert(*cont);
        }
        if let Some(env) = self.env() {
            for (q, p) in env.cs() {
                s.insert(q);
                s.insert(p);
            }
        }
        s
    }

    pub fn polarity(&self) -> BTreeMap<Name, Polarity> {
        polarity_of(&self.p_names(), self.support(), &self.available_conts())
    }

    pub fn cs(&self) -> BTreeSet<(Name, Name)> {
        self.env().map(Env::cs).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), OgsError> {
        let pol = self.polarity();
        match self {
            AConfig::Initial { term, .. } => check_o_names("the term", &term.free_vars(), &pol),
            AConfig::Active {
                term,
                cont,
                env,
                support,
            } => {
                if cont.kind != Kind::Continuation || !support.contains(cont) {
                    return Err(invalid(format!("bad toplevel continuation {cont}")));
                }
                check_o_names("the term", &term.free_vars(), &pol)?;
                check_o_names("the toplevel", &BTreeSet::from([*cont]), &pol)?;
                check_env(env, support, &pol)
            }
            AConfig::Passive { env, support } => check_env(env, support, &pol),
        }
    }

    pub fn supply(&self) -> Supply {
        let mut s = Supply::above(self.support());
        match self {
            AConfig::Initial { term, .. } => term_names(term, &mut s),
            AConfig::Active {
                term, env, cont, ..
            } => {
                term_names(term, &mut s);
                s.observe(*cont);
                env.observe(&mut s);
            }
            AConfig::Passive { env, .. } => env.observe(&mut s),
        }
        s
    }

    /// Alpha-normal representative used as a memo key.
    pub fn key(&self) -> AConfig {
        match self {
            AConfig::Initial { term, support } => AConfig::Initial {
                term: term.canonical(),
                support: support.clone(),
            },
            AConfig::Active {
                term,
                cont,
                env,
                support,
            } => AConfig::Active {
                term: term.canonical(),
                cont: *cont,
                env: env.canonical(),
                support: support.clone(),
            },
            AConfig::Passive { env, support } => AConfig::Passive {
                env: env.canonical(),
                support: support.clone(),
            },
        }
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> AConfig {
        let sup = |s: &Support| s.iter().map(|n| f(*n)).collect();
        match self {
            AConfig::Initial { term, support } => AConfig::Initial {
                term: term.rename(f),
                support: sup(support),
            },
            AConfig::Active {
                term,
                cont,
                env,
                support,
            } => AConfig::Active {
                term: term.rename(f),
                cont: f(*cont),
                env: env.rename(f),
                support: sup(support),
            },
            AConfig::Passive { env, support } => AConfig::Passive {
                env: env.rename(f),
                support: sup(support),
            },
        }
    }
}

impl CConfig {
    pub fn initial(term: Term) -> CConfig {
        let support = term.free_vars();
        CConfig::Initial { term, support }
    }

    pub fn empty() -> CConfig {
        CConfig::Running {
            threads: Threads::default(),
            env: Env::new(),
            support: Support::new(),
        }
    }

    pub fn support(&self) -> &Support {
        match self {
            CConfig::Initial { support, .. } | CConfig::Running { support, .. } => support,
        }
    }

    pub fn threads(&self) -> &[(Name, Term)] {
        match self {
            CConfig::Initial { .. } => &[],
            CConfig::Running { threads, .. } => &threads.0,
        }
    }

    pub fn env(&self) -> Option<&Env> {
        match self {
            CConfig::Initial { .. } => None,
            CConfig::Running { env, .. } => Some(env),
        }
    }

    pub fn p_names(&self) -> BTreeSet<Name> {
        let mut s = self.env().map(Env::dom).unwrap_or_default();
        s.extend(self.threads().iter().map(|(p, _)| *p));
        s
    }

    pub fn available_conts(&self) -> BTreeSet<Name> {
        let mut s: BTreeSet<Name> = self.threads().iter().map(|(p, _)| *p).collect();
        for (q, p) in self.cs() {
            s.insert(q);
            s.insert(p);
        }
        s
    }

    pub fn cs(&self) -> BTreeSet<(Name, Name)> {
        self.env().map(Env::cs).unwrap_or_default()
    }

    pub fn polarity(&self) -> BTreeMap<Name, Polarity> {
        polarity_of(&self.p_names(), self.support(), &self.available_conts())
    }

    pub fn validate(&self) -> Result<(), OgsError> {
        let pol = self.polarity();
        match self {
            CConfig::Initial { term, .. } => check_o_names("the term", &term.free_vars(), &pol),
            CConfig::Running {
                threads,
                env,
                support,
            } => {
                let mut seen = BTreeSet::new();
                for (p, t) in &threads.0 {
                    if p.kind != Kind::Continuation || !support.contains(p) || !seen.insert(*p) {
                        return Err(invalid(format!("bad thread name {p}")));
                    }
                    if env.get(*p).is_some() {
                        return Err(invalid(format!(
                            "{p} is both a thread and an environment entry"
                        )));
                    }
                    check_o_names(&format!("the thread {p}"), &t.free_vars(), &pol)?;
                }
                check_env(env, support, &pol)
            }
        }
    }

    pub fn supply(&self) -> Supply {
        let mut s = Supply::above(self.support());
        match self {
            CConfig::Initial { term, .. } => term_names(term, &mut s),
            CConfig::Running { threads, env, .. } => {
                for (p, t) in &threads.0 {
                    s.observe(*p);
                    term_names(t, &mut s);
                }
                env.observe(&mut s);
            }
        }
        s
    }

    pub fn key(&self) -> CConfig {
        match self {
            CConfig::Initial { term, support } => CConfig::Initial {
                term: term.canonical(),
                support: support.clone(),
            },
            CConfig::Running {
                threads,
                env,
                support,
            } => {
                let mut ts: Vec<_> = threads.0.iter().map(|(p, t)| (*p, t.canonical())).collect();
                ts.sort();
                CConfig::Running {
                    threads: Threads(ts),
                    env: env.canonical(),
                    support: support.clone(),
                }
            }
        }
    }

    pub fn rename(&self, f: &dyn Fn(Name) -> Name) -> CConfig {
        let sup = |s: &Support| s.iter().map(|n| f(*n)).collect();
        match self {
            CConfig::Initial { term, support } => CConfig::Initial {
                term: term.rename(f),
                support: sup(support),
            },
            CConfig::Running {
                threads,
                env,
                support,
            } => CConfig::Running {
                threads: Threads(
                    threads
                        .0
                        .iter()
                        .map(|(p, t)| (f(*p), t.rename(f)))
                        .collect(),
                ),
                env: env.rename(f),
                support: sup(support),
            },
        }
    }

    /// Strongly passive: no running term and empty continuation structure.
    pub fn is_strongly_passive(&self) -> bool {
        match self {
            CConfig::Initial { .. } => false,
            CConfig::Running { threads, env, .. } => threads.is_empty() && env.cs().is_empty(),
        }
    }
}

impl From<&AConfig> for CConfig {
    fn from(a: &AConfig) -> CConfig {
        match a {
            AConfig::Initial { term, support } => CConfig::Initial {
                term: term.clone(),
                support: support.clone(),
            },
            AConfig::Active {
                term,
                cont,
                env,
                support,
            } => CConfig::Running {
                threads: Threads(vec![(*cont, term.clone())]),
                env: env.clone(),
                support: support.clone(),
            },
            AConfig::Passive { env, support } => CConfig::Running {
                threads: Threads::default(),
                env: env.clone(),
                support: support.clone(),
            },
        }
    }
}

impl SConfig {
    pub fn new(config: AConfig, stack: Vec<Name>) -> SConfig {
        SConfig { config, stack }
    }

    pub fn initial(term: Term) -> SConfig {
        SConfig {
            config: AConfig::initial(term),
            stack: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), OgsError> {
        self.config.validate()?;
        let dom = self.config.p_names();
        let mut seen = BTreeSet::new();
        for q in &self.stack {
            if !dom.contains(q) || q.kind != Kind::Continuation {
                return Err(invalid(format!("stack name {q} has no continuation entry")));
            }
            if !seen.insert(*q) {
                return Err(invalid(format!("stack name {q} repeated")));
            }
        }
        Ok(())
    }

    pub fn key(&self) -> SConfig {
        SConfig {
            config: self.config.key(),
            stack: self.stack.clone(),
        }
    }

    pub fn erase(&self) -> &AConfig {
        &self.config
    }
}

pub fn is_strongly_passive_a(f: &AConfig) -> bool {
    matches!(f, AConfig::Passive { env, .. } if env.cs().is_empty())
}

pub fn is_strongly_passive_s(f: &SConfig) -> bool {
    f.config.is_passive() && f.stack.is_empty()
}

// ------------------------------------------------------------- printing

fn fmt_entries(f: &mut fmt::Formatter<'_>, first: &mut bool, n: Name, e: &EnvEntry) -> fmt::Result {
    if !*first {
        f.write_str(" ; ")?;
    }
    *first = false;
    match e {
        EnvEntry::Value(t) | EnvEntry::Thunk(t) => write!(f, "{n} |-> {t}"),
        EnvEntry::Cont(c, p) => write!(f, "{n} |-> ({c}, {p})"),
    }
}

fn fmt_names(
    f: &mut fmt::Formatter<'_>,
    label: &str,
    names: &mut dyn Iterator<Item = &Name>,
) -> fmt::Result {
    let v: Vec<String> = names.map(|n| n.to_string()).collect();
    write!(f, " | {label}: {}", v.join(", "))
}

impl fmt::Display for AConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        match self {
            AConfig::Initial { term, .. } => write!(f, "{term}")?,
            AConfig::Active {
                term, cont, env, ..
            } => {
                write!(f, "{cont} |-> {term}")?;
                let mut first = false;
                for (n, e) in env.iter() {
                    fmt_entries(f, &mut first, *n, e)?;
                }
            }
            AConfig::Passive { env, .. } => {
                let mut first = true;
                for (n, e) in env.iter() {
                    fmt_entries(f, &mut first, *n, e)?;
                }
            }
        }
        fmt_names(f, "names", &mut self.support().iter())?;
        f.write_str(">")
    }
}

impl fmt::Display for CConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        match self {
            CConfig::Initial { term, .. } => write!(f, "{term}")?,
            CConfig::Running { threads, env, .. } => {
                let mut first = true;
                for (p, t) in &threads.0 {
                    if !first {
                        f.write_str(" ; ")?;
                    }
                    first = false;
                    write!(f, "{p} |-> {t}")?;
                }
                for (n, e) in env.iter() {
                    fmt_entries(f, &mut first, *n, e)?;
                }
            }
        }
        fmt_names(f, "names", &mut self.support().iter())?;
        f.write_str(">")
    }
}

impl fmt::Display for SConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.config.to_string();
        let body = &s[..s.len() - 1];
        let stack: Vec<String> = self.stack.iter().map(|n| n.to_string()).collect();
        write!(f, "{body} | stack: {}>", stack.join(", "))
    }
}
