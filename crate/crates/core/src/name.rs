//! Kinded names and the deterministic name supply.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Variable,
    Continuation,
    ValueName,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Variable, Kind::Continuation, Kind::ValueName];

    pub fn letter(self) -> char {
        match self {
            Kind::Variable => 'x',
            Kind::Continuation => 'p',
            Kind::ValueName => 'v',
        }
    }

    fn slot(self) -> usize {
        match self {
            Kind::Variable => 0,
            Kind::Continuation => 1,
            Kind::ValueName => 2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    pub kind: Kind,
    pub id: u32,
}

impl Name {
    pub const fn new(kind: Kind, id: u32) -> Self {
        Name { kind, id }
    }
    pub const fn var(id: u32) -> Self {
        Name::new(Kind::Variable, id)
    }
    pub const fn cont(id: u32) -> Self {
        Name::new(Kind::Continuation, id)
    }
    pub const fn val(id: u32) -> Self {
        Name::new(Kind::ValueName, id)
    }

    /// Parses the rendered form `x3`, `p0`, `v12`.
    pub fn parse(s: &str) -> Option<Name> {
        let mut chars = s.chars();
        let kind = match chars.next()? {
            'x' => Kind::Variable,
            'p' => Kind::Continuation,
            'v' => Kind::ValueName,
            _ => return None,
        };
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        rest.parse().ok().map(|id| Name::new(kind, id))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.id)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Next unused id for each kind. Supplies are plain values: callers thread
/// them explicitly and two equal supplies hand out equal names.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Supply {
    next: [u32; 3],
}

impl Supply {
    pub fn new() -> Self {
        Supply::default()
    }

    /// The smallest supply whose fresh names avoid every name given.
    pub fn above<'a, I: IntoIterator<Item = &'a Name>>(names: I) -> Self {
        let mut s = Supply::default();
        for n in names {
            s.observe(*n);
        }
        s
    }

    pub fn observe(&mut self, n: Name) {
        let slot = &mut self.next[n.kind.slot()];
        if n.id >= *slot {
            *slot = n.id + 1;
        }
    }

    pub fn fresh(&mut self, kind: Kind) -> Name {
        let slot = &mut self.next[kind.slot()];
        let n = Name::new(kind, *slot);
        *slot += 1;
        n
    }

    pub fn peek(&self, kind: Kind) -> Name {
        Name::new(kind, self.next[kind.slot()])
    }

    /// Pointwise maximum.
    pub fn join(self, other: Supply) -> Supply {
        let mut next = self.next;
        for (a, b) in next.iter_mut().zip(other.next) {
            *a = (*a).max(b);
        }
        Supply { next }
    }
}
