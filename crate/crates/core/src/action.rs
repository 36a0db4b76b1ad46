//! Actions shared by the game LTSs and the π-calculus, and canonical traces.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::ser::SerializeMap;
use serde::Serialize;

use crate::name::{Kind, Name};

pub trait Kinded {
    fn kind(&self) -> Kind;
}

impl Kinded for Name {
    fn kind(&self) -> Kind {
        self.kind
    }
}

/// A visible or silent action. Objects of inputs, outputs and abstractions
/// are binding occurrences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action<N = Name> {
    Tau,
    /// `(p)`: the initial Opponent question, or an abstraction in π.
    Abs(Vec<N>),
    /// `a^(b~)`
    Out {
        subject: N,
        objects: Vec<N>,
    },
    /// `a(b~)`
    In {
        subject: N,
        objects: Vec<N>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Polarity {
    P,
    O,
}

impl<N> Action<N> {
    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn is_visible(&self) -> bool {
        !self.is_tau()
    }

    pub fn subject(&self) -> Option<&N> {
        match self {
            Action::Out { subject, .. } | Action::In { subject, .. } => Some(subject),
            _ => None,
        }
    }

    /// Binding occurrences.
    pub fn objects(&self) -> &[N] {
        match self {
            Action::Tau => &[],
            Action::Abs(o) => o,
            Action::Out { objects, .. } | Action::In { objects, .. } => objects,
        }
    }

    pub fn polarity(&self) -> Option<Polarity> {
        match self {
            Action::Tau => None,
            Action::Out { .. } => Some(Polarity::P),
            Action::In { .. } | Action::Abs(_) => Some(Polarity::O),
        }
    }

    pub fn is_output(&self) -> bool {
        matches!(self, Action::Out { .. })
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Action::In { .. })
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&N) -> M) -> Action<M> {
        match self {
            Action::Tau => Action::Tau,
            Action::Abs(o) => Action::Abs(o.iter().map(&mut *f).collect()),
            Action::Out { subject, objects } => Action::Out {
                subject: f(subject),
                objects: objects.iter().map(&mut *f).collect(),
            },
            Action::In { subject, objects } => Action::In {
                subject: f(subject),
                objects: objects.iter().map(&mut *f).collect(),
            },
        }
    }
}

impl<N: Kinded> Action<N> {
    /// Answers travel on continuation names.
    pub fn is_answer(&self) -> bool {
        matches!(self.subject(), Some(s) if s.kind() == Kind::Continuation)
    }

    pub fn is_question(&self) -> bool {
        matches!(self, Action::Abs(_))
            || matches!(self.subject(), Some(s) if s.kind() != Kind::Continuation)
    }

    /// The continuation name a question introduces.
    pub fn question_continuation(&self) -> Option<&N> {
        if !self.is_question() {
            return None;
        }
        self.objects()
            .iter()
            .find(|n| n.kind() == Kind::Continuation)
    }

    /// Rule name in the game vocabulary.
    pub fn label(&self) -> &'static str {
        let subj = self.subject().map(|s| s.kind());
        let arity = self.objects().len();
        match (self, subj, arity) {
            (Action::Tau, ..) => "TAU",
            (Action::Abs(_), ..) => "IOQ",
            (Action::Out { .. }, Some(Kind::Continuation), 1) => "PA",
            (Action::In { .. }, Some(Kind::Continuation), 1) => "OA",
            (Action::Out { .. }, Some(Kind::Variable), 2) => "PQ",
            (Action::In { .. }, Some(Kind::Variable), 2) => "OQ",
            (Action::Out { .. }, Some(Kind::Variable), 1) => "PTQ",
            (Action::In { .. }, Some(Kind::Variable), 1) => "OTQ",
            (Action::Out { .. }, Some(Kind::ValueName), 2) => "PVQ",
            (Action::In { .. }, Some(Kind::ValueName), 2) => "OVQ",
            (Action::Out { .. }, ..) => "OUT",
            (Action::In { .. }, ..) => "IN",
        }
    }
}

impl Action<Name> {
    pub fn pa(p: Name, x: Name) -> Self {
        Action::Out {
            subject: p,
            objects: vec![x],
        }
    }
    pub fn oa(p: Name, x: Name) -> Self {
        Action::In {
            subject: p,
            objects: vec![x],
        }
    }
    pub fn pq(x: Name, y: Name, p: Name) -> Self {
        Action::Out {
            subject: x,
            objects: vec![y, p],
        }
    }
    pub fn oq(x: Name, y: Name, p: Name) -> Self {
        Action::In {
            subject: x,
            objects: vec![y, p],
        }
    }
    pub fn ioq(p: Name) -> Self {
        Action::Abs(vec![p])
    }
}

impl<N: fmt::Display> fmt::Display for Action<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |o: &[N]| {
            o.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Abs(o) => write!(f, "({})", list(o)),
            Action::Out { subject, objects } => write!(f, "{}^({})", subject, list(objects)),
            Action::In { subject, objects } => write!(f, "{}({})", subject, list(objects)),
        }
    }
}

impl<N: fmt::Display> fmt::Debug for Action<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<N: fmt::Display + Kinded> Serialize for Action<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("kind", self.label())?;
        m.serialize_entry("subject", &self.subject().map(|n| n.to_string()))?;
        let objs: Vec<String> = self.objects().iter().map(|n| n.to_string()).collect();
        m.serialize_entry("objects", &objs)?;
        m.serialize_entry("polarity", &self.polarity())?;
        m.end()
    }
}

/// A name in a canonical trace: either free, or the i-th bound name of its
/// kind in order of binding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TName {
    Free(Name),
    Bound(Kind, u32),
}

impl Kinded for TName {
    fn kind(&self) -> Kind {
        match self {
            TName::Free(n) => n.kind,
            TName::Bound(k, _) => *k,
        }
    }
}

impl fmt::Display for TName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TName::Free(n) => write!(f, "{n}"),
            TName::Bound(k, i) => write!(f, "_{}{}", k.letter(), i),
        }
    }
}

impl fmt::Debug for TName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Trace = Vec<Action<Name>>;
pub type CTrace = Vec<Action<TName>>;

/// Replaces bound names by kind-indexed placeholders in order of binding.
/// Names that are never bound in the trace are free.
pub fn canonicalize<N: Clone + Eq + Hash + Kinded>(
    t: &[Action<N>],
    free: impl Fn(&N) -> TName,
) -> CTrace {
    let mut map: HashMap<N, TName> = HashMap::new();
    let mut next = [0u32; 3];
    let mut out = Vec::with_capacity(t.len());
    for a in t {
        let subj = a
            .subject()
            .map(|s| map.get(s).copied().unwrap_or_else(|| free(s)));
        let mut objs = Vec::with_capacity(a.objects().len());
        for o in a.objects() {
            let k = o.kind();
            let slot = Kind::ALL.iter().position(|x| *x == k).unwrap();
            let b = TName::Bound(k, next[slot]);
            next[slot] += 1;
            map.insert(o.clone(), b);
            objs.push(b);
        }
        out.push(match a {
            Action::Tau => Action::Tau,
            Action::Abs(_) => Action::Abs(objs),
            Action::Out { .. } => Action::Out {
                subject: subj.unwrap(),
                objects: objs,
            },
            Action::In { .. } => Action::In {
                subject: subj.unwrap(),
                objects: objs,
            },
        });
    }
    out
}

pub fn canonical(t: &[Action<Name>]) -> CTrace {
    canonicalize(t, |n| TName::Free(*n))
}

/// Re-canonicalizes a trace whose placeholders may not be in binding order.
pub fn recanonical(t: &[Action<TName>]) -> CTrace {
    canonicalize(t, |n| *n)
}

pub fn show_trace<N: fmt::Display>(t: &[Action<N>]) -> String {
    if t.is_empty() {
        return "ε".to_string();
    }
    t.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" · ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let (p, x, y, q) = (Name::cont(0), Name::var(0), Name::var(1), Name::cont(1));
        assert_eq!(Action::pa(p, x).label(), "PA");
        assert_eq!(Action::oa(p, x).label(), "OA");
        assert_eq!(Action::pq(x, y, q).label(), "PQ");
        assert_eq!(Action::oq(x, y, q).label(), "OQ");
        assert_eq!(Action::ioq(p).label(), "IOQ");
        assert_eq!(
            Action::Out {
                subject: Name::val(0),
                objects: vec![x, q]
            }
            .label(),
            "PVQ"
        );
        assert_eq!(
            Action::Out {
                subject: x,
                objects: vec![q]
            }
            .label(),
            "PTQ"
        );
        assert_eq!(Action::pq(x, y, q).polarity(), Some(Polarity::P));
        assert_eq!(Action::ioq(p).polarity(), Some(Polarity::O));
    }

    #[test]
    fn json_shape() {
        let a = Action::pq(Name::var(0), Name::var(1), Name::cont(2));
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(
            j,
            r#"{"kind":"PQ","subject":"x0","objects":["x1","p2"],"polarity":"P"}"#
        );
    }

    #[test]
    fn canonical_placeholders() {
        let t = vec![
            Action::ioq(Name::cont(7)),
            Action::pq(Name::var(0), Name::var(9), Name::cont(8)),
            Action::oq(Name::var(9), Name::var(3), Name::cont(4)),
            Action::pa(Name::cont(4), Name::var(11)),
        ];
        let c = canonical(&t);
        assert_eq!(
            show_trace(&c),
            "(_p0) · x0^(_x0,_p1) · _x0(_x1,_p2) · _p2^(_x2)"
        );
    }
}
