//! Tensor products of configurations and singleton decomposition.

use std::collections::{BTreeMap, BTreeSet};

use super::config::{AConfig, CConfig, Env, OgsError, SConfig, Support, Threads};
use crate::action::Polarity;
use crate::name::Name;

fn agree(a: &BTreeMap<Name, Polarity>, b: &BTreeMap<Name, Polarity>) -> bool {
    a.iter().all(|(n, p)| b.get(n).is_none_or(|q| p == q))
}

pub trait Polarized {
    fn polarity(&self) -> BTreeMap<Name, Polarity>;
    fn cs(&self) -> BTreeSet<(Name, Name)>;
    fn p_names(&self) -> BTreeSet<Name>;
}

impl Polarized for AConfig {
    fn polarity(&self) -> BTreeMap<Name, Polarity> {
        AConfig::polarity(self)
    }
    fn cs(&self) -> BTreeSet<(Name, Name)> {
        AConfig::cs(self)
    }
    fn p_names(&self) -> BTreeSet<Name> {
        AConfig::p_names(self)
    }
}

impl Polarized for CConfig {
    fn polarity(&self) -> BTreeMap<Name, Polarity> {
        CConfig::polarity(self)
    }
    fn cs(&self) -> BTreeSet<(Name, Name)> {
        CConfig::cs(self)
    }
    fn p_names(&self) -> BTreeSet<Name> {
        CConfig::p_names(self)
    }
}

impl Polarized for SConfig {
    fn polarity(&self) -> BTreeMap<Name, Polarity> {
        self.config.polarity()
    }
    fn cs(&self) -> BTreeSet<(Name, Name)> {
        self.config.cs()
    }
    fn p_names(&self) -> BTreeSet<Name> {
        self.config.p_names()
    }
}

/// Shared names have the same polarity on both sides.
pub fn compatible<F: Polarized>(f: &F, g: &F) -> bool {
    agree(&f.polarity(), &g.polarity())
}

pub fn support_equivalent<F: Polarized>(f: &F, g: &F) -> bool {
    f.polarity() == g.polarity() && f.cs() == g.cs()
}

pub fn support_equivalent_s(f: &SConfig, g: &SConfig) -> bool {
    support_equivalent(f, g) && f.stack == g.stack
}

fn check<F: Polarized>(f: &F, g: &F) -> Result<(), OgsError> {
    if !compatible(f, g) {
        return Err(OgsError::IncompatibleConfigurations(
            "polarities disagree".into(),
        ));
    }
    let shared: Vec<String> = f
        .p_names()
        .intersection(&g.p_names())
        .map(|n| n.to_string())
        .collect();
    if !shared.is_empty() {
        return Err(OgsError::IncompatibleConfigurations(format!(
            "both own {}",
            shared.join(", ")
        )));
    }
    Ok(())
}

fn union(a: &Support, b: &Support) -> Support {
    a.union(b).copied().collect()
}

pub fn tensor_c(f: &CConfig, g: &CConfig) -> Result<CConfig, OgsError> {
    check(f, g)?;
    match (f, g) {
        (
            CConfig::Running {
                threads: a,
                env: ga,
                support: sa,
            },
            CConfig::Running {
                threads: b,
                env: gb,
                support: sb,
            },
        ) => {
            let mut ts = a.0.clone();
            ts.extend(b.0.iter().cloned());
            Ok(CConfig::Running {
                threads: Threads(ts),
                env: ga.concat(gb),
                support: union(sa, sb),
            })
        }
        _ => Err(OgsError::IncompatibleConfigurations(
            "initial configurations cannot be composed".into(),
        )),
    }
}

pub fn tensor_a(f: &AConfig, g: &AConfig) -> Result<AConfig, OgsError> {
    check(f, g)?;
    match (f, g) {
        (
            AConfig::Active {
                term,
                cont,
                env,
                support,
            },
            AConfig::Passive {
                env: e2,
                support: s2,
            },
        )
        | (
            AConfig::Passive {
                env: e2,
                support: s2,
            },
            AConfig::Active {
                term,
                cont,
                env,
                support,
            },
        ) => {
            // keep the environment order of the left operand first
            let env = if f.is_active() {
                env.concat(e2)
            } else {
                e2.concat(env)
            };
            Ok(AConfig::Active {
                term: term.clone(),
                cont: *cont,
                env,
                support: union(support, s2),
            })
        }
        (
            AConfig::Passive {
                env: e1,
                support: s1,
            },
            AConfig::Passive {
                env: e2,
                support: s2,
            },
        ) => Ok(AConfig::Passive {
            env: e1.concat(e2),
            support: union(s1, s2),
        }),
        (AConfig::Active { .. }, AConfig::Active { .. }) => Err(
            OgsError::IncompatibleConfigurations("both configurations are active".into()),
        ),
        _ => Err(OgsError::IncompatibleConfigurations(
            "initial configurations cannot be composed".into(),
        )),
    }
}

/// Is `s` an order-preserving merge of `a` and `b`?
pub fn is_interleaving<T: PartialEq>(s: &[T], a: &[T], b: &[T]) -> bool {
    if s.len() != a.len() + b.len() {
        return false;
    }
    // dp[i][j]: s[..i+j] merges a[..i], b[..j]
    let mut dp = vec![vec![false; b.len() + 1]; a.len() + 1];
    dp[0][0] = true;
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            if i > 0 && dp[i - 1][j] && a[i - 1] == s[i + j - 1] {
                dp[i][j] = true;
            }
            if j > 0 && dp[i][j - 1] && b[j - 1] == s[i + j - 1] {
                dp[i][j] = true;
            }
        }
    }
    dp[a.len()][b.len()]
}

pub fn tensor_s(f: &SConfig, g: &SConfig, stack: Vec<Name>) -> Result<SConfig, OgsError> {
    if !is_interleaving(&stack, &f.stack, &g.stack) {
        return Err(OgsError::InvalidInterleaving);
    }
    Ok(SConfig {
        config: tensor_a(&f.config, &g.config)?,
        stack,
    })
}

/// One configuration per Player name, each keeping the Opponent names of `f`.
pub fn decompose_singletons(f: &CConfig) -> Vec<CConfig> {
    let (threads, env) = match f {
        CConfig::Initial { .. } => return vec![f.clone()],
        CConfig::Running { threads, env, .. } => (threads, env),
    };
    let p_names = f.p_names();
    let shared: Support = f.support().difference(&p_names).copied().collect();
    let with_own = |n: Name| {
        let mut s = shared.clone();
        s.insert(n);
        s
    };
    let mut out = Vec::new();
    for (p, t) in &threads.0 {
        out.push(CConfig::Running {
            threads: Threads(vec![(*p, t.clone())]),
            env: Env::new(),
            support: with_own(*p),
        });
    }
    for (n, e) in env.iter() {
        out.push(CConfig::Running {
            threads: Threads::default(),
            env: Env::new().with(*n, e.clone()),
            support: with_own(*n),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{parse_cbv, Term};
    use crate::ogs::config::EnvEntry;

    fn id() -> Term {
        parse_cbv("\\z. z").unwrap()
    }

    #[test]
    fn two_active_rejected() {
        let (p, q) = (Name::cont(0), Name::cont(1));
        let f = AConfig::Active {
            term: id(),
            cont: p,
            env: Env::new(),
            support: [p].into(),
        };
        let g = AConfig::Active {
            term: id(),
            cont: q,
            env: Env::new(),
            support: [q].into(),
        };
        assert!(matches!(
            tensor_a(&f, &g),
            Err(OgsError::IncompatibleConfigurations(_))
        ));
    }

    #[test]
    fn unit_and_decomposition() {
        let (p, x) = (Name::cont(0), Name::var(0));
        let f = CConfig::Running {
            threads: Threads(vec![(p, id())]),
            env: Env::new().with(x, EnvEntry::Value(id())),
            support: [p, x].into(),
        };
        assert_eq!(tensor_c(&f, &CConfig::empty()).unwrap(), f);
        let parts = decompose_singletons(&f);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].threads().len(), 1);
        assert_eq!(parts[1].env().unwrap().len(), 1);
        let back = tensor_c(&parts[0], &parts[1]).unwrap();
        assert_eq!(back, f);
        assert!(decompose_singletons(&CConfig::empty()).is_empty());
    }

    #[test]
    fn polarity_clash() {
        let x = Name::var(0);
        let owner = CConfig::Running {
            threads: Threads::default(),
            env: Env::new().with(x, EnvEntry::Value(id())),
            support: [x].into(),
        };
        let user = CConfig::Running {
            threads: Threads(vec![(Name::cont(0), Term::Var(x))]),
            env: Env::new(),
            support: [x, Name::cont(0)].into(),
        };
        assert!(!compatible(&owner, &user));
        assert!(compatible(&owner, &owner));
    }

    #[test]
    fn interleaving_check() {
        assert!(is_interleaving(&[1, 3, 2], &[1, 2], &[3]));
        assert!(!is_interleaving(&[2, 1, 3], &[1, 2], &[3]));
    }
}
