//! Operational game semantics for the λ-calculus, the internal π-calculus,
//! the encodings between them, and bounded equivalence checkers.

pub mod action;
pub mod encode;
pub mod equiv;
pub mod harness;
pub mod lambda;
pub mod name;
pub mod ogs;
pub mod pi;
pub mod syntax;

pub use action::{Action, Polarity};
pub use lambda::{EvalContext, Term};
pub use name::{Kind, Name, Supply};
pub use ogs::{AConfig, CConfig, Env, EnvEntry, SConfig};
pub use pi::{Agent, Process};
