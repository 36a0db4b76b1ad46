//! Game configurations and the alternating, concurrent, well-bracketed and
//! call-by-name transition systems.

mod config;
pub mod literal;
mod lts;
pub mod pushdown;
pub mod tensor;

pub use crate::action::Action;
pub use config::{
    is_strongly_passive_a, is_strongly_passive_s, AConfig, CConfig, Env, EnvEntry, OgsError,
    SConfig, Support, Threads,
};
pub use literal::{parse_aconfig, parse_cconfig, parse_sconfig};
pub use lts::*;
pub use pushdown::{
    complete_by_justification, full_stack, is_complete_trace_a, is_complete_trace_c,
    is_complete_trace_s, pushdown_accepts,
};
pub use tensor::{
    compatible, decompose_singletons, is_interleaving, support_equivalent, support_equivalent_s,
    tensor_a, tensor_c, tensor_s,
};
