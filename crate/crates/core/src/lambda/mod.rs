//! Call-by-value, call-by-name and λρ terms with their reduction relations.

pub mod parse;
pub mod rho;
mod term;

pub use parse::{parse_cbv, parse_rho, parse_term, Mode, Parsed};
pub use rho::{eval_rho, step_rho, Loc, RhoError, RhoOutcome, RhoTerm, Store};
pub use term::{
    decompose_cbn, decompose_cbv, eval_enf, step_cbn, step_cbv, CbnDecomp, Decomp, Enf,
    EvalContext, Frame, Term,
};
