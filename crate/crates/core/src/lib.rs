//! Symbolic differentiation of arithmetic expressions with domain tracking
//! and numerically checked derivative obligations.
//!
//! The pipeline is: [`parser`] reads s-expressions into binary [`Expr`]
//! trees, [`differ`] applies the sum, product, chain and inverse-function
//! rules against a [`Registry`] of known derivatives while building a
//! [`DomainPred`] and a list of [`Obligation`]s, [`simplify`] cleans the
//! result up, and [`checker`] gathers numeric evidence for every obligation.

pub mod checker;
pub mod cli;
pub mod differ;
pub mod eval;
pub mod expr;
pub mod parser;
pub mod registry;
pub mod simplify;

pub use checker::{check_all, check_obligation, CheckConfig, CheckReport, CheckStatus};
pub use differ::{derivative_hyps, differentiate, inverse_hyps, DiffError, DiffResult, Obligation, ObligationKind};
pub use eval::{eval, eval_pred, EvalError};
pub use expr::{free_vars, substitute, Bound, DomainPred, Env, Expr, Number};
pub use parser::{normalize, parse, parse_expr, parse_pred, print, print_pred};
pub use registry::Registry;
pub use simplify::{simplify, simplify_domain};
