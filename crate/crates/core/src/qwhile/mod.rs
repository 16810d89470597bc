//! Front end and denotational evaluator for the quantum WHILE language.
//!
//! Programs denote completely positive maps on density matrices: gate
//! application conjugates by an embedded unitary, measurement assignment is
//! the nonselective computational-basis measurement, conditionals split the
//! state through basis projectors, and while-loops are least fixed points
//! computed as partial sums with the unterminated mass reported as residual
//! data (never as an error).
//!
//! A finite discrete probabilistic WHILE evaluator with the same shape runs
//! alongside as a cross-check oracle; translatable classical programs agree
//! with their quantum translations on diagonal states.

mod ast;
mod classical;
mod eval;
mod parse;

pub use ast::{Cond, Program, Stmt};
pub use classical::{
    random_classical_stmt, run_classical, translate_classical, ClassicalProgram, ClassicalStmt,
    CondBit, TranslateError,
};
pub use eval::{
    denote_cond, eval, eval_program, fixpoint_check, random_stmt, EvalConfig, EvalError, RunReport,
};
pub use parse::{parse, SyntaxError};
