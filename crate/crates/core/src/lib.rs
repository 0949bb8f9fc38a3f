//! Logics on finite ordered trees: first-order logic, monadic second-order
//! logic and its transitive-closure and least-fixpoint fragments, evaluated
//! over frames whose set quantifiers range over an admissible family.

pub mod composition;
pub mod eval;
pub mod games;
pub mod proof;
pub mod structure;
pub mod syntax;
pub mod testkit;
pub mod transforms;

pub use eval::{eval, eval_closed, Assignment, EvalError};
pub use structure::{ElemSet, Frame};
pub use syntax::{parse_formula, render_formula, Formula, LogicId, Vocabulary};
