//! Syntactic transformations: translations between the logics,
//! relativization to a definable subset, axiom-schema instances and the
//! finiteness sentence for trees.

mod axioms;
mod chi;
mod relativize;
mod translate;

pub use axioms::{axiom_instance, parse_bindings, AxiomId, Binding, Bindings, Theory};
pub use chi::{chi_finiteness, chi_successor};
pub use relativize::relativize;
pub use translate::{lfp_to_mso, tc_to_lfp};

use thiserror::Error;

use crate::syntax::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("missing binding `{0}`")]
    MissingBinding(String),
    #[error("binding `{name}` must be {expected}")]
    BindingKind {
        name: String,
        expected: &'static str,
    },
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("`{0}` occurs free in both formulas")]
    SharedVariable(String),
    #[error("`{var}` does not occur free in the guard")]
    NotFree { var: String },
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
}
