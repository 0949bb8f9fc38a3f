//! Proof checking for the Hilbert systems of the four logics, optionally
//! over the tree or linear-order theory.

mod check;
mod taut;

pub use check::{
    check_proof, check_proof_json, premise_dependencies, primitive, Justification, Proof,
    ProofError, ProofLine, Verdict,
};
pub use taut::{is_tautology, tautology_check, MAX_LETTERS};
