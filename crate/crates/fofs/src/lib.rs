//! First-order Fischer Servi modal logic at desk scale.
//!
//! The crate mechanizes the logic FOFS and its D/4/D4/T/S4 and NI/ND
//! extensions: a Hilbert-style proof checker with derived-proof
//! builders, finite birelational Kripke models with increasing domains
//! and per-world equality, frame-class validation and seeded in-class
//! model generation, bounded countermodel search with soundness
//! fuzzing, and the Ferrers-set / record / trace-fragment combinatorics
//! over pluggable theory oracles.

pub mod frameclasses;
pub mod gen;
pub mod proof;
pub mod search;
pub mod semantics;
pub mod syntax;
pub mod trace;

pub use proof::{BaseLogic, LogicId, Proof, TheoryApprox};
pub use syntax::{Formula, Signature, SyntaxError, Term};
