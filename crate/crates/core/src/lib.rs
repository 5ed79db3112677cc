//! Connection-minimal TBox abduction for the description logic EL.
//!
//! The pipeline normalizes the background TBox, translates the problem into
//! first-order Horn clauses, saturates them into positive and negative ground
//! prime implicates and recombines those into flat hypotheses. A brute-force
//! [`oracle`] checks connection minimality directly from trees and
//! homomorphisms.
//!
//! The crate is `no_std` with `alloc`; time limits are read through the
//! [`clock::Clock`] trait.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bench;
pub mod clock;
pub mod concept;
pub mod engine;
pub mod fol;
pub mod oracle;
pub mod pipeline;
pub mod preprocess;
pub mod reasoner;
pub mod recombine;
pub mod tree;

pub use concept::{Concept, ConceptInclusion, ConceptName, RoleName, Signature, TBox};
pub use preprocess::{AbductionProblem, PreparedProblem};
pub use recombine::{FlatCi, Hypothesis};
