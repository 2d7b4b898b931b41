//! Exact computations with n-angulated structures on free modules over local
//! rings `R` whose maximal ideal `m = (p)` squares to zero.
//!
//! The crate is `no_std` (it needs `alloc`). Rings are `Z/q^2` for a prime
//! `q` and `GF(q)[x]/(x^2)` for a prime power `q`.

#![no_std]

extern crate alloc;

pub mod algebraicity;
pub mod angulation;
pub mod field;
pub mod homotopy;
pub mod matrix;
pub mod ring;
pub mod sequences;

pub use angulation::{
    classify, complete_morphism, complete_to_angle, enumerate_angulations, membership, run_axiom_suite,
    split_trivials, AngulationClass, AngulationError, Enumeration, MembershipCertificate, SplitResult,
    SuiteReport, Verdict,
};
pub use field::{KElement, ResidueField};
pub use homotopy::{cone_iso_from_homotopy, contraction_of_cone_of_iso, find_homotopy, is_contractible, Homotopy};
pub use matrix::{normal_form, solve_linear, KMatrix, LinearSolution, NormalForm, RMatrix};
pub use ring::{ElementClass, RingElement, RingError, RingFamily, RingSpec};
pub use sequences::{NSequence, SeqMorphism, SequenceError, TrivialSpec};
