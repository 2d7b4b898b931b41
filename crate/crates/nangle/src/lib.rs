//! Std companion to `nangle-core`: JSON formats, the parallel axiom suite and
//! the `nangle` command line.

pub mod cli;
pub mod json;
pub mod suite;

pub use suite::run_axiom_suite_parallel;
