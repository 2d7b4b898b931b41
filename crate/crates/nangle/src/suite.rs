//! The axiom suite with trials spread over a thread pool.

use nangle_core::angulation::{check_suite_params, run_axiom_trial, AngulationError, SuiteReport};
use nangle_core::{RingElement, RingSpec};
use rayon::prelude::*;

/// Same report as the sequential suite in `nangle-core`: every trial draws
/// from its own seeded stream and merging is order independent.
pub fn run_axiom_suite_parallel(
    ring: &RingSpec,
    n: usize,
    u: RingElement,
    max_rank: usize,
    trials: u64,
    seed: u64,
) -> Result<SuiteReport, AngulationError> {
    check_suite_params(ring, n, u)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| run_axiom_trial(ring, n, u, max_rank, seed, t))
        .reduce(SuiteReport::default, SuiteReport::merge))
}
