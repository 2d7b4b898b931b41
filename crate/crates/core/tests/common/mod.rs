#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;

use nangle_core::matrix::RMatrix;
use nangle_core::ring::RingSpec;
use nangle_oracle as oracle;

pub use nangle_oracle::{all_sequences, rank_vectors};

pub fn small_rings() -> Vec<RingSpec> {
    vec![RingSpec::parse("Z/4").unwrap(), RingSpec::parse("GF(2)[x]/(x^2)").unwrap()]
}

/// `GL_r(R)` by enumeration, cached per rank.
pub struct GroupCache {
    ring: RingSpec,
    cache: RefCell<HashMap<usize, Vec<RMatrix>>>,
}

impl GroupCache {
    pub fn new(ring: &RingSpec) -> Self {
        GroupCache { ring: ring.clone(), cache: RefCell::new(HashMap::new()) }
    }

    pub fn get(&self, r: usize) -> Vec<RMatrix> {
        self.cache.borrow_mut().entry(r).or_insert_with(|| oracle::invertible_matrices(&self.ring, r)).clone()
    }
}
