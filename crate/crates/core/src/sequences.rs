//! n-Σ-sequences of free modules with Σ the identity.
//!
//! Objects are free modules given by their ranks, maps are matrices acting on
//! column vectors. Indices are 0-based here: `maps[i]` goes from object `i` to
//! object `(i + 1) % n`, and the last map lands in `ΣA_1 = A_1`.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::{invariants, RMatrix};
use crate::ring::{RingElement, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceError {
    TooShort(usize),
    WrongLength { expected: usize, found: usize },
    MapShape { index: usize, expected: (usize, usize), found: (usize, usize) },
    RingMismatch,
    LengthMismatch,
    NotAUnit,
    NotInvertible { index: usize },
    NotCommuting { index: usize },
    BadTrivial { rank: usize, position: usize },
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::TooShort(n) => write!(f, "n must be at least 3, got {n}"),
            SequenceError::WrongLength { expected, found } => {
                write!(f, "expected {expected} components, found {found}")
            }
            SequenceError::MapShape { index, expected, found } => write!(
                f,
                "map {} has shape {}x{}, expected {}x{}",
                index + 1,
                found.0,
                found.1,
                expected.0,
                expected.1
            ),
            SequenceError::RingMismatch => write!(f, "sequences live over different rings"),
            SequenceError::LengthMismatch => write!(f, "sequences have different lengths"),
            SequenceError::NotAUnit => write!(f, "element is not a unit"),
            SequenceError::NotInvertible { index } => write!(f, "component {} is not invertible", index + 1),
            SequenceError::NotCommuting { index } => write!(f, "square {} does not commute", index + 1),
            SequenceError::BadTrivial { rank, position } => {
                write!(f, "invalid trivial sequence: rank {rank}, position {position}")
            }
        }
    }
}

impl core::error::Error for SequenceError {}

/// A rotated trivial sequence `A -1-> A -> 0 -> ... -> 0`.
///
/// `position` is 1-based: the identity sits at `maps[position - 1]`, between
/// objects `position - 1` and `position % n` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrivialSpec {
    pub rank: usize,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NSequence {
    ring: RingSpec,
    ranks: Vec<usize>,
    maps: Vec<RMatrix>,
}

impl NSequence {
    pub fn new(ring: &RingSpec, ranks: Vec<usize>, maps: Vec<RMatrix>) -> Result<Self, SequenceError> {
        let n = ranks.len();
        if n < 3 {
            return Err(SequenceError::TooShort(n));
        }
        if maps.len() != n {
            return Err(SequenceError::WrongLength { expected: n, found: maps.len() });
        }
        for (i, m) in maps.iter().enumerate() {
            let expected = (ranks[(i + 1) % n], ranks[i]);
            if m.shape() != expected {
                return Err(SequenceError::MapShape { index: i, expected, found: m.shape() });
            }
        }
        Ok(NSequence { ring: ring.clone(), ranks, maps })
    }

    /// The sequence with all objects zero.
    pub fn zero(ring: &RingSpec, n: usize) -> Result<Self, SequenceError> {
        Self::new(ring, alloc::vec![0; n], (0..n).map(|_| RMatrix::zeros(0, 0)).collect())
    }

    /// `F -up-> F -p-> F -p-> ... -p-> ΣF` with `F` of rank `rank`.
    pub fn standard_angle(ring: &RingSpec, n: usize, u: RingElement, rank: usize) -> Result<Self, SequenceError> {
        if !ring.is_unit(u) {
            return Err(SequenceError::NotAUnit);
        }
        let mut maps: Vec<RMatrix> = (0..n).map(|_| RMatrix::scalar(rank, ring.p())).collect();
        if let Some(first) = maps.first_mut() {
            *first = RMatrix::scalar(rank, ring.mul(u, ring.p()));
        }
        Self::new(ring, alloc::vec![rank; n], maps)
    }

    pub fn trivial(ring: &RingSpec, n: usize, spec: TrivialSpec) -> Result<Self, SequenceError> {
        if n < 3 {
            return Err(SequenceError::TooShort(n));
        }
        if spec.position == 0 || spec.position > n {
            return Err(SequenceError::BadTrivial { rank: spec.rank, position: spec.position });
        }
        let at = spec.position - 1;
        let mut ranks = alloc::vec![0; n];
        ranks[at] = spec.rank;
        ranks[(at + 1) % n] = spec.rank;
        let maps = (0..n)
            .map(|i| {
                if i == at {
                    RMatrix::identity(ring, spec.rank)
                } else {
                    RMatrix::zeros(ranks[(i + 1) % n], ranks[i])
                }
            })
            .collect();
        Self::new(ring, ranks, maps)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn maps(&self) -> &[RMatrix] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &RMatrix {
        &self.maps[i % self.n()]
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i % self.n()]
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Consecutive composites vanish, wraparound included.
    pub fn is_candidate(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.maps[(i + 1) % n].mul(&self.ring, &self.maps[i]).is_zero())
    }

    /// Candidate whose image and kernel lengths agree at every object.
    ///
    /// For free objects `Hom(R^m, -)` is the `m`-fold sum, so exactness of
    /// every induced Hom sequence is the same as exactness of the sequence of
    /// modules itself, which is what this checks.
    pub fn is_exact(&self) -> bool {
        if !self.is_candidate() {
            return false;
        }
        let n = self.n();
        let inv: Vec<(usize, usize)> = self.maps.iter().map(|m| invariants(&self.ring, m)).collect();
        (0..n).all(|i| {
            let (u_in, v_in) = inv[(i + n - 1) % n];
            let (u_out, v_out) = inv[i];
            u_in + 2 * v_in + u_out + 2 * v_out == 2 * self.ranks[i]
        })
    }

    /// `(α_2, ..., α_n, (-1)^n α_1)` over `(A_2, ..., A_n, ΣA_1)`.
    pub fn rotate_left(&self) -> NSequence {
        let n = self.n();
        let mut ranks = self.ranks.clone();
        ranks.rotate_left(1);
        let mut maps = self.maps.clone();
        maps.rotate_left(1);
        if n % 2 == 1 {
            maps[n - 1] = maps[n - 1].neg(&self.ring);
        }
        NSequence { ring: self.ring.clone(), ranks, maps }
    }

    /// `((-1)^n α_n, α_1, ..., α_{n-1})` over `(Σ^{-1}A_n, A_1, ..., A_n)`.
    pub fn rotate_right(&self) -> NSequence {
        let n = self.n();
        let mut ranks = self.ranks.clone();
        ranks.rotate_right(1);
        let mut maps = self.maps.clone();
        maps.rotate_right(1);
        if n % 2 == 1 {
            maps[0] = maps[0].neg(&self.ring);
        }
        NSequence { ring: self.ring.clone(), ranks, maps }
    }

    fn check_compatible(&self, other: &NSequence) -> Result<(), SequenceError> {
        if self.ring != other.ring {
            return Err(SequenceError::RingMismatch);
        }
        if self.n() != other.n() {
            return Err(SequenceError::LengthMismatch);
        }
        Ok(())
    }

    /// Objectwise direct sum; the basis of `self` comes first.
    pub fn direct_sum(&self, other: &NSequence) -> Result<NSequence, SequenceError> {
        self.check_compatible(other)?;
        let ranks = self.ranks.iter().zip(&other.ranks).map(|(a, b)| a + b).collect();
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| RMatrix::block_diag(a, b)).collect();
        Ok(NSequence { ring: self.ring.clone(), ranks, maps })
    }

    /// Transports the sequence along `psi`: `β_i = ψ_{i+1} α_i ψ_i^{-1}`.
    pub fn apply_iso(&self, psi: &[RMatrix]) -> Result<NSequence, SequenceError> {
        let n = self.n();
        if psi.len() != n {
            return Err(SequenceError::WrongLength { expected: n, found: psi.len() });
        }
        let mut inverses = Vec::with_capacity(n);
        for (i, m) in psi.iter().enumerate() {
            if m.shape() != (self.ranks[i], self.ranks[i]) {
                return Err(SequenceError::MapShape {
                    index: i,
                    expected: (self.ranks[i], self.ranks[i]),
                    found: m.shape(),
                });
            }
            inverses.push(m.inverse(&self.ring).ok_or(SequenceError::NotInvertible { index: i })?);
        }
        let maps = (0..n).map(|i| psi[(i + 1) % n].mul(&self.ring, &self.maps[i]).mul(&self.ring, &inverses[i])).collect();
        Ok(NSequence { ring: self.ring.clone(), ranks: self.ranks.clone(), maps })
    }

    pub fn identity_morphism(&self) -> SeqMorphism {
        let phis = self.ranks.iter().map(|&r| RMatrix::identity(&self.ring, r)).collect();
        SeqMorphism { source: self.clone(), target: self.clone(), phis }
    }

    pub fn zero_morphism(&self, target: &NSequence) -> Result<SeqMorphism, SequenceError> {
        self.check_compatible(target)?;
        let phis = self.ranks.iter().zip(&target.ranks).map(|(&a, &b)| RMatrix::zeros(b, a)).collect();
        Ok(SeqMorphism { source: self.clone(), target: target.clone(), phis })
    }
}

/// A morphism of n-Σ-sequences; every square commutes, the wraparound square
/// using `Σφ_1 = φ_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqMorphism {
    source: NSequence,
    target: NSequence,
    phis: Vec<RMatrix>,
}

impl SeqMorphism {
    pub fn new(source: &NSequence, target: &NSequence, phis: Vec<RMatrix>) -> Result<Self, SequenceError> {
        source.check_compatible(target)?;
        let n = source.n();
        if phis.len() != n {
            return Err(SequenceError::WrongLength { expected: n, found: phis.len() });
        }
        for (i, phi) in phis.iter().enumerate() {
            let expected = (target.ranks[i], source.ranks[i]);
            if phi.shape() != expected {
                return Err(SequenceError::MapShape { index: i, expected, found: phi.shape() });
            }
        }
        let ring = &source.ring;
        for i in 0..n {
            let lhs = target.maps[i].mul(ring, &phis[i]);
            let rhs = phis[(i + 1) % n].mul(ring, &source.maps[i]);
            if lhs != rhs {
                return Err(SequenceError::NotCommuting { index: i });
            }
        }
        Ok(SeqMorphism { source: source.clone(), target: target.clone(), phis })
    }

    pub fn source(&self) -> &NSequence {
        &self.source
    }

    pub fn target(&self) -> &NSequence {
        &self.target
    }

    pub fn phis(&self) -> &[RMatrix] {
        &self.phis
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SeqMorphism) -> Result<SeqMorphism, SequenceError> {
        if next.source != self.target {
            return Err(SequenceError::LengthMismatch);
        }
        let ring = &self.source.ring;
        let phis = self.phis.iter().zip(&next.phis).map(|(a, b)| b.mul(ring, a)).collect();
        Ok(SeqMorphism { source: self.source.clone(), target: next.target.clone(), phis })
    }

    pub fn is_iso(&self) -> bool {
        self.phis.iter().all(|m| m.is_invertible(&self.source.ring))
    }

    /// Objects `A_{i+1} ⊕ B_i` with maps `[[-α_{i+1}, 0], [φ_{i+1}, β_i]]`.
    pub fn mapping_cone(&self) -> NSequence {
        let (a, b) = (&self.source, &self.target);
        let ring = &a.ring;
        let n = a.n();
        let ranks = (0..n).map(|i| a.rank(i + 1) + b.rank(i)).collect();
        let maps = (0..n)
            .map(|i| {
                RMatrix::block2x2(
                    &a.map(i + 1).neg(ring),
                    &RMatrix::zeros(a.rank(i + 2), b.rank(i)),
                    &self.phis[(i + 1) % n],
                    b.map(i),
                )
            })
            .collect();
        NSequence { ring: ring.clone(), ranks, maps }
    }
}
