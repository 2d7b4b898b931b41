//! Homotopies between morphisms of n-Σ-sequences.
//!
//! A homotopy from `φ` to `ψ` (both `A -> B`) is a family `Θ_i : A_{i+1} -> B_i`
//! with `φ_i - ψ_i = Θ_i α_i + β_{i-1} Θ_{i-1}` for every `i` (indices mod `n`).
//! Deciding whether one exists is a single linear system over `R`; its unknowns
//! are the entries of `Θ_1`, then `Θ_2`, and so on, each row-major.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::{Infeasibility, LinearSystem, MatrixUnknown, RMatrix, Term};
use crate::sequences::{NSequence, SeqMorphism, SequenceError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    /// The two morphisms do not share source and target.
    Incompatible,
    /// The supplied family does not satisfy the homotopy equations.
    Invalid,
    /// A component that must be invertible is not.
    NotInvertible { index: usize },
    Sequence(SequenceError),
}

impl fmt::Display for HomotopyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomotopyError::Incompatible => write!(f, "morphisms must share source and target"),
            HomotopyError::Invalid => write!(f, "homotopy equations do not hold"),
            HomotopyError::NotInvertible { index } => write!(f, "component {} is not invertible", index + 1),
            HomotopyError::Sequence(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for HomotopyError {}

impl From<SequenceError> for HomotopyError {
    fn from(e: SequenceError) -> Self {
        HomotopyError::Sequence(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    thetas: Vec<RMatrix>,
}

impl Homotopy {
    /// Validates `thetas` as a homotopy from `phi` to `psi`.
    pub fn new(phi: &SeqMorphism, psi: &SeqMorphism, thetas: Vec<RMatrix>) -> Result<Self, HomotopyError> {
        check_pair(phi, psi)?;
        let h = Homotopy { thetas };
        if !h.verifies(phi, psi) {
            return Err(HomotopyError::Invalid);
        }
        Ok(h)
    }

    pub fn thetas(&self) -> &[RMatrix] {
        &self.thetas
    }

    /// Checks the defining equations exactly.
    pub fn verifies(&self, phi: &SeqMorphism, psi: &SeqMorphism) -> bool {
        let (a, b) = (phi.source(), phi.target());
        let n = a.n();
        let ring = a.ring();
        if self.thetas.len() != n || psi.source() != a || psi.target() != b {
            return false;
        }
        for (i, t) in self.thetas.iter().enumerate() {
            if t.shape() != (b.rank(i), a.rank(i + 1)) {
                return false;
            }
        }
        (0..n).all(|i| {
            let prev = (i + n - 1) % n;
            let lhs = phi.phis()[i].sub(ring, &psi.phis()[i]);
            let rhs = self.thetas[i].mul(ring, a.map(i)).add(ring, &b.map(prev).mul(ring, &self.thetas[prev]));
            lhs == rhs
        })
    }

    pub fn neg(&self, seq: &NSequence) -> Homotopy {
        Homotopy { thetas: self.thetas.iter().map(|t| t.neg(seq.ring())).collect() }
    }

    pub fn add(&self, seq: &NSequence, other: &Homotopy) -> Homotopy {
        let thetas = self.thetas.iter().zip(&other.thetas).map(|(a, b)| a.add(seq.ring(), b)).collect();
        Homotopy { thetas }
    }

    /// The zero homotopy between `A` and `B`.
    pub fn zero(source: &NSequence, target: &NSequence) -> Homotopy {
        let n = source.n();
        Homotopy { thetas: (0..n).map(|i| RMatrix::zeros(target.rank(i), source.rank(i + 1))).collect() }
    }
}

fn check_pair(phi: &SeqMorphism, psi: &SeqMorphism) -> Result<(), HomotopyError> {
    if phi.source() != psi.source() || phi.target() != psi.target() {
        return Err(HomotopyError::Incompatible);
    }
    Ok(())
}

fn homotopy_system(phi: &SeqMorphism, psi: &SeqMorphism) -> (LinearSystem, Vec<MatrixUnknown>) {
    let (a, b) = (phi.source(), phi.target());
    let ring = a.ring();
    let n = a.n();
    let mut offset = 0;
    let unknowns: Vec<MatrixUnknown> = (0..n)
        .map(|i| {
            let x = MatrixUnknown { offset, rows: b.rank(i), cols: a.rank(i + 1) };
            offset += x.len();
            x
        })
        .collect();
    let mut sys = LinearSystem::new(ring, offset);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let rhs = phi.phis()[i].sub(ring, &psi.phis()[i]);
        sys.add_matrix_equation(
            &[
                Term { coeff: ring.one(), left: None, unknown: unknowns[i], right: Some(a.map(i)) },
                Term { coeff: ring.one(), left: Some(b.map(prev)), unknown: unknowns[prev], right: None },
            ],
            &rhs,
        );
    }
    (sys, unknowns)
}

/// A homotopy from `phi` to `psi`, or `None` when none exists.
pub fn find_homotopy(phi: &SeqMorphism, psi: &SeqMorphism) -> Result<Option<Homotopy>, HomotopyError> {
    Ok(find_homotopy_or_certify(phi, psi)?.ok())
}

/// Like [`find_homotopy`], but a negative answer carries the infeasibility
/// certificate of the flattened system.
pub fn find_homotopy_or_certify(
    phi: &SeqMorphism,
    psi: &SeqMorphism,
) -> Result<Result<Homotopy, Infeasibility>, HomotopyError> {
    check_pair(phi, psi)?;
    let (sys, unknowns) = homotopy_system(phi, psi);
    Ok(match sys.solve() {
        Ok(sol) => {
            let thetas = unknowns.iter().map(|x| x.extract(&sol.particular)).collect();
            Ok(Homotopy::new(phi, psi, thetas).expect("solver output satisfies the system"))
        }
        Err(cert) => Err(cert),
    })
}

/// A contracting homotopy of `x`, i.e. a homotopy from the identity to zero.
pub fn is_contractible(x: &NSequence) -> Option<Homotopy> {
    let zero = x.zero_morphism(x).expect("same sequence");
    find_homotopy(&x.identity_morphism(), &zero).expect("compatible morphisms")
}

/// The mutually inverse isomorphisms `cone(φ) -> cone(ψ)` with components
/// `[[1, 0], [Θ_i, 1]]` and `[[1, 0], [-Θ_i, 1]]`.
pub fn cone_iso_from_homotopy(
    phi: &SeqMorphism,
    psi: &SeqMorphism,
    theta: &Homotopy,
) -> Result<(SeqMorphism, SeqMorphism), HomotopyError> {
    check_pair(phi, psi)?;
    if !theta.verifies(phi, psi) {
        return Err(HomotopyError::Invalid);
    }
    let (a, b) = (phi.source(), phi.target());
    let ring = a.ring();
    let n = a.n();
    let component = |i: usize, sign_neg: bool| {
        let t = if sign_neg { theta.thetas[i].neg(ring) } else { theta.thetas[i].clone() };
        RMatrix::block2x2(
            &RMatrix::identity(ring, a.rank(i + 1)),
            &RMatrix::zeros(a.rank(i + 1), b.rank(i)),
            &t,
            &RMatrix::identity(ring, b.rank(i)),
        )
    };
    let (cphi, cpsi) = (phi.mapping_cone(), psi.mapping_cone());
    let fwd = SeqMorphism::new(&cphi, &cpsi, (0..n).map(|i| component(i, false)).collect())?;
    let bwd = SeqMorphism::new(&cpsi, &cphi, (0..n).map(|i| component(i, true)).collect())?;
    Ok((fwd, bwd))
}

/// For an isomorphism `φ`, the contracting homotopy of `cone(φ)` with blocks
/// `[[0, φ_{i+1}^{-1}], [0, 0]]`.
pub fn contraction_of_cone_of_iso(phi: &SeqMorphism) -> Result<Homotopy, HomotopyError> {
    let (a, b) = (phi.source(), phi.target());
    let ring = a.ring();
    let n = a.n();
    let mut inverses = Vec::with_capacity(n);
    for (i, m) in phi.phis().iter().enumerate() {
        inverses.push(m.inverse(ring).ok_or(HomotopyError::NotInvertible { index: i })?);
    }
    let thetas = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            RMatrix::block2x2(
                &RMatrix::zeros(a.rank(j), a.rank(i + 2)),
                &inverses[j],
                &RMatrix::zeros(b.rank(i), a.rank(i + 2)),
                &RMatrix::zeros(b.rank(i), b.rank(j)),
            )
        })
        .collect();
    let cone = phi.mapping_cone();
    Homotopy::new(&cone.identity_morphism(), &cone.zero_morphism(&cone)?, thetas)
}
