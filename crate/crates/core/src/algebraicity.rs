//! The non-algebraicity test.
//!
//! If some integer `d` has `d·1 = up` nonzero in `m`, an algebraic structure
//! would force `d` times the identity of the chain
//! `(A/d)_1 -> ... -> (A/d)_{n-2}` (rank one, all maps `p`) to be
//! null-homotopic. With unknowns `q_1, ..., q_{n-3}` that means
//!
//! ```text
//! up = p q_1,   up = q_i p + p q_{i+1}  (1 <= i <= n-4),   up = q_{n-3} p
//! ```
//!
//! For odd `n` with `2p = 0` this system has no solution, which proves the
//! n-angulated category is not algebraic. For even `n` it is solved by
//! `(u, 0, u, ..., 0, u)`, and nothing follows.

use alloc::vec::Vec;
use core::fmt;

use crate::angulation::complete_to_angle;
use crate::matrix::{Infeasibility, LinearSystem, MatrixUnknown, RMatrix, Term};
use crate::ring::{ElementClass, RingElement, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraicityError {
    TooShort(usize),
    /// `d·1` is zero or a unit.
    InvalidD(u64),
}

impl fmt::Display for AlgebraicityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicityError::TooShort(n) => write!(f, "n must be at least 3, got {n}"),
            AlgebraicityError::InvalidD(d) => write!(f, "d = {d} does not satisfy 0 != d*1 in m"),
        }
    }
}

impl core::error::Error for AlgebraicityError {}

/// Smallest `d > 0` with `d·1` in `m \ {0}`.
///
/// `d·1` is periodic in `d` with period the additive order of `1`, which
/// divides `|R|`, so the search stops there.
pub fn find_obstruction_d(ring: &RingSpec) -> Option<u64> {
    (1..=ring.order()).find(|&d| {
        let x = ring.from_int(d as i64);
        x.in_maximal_ideal() && !x.is_zero()
    })
}

/// The unit `u` with `d·1 = up`.
pub fn obstruction_unit(ring: &RingSpec, d: u64) -> Result<RingElement, AlgebraicityError> {
    match ring.classify(ring.from_int(d as i64)) {
        ElementClass::UnitTimesP { u } => Ok(u),
        _ => Err(AlgebraicityError::InvalidD(d)),
    }
}

/// The scalar null-homotopy system for `d·1 = up`: `n - 2` equations in the
/// `n - 3` unknowns `q_1..q_{n-3}`.
pub fn obstruction_system(ring: &RingSpec, n: usize, d: u64) -> Result<LinearSystem, AlgebraicityError> {
    if n < 3 {
        return Err(AlgebraicityError::TooShort(n));
    }
    let u = obstruction_unit(ring, d)?;
    let up = ring.mul(u, ring.p());
    let m = n - 3;
    let mut sys = LinearSystem::new(ring, m);
    for j in 1..=n - 2 {
        let mut terms = Vec::new();
        if j >= 2 {
            terms.push((j - 2, ring.p()));
        }
        if j <= m {
            terms.push((j - 1, ring.p()));
        }
        sys.add_equation(terms, up);
    }
    Ok(sys)
}

/// Checks `(q_1, ..., q_{n-3})` against the system exactly.
pub fn verify_null_homotopy(ring: &RingSpec, n: usize, d: u64, q: &[RingElement]) -> bool {
    let Ok(sys) = obstruction_system(ring, n, d) else {
        return false;
    };
    q.len() == sys.unknowns() && sys.matrix().mul(ring, &RMatrix::column(q.to_vec())) == sys.rhs()
}

fn solve_obstruction(ring: &RingSpec, n: usize, d: u64) -> Result<Result<Vec<RingElement>, Infeasibility>, AlgebraicityError> {
    let sys = obstruction_system(ring, n, d)?;
    Ok(sys.solve().map(|sol| {
        // Only residues matter (every q_i is multiplied by p), so report the
        // canonical lifts.
        let q: Vec<RingElement> = sol.particular.entries().iter().map(|x| ring.lift(x.residue())).collect();
        debug_assert!(verify_null_homotopy(ring, n, d, &q));
        q
    }))
}

/// A null-homotopy `(q_1, ..., q_{n-3})`, or `None` when the system is
/// unsolvable.
pub fn null_homotopy_d(ring: &RingSpec, n: usize, d: u64) -> Result<Option<Vec<RingElement>>, AlgebraicityError> {
    Ok(solve_obstruction(ring, n, d)?.ok())
}

/// `(u, 0, u, ..., 0, u)` of length `n - 3`, for even `n`.
pub fn remark_witness(ring: &RingSpec, n: usize, u: RingElement) -> Vec<RingElement> {
    (0..n.saturating_sub(3)).map(|i| if i % 2 == 0 { ring.lift(u.residue()) } else { ring.zero() }).collect()
}

/// Null-homotopy of a chain endomorphism on an open chain
/// `C_0 -c_0-> C_1 -> ... -> C_{m-1}` (no wraparound): maps `h_j : C_{j+1} -> C_j`
/// with `f_j = h_j c_j + c_{j-1} h_{j-1}`, missing terms at the ends read as zero.
pub fn open_chain_null_homotopy(ring: &RingSpec, ranks: &[usize], maps: &[RMatrix], f: &[RMatrix]) -> Option<Vec<RMatrix>> {
    let m = ranks.len();
    assert_eq!(maps.len(), m.saturating_sub(1), "an open chain of m objects has m - 1 maps");
    assert_eq!(f.len(), m);
    let mut offset = 0;
    let unknowns: Vec<MatrixUnknown> = (0..m.saturating_sub(1))
        .map(|j| {
            let x = MatrixUnknown { offset, rows: ranks[j], cols: ranks[j + 1] };
            offset += x.len();
            x
        })
        .collect();
    let mut sys = LinearSystem::new(ring, offset);
    for j in 0..m {
        let mut terms = Vec::new();
        if j + 1 < m {
            terms.push(Term { coeff: ring.one(), left: None, unknown: unknowns[j], right: Some(&maps[j]) });
        }
        if j >= 1 {
            terms.push(Term { coeff: ring.one(), left: Some(&maps[j - 1]), unknown: unknowns[j - 1], right: None });
        }
        sys.add_matrix_equation(&terms, &f[j]);
    }
    let sol = sys.solve().ok()?;
    Some(unknowns.iter().map(|x| x.extract(&sol.particular)).collect())
}

/// The chain `(A/d)_1 -> ... -> (A/d)_{n-2}` read off the completion of
/// `d·1 : R -> R` to an n-angle, with `d` times its identity.
pub fn quotient_chain(ring: &RingSpec, n: usize, d: u64) -> Result<(Vec<usize>, Vec<RMatrix>, Vec<RMatrix>), AlgebraicityError> {
    if n < 3 {
        return Err(AlgebraicityError::TooShort(n));
    }
    obstruction_unit(ring, d)?;
    let dd = ring.from_int(d as i64);
    let angle = complete_to_angle(ring, n, &RMatrix::scalar(1, dd), ring.one()).expect("n >= 3, 1 is a unit");
    let ranks: Vec<usize> = (2..n).map(|i| angle.rank(i)).collect();
    let maps: Vec<RMatrix> = (2..n - 1).map(|i| angle.map(i).clone()).collect();
    let f = ranks.iter().map(|&r| RMatrix::scalar(r, dd)).collect();
    Ok((ranks, maps, f))
}

/// Unsolvability of the obstruction system, checkable by [`Self::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsolvabilityCertificate {
    pub system: RMatrix,
    pub rhs: RMatrix,
    pub infeasibility: Infeasibility,
}

impl UnsolvabilityCertificate {
    pub fn verify(&self, ring: &RingSpec) -> bool {
        self.infeasibility.verify(ring, &self.system, &self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconclusiveReason {
    NoValidD,
    /// Even `n`: the obstruction system is solvable.
    EvenN,
    /// Odd `n` with `2p != 0`: no `N_u` is an n-angulation.
    Parity,
    /// Odd `n`, `2p = 0`, and yet a solution was found.
    Solvable,
}

impl InconclusiveReason {
    pub fn label(self) -> &'static str {
        match self {
            InconclusiveReason::NoValidD => "no-valid-d",
            InconclusiveReason::EvenN => "even-n",
            InconclusiveReason::Parity => "parity",
            InconclusiveReason::Solvable => "solvable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObstructionVerdict {
    NotAlgebraic(UnsolvabilityCertificate),
    Inconclusive { reason: InconclusiveReason, witness: Option<Vec<RingElement>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub verdict: ObstructionVerdict,
    pub d: Option<u64>,
}

impl ObstructionReport {
    pub fn is_not_algebraic(&self) -> bool {
        matches!(self.verdict, ObstructionVerdict::NotAlgebraic(_))
    }
}

/// Runs the obstruction test for `N_u` on free modules over `ring`.
pub fn algebraicity_verdict(ring: &RingSpec, n: usize) -> Result<ObstructionReport, AlgebraicityError> {
    if n < 3 {
        return Err(AlgebraicityError::TooShort(n));
    }
    let Some(d) = find_obstruction_d(ring) else {
        return Ok(ObstructionReport {
            verdict: ObstructionVerdict::Inconclusive { reason: InconclusiveReason::NoValidD, witness: None },
            d: None,
        });
    };
    let inconclusive = |reason, witness| ObstructionReport { verdict: ObstructionVerdict::Inconclusive { reason, witness }, d: Some(d) };
    if n % 2 == 0 {
        let u = obstruction_unit(ring, d)?;
        let w = remark_witness(ring, n, u);
        assert!(verify_null_homotopy(ring, n, d, &w), "even-n witness must verify");
        return Ok(inconclusive(InconclusiveReason::EvenN, Some(w)));
    }
    if !ring.two_p_zero() {
        return Ok(inconclusive(InconclusiveReason::Parity, None));
    }
    let sys = obstruction_system(ring, n, d)?;
    Ok(match solve_obstruction(ring, n, d)? {
        Err(infeasibility) => ObstructionReport {
            verdict: ObstructionVerdict::NotAlgebraic(UnsolvabilityCertificate {
                system: sys.matrix(),
                rhs: sys.rhs(),
                infeasibility,
            }),
            d: Some(d),
        },
        Ok(q) => inconclusive(InconclusiveReason::Solvable, Some(q)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ints(ring: &RingSpec, xs: &[i64]) -> Vec<RingElement> {
        xs.iter().map(|&x| ring.from_int(x)).collect()
    }

    #[test]
    fn obstruction_d() {
        assert_eq!(find_obstruction_d(&RingSpec::parse("Z/4").unwrap()), Some(2));
        assert_eq!(find_obstruction_d(&RingSpec::parse("Z/9").unwrap()), Some(3));
        assert_eq!(find_obstruction_d(&RingSpec::parse("GF(2)[x]/(x^2)").unwrap()), None);
    }

    #[test]
    fn null_homotopies() {
        let r = RingSpec::parse("Z/4").unwrap();
        assert_eq!(null_homotopy_d(&r, 5, 2).unwrap(), None);
        assert_eq!(null_homotopy_d(&r, 4, 2).unwrap(), Some(ints(&r, &[1])));
        assert_eq!(null_homotopy_d(&r, 6, 2).unwrap(), Some(ints(&r, &[1, 0, 1])));
        assert_eq!(null_homotopy_d(&r, 3, 2).unwrap(), None);
        assert_eq!(null_homotopy_d(&r, 4, 1), Err(AlgebraicityError::InvalidD(1)));
    }

    #[test]
    fn verdicts() {
        let r = RingSpec::parse("Z/4").unwrap();
        let v3 = algebraicity_verdict(&r, 3).unwrap();
        match &v3.verdict {
            ObstructionVerdict::NotAlgebraic(c) => assert!(c.verify(&r)),
            other => panic!("{other:?}"),
        }
        let v4 = algebraicity_verdict(&r, 4).unwrap();
        assert_eq!(
            v4.verdict,
            ObstructionVerdict::Inconclusive { reason: InconclusiveReason::EvenN, witness: Some(ints(&r, &[1])) }
        );
        let dual = RingSpec::parse("GF(2)[x]/(x^2)").unwrap();
        assert_eq!(algebraicity_verdict(&dual, 5).unwrap().d, None);
        let z9 = RingSpec::parse("Z/9").unwrap();
        assert!(matches!(
            algebraicity_verdict(&z9, 5).unwrap().verdict,
            ObstructionVerdict::Inconclusive { reason: InconclusiveReason::Parity, .. }
        ));
    }

    #[test]
    fn open_chain_agrees_with_scalar_system() {
        let r = RingSpec::parse("Z/4").unwrap();
        for n in 3..9 {
            let (ranks, maps, f) = quotient_chain(&r, n, 2).unwrap();
            assert_eq!(ranks, vec![1; n - 2]);
            let chain = open_chain_null_homotopy(&r, &ranks, &maps, &f);
            assert_eq!(chain.is_some(), null_homotopy_d(&r, n, 2).unwrap().is_some(), "n = {n}");
        }
    }
}
