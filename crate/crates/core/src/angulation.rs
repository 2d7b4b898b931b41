//! Membership in the collections `N_u`, the completions demanded by the
//! axioms, classification of all n-angulations, and a seeded axiom checker.
//!
//! `N_u` consists of the sequences isomorphic to `C ⊕ F(up)` with `C`
//! contractible, where `F(up)` is `F -up-> F -p-> ... -p-> ΣF`. Deciding
//! membership proceeds by splitting off trivial summands until every map has
//! entries in `m`. What remains is a minimal core `p*B_1, ..., p*B_n`; it is
//! exact exactly when all ranks agree and every residue matrix `B̄_i` is
//! invertible. Isomorphisms of such cores act on the residue product
//! `B̄_n ... B̄_1` by conjugation, and the product for `F(up)` is the scalar
//! `ū I`, so a core lies in `N_u` iff its product equals `ū I`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::KElement;
use crate::matrix::{normal_form, KMatrix, LinearSystem, MatrixUnknown, RMatrix, Term};
use crate::ring::{RingElement, RingSpec};
use crate::sequences::{NSequence, SeqMorphism, SequenceError, TrivialSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AngulationError {
    Sequence(SequenceError),
    TooShort(usize),
    NotCandidate,
    NotAUnit,
    /// Odd `n` while `2p != 0`: no `N_u` is closed under rotation.
    Parity { n: usize },
    NotMember { which: &'static str },
    FirstSquare,
    /// The construction produced something that fails its own checks.
    Completion(String),
}

impl fmt::Display for AngulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngulationError::Sequence(e) => write!(f, "{e}"),
            AngulationError::TooShort(n) => write!(f, "n must be at least 3, got {n}"),
            AngulationError::NotCandidate => write!(f, "sequence is not a candidate (some composite is nonzero)"),
            AngulationError::NotAUnit => write!(f, "u must be a unit"),
            AngulationError::Parity { n } => {
                write!(f, "n = {n} is odd and 2p != 0, so no N_u is closed under rotation")
            }
            AngulationError::NotMember { which } => write!(f, "{which} sequence is not in N_u"),
            AngulationError::FirstSquare => write!(f, "the given square does not commute"),
            AngulationError::Completion(msg) => write!(f, "completion failed: {msg}"),
        }
    }
}

impl core::error::Error for AngulationError {}

impl From<SequenceError> for AngulationError {
    fn from(e: SequenceError) -> Self {
        AngulationError::Sequence(e)
    }
}

/// Direct sum of trivial sequences, in list order.
pub fn trivial_sum(ring: &RingSpec, n: usize, specs: &[TrivialSpec]) -> Result<NSequence, SequenceError> {
    let mut acc = NSequence::zero(ring, n)?;
    for &s in specs {
        acc = acc.direct_sum(&NSequence::trivial(ring, n, s)?)?;
    }
    Ok(acc)
}

/// `X ≅ core ⊕ trivials` via `iso`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub core: NSequence,
    pub trivials: Vec<TrivialSpec>,
    /// `apply_iso(X, iso) == core ⊕ trivial_sum(trivials)`.
    pub iso: Vec<RMatrix>,
}

impl SplitResult {
    pub fn contractible_part(&self) -> NSequence {
        trivial_sum(self.core.ring(), self.core.n(), &self.trivials).expect("valid trivial specs")
    }

    pub fn reconstructs(&self, x: &NSequence) -> bool {
        let target = self.core.direct_sum(&self.contractible_part()).expect("same shape");
        x.apply_iso(&self.iso).is_ok_and(|y| y == target)
    }
}

fn find_unit(x: &NSequence) -> Option<(usize, usize, usize)> {
    let ring = x.ring();
    (0..x.n()).find_map(|i| {
        let m = x.map(i);
        (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))).find(|&(r, c)| ring.is_unit(m[(r, c)])).map(|(r, c)| (i, r, c))
    })
}

/// Base-changes objects `i` and `i+1` so that map `i` has an isolated `1` in
/// its last row and column, then drops that pair of basis vectors. Returns the
/// base change and the smaller sequence.
fn peel(x: &NSequence, i: usize, r: usize, c: usize) -> (Vec<RMatrix>, NSequence) {
    let ring = x.ring();
    let n = x.n();
    let j = (i + 1) % n;
    let (ti, tj) = (x.rank(i), x.rank(j));
    let mut a = x.map(i).clone();
    let mut p = RMatrix::identity(ring, tj);
    let mut q = RMatrix::identity(ring, ti);
    let (lr, lc) = (tj - 1, ti - 1);
    a.swap_rows(r, lr);
    p.swap_rows(r, lr);
    a.swap_cols(c, lc);
    q.swap_cols(c, lc);
    let s = ring.inverse(a[(lr, lc)]).expect("pivot is a unit");
    a.scale_row(ring, lr, s);
    p.scale_row(ring, lr, s);
    for rr in 0..tj {
        if rr != lr && !a[(rr, lc)].is_zero() {
            let f = ring.neg(a[(rr, lc)]);
            a.add_row_multiple(ring, rr, lr, f);
            p.add_row_multiple(ring, rr, lr, f);
        }
    }
    for cc in 0..ti {
        if cc != lc && !a[(lr, cc)].is_zero() {
            let f = ring.neg(a[(lr, cc)]);
            a.add_col_multiple(ring, cc, lc, f);
            q.add_col_multiple(ring, cc, lc, f);
        }
    }
    let mut psi: Vec<RMatrix> = x.ranks().iter().map(|&t| RMatrix::identity(ring, t)).collect();
    psi[j] = p;
    psi[i] = q.inverse(ring).expect("column operations are invertible");
    let moved = x.apply_iso(&psi).expect("invertible base change");
    debug_assert_eq!(moved.map(i), &a);

    let mut ranks = x.ranks().to_vec();
    ranks[i] -= 1;
    ranks[j] -= 1;
    let maps = (0..n)
        .map(|k| {
            let m = moved.map(k);
            let rows = ranks[(k + 1) % n];
            let cols = ranks[k];
            debug_assert!(
                k == i
                    || (rows..m.rows()).all(|rr| (0..m.cols()).all(|cc| m[(rr, cc)].is_zero()))
                        && (cols..m.cols()).all(|cc| (0..m.rows()).all(|rr| m[(rr, cc)].is_zero())),
                "candidate condition isolates the trivial summand"
            );
            m.submatrix(0..rows, 0..cols)
        })
        .collect();
    (psi, NSequence::new(ring, ranks, maps).expect("consistent shapes"))
}

/// Splits `x` as a minimal core plus rank-one trivial summands.
pub fn split_trivials(x: &NSequence) -> Result<SplitResult, AngulationError> {
    if !x.is_candidate() {
        return Err(AngulationError::NotCandidate);
    }
    let ring = x.ring();
    let mut core = x.clone();
    let mut iso: Vec<RMatrix> = x.ranks().iter().map(|&r| RMatrix::identity(ring, r)).collect();
    let mut trivials = Vec::new();
    while let Some((i, r, c)) = find_unit(&core) {
        let (step, smaller) = peel(&core, i, r, c);
        for (total, s) in iso.iter_mut().zip(&step) {
            let rest = total.rows() - s.rows();
            *total = RMatrix::block_diag(s, &RMatrix::identity(ring, rest)).mul(ring, total);
        }
        trivials.insert(0, TrivialSpec { rank: 1, position: i + 1 });
        core = smaller;
    }
    let result = SplitResult { core, trivials, iso };
    assert!(result.reconstructs(x), "split reconstruction failed");
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NotMemberReason {
    NotCandidate,
    NotExact,
    RanksUnequal,
    ProductNotScalar,
}

impl NotMemberReason {
    pub fn label(self) -> &'static str {
        match self {
            NotMemberReason::NotCandidate => "not-candidate",
            NotMemberReason::NotExact => "not-exact",
            NotMemberReason::RanksUnequal => "ranks-unequal",
            NotMemberReason::ProductNotScalar => "product-not-scalar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// In `N_u` exactly for the units `u` with residue `ū`.
    InNu(KElement),
    /// In every `N_u`.
    Contractible,
    NotInAny(NotMemberReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    pub split: Option<SplitResult>,
    /// `B̄_n ... B̄_1` of the minimal core, when it is defined.
    pub product_residue: Option<KMatrix>,
    /// For members: `apply_iso(X, witness) == F(up) ⊕ trivial_sum(trivials)`
    /// with `F` of the core rank (zero for contractible `X`).
    pub witness: Option<Vec<RMatrix>>,
}

impl MembershipCertificate {
    /// Rank of the non-contractible part, for members.
    pub fn core_rank(&self) -> usize {
        self.split.as_ref().map_or(0, |s| s.core.rank(0))
    }

    /// The normal form `F(up) ⊕ C` that the witness maps onto.
    pub fn target(&self, x: &NSequence, u: RingElement) -> Option<NSequence> {
        let split = self.split.as_ref()?;
        self.witness.as_ref()?;
        let f = NSequence::standard_angle(x.ring(), x.n(), u, self.core_rank()).ok()?;
        f.direct_sum(&split.contractible_part()).ok()
    }

    pub fn is_member(&self, u: RingElement) -> bool {
        match self.verdict {
            Verdict::Contractible => true,
            Verdict::InNu(ubar) => ubar == u.residue(),
            Verdict::NotInAny(_) => false,
        }
    }
}

fn not_in_any(reason: NotMemberReason, split: Option<SplitResult>, product: Option<KMatrix>) -> MembershipCertificate {
    MembershipCertificate { verdict: Verdict::NotInAny(reason), split, product_residue: product, witness: None }
}

/// Decides which `N_u` (if any) contain `x`, with a witness isomorphism for
/// members.
pub fn classify(x: &NSequence) -> MembershipCertificate {
    if !x.is_candidate() {
        return not_in_any(NotMemberReason::NotCandidate, None, None);
    }
    let ring = x.ring();
    let k = ring.residue_field();
    let n = x.n();
    let split = split_trivials(x).expect("candidate");
    let core = &split.core;
    if core.total_rank() == 0 {
        let witness = Some(split.iso.clone());
        return MembershipCertificate { verdict: Verdict::Contractible, split: Some(split), product_residue: None, witness };
    }
    let r = core.rank(0);
    if core.ranks().iter().any(|&t| t != r) {
        return not_in_any(NotMemberReason::RanksUnequal, Some(split), None);
    }
    let factors: Vec<KMatrix> = core
        .maps()
        .iter()
        .map(|m| KMatrix::from_entries(r, r, m.entries().iter().map(|e| e.p_part()).collect()).expect("square"))
        .collect();
    if factors.iter().any(|b| !b.is_invertible(k)) {
        return not_in_any(NotMemberReason::NotExact, Some(split), None);
    }
    let product = factors.iter().fold(KMatrix::identity(r), |acc, b| b.mul(k, &acc));
    let Some(ubar) = product.as_scalar() else {
        return not_in_any(NotMemberReason::ProductNotScalar, Some(split), Some(product));
    };

    // Carry the core onto F(up): ψ̄_1 = I and ψ̄_{i+1} = B̄'_i ψ̄_i B̄_i^{-1},
    // where B̄'_1 = ū I and B̄'_i = I otherwise. The wraparound closes because
    // both residue products equal ū I.
    let mut psibar = vec![KMatrix::identity(r)];
    for (i, b) in factors.iter().enumerate().take(n - 1) {
        let binv = b.inverse(k).expect("invertible");
        let next = psibar[i].mul(k, &binv);
        psibar.push(if i == 0 { KMatrix::scalar(r, ubar).mul(k, &next) } else { next });
    }
    let witness: Vec<RMatrix> = psibar
        .iter()
        .zip(&split.iso)
        .map(|(pb, total)| {
            let lifted = RMatrix::lift(ring, pb);
            let rest = total.rows() - r;
            RMatrix::block_diag(&lifted, &RMatrix::identity(ring, rest)).mul(ring, total)
        })
        .collect();
    let cert = MembershipCertificate {
        verdict: Verdict::InNu(ubar),
        split: Some(split),
        product_residue: Some(product),
        witness: Some(witness),
    };
    let target = cert.target(x, ring.lift(ubar)).expect("member");
    assert_eq!(x.apply_iso(cert.witness.as_ref().unwrap()).as_ref(), Ok(&target), "membership witness check failed");
    cert
}

/// `x ∈ N_u`.
pub fn membership(x: &NSequence, u: RingElement) -> bool {
    x.ring().is_unit(u) && classify(x).is_member(u)
}

/// A sequence in `N_u` whose first map is exactly `alpha`.
pub fn complete_to_angle(ring: &RingSpec, n: usize, alpha: &RMatrix, u: RingElement) -> Result<NSequence, AngulationError> {
    if n < 3 {
        return Err(AngulationError::TooShort(n));
    }
    if !ring.is_unit(u) {
        return Err(AngulationError::NotAUnit);
    }
    let nf = normal_form(ring, alpha);
    let (u0, v0) = (nf.u, nf.v);
    let excess_source = alpha.cols() - u0 - v0;
    let excess_target = alpha.rows() - u0 - v0;
    // Minimal core with first map p and the unit on the second map.
    let mut maps: Vec<RMatrix> = (0..n).map(|_| RMatrix::scalar(u0, ring.p())).collect();
    maps[1] = RMatrix::scalar(u0, ring.mul(u, ring.p()));
    let core = NSequence::new(ring, vec![u0; n], maps)?;
    let specs = [
        TrivialSpec { rank: v0, position: 1 },
        TrivialSpec { rank: excess_source, position: n },
        TrivialSpec { rank: excess_target, position: 2 },
    ];
    let s = core.direct_sum(&trivial_sum(ring, n, &specs)?)?;
    debug_assert_eq!(s.map(0), &nf.d);
    let mut psi: Vec<RMatrix> = s.ranks().iter().map(|&t| RMatrix::identity(ring, t)).collect();
    psi[0] = nf.q.clone();
    psi[1] = nf.p.inverse(ring).expect("normal form transforms are invertible");
    let out = s.apply_iso(&psi)?;
    if out.map(0) != alpha {
        return Err(AngulationError::Completion("first map differs from the input".into()));
    }
    Ok(out)
}

/// Extends `(phi0, phi1)` to a morphism `src -> tgt` by solving the remaining
/// squares as one linear system. `None` when no extension exists.
pub fn extend_morphism(
    src: &NSequence,
    tgt: &NSequence,
    phi0: &RMatrix,
    phi1: &RMatrix,
) -> Result<Option<SeqMorphism>, AngulationError> {
    let ring = src.ring();
    let n = src.n();
    let mut offset = 0;
    let mut unknowns: Vec<Option<MatrixUnknown>> = vec![None, None];
    for i in 2..n {
        let x = MatrixUnknown { offset, rows: tgt.rank(i), cols: src.rank(i) };
        offset += x.len();
        unknowns.push(Some(x));
    }
    let known = [phi0, phi1];
    let mut sys = LinearSystem::new(ring, offset);
    for i in 1..n {
        let next = (i + 1) % n;
        let mut terms = Vec::new();
        let mut rhs = RMatrix::zeros(tgt.rank(i + 1), src.rank(i));
        match unknowns[i] {
            Some(x) => terms.push(Term { coeff: ring.one(), left: Some(tgt.map(i)), unknown: x, right: None }),
            None => rhs = rhs.sub(ring, &tgt.map(i).mul(ring, known[i])),
        }
        match unknowns[next] {
            Some(x) => terms.push(Term { coeff: ring.neg(ring.one()), left: None, unknown: x, right: Some(src.map(i)) }),
            None => rhs = rhs.add(ring, &known[next].mul(ring, src.map(i))),
        }
        sys.add_matrix_equation(&terms, &rhs);
    }
    let Ok(sol) = sys.solve() else {
        return Ok(None);
    };
    let phis = (0..n)
        .map(|i| match unknowns[i] {
            Some(x) => x.extract(&sol.particular),
            None => known[i].clone(),
        })
        .collect();
    match SeqMorphism::new(src, tgt, phis) {
        Ok(m) => Ok(Some(m)),
        Err(SequenceError::NotCommuting { index: 0 }) => Err(AngulationError::FirstSquare),
        Err(e) => Err(e.into()),
    }
}

/// Between `F(up)` and `G(up)`: every component shares one residue `M`.
/// After constant changes of basis making the lift of `M` exactly
/// `diag(I, 0)`, split `φ_i = ψ' + p θ_i` and take
/// `(φ_1, φ_2, φ_2 - p θ_1, ψ', ..., ψ')`. Without the change of basis the
/// `ker M -> coker M` part of `θ_1 - θ_2 + θ_3 - ...` can survive (odd `n`,
/// characteristic 2) and the cone leaves `N_u`.
fn cone_recipe(ring: &RingSpec, n: usize, phi0: &RMatrix, phi1: &RMatrix) -> Vec<RMatrix> {
    let nf = normal_form(ring, &RMatrix::lift(ring, &phi0.residue()));
    let p_inv = nf.p.inverse(ring).expect("normal form transforms are invertible");
    let q_inv = nf.q.inverse(ring).expect("normal form transforms are invertible");
    let adapt = |m: &RMatrix| nf.p.mul(ring, m).mul(ring, &nf.q);
    let back = |m: &RMatrix| p_inv.mul(ring, m).mul(ring, &q_inv);
    let (unit, theta0) = adapt(phi0).split_unit_part(ring);
    let (unit1, theta1) = adapt(phi1).split_unit_part(ring);
    debug_assert_eq!(unit, unit1, "commuting square forces equal residues");
    let third = unit.add(ring, &theta1.sub(ring, &theta0).scale(ring, ring.p()));
    let mut out = vec![phi0.clone(), phi1.clone(), back(&third)];
    out.extend((3..n).map(|_| back(&unit)));
    out
}

fn split_block(m: &RMatrix, rows: usize, cols: usize) -> [RMatrix; 4] {
    let (r, c) = m.shape();
    [
        m.submatrix(0..rows, 0..cols),
        m.submatrix(0..rows, cols..c),
        m.submatrix(rows..r, 0..cols),
        m.submatrix(rows..r, cols..c),
    ]
}

/// Completes a commuting square `(phi0, phi1)` between members of `N_u` to a
/// morphism whose mapping cone is again in `N_u`.
pub fn complete_morphism(
    x: &NSequence,
    y: &NSequence,
    phi0: &RMatrix,
    phi1: &RMatrix,
    u: RingElement,
) -> Result<SeqMorphism, AngulationError> {
    let ring = x.ring();
    let n = x.n();
    if ring != y.ring() {
        return Err(SequenceError::RingMismatch.into());
    }
    if n != y.n() {
        return Err(SequenceError::LengthMismatch.into());
    }
    check_parity(ring, n)?;
    if !ring.is_unit(u) {
        return Err(AngulationError::NotAUnit);
    }
    if phi0.shape() != (y.rank(0), x.rank(0)) || phi1.shape() != (y.rank(1), x.rank(1)) {
        return Err(AngulationError::FirstSquare);
    }
    if y.map(0).mul(ring, phi0) != phi1.mul(ring, x.map(0)) {
        return Err(AngulationError::FirstSquare);
    }
    let cx = classify(x);
    if !cx.is_member(u) {
        return Err(AngulationError::NotMember { which: "source" });
    }
    let cy = classify(y);
    if !cy.is_member(u) {
        return Err(AngulationError::NotMember { which: "target" });
    }
    let (wx, wy) = (cx.witness.as_ref().unwrap(), cy.witness.as_ref().unwrap());
    let (r, s) = (cx.core_rank(), cy.core_rank());
    let xf = NSequence::standard_angle(ring, n, u, r)?;
    let yf = NSequence::standard_angle(ring, n, u, s)?;
    let xt = cx.split.as_ref().unwrap().contractible_part();
    let yt = cy.split.as_ref().unwrap().contractible_part();

    let wx_inv: Vec<RMatrix> = wx.iter().map(|m| m.inverse(ring).expect("witness is invertible")).collect();
    let wy_inv: Vec<RMatrix> = wy.iter().map(|m| m.inverse(ring).expect("witness is invertible")).collect();
    let moved0 = wy[0].mul(ring, phi0).mul(ring, &wx_inv[0]);
    let moved1 = wy[1].mul(ring, phi1).mul(ring, &wx_inv[1]);
    let [f0, g0, h0, k0] = split_block(&moved0, s, r);
    let [f1, g1, h1, k1] = split_block(&moved1, s, r);

    let f = cone_recipe(ring, n, &f0, &f1);
    let missing = |what: &str| AngulationError::Completion(format!("no extension for the {what} block"));
    let g = extend_morphism(&xt, &yf, &g0, &g1)?.ok_or_else(|| missing("contractible-to-core"))?;
    let h = extend_morphism(&xf, &yt, &h0, &h1)?.ok_or_else(|| missing("core-to-contractible"))?;
    let k = extend_morphism(&xt, &yt, &k0, &k1)?.ok_or_else(|| missing("contractible"))?;

    let phis: Vec<RMatrix> = (0..n)
        .map(|i| {
            let block = RMatrix::block2x2(&f[i], &g.phis()[i], &h.phis()[i], &k.phis()[i]);
            wy_inv[i].mul(ring, &block).mul(ring, &wx[i])
        })
        .collect();
    let morphism = SeqMorphism::new(x, y, phis).map_err(|e| AngulationError::Completion(format!("{e}")))?;
    if &morphism.phis()[0] != phi0 || &morphism.phis()[1] != phi1 {
        return Err(AngulationError::Completion("first components changed".into()));
    }
    if !membership(&morphism.mapping_cone(), u) {
        return Err(AngulationError::Completion("mapping cone is not in N_u".into()));
    }
    Ok(morphism)
}

fn check_parity(ring: &RingSpec, n: usize) -> Result<(), AngulationError> {
    if n < 3 {
        return Err(AngulationError::TooShort(n));
    }
    if n % 2 == 1 && !ring.two_p_zero() {
        return Err(AngulationError::Parity { n });
    }
    Ok(())
}

/// One n-angulation `N_u`, represented by its rank-one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngulationClass {
    pub u_rep: RingElement,
    pub generator: NSequence,
}

/// Membership of the left rotation of `F(up)` in `N_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RotationEntry {
    pub u: RingElement,
    pub v: RingElement,
    pub rotated_member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoneExistWitness {
    pub reason: String,
    /// All pairs of unit classes; empty for symbolic answers.
    pub table: Vec<RotationEntry>,
}

impl NoneExistWitness {
    /// For every `u`, rotating `F(up)` leaves `N_u`, so `N_u` violates the
    /// rotation axiom.
    pub fn rotation_leaves_every_class(&self) -> bool {
        self.table.iter().filter(|e| e.u == e.v).all(|e| !e.rotated_member)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Classes(Vec<AngulationClass>),
    NoneExist(NoneExistWitness),
    /// Symbolic answer for an infinite residue field.
    InfiniteFamily(String),
}

/// All n-angulations of free modules over `ring` with `Σ` the identity.
pub fn enumerate_angulations(ring: &RingSpec, n: usize) -> Result<Enumeration, AngulationError> {
    if n < 3 {
        return Err(AngulationError::TooShort(n));
    }
    let units = ring.unit_classes();
    if n % 2 == 1 && !ring.two_p_zero() {
        let mut table = Vec::new();
        for &u in &units {
            let rotated = NSequence::standard_angle(ring, n, u, 1)?.rotate_left();
            let cert = classify(&rotated);
            for &v in &units {
                table.push(RotationEntry { u, v, rotated_member: cert.is_member(v) });
            }
        }
        let reason = format!(
            "every n-angulation equals some N_u, but for odd n = {n} with 2p != 0 the left rotation of F(up) \
             lies in N_(-u) != N_u, so rotation fails for every u"
        );
        return Ok(Enumeration::NoneExist(NoneExistWitness { reason, table }));
    }
    let classes = units
        .into_iter()
        .map(|u| Ok(AngulationClass { u_rep: u, generator: NSequence::standard_angle(ring, n, u, 1)? }))
        .collect::<Result<Vec<_>, SequenceError>>()?;
    Ok(Enumeration::Classes(classes))
}

/// The answer for a residue field too large to list: one class per unit
/// class, or none for odd `n` when `2p != 0`.
pub fn infinite_family(n: usize, two_p_zero: bool) -> Result<Enumeration, AngulationError> {
    if n < 3 {
        return Err(AngulationError::TooShort(n));
    }
    if n % 2 == 1 && !two_p_zero {
        return Ok(Enumeration::NoneExist(NoneExistWitness {
            reason: format!("odd n = {n} with 2p != 0: the left rotation of F(up) lies in N_(-u) != N_u"),
            table: Vec::new(),
        }));
    }
    Ok(Enumeration::InfiniteFamily(
        "one n-angulation N_u for each class u in k*, with N_u = N_v iff up = vp; infinitely many".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    N1aSum,
    N1aIso,
    N1aSummand,
    N1b,
    N1c,
    N2Left,
    N2Right,
    N3N4,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::N1aSum,
        Axiom::N1aIso,
        Axiom::N1aSummand,
        Axiom::N1b,
        Axiom::N1c,
        Axiom::N2Left,
        Axiom::N2Right,
        Axiom::N3N4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::N1aSum => "N1a-sum",
            Axiom::N1aIso => "N1a-iso",
            Axiom::N1aSummand => "N1a-summand",
            Axiom::N1b => "N1b",
            Axiom::N1c => "N1c",
            Axiom::N2Left => "N2-left",
            Axiom::N2Right => "N2-right",
            Axiom::N3N4 => "N3/N4",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

/// A failed check, with the sequences involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: u64,
    pub axiom: Axiom,
    pub detail: String,
    pub sequences: Vec<NSequence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub trials: u64,
    pub tallies: [Tally; 8],
    /// The failure with the smallest `(trial, axiom)`, so merging is
    /// associative and order independent.
    pub first_failure: Option<Counterexample>,
}

impl Default for SuiteReport {
    fn default() -> Self {
        SuiteReport { trials: 0, tallies: [Tally::default(); 8], first_failure: None }
    }
}

impl SuiteReport {
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.trials += other.trials;
        for (a, b) in self.tallies.iter_mut().zip(other.tallies) {
            a.passed += b.passed;
            a.failed += b.failed;
        }
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(if (b.trial, b.axiom) < (a.trial, a.axiom) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn tally(&self, axiom: Axiom) -> Tally {
        self.tallies[axiom as usize]
    }

    pub fn checks(&self) -> u64 {
        self.tallies.iter().map(|t| t.passed + t.failed).sum()
    }

    pub fn failures(&self) -> u64 {
        self.tallies.iter().map(|t| t.failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    fn record(&mut self, trial: u64, axiom: Axiom, ok: bool, detail: &str, sequences: &[&NSequence]) {
        let t = &mut self.tallies[axiom as usize];
        if ok {
            t.passed += 1;
            return;
        }
        t.failed += 1;
        let c = Counterexample {
            trial,
            axiom,
            detail: detail.into(),
            sequences: sequences.iter().map(|&s| s.clone()).collect(),
        };
        let keep_old = self.first_failure.as_ref().is_some_and(|old| (old.trial, old.axiom) <= (trial, axiom));
        if !keep_old {
            self.first_failure = Some(c);
        }
    }
}

/// Validates suite parameters: `n >= 3`, `u` a unit, and `n` even or `2p = 0`.
pub fn check_suite_params(ring: &RingSpec, n: usize, u: RingElement) -> Result<(), AngulationError> {
    check_parity(ring, n)?;
    if !ring.is_unit(u) {
        return Err(AngulationError::NotAUnit);
    }
    Ok(())
}

/// Runs `trials` independent seeded trials sequentially.
pub fn run_axiom_suite(
    ring: &RingSpec,
    n: usize,
    u: RingElement,
    max_rank: usize,
    trials: u64,
    seed: u64,
) -> Result<SuiteReport, AngulationError> {
    check_suite_params(ring, n, u)?;
    Ok((0..trials).fold(SuiteReport::default(), |acc, t| acc.merge(run_axiom_trial(ring, n, u, max_rank, seed, t))))
}

/// The generator for trial `trial`: stream `trial` of the ChaCha8 generator
/// keyed by `seed`, so trials are independent of scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One trial of the axiom checks. Parameters must already be valid.
pub fn run_axiom_trial(ring: &RingSpec, n: usize, u: RingElement, max_rank: usize, seed: u64, trial: u64) -> SuiteReport {
    let mut rng = trial_rng(seed, trial);
    let mut report = SuiteReport { trials: 1, ..SuiteReport::default() };
    let x = random_member(&mut rng, ring, n, u, max_rank);
    let y = random_member(&mut rng, ring, n, u, max_rank);
    let w = random_candidate(&mut rng, ring, n, max_rank);
    let w_member = membership(&w, u);

    let sum = x.direct_sum(&y).expect("same shape");
    report.record(trial, Axiom::N1aSum, membership(&sum, u), "sum of members is not a member", &[&x, &y]);

    let psi = random_iso(&mut rng, ring, x.ranks());
    let moved = x.apply_iso(&psi).expect("invertible");
    report.record(trial, Axiom::N1aIso, membership(&moved, u), "isomorphic copy is not a member", &[&x, &moved]);

    let xw = x.direct_sum(&w).expect("same shape");
    report.record(
        trial,
        Axiom::N1aSummand,
        membership(&xw, u) == w_member,
        "membership of X ⊕ W differs from membership of W",
        &[&x, &w],
    );

    let spec = TrivialSpec { rank: rng.gen_range(1..=max_rank.max(1)), position: rng.gen_range(1..=n) };
    let t = NSequence::trivial(ring, n, spec).expect("valid spec");
    report.record(trial, Axiom::N1b, membership(&t, u), "trivial sequence is not a member", &[&t]);

    let (rows, cols) = (rng.gen_range(0..=max_rank), rng.gen_range(0..=max_rank));
    let alpha = random_matrix(&mut rng, ring, rows, cols);
    match complete_to_angle(ring, n, &alpha, u) {
        Ok(s) => report.record(
            trial,
            Axiom::N1c,
            s.map(0) == &alpha && membership(&s, u),
            "completion is not a member with the given first map",
            &[&s],
        ),
        Err(e) => {
            let probe = NSequence::zero(ring, n).expect("n >= 3");
            report.record(trial, Axiom::N1c, false, &format!("{e}"), &[&probe]);
        }
    }

    let left_ok = membership(&x.rotate_left(), u) && membership(&w.rotate_left(), u) == w_member;
    report.record(trial, Axiom::N2Left, left_ok, "left rotation changes membership", &[&x, &w]);
    let right_ok = membership(&x.rotate_right(), u)
        && membership(&w.rotate_right(), u) == w_member
        && x.rotate_left().rotate_right() == x;
    report.record(trial, Axiom::N2Right, right_ok, "right rotation changes membership", &[&x, &w]);

    let (phi0, phi1) = random_square(&mut rng, &x, &y);
    match complete_morphism(&x, &y, &phi0, &phi1, u) {
        Ok(_) => report.record(trial, Axiom::N3N4, true, "", &[]),
        Err(e) => report.record(trial, Axiom::N3N4, false, &format!("{e}"), &[&x, &y]),
    }
    report
}

pub fn random_element<R: Rng>(rng: &mut R, ring: &RingSpec) -> RingElement {
    let q = ring.q();
    ring.element(rng.gen_range(0..q), rng.gen_range(0..q)).expect("in range")
}

pub fn random_matrix<R: Rng>(rng: &mut R, ring: &RingSpec, rows: usize, cols: usize) -> RMatrix {
    let entries = (0..rows * cols).map(|_| random_element(rng, ring)).collect();
    RMatrix::from_entries(rows, cols, entries).expect("sized")
}

pub fn random_invertible<R: Rng>(rng: &mut R, ring: &RingSpec, n: usize) -> RMatrix {
    loop {
        let m = random_matrix(rng, ring, n, n);
        if m.is_invertible(ring) {
            return m;
        }
    }
}

pub fn random_iso<R: Rng>(rng: &mut R, ring: &RingSpec, ranks: &[usize]) -> Vec<RMatrix> {
    ranks.iter().map(|&r| random_invertible(rng, ring, r)).collect()
}

/// Rank-one trivial summands added at random while every object stays within
/// `max_rank`, given the current object ranks.
fn random_trivials<R: Rng>(rng: &mut R, n: usize, ranks: &mut [usize], max_rank: usize) -> Vec<TrivialSpec> {
    let mut specs = Vec::new();
    for _ in 0..n * max_rank {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let pos = rng.gen_range(1..=n);
        let (a, b) = (pos - 1, pos % n);
        if ranks[a] < max_rank && ranks[b] < max_rank {
            ranks[a] += 1;
            ranks[b] += 1;
            specs.push(TrivialSpec { rank: 1, position: pos });
        }
    }
    specs
}

/// A random member of `N_u` with every object of rank at most `max_rank`.
pub fn random_member<R: Rng>(rng: &mut R, ring: &RingSpec, n: usize, u: RingElement, max_rank: usize) -> NSequence {
    let r = rng.gen_range(0..=max_rank);
    let base = NSequence::standard_angle(ring, n, u, r).expect("unit");
    let mut ranks = vec![r; n];
    let specs = random_trivials(rng, n, &mut ranks, max_rank);
    let x = base.direct_sum(&trivial_sum(ring, n, &specs).expect("valid")).expect("same shape");
    let psi = random_iso(rng, ring, x.ranks());
    x.apply_iso(&psi).expect("invertible")
}

/// A random exact candidate: a minimal core with random invertible residue
/// factors plus trivial summands, in a random basis. It may or may not lie in
/// any given `N_u`.
pub fn random_candidate<R: Rng>(rng: &mut R, ring: &RingSpec, n: usize, max_rank: usize) -> NSequence {
    let r = rng.gen_range(0..=max_rank);
    let maps = (0..n).map(|_| random_invertible(rng, ring, r).scale(ring, ring.p())).collect();
    let core = NSequence::new(ring, vec![r; n], maps).expect("square maps");
    let mut ranks = vec![r; n];
    let specs = random_trivials(rng, n, &mut ranks, max_rank);
    let x = core.direct_sum(&trivial_sum(ring, n, &specs).expect("valid")).expect("same shape");
    let psi = random_iso(rng, ring, x.ranks());
    x.apply_iso(&psi).expect("invertible")
}

/// A random `(φ_1, φ_2)` with `β_1 φ_1 = φ_2 α_1`, drawn from the solution
/// module of that homogeneous system.
pub fn random_square<R: Rng>(rng: &mut R, x: &NSequence, y: &NSequence) -> (RMatrix, RMatrix) {
    let ring = x.ring();
    let a = MatrixUnknown { offset: 0, rows: y.rank(0), cols: x.rank(0) };
    let b = MatrixUnknown { offset: a.len(), rows: y.rank(1), cols: x.rank(1) };
    let mut sys = LinearSystem::new(ring, a.len() + b.len());
    sys.add_matrix_equation(
        &[
            Term { coeff: ring.one(), left: Some(y.map(0)), unknown: a, right: None },
            Term { coeff: ring.neg(ring.one()), left: None, unknown: b, right: Some(x.map(0)) },
        ],
        &RMatrix::zeros(y.rank(1), x.rank(0)),
    );
    let sol = sys.solve().expect("homogeneous systems are solvable");
    let mut v = RMatrix::zeros(a.len() + b.len(), 1);
    for g in &sol.kernel {
        v = v.add(ring, &g.scale(ring, random_element(rng, ring)));
    }
    (a.extract(&v), b.extract(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(ring: &RingSpec, xs: &[i64]) -> NSequence {
        let maps = xs.iter().map(|&x| RMatrix::from_ints(ring, &[&[x]])).collect();
        NSequence::new(ring, vec![1; xs.len()], maps).unwrap()
    }

    #[test]
    fn split_examples() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        let t = NSequence::trivial(&z4, 3, TrivialSpec { rank: 1, position: 1 }).unwrap();
        let s = split_trivials(&t).unwrap();
        assert_eq!(s.core.total_rank(), 0);
        assert_eq!(s.trivials, vec![TrivialSpec { rank: 1, position: 1 }]);
        let x = scalars(&z4, &[2, 2, 2]);
        let s = split_trivials(&x).unwrap();
        assert_eq!(s.core, x);
        assert!(s.trivials.is_empty());
        assert_eq!(split_trivials(&scalars(&z4, &[1, 1, 1])), Err(AngulationError::NotCandidate));
    }

    #[test]
    fn completion_with_singular_residue() {
        // Rank-2 residue on rank-3 standard angles over Z/4, n = 3: the
        // canonical lift in the original basis would give a cone outside N_1.
        let z4 = RingSpec::parse("Z/4").unwrap();
        let x = NSequence::standard_angle(&z4, 3, z4.one(), 3).unwrap();
        let phi0 = RMatrix::from_ints(&z4, &[&[3, 1, 2], &[0, 1, 1], &[1, 0, 1]]);
        let phi1 = RMatrix::from_ints(&z4, &[&[3, 1, 2], &[2, 1, 1], &[3, 0, 3]]);
        let f = complete_morphism(&x, &x, &phi0, &phi1, z4.one()).unwrap();
        assert_eq!(f.phis()[0], phi0);
        assert_eq!(f.phis()[1], phi1);
        assert!(membership(&f.mapping_cone(), z4.one()));
    }

    #[test]
    fn classify_examples() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        let x = scalars(&z4, &[2, 2, 2]);
        assert!(membership(&x, z4.from_int(1)) && membership(&x, z4.from_int(3)));

        let z9 = RingSpec::parse("Z/9").unwrap();
        let rot = scalars(&z9, &[3, 3, 3]).rotate_left();
        assert_eq!(classify(&rot).verdict, Verdict::InNu(2));
        assert!(!membership(&rot, z9.one()));

        let p3 = RMatrix::scalar(2, z9.p());
        let b = RMatrix::from_ints(&z9, &[&[3, 3], &[0, 3]]);
        let y = NSequence::new(&z9, vec![2; 3], vec![p3.clone(), p3, b]).unwrap();
        assert_eq!(classify(&y).verdict, Verdict::NotInAny(NotMemberReason::ProductNotScalar));
    }

    #[test]
    fn classify_rejections() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        assert_eq!(classify(&scalars(&z4, &[0, 2, 2])).verdict, Verdict::NotInAny(NotMemberReason::NotExact));
        assert_eq!(classify(&scalars(&z4, &[1, 1, 1])).verdict, Verdict::NotInAny(NotMemberReason::NotCandidate));
        let m = NSequence::new(
            &z4,
            vec![1, 2, 1],
            vec![RMatrix::from_ints(&z4, &[&[2], &[0]]), RMatrix::from_ints(&z4, &[&[2, 0]]), RMatrix::from_ints(&z4, &[&[2]])],
        )
        .unwrap();
        assert_eq!(classify(&m).verdict, Verdict::NotInAny(NotMemberReason::RanksUnequal));
    }

    #[test]
    fn completion_examples() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        let s = complete_to_angle(&z4, 3, &RMatrix::from_ints(&z4, &[&[2]]), z4.one()).unwrap();
        assert_eq!(s, scalars(&z4, &[2, 2, 2]));
        let t = complete_to_angle(&z4, 3, &RMatrix::from_ints(&z4, &[&[1]]), z4.one()).unwrap();
        assert_eq!(t, NSequence::trivial(&z4, 3, TrivialSpec { rank: 1, position: 1 }).unwrap());

        let z9 = RingSpec::parse("Z/9").unwrap();
        let two = z9.from_int(2);
        let s = complete_to_angle(&z9, 4, &RMatrix::from_ints(&z9, &[&[3]]), two).unwrap();
        assert_eq!(s, scalars(&z9, &[3, 6, 3, 3]));
        assert!(membership(&s, two));

        let alpha = RMatrix::from_ints(&z4, &[&[2, 1], &[0, 2]]);
        let s = complete_to_angle(&z4, 3, &alpha, z4.one()).unwrap();
        assert_eq!(s.map(0), &alpha);
        assert!(membership(&s, z4.one()));
        let split = split_trivials(&s).unwrap();
        assert_eq!(split.core.total_rank(), 0);
    }

    #[test]
    fn morphism_completion_examples() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        let x = scalars(&z4, &[2, 2, 2, 2]);
        let one = RMatrix::from_ints(&z4, &[&[1]]);
        let three = RMatrix::from_ints(&z4, &[&[3]]);
        let m = complete_morphism(&x, &x, &one, &three, z4.one()).unwrap();
        assert_eq!(m.phis(), &[one.clone(), three.clone(), three.clone(), one.clone()]);

        let id = complete_morphism(&x, &x, &one, &one, z4.one()).unwrap();
        assert_eq!(id, x.identity_morphism());

        let t = NSequence::trivial(&z4, 3, TrivialSpec { rank: 1, position: 1 }).unwrap();
        let y = scalars(&z4, &[2, 2, 2]);
        let m = complete_morphism(&t, &y, &one, &RMatrix::from_ints(&z4, &[&[2]]), z4.one()).unwrap();
        assert!(m.phis()[2].shape() == (1, 0));
    }

    #[test]
    fn parity_is_enforced() {
        let z9 = RingSpec::parse("Z/9").unwrap();
        let x = scalars(&z9, &[3, 3, 3]);
        let one = RMatrix::from_ints(&z9, &[&[1]]);
        assert_eq!(complete_morphism(&x, &x, &one, &one, z9.one()), Err(AngulationError::Parity { n: 3 }));
        assert_eq!(run_axiom_suite(&z9, 3, z9.one(), 2, 1, 0), Err(AngulationError::Parity { n: 3 }));
    }

    #[test]
    fn enumeration_counts() {
        let count = |s: &str, n| match enumerate_angulations(&RingSpec::parse(s).unwrap(), n).unwrap() {
            Enumeration::Classes(c) => c.len(),
            _ => 0,
        };
        assert_eq!(count("Z/4", 3), 1);
        assert_eq!(count("Z/9", 4), 2);
        assert_eq!(count("Z/25", 4), 4);
        match enumerate_angulations(&RingSpec::parse("Z/9").unwrap(), 3).unwrap() {
            Enumeration::NoneExist(w) => assert!(w.rotation_leaves_every_class()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(enumerate_angulations(&RingSpec::parse("Z/4").unwrap(), 2).is_err());
        assert!(matches!(infinite_family(4, false), Ok(Enumeration::InfiniteFamily(_))));
        assert!(matches!(infinite_family(5, false), Ok(Enumeration::NoneExist(_))));
    }

    #[test]
    fn small_suite_passes() {
        let z4 = RingSpec::parse("Z/4").unwrap();
        let report = run_axiom_suite(&z4, 3, z4.one(), 2, 20, 7).unwrap();
        assert!(report.all_passed(), "{:?}", report.first_failure);
        assert_eq!(report.trials, 20);
        assert_eq!(report.checks(), 20 * 8);
    }
}
