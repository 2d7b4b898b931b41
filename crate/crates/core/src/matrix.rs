//! Dense matrices over `R` and over the residue field `k`.
//!
//! The central routine is [`normal_form`], which brings any matrix over `R`
//! to the block shape `diag(p*I_u, I_v, 0)` by invertible row and column
//! operations and records both transforms. Linear systems over `R` are solved
//! through it.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::field::{KElement, ResidueField};
use crate::ring::{ElementClass, RingElement, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    EntryCount { expected: usize, found: usize },
    NotInvertible,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            MatrixError::EntryCount { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            MatrixError::NotInvertible => write!(f, "matrix is not invertible"),
        }
    }
}

impl core::error::Error for MatrixError {}

/// Row-major matrix over `R`. The ring is supplied to each arithmetic call.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RingElement>,
}

impl Index<(usize, usize)> for RMatrix {
    type Output = RingElement;
    fn index(&self, (i, j): (usize, usize)) -> &RingElement {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RingElement {
        &mut self.entries[i * self.cols + j]
    }
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix { rows, cols, entries: vec![RingElement::default(); rows * cols] }
    }

    pub fn identity(ring: &RingSpec, n: usize) -> Self {
        Self::scalar(n, ring.one())
    }

    /// `x * I_n`.
    pub fn scalar(n: usize, x: RingElement) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<RingElement>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::EntryCount { expected: rows * cols, found: entries.len() });
        }
        Ok(RMatrix { rows, cols, entries })
    }

    /// Builds a matrix from integer rows via `Z -> R`. Handy for `Z/q^2`.
    pub fn from_ints(ring: &RingSpec, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&x| ring.from_int(x))
            })
            .collect();
        RMatrix { rows: r, cols: c, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// All entries lie in the maximal ideal.
    pub fn is_minimal(&self) -> bool {
        self.entries.iter().all(|x| x.in_maximal_ideal())
    }

    pub fn column(entries: Vec<RingElement>) -> Self {
        let rows = entries.len();
        RMatrix { rows, cols: 1, entries }
    }

    pub fn mul(&self, ring: &RingSpec, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = ring.add(out[(i, j)], ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, ring: &RingSpec, rhs: &RMatrix) -> Result<RMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch { expected: (self.cols, rhs.cols), found: rhs.shape() });
        }
        Ok(self.mul(ring, rhs))
    }

    pub fn add(&self, ring: &RingSpec, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum dimension mismatch");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| ring.add(a, b)).collect();
        RMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, ring: &RingSpec, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference dimension mismatch");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| ring.sub(a, b)).collect();
        RMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn neg(&self, ring: &RingSpec) -> RMatrix {
        self.map(|x| ring.neg(x))
    }

    pub fn scale(&self, ring: &RingSpec, s: RingElement) -> RMatrix {
        self.map(|x| ring.mul(s, x))
    }

    pub fn map(&self, f: impl Fn(RingElement) -> RingElement) -> RMatrix {
        RMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|&x| f(x)).collect() }
    }

    pub fn transpose(&self) -> RMatrix {
        let mut out = RMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `[[a, b], [c, d]]` assembled from four blocks.
    pub fn block2x2(a: &RMatrix, b: &RMatrix, c: &RMatrix, d: &RMatrix) -> RMatrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = RMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        out.paste(a.rows, 0, c);
        out.paste(a.rows, a.cols, d);
        out
    }

    pub fn block_diag(a: &RMatrix, b: &RMatrix) -> RMatrix {
        Self::block2x2(a, &RMatrix::zeros(a.rows, b.cols), &RMatrix::zeros(b.rows, a.cols), b)
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &RMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn submatrix(&self, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> RMatrix {
        let mut out = RMatrix::zeros(rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out[(oi, oj)] = self[(i, j)];
            }
        }
        out
    }

    /// Rows of `self` listed in `order`.
    pub fn select_rows(&self, order: &[usize]) -> RMatrix {
        let mut out = RMatrix::zeros(order.len(), self.cols);
        for (oi, &i) in order.iter().enumerate() {
            for j in 0..self.cols {
                out[(oi, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Columns of `self` listed in `order`.
    pub fn select_cols(&self, order: &[usize]) -> RMatrix {
        let mut out = RMatrix::zeros(self.rows, order.len());
        for i in 0..self.rows {
            for (oj, &j) in order.iter().enumerate() {
                out[(i, oj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += s * row[src]`.
    pub fn add_row_multiple(&mut self, ring: &RingSpec, dst: usize, src: usize, s: RingElement) {
        for j in 0..self.cols {
            let v = ring.mul(s, self[(src, j)]);
            self[(dst, j)] = ring.add(self[(dst, j)], v);
        }
    }

    /// `col[dst] += s * col[src]`.
    pub fn add_col_multiple(&mut self, ring: &RingSpec, dst: usize, src: usize, s: RingElement) {
        for i in 0..self.rows {
            let v = ring.mul(self[(i, src)], s);
            self[(i, dst)] = ring.add(self[(i, dst)], v);
        }
    }

    pub fn scale_row(&mut self, ring: &RingSpec, r: usize, s: RingElement) {
        for j in 0..self.cols {
            self[(r, j)] = ring.mul(s, self[(r, j)]);
        }
    }

    pub fn residue(&self) -> KMatrix {
        KMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x.residue()).collect() }
    }

    /// Entrywise lift of a residue matrix with zero `p`-parts.
    pub fn lift(ring: &RingSpec, m: &KMatrix) -> RMatrix {
        RMatrix { rows: m.rows, cols: m.cols, entries: m.entries.iter().map(|&a| ring.lift(a)).collect() }
    }

    /// Square and invertible over `R`, i.e. invertible residue.
    pub fn is_invertible(&self, ring: &RingSpec) -> bool {
        self.rows == self.cols && self.residue().rank(ring.residue_field()) == self.rows
    }

    /// Inverse over `R` by Gauss-Jordan elimination on unit pivots.
    pub fn inverse(&self, ring: &RingSpec) -> Option<RMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RMatrix::identity(ring, n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| ring.is_unit(a[(r, c)]))?;
            a.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            let s = ring.inverse(a[(c, c)])?;
            a.scale_row(ring, c, s);
            inv.scale_row(ring, c, s);
            for r in 0..n {
                if r != c && !a[(r, c)].is_zero() {
                    let f = ring.neg(a[(r, c)]);
                    a.add_row_multiple(ring, r, c, f);
                    inv.add_row_multiple(ring, r, c, f);
                }
            }
        }
        Some(inv)
    }

    /// Canonical unit-part lift: each entry `a + b*p` is split as
    /// `(a + 0*p) + p*(b + 0*p)`. Returns `(unit_part, theta)` with
    /// `self = unit_part + p*theta`.
    pub fn split_unit_part(&self, ring: &RingSpec) -> (RMatrix, RMatrix) {
        let unit = self.map(|x| ring.lift(x.residue()));
        let theta = self.map(|x| ring.lift(x.p_part()));
        (unit, theta)
    }
}

/// Matrix over the residue field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<KElement>,
}

impl Index<(usize, usize)> for KMatrix {
    type Output = KElement;
    fn index(&self, (i, j): (usize, usize)) -> &KElement {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for KMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut KElement {
        &mut self.entries[i * self.cols + j]
    }
}

impl KMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        KMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn scalar(n: usize, x: KElement) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = x;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<KElement>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::EntryCount { expected: rows * cols, found: entries.len() });
        }
        Ok(KMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[KElement] {
        &self.entries
    }

    pub fn mul(&self, k: &ResidueField, rhs: &KMatrix) -> KMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = KMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = k.add(out[(i, j)], k.mul(a, rhs[(l, j)]));
                }
            }
        }
        out
    }

    /// Rank over `k` by Gaussian elimination.
    pub fn rank(&self, k: &ResidueField) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for c in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&r| a[(r, c)] != 0) else {
                continue;
            };
            for j in 0..a.cols {
                a.entries.swap(rank * a.cols + j, pivot * a.cols + j);
            }
            let inv = k.inv(a[(rank, c)]).expect("nonzero pivot");
            for r in rank + 1..a.rows {
                let f = k.mul(a[(r, c)], inv);
                if f == 0 {
                    continue;
                }
                for j in c..a.cols {
                    let v = k.mul(f, a[(rank, j)]);
                    a[(r, j)] = k.sub(a[(r, j)], v);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, k: &ResidueField) -> bool {
        self.rows == self.cols && self.rank(k) == self.rows
    }

    /// Inverse over `k` by Gauss-Jordan elimination.
    pub fn inverse(&self, k: &ResidueField) -> Option<KMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = KMatrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| a[(r, c)] != 0)?;
            for j in 0..n {
                a.entries.swap(c * n + j, pivot * n + j);
                inv.entries.swap(c * n + j, pivot * n + j);
            }
            let s = k.inv(a[(c, c)])?;
            for j in 0..n {
                a[(c, j)] = k.mul(s, a[(c, j)]);
                inv[(c, j)] = k.mul(s, inv[(c, j)]);
            }
            for r in 0..n {
                let f = a[(r, c)];
                if r == c || f == 0 {
                    continue;
                }
                for j in 0..n {
                    let (x, y) = (k.mul(f, a[(c, j)]), k.mul(f, inv[(c, j)]));
                    a[(r, j)] = k.sub(a[(r, j)], x);
                    inv[(r, j)] = k.sub(inv[(r, j)], y);
                }
            }
        }
        Some(inv)
    }

    /// `Some(c)` when the matrix is `c * I` (square only).
    pub fn as_scalar(&self) -> Option<KElement> {
        if self.rows != self.cols {
            return None;
        }
        if self.rows == 0 {
            return None;
        }
        let c = self[(0, 0)];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { c } else { 0 };
                if self[(i, j)] != expected {
                    return None;
                }
            }
        }
        Some(c)
    }
}

/// `P * M * Q = D` with `D = diag(p*I_u, I_v, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub d: RMatrix,
    pub p: RMatrix,
    pub q: RMatrix,
    pub u: usize,
    pub v: usize,
}

impl NormalForm {
    /// Length of the image of the original map.
    pub fn image_length(&self) -> usize {
        self.u + 2 * self.v
    }

    /// Length of the kernel of the original map.
    pub fn kernel_length(&self) -> usize {
        2 * self.d.cols() - self.u - 2 * self.v
    }
}

/// Block sizes `(u, v)` of the normal form, without recording transforms.
pub fn invariants(ring: &RingSpec, m: &RMatrix) -> (usize, usize) {
    let (_, _, _, u, v) = reduce(ring, m, false);
    (u, v)
}

/// Length of `Im M`: `u + 2v`.
pub fn image_length(ring: &RingSpec, m: &RMatrix) -> usize {
    let (u, v) = invariants(ring, m);
    u + 2 * v
}

/// Length of `Ker M`: `2*cols - u - 2v`.
pub fn kernel_length(ring: &RingSpec, m: &RMatrix) -> usize {
    let (u, v) = invariants(ring, m);
    2 * m.cols() - u - 2 * v
}

/// Computes `diag(p*I_u, I_v, 0)` with invertible `P`, `Q` such that
/// `P * M * Q = D`.
///
/// Unit pivots are taken before `p`-multiple pivots; within each pass the
/// lexicographically smallest `(row, col)` of the remaining block wins.
pub fn normal_form(ring: &RingSpec, m: &RMatrix) -> NormalForm {
    let (d, p, q, u, v) = reduce(ring, m, true);
    let nf = NormalForm { d, p, q, u, v };
    assert_eq!(nf.p.mul(ring, m).mul(ring, &nf.q), nf.d, "normal form transform check failed");
    nf
}

#[allow(clippy::type_complexity)]
fn reduce(ring: &RingSpec, m: &RMatrix, track: bool) -> (RMatrix, RMatrix, RMatrix, usize, usize) {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let (mut p, mut q) = if track {
        (RMatrix::identity(ring, rows), RMatrix::identity(ring, cols))
    } else {
        (RMatrix::zeros(0, 0), RMatrix::zeros(0, 0))
    };
    let find = |a: &RMatrix, k: usize, pred: &dyn Fn(RingElement) -> bool| {
        (k..rows).flat_map(|i| (k..cols).map(move |j| (i, j))).find(|&(i, j)| pred(a[(i, j)]))
    };
    let mut k = 0;

    for pass in 0..2 {
        let pred: &dyn Fn(RingElement) -> bool =
            if pass == 0 { &|x: RingElement| ring.is_unit(x) } else { &|x: RingElement| !x.is_zero() };
        while let Some((i, j)) = find(&a, k, pred) {
            a.swap_rows(k, i);
            a.swap_cols(k, j);
            if track {
                p.swap_rows(k, i);
                q.swap_cols(k, j);
            }
            // Normalize the pivot to 1 (unit pass) or p (second pass).
            let s = match ring.classify(a[(k, k)]) {
                ElementClass::Unit { inverse } => inverse,
                ElementClass::UnitTimesP { u } => ring.inverse(u).expect("unit"),
                ElementClass::Zero => unreachable!(),
            };
            a.scale_row(ring, k, s);
            if track {
                p.scale_row(ring, k, s);
            }
            for r in 0..rows {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = ring.neg(pivot_quotient(ring, a[(r, k)], pass));
                a.add_row_multiple(ring, r, k, f);
                if track {
                    p.add_row_multiple(ring, r, k, f);
                }
            }
            for c in 0..cols {
                if c == k || a[(k, c)].is_zero() {
                    continue;
                }
                let f = ring.neg(pivot_quotient(ring, a[(k, c)], pass));
                a.add_col_multiple(ring, c, k, f);
                if track {
                    q.add_col_multiple(ring, c, k, f);
                }
            }
            k += 1;
        }
        if pass == 0 {
            // remaining entries all lie in m
            debug_assert!((k..rows).all(|i| (k..cols).all(|j| a[(i, j)].in_maximal_ideal())));
        }
    }

    let rank = k;
    // Count the unit block: pivots from the first pass are exactly the unit
    // diagonal entries.
    let v = (0..rank).filter(|&i| ring.is_unit(a[(i, i)])).count();
    let u = rank - v;
    // Reorder diag(I_v, p I_u, 0) into diag(p I_u, I_v, 0).
    let order_rows: Vec<usize> = (v..rank).chain(0..v).chain(rank..rows).collect();
    let order_cols: Vec<usize> = (v..rank).chain(0..v).chain(rank..cols).collect();
    let d = a.select_rows(&order_rows).select_cols(&order_cols);
    if track {
        p = p.select_rows(&order_rows);
        q = q.select_cols(&order_cols);
    }
    (d, p, q, u, v)
}

/// For the pivot `1` (unit pass) the multiplier is the entry itself; for the
/// pivot `p` it is the unit `c` with `entry = c*p` (entries there lie in `m`).
fn pivot_quotient(ring: &RingSpec, entry: RingElement, pass: usize) -> RingElement {
    if pass == 0 {
        return entry;
    }
    match ring.classify(entry) {
        ElementClass::UnitTimesP { u } => u,
        ElementClass::Zero => ring.zero(),
        ElementClass::Unit { .. } => unreachable!("unit entry left after the unit pass"),
    }
}

/// Solution set of `A x = b`: `x0 + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: RMatrix,
    pub kernel: Vec<RMatrix>,
}

/// Why `A x = b` has no solution: a row combination `y` with either
/// `y*A = 0, y*b != 0` or `y*A` in `m`, `y*b` not in `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub combination: RMatrix,
    pub kind: InfeasibilityKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfeasibilityKind {
    /// `y*A = 0` but `y*b != 0`.
    ZeroRow,
    /// `y*A` has all entries in `m` but `y*b` is a unit.
    ResidueRow,
}

impl Infeasibility {
    /// Re-checks the certificate against `A` and `b`.
    pub fn verify(&self, ring: &RingSpec, a: &RMatrix, b: &RMatrix) -> bool {
        if self.combination.rows() != 1 || self.combination.cols() != a.rows() || a.rows() != b.rows() {
            return false;
        }
        let ya = self.combination.mul(ring, a);
        let yb = self.combination.mul(ring, b)[(0, 0)];
        match self.kind {
            InfeasibilityKind::ZeroRow => ya.is_zero() && !yb.is_zero(),
            InfeasibilityKind::ResidueRow => ya.is_minimal() && ring.is_unit(yb),
        }
    }
}

fn check_rhs(a: &RMatrix, b: &RMatrix) -> Result<(), MatrixError> {
    if b.cols() != 1 || b.rows() != a.rows() {
        return Err(MatrixError::DimensionMismatch { expected: (a.rows(), 1), found: b.shape() });
    }
    Ok(())
}

/// Solves `A x = b` over `R`. `Ok(None)` means the system has no solution.
pub fn solve_linear(ring: &RingSpec, a: &RMatrix, b: &RMatrix) -> Result<Option<LinearSolution>, MatrixError> {
    Ok(solve_or_certify(ring, a, b)?.ok())
}

/// Like [`solve_linear`], but an unsolvable system comes back with a
/// checkable [`Infeasibility`].
pub fn solve_or_certify(
    ring: &RingSpec,
    a: &RMatrix,
    b: &RMatrix,
) -> Result<Result<LinearSolution, Infeasibility>, MatrixError> {
    check_rhs(a, b)?;
    let nf = normal_form(ring, a);
    let (u, v) = (nf.u, nf.v);
    let c = nf.p.mul(ring, b);
    let mut y = RMatrix::zeros(a.cols(), 1);
    for i in 0..a.rows() {
        let ci = c[(i, 0)];
        let fail = |kind| Infeasibility { combination: nf.p.submatrix(i..i + 1, 0..a.rows()), kind };
        if i < u {
            match ring.classify(ci) {
                ElementClass::Zero => {}
                ElementClass::UnitTimesP { u: w } => y[(i, 0)] = w,
                ElementClass::Unit { .. } => return Ok(Err(fail(InfeasibilityKind::ResidueRow))),
            }
        } else if i < u + v {
            y[(i, 0)] = ci;
        } else if !ci.is_zero() {
            return Ok(Err(fail(InfeasibilityKind::ZeroRow)));
        }
    }
    let particular = nf.q.mul(ring, &y);
    let mut kernel = Vec::new();
    for i in 0..u {
        let mut e = RMatrix::zeros(a.cols(), 1);
        e[(i, 0)] = ring.p();
        kernel.push(nf.q.mul(ring, &e));
    }
    for j in u + v..a.cols() {
        let mut e = RMatrix::zeros(a.cols(), 1);
        e[(j, 0)] = ring.one();
        kernel.push(nf.q.mul(ring, &e));
    }
    debug_assert_eq!(a.mul(ring, &particular), *b);
    Ok(Ok(LinearSolution { particular, kernel }))
}

/// Position of a matrix-valued unknown inside a flat unknown vector,
/// stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixUnknown {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl MatrixUnknown {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        self.offset + i * self.cols + j
    }

    /// Reads the unknown back out of a solution column.
    pub fn extract(&self, x: &RMatrix) -> RMatrix {
        let entries = (0..self.len()).map(|t| x[(self.offset + t, 0)]).collect();
        RMatrix { rows: self.rows, cols: self.cols, entries }
    }
}

/// One summand `c * L * X * M` of a matrix equation, where a missing `L` or
/// `M` stands for the identity.
pub struct Term<'a> {
    pub coeff: RingElement,
    pub left: Option<&'a RMatrix>,
    pub unknown: MatrixUnknown,
    pub right: Option<&'a RMatrix>,
}

/// Accumulates scalar equations `sum coeff * x_j = rhs` over `R`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    ring: RingSpec,
    unknowns: usize,
    rows: Vec<Vec<RingElement>>,
    rhs: Vec<RingElement>,
}

impl LinearSystem {
    pub fn new(ring: &RingSpec, unknowns: usize) -> Self {
        LinearSystem { ring: ring.clone(), unknowns, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn equations(&self) -> usize {
        self.rows.len()
    }

    /// Adds one scalar equation. Repeated indices accumulate.
    pub fn add_equation(&mut self, terms: impl IntoIterator<Item = (usize, RingElement)>, rhs: RingElement) {
        let mut row = vec![RingElement::default(); self.unknowns];
        for (j, c) in terms {
            row[j] = self.ring.add(row[j], c);
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds the entrywise equations of `sum_t c_t * L_t * X_t * M_t = rhs`.
    pub fn add_matrix_equation(&mut self, terms: &[Term<'_>], rhs: &RMatrix) {
        let ring = self.ring.clone();
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                let mut row = vec![RingElement::default(); self.unknowns];
                for t in terms {
                    let x = t.unknown;
                    for k in 0..x.rows {
                        let l = match t.left {
                            Some(m) => m[(i, k)],
                            None if i == k => ring.one(),
                            None => continue,
                        };
                        if l.is_zero() {
                            continue;
                        }
                        for c in 0..x.cols {
                            let r = match t.right {
                                Some(m) => m[(c, j)],
                                None if c == j => ring.one(),
                                None => continue,
                            };
                            let v = ring.mul(t.coeff, ring.mul(l, r));
                            let idx = x.index(k, c);
                            row[idx] = ring.add(row[idx], v);
                        }
                    }
                }
                self.rows.push(row);
                self.rhs.push(rhs[(i, j)]);
            }
        }
    }

    pub fn matrix(&self) -> RMatrix {
        let entries = self.rows.iter().flatten().copied().collect();
        RMatrix { rows: self.rows.len(), cols: self.unknowns, entries }
    }

    pub fn rhs(&self) -> RMatrix {
        RMatrix::column(self.rhs.clone())
    }

    pub fn solve(&self) -> Result<LinearSolution, Infeasibility> {
        solve_or_certify(&self.ring, &self.matrix(), &self.rhs()).expect("system is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> RingSpec {
        RingSpec::parse("Z/4").unwrap()
    }

    #[test]
    fn unit_one_by_one() {
        let r = z4();
        let nf = normal_form(&r, &RMatrix::from_ints(&r, &[&[3]]));
        assert_eq!(nf.d, RMatrix::from_ints(&r, &[&[1]]));
        assert_eq!((nf.u, nf.v), (0, 1));
    }

    #[test]
    fn p_one_by_one() {
        let r = z4();
        let nf = normal_form(&r, &RMatrix::from_ints(&r, &[&[2]]));
        assert_eq!(nf.d, RMatrix::from_ints(&r, &[&[2]]));
        assert_eq!((nf.u, nf.v), (1, 0));
    }

    #[test]
    fn mixed_two_by_two() {
        let r = z4();
        let nf = normal_form(&r, &RMatrix::from_ints(&r, &[&[2, 1], &[0, 2]]));
        assert_eq!(nf.d, RMatrix::from_ints(&r, &[&[1, 0], &[0, 0]]));
        assert_eq!((nf.u, nf.v), (0, 1));
        assert_eq!(nf.image_length(), 2);
        assert_eq!(nf.kernel_length(), 2);
    }

    #[test]
    fn block_order_puts_p_first() {
        let r = z4();
        let nf = normal_form(&r, &RMatrix::from_ints(&r, &[&[1, 0, 0], &[0, 0, 2]]));
        assert_eq!((nf.u, nf.v), (1, 1));
        assert_eq!(nf.d, RMatrix::from_ints(&r, &[&[2, 0, 0], &[0, 1, 0]]));
        assert!(nf.p.is_invertible(&r) && nf.q.is_invertible(&r));
    }

    #[test]
    fn empty_matrices() {
        let r = z4();
        for (rows, cols) in [(0, 0), (0, 3), (2, 0)] {
            let nf = normal_form(&r, &RMatrix::zeros(rows, cols));
            assert_eq!((nf.u, nf.v), (0, 0));
            assert_eq!(nf.d.shape(), (rows, cols));
        }
    }

    #[test]
    fn solve_examples() {
        let r = z4();
        let two = RMatrix::from_ints(&r, &[&[2]]);
        let sol = solve_linear(&r, &two, &RMatrix::from_ints(&r, &[&[2]])).unwrap().unwrap();
        assert_eq!(sol.particular, RMatrix::from_ints(&r, &[&[1]]));
        assert_eq!(sol.kernel, alloc::vec![RMatrix::from_ints(&r, &[&[2]])]);

        assert_eq!(solve_linear(&r, &two, &RMatrix::from_ints(&r, &[&[1]])).unwrap(), None);

        let zero = RMatrix::from_ints(&r, &[&[0]]);
        let sol = solve_linear(&r, &zero, &zero).unwrap().unwrap();
        assert_eq!(sol.particular, zero);
        assert_eq!(sol.kernel, alloc::vec![RMatrix::from_ints(&r, &[&[1]])]);
    }

    #[test]
    fn infeasibility_certificates_check_out() {
        let r = z4();
        let a = RMatrix::from_ints(&r, &[&[2], &[2]]);
        let b = RMatrix::from_ints(&r, &[&[2], &[0]]);
        let cert = solve_or_certify(&r, &a, &b).unwrap().unwrap_err();
        assert!(cert.verify(&r, &a, &b));
        let b1 = RMatrix::from_ints(&r, &[&[1], &[1]]);
        let cert = solve_or_certify(&r, &a, &b1).unwrap().unwrap_err();
        assert_eq!(cert.kind, InfeasibilityKind::ResidueRow);
        assert!(cert.verify(&r, &a, &b1));
    }

    #[test]
    fn solve_rejects_bad_rhs() {
        let r = z4();
        let a = RMatrix::zeros(2, 2);
        assert!(solve_linear(&r, &a, &RMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn residue_and_rank() {
        let r = z4();
        let k = r.residue_field();
        let m = RMatrix::from_ints(&r, &[&[2, 1], &[0, 2]]);
        let res = m.residue();
        assert_eq!(res, KMatrix::from_entries(2, 2, alloc::vec![0, 1, 0, 0]).unwrap());
        assert_eq!(res.rank(k), 1);
        assert_eq!(KMatrix::identity(4).rank(k), 4);
        let r9 = RingSpec::parse("Z/9").unwrap();
        let m9 = RMatrix::from_ints(&r9, &[&[3]]).residue();
        assert_eq!(m9, KMatrix::zeros(1, 1));
        assert_eq!(m9.rank(r9.residue_field()), 0);
    }

    #[test]
    fn inverse_round_trip() {
        let r = RingSpec::parse("Z/9").unwrap();
        let m = RMatrix::from_ints(&r, &[&[3, 1], &[1, 0]]);
        let inv = m.inverse(&r).unwrap();
        assert_eq!(m.mul(&r, &inv), RMatrix::identity(&r, 2));
        assert_eq!(RMatrix::from_ints(&r, &[&[3, 0], &[0, 1]]).inverse(&r), None);
    }

    #[test]
    fn residue_inverse() {
        let k = ResidueField::new(3, 1);
        let m = KMatrix::from_entries(2, 2, alloc::vec![1, 1, 0, 1]).unwrap();
        let inv = m.inverse(&k).unwrap();
        assert_eq!(m.mul(&k, &inv), KMatrix::identity(2));
        assert_eq!(KMatrix::zeros(1, 1).inverse(&k), None);
    }

    #[test]
    fn matrix_equation_builder() {
        // X * [[2]] + [[2]] * X = [[0]] over Z/4 has every X as a solution.
        let r = z4();
        let two = RMatrix::from_ints(&r, &[&[2]]);
        let x = MatrixUnknown { offset: 0, rows: 1, cols: 1 };
        let mut sys = LinearSystem::new(&r, 1);
        sys.add_matrix_equation(
            &[
                Term { coeff: r.one(), left: None, unknown: x, right: Some(&two) },
                Term { coeff: r.one(), left: Some(&two), unknown: x, right: None },
            ],
            &RMatrix::from_ints(&r, &[&[0]]),
        );
        assert_eq!(sys.matrix(), RMatrix::from_ints(&r, &[&[0]]));
        let sol = sys.solve().unwrap();
        assert_eq!(sol.kernel.len(), 1);
    }

    #[test]
    fn unit_part_split() {
        let r = RingSpec::parse("Z/9").unwrap();
        let m = RMatrix::from_ints(&r, &[&[7, 3]]);
        let (unit, theta) = m.split_unit_part(&r);
        assert_eq!(unit, RMatrix::from_ints(&r, &[&[1, 0]]));
        assert_eq!(theta, RMatrix::from_ints(&r, &[&[2, 1]]));
        assert_eq!(unit.add(&r, &theta.scale(&r, r.p())), m);
    }
}
