//! Brute-force reference answers for small instances.
//!
//! Everything here works by enumerating elements, vectors, matrices or
//! isomorphisms outright. Nothing calls the normal form, the linear solver,
//! the splitting procedure or the residue-product criterion, so agreement
//! with `nangle-core` is meaningful evidence. Only ring arithmetic is shared;
//! it is checked separately against [`naive`].

use std::collections::HashSet;

use nangle_core::matrix::RMatrix;
use nangle_core::ring::{RingElement, RingSpec};
use nangle_core::sequences::{NSequence, SeqMorphism, TrivialSpec};

pub mod naive;
pub mod orbits;

pub type Vector = Vec<RingElement>;

/// All vectors in `R^rank`.
pub fn vectors(ring: &RingSpec, rank: usize) -> Vec<Vector> {
    let elems: Vec<RingElement> = ring.elements().collect();
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                elems.iter().map(move |&e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

/// All `rows x cols` matrices over `R`.
pub fn matrices(ring: &RingSpec, rows: usize, cols: usize) -> Vec<RMatrix> {
    vectors(ring, rows * cols).into_iter().map(|v| RMatrix::from_entries(rows, cols, v).unwrap()).collect()
}

pub fn apply(ring: &RingSpec, m: &RMatrix, v: &[RingElement]) -> Vector {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(ring.zero(), |acc, j| ring.add(acc, ring.mul(m[(i, j)], v[j]))))
        .collect()
}

pub fn image(ring: &RingSpec, m: &RMatrix) -> HashSet<Vector> {
    vectors(ring, m.cols()).iter().map(|v| apply(ring, m, v)).collect()
}

pub fn kernel(ring: &RingSpec, m: &RMatrix) -> HashSet<Vector> {
    let zero = vec![ring.zero(); m.rows()];
    vectors(ring, m.cols()).into_iter().filter(|v| apply(ring, m, v) == zero).collect()
}

/// Length of a finite `R`-module with `size` elements: `log_|k| size`.
pub fn length(ring: &RingSpec, size: usize) -> usize {
    let q = ring.q() as usize;
    let mut s = size;
    let mut l = 0;
    while s > 1 {
        assert_eq!(s % q, 0, "module size must be a power of |k|");
        s /= q;
        l += 1;
    }
    l
}

/// Every `x` with `A x = b`.
pub fn solutions(ring: &RingSpec, a: &RMatrix, b: &[RingElement]) -> HashSet<Vector> {
    vectors(ring, a.cols()).into_iter().filter(|x| apply(ring, a, x) == b).collect()
}

/// The `R`-span of `gens` inside `R^rank`.
pub fn span(ring: &RingSpec, gens: &[Vector], rank: usize) -> HashSet<Vector> {
    vectors(ring, gens.len())
        .iter()
        .map(|coeffs| {
            let mut acc = vec![ring.zero(); rank];
            for (c, g) in coeffs.iter().zip(gens) {
                for (a, &x) in acc.iter_mut().zip(g) {
                    *a = ring.add(*a, ring.mul(*c, x));
                }
            }
            acc
        })
        .collect()
}

/// Image equals kernel at every object, by enumeration.
pub fn is_exact(x: &NSequence) -> bool {
    let n = x.n();
    (0..n).all(|i| image(x.ring(), x.map(i + n - 1)) == kernel(x.ring(), x.map(i)))
}

/// Invertible `r x r` matrices, found as the bijective ones.
pub fn invertible_matrices(ring: &RingSpec, r: usize) -> Vec<RMatrix> {
    let total = vectors(ring, r).len();
    matrices(ring, r, r).into_iter().filter(|m| image(ring, m).len() == total).collect()
}

/// Searches all families of invertible matrices for an isomorphism `x -> y`,
/// choosing one object at a time and pruning on each square.
pub fn isomorphic(x: &NSequence, y: &NSequence, gl: &dyn Fn(usize) -> Vec<RMatrix>) -> bool {
    if x.ranks() != y.ranks() {
        return false;
    }
    let ring = x.ring();
    let groups: Vec<Vec<RMatrix>> = x.ranks().iter().map(|&r| gl(r)).collect();
    fn go(
        ring: &RingSpec,
        x: &NSequence,
        y: &NSequence,
        groups: &[Vec<RMatrix>],
        chosen: &mut Vec<RMatrix>,
    ) -> bool {
        let n = x.n();
        let i = chosen.len();
        if i == n {
            // wraparound square
            return y.map(n - 1).mul(ring, &chosen[n - 1]) == chosen[0].mul(ring, x.map(n - 1));
        }
        for g in &groups[i] {
            if i > 0 && y.map(i - 1).mul(ring, &chosen[i - 1]) != g.mul(ring, x.map(i - 1)) {
                continue;
            }
            chosen.push(g.clone());
            if go(ring, x, y, groups, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(ring, x, y, &groups, &mut Vec::new())
}

/// Every sequence `F(up) ⊕ (sum of trivials)` with the given object ranks.
pub fn member_shapes(ring: &RingSpec, ranks: &[usize], u: RingElement) -> Vec<NSequence> {
    let n = ranks.len();
    let max = *ranks.iter().max().unwrap_or(&0);
    let mut out = Vec::new();
    for r in 0..=max {
        if ranks.iter().any(|&t| t < r) {
            continue;
        }
        for code in 0..(max + 1).pow(n as u32) {
            let mult: Vec<usize> = (0..n).map(|j| code / (max + 1).pow(j as u32) % (max + 1)).collect();
            if !(0..n).all(|i| mult[i] + mult[(i + n - 1) % n] + r == ranks[i]) {
                continue;
            }
            let mut s = NSequence::standard_angle(ring, n, u, r).unwrap();
            for (j, &m) in mult.iter().enumerate() {
                if m > 0 {
                    let t = NSequence::trivial(ring, n, TrivialSpec { rank: m, position: j + 1 }).unwrap();
                    s = s.direct_sum(&t).unwrap();
                }
            }
            out.push(s);
        }
    }
    out
}

/// `x` is isomorphic to some `F(up) ⊕ (trivials)`, by exhaustive search.
pub fn is_member(x: &NSequence, u: RingElement, gl: &dyn Fn(usize) -> Vec<RMatrix>) -> bool {
    // every target shape is exact, so this is only a cheap prefilter
    is_exact(x) && member_shapes(x.ring(), x.ranks(), u).iter().any(|t| isomorphic(x, t, gl))
}

/// Whether some family `Θ_i : A_{i+1} -> B_i` satisfies the homotopy
/// equations, by trying every family.
pub fn homotopy_exists(phi: &SeqMorphism, psi: &SeqMorphism) -> bool {
    let (a, b) = (phi.source(), phi.target());
    let ring = a.ring();
    let n = a.n();
    let shapes: Vec<(usize, usize)> = (0..n).map(|i| (b.rank(i), a.rank(i + 1))).collect();
    let total: usize = shapes.iter().map(|(r, c)| r * c).sum();
    vectors(ring, total).iter().any(|flat| {
        let thetas = unflatten(&shapes, flat);
        (0..n).all(|i| {
            let prev = (i + n - 1) % n;
            phi.phis()[i].sub(ring, &psi.phis()[i])
                == thetas[i].mul(ring, a.map(i)).add(ring, &b.map(prev).mul(ring, &thetas[prev]))
        })
    })
}

/// Whether `up = p q_1 = q_1 p + p q_2 = ... = q_{n-3} p` has a solution, by
/// trying every `(q_1, ..., q_{n-3})`.
pub fn null_homotopy_exists(ring: &RingSpec, n: usize, up: RingElement) -> bool {
    let p = ring.p();
    vectors(ring, n - 3).iter().any(|q| {
        let m = q.len();
        (1..=n - 2).all(|j| {
            let mut lhs = ring.zero();
            if j >= 2 {
                lhs = ring.add(lhs, ring.mul(p, q[j - 2]));
            }
            if j <= m {
                lhs = ring.add(lhs, ring.mul(q[j - 1], p));
            }
            lhs == up
        })
    })
}

/// Exactness of `Hom(R^m, -)` applied to `x`: at each object, the maps
/// `R^m -> A_i` killed by `α_i` are exactly those factoring through
/// `α_{i-1}`. Each Hom group is enumerated as a set of matrices.
pub fn is_hom_exact(x: &NSequence, m: usize) -> bool {
    let ring = x.ring();
    let n = x.n();
    (0..n).all(|i| {
        let before = x.map(i + n - 1);
        let after = x.map(i);
        let through: HashSet<RMatrix> = matrices(ring, before.cols(), m).iter().map(|f| before.mul(ring, f)).collect();
        let killed: HashSet<RMatrix> =
            matrices(ring, x.rank(i), m).into_iter().filter(|f| after.mul(ring, f).is_zero()).collect();
        through == killed
    })
}

/// Every morphism `x -> y`, found by filtering all families of matrices
/// through the commuting squares. Only sensible for a handful of entries.
pub fn morphisms(x: &NSequence, y: &NSequence) -> Vec<Vec<RMatrix>> {
    let ring = x.ring();
    let n = x.n();
    let shapes: Vec<(usize, usize)> = (0..n).map(|i| (y.rank(i), x.rank(i))).collect();
    let total: usize = shapes.iter().map(|(r, c)| r * c).sum();
    vectors(ring, total)
        .into_iter()
        .map(|flat| unflatten(&shapes, &flat))
        .filter(|phis| (0..n).all(|i| y.map(i).mul(ring, &phis[i]) == phis[(i + 1) % n].mul(ring, x.map(i))))
        .collect()
}

/// Cuts a flat list of entries into matrices of the given shapes.
fn unflatten(shapes: &[(usize, usize)], flat: &[RingElement]) -> Vec<RMatrix> {
    let mut off = 0;
    shapes
        .iter()
        .map(|&(r, c)| {
            let m = RMatrix::from_entries(r, c, flat[off..off + r * c].to_vec()).unwrap();
            off += r * c;
            m
        })
        .collect()
}

/// Rank vectors in `{0, 1, 2}^n` whose sequences have at most `max_entries`
/// map entries in total.
pub fn rank_vectors(n: usize, max_entries: usize) -> Vec<Vec<usize>> {
    (0..3usize.pow(n as u32))
        .map(|code| (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect::<Vec<_>>())
        .filter(|r| (0..n).map(|i| r[i] * r[(i + 1) % n]).sum::<usize>() <= max_entries)
        .collect()
}

/// Every sequence with the given ranks.
pub fn all_sequences(ring: &RingSpec, ranks: &[usize]) -> Vec<NSequence> {
    let n = ranks.len();
    let shapes: Vec<(usize, usize)> = (0..n).map(|i| (ranks[(i + 1) % n], ranks[i])).collect();
    let total: usize = shapes.iter().map(|(r, c)| r * c).sum();
    vectors(ring, total)
        .into_iter()
        .map(|flat| NSequence::new(ring, ranks.to_vec(), unflatten(&shapes, &flat)).unwrap())
        .collect()
}
