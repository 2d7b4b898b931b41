//! Arithmetic in the residue field `k = R/m`.
//!
//! Elements of `GF(p^e)` are stored as integers in `0..q` whose base-`p`
//! digits are the coefficients of a polynomial in the generator `t`
//! (digit `i` is the coefficient of `t^i`). For `e > 1` the field is built
//! over the smallest monic irreducible polynomial of degree `e` (in that same
//! digit order), and multiplication goes through discrete log tables.

use alloc::vec;
use alloc::vec::Vec;

/// Element of the residue field, in the digit encoding described above.
pub type KElement = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Prime,
    Extension {
        /// Coefficients `c_0..c_{e-1}` of the monic modulus `t^e + sum c_i t^i`.
        modulus: Vec<u32>,
        exp: Vec<u32>,
        log: Vec<u32>,
    },
}

/// The finite field `GF(p^e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: u32,
    e: u32,
    q: u32,
    repr: Repr,
}

impl ResidueField {
    /// Builds `GF(p^e)`. The caller guarantees that `p` is prime and that
    /// `p^e` fits comfortably in a `u32`.
    pub fn new(p: u32, e: u32) -> Self {
        assert!(p >= 2 && e >= 1, "invalid field parameters");
        let q = p.pow(e);
        if e == 1 {
            return ResidueField { p, e, q, repr: Repr::Prime };
        }
        let modulus = smallest_irreducible(p, e);
        let generator = (1..q)
            .find(|&g| multiplicative_order(p, &modulus, g) == q - 1)
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = poly_mul_mod(p, &modulus, acc, generator);
        }
        ResidueField { p, e, q, repr: Repr::Extension { modulus, exp, log } }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients `c_0..c_{e-1}` of the defining polynomial, or `None` for a
    /// prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        match &self.repr {
            Repr::Prime => None,
            Repr::Extension { modulus, .. } => Some(modulus),
        }
    }

    pub fn contains(&self, x: KElement) -> bool {
        x < self.q
    }

    pub fn zero(&self) -> KElement {
        0
    }

    pub fn one(&self) -> KElement {
        1
    }

    /// Image of an integer under `Z -> k`.
    pub fn from_int(&self, m: i64) -> KElement {
        m.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, x: KElement, y: KElement) -> KElement {
        match self.repr {
            Repr::Prime => ((x as u64 + y as u64) % self.p as u64) as u32,
            Repr::Extension { .. } if self.p == 2 => x ^ y,
            Repr::Extension { .. } => self.digitwise(x, y, |a, b| (a + b) % self.p),
        }
    }

    pub fn neg(&self, x: KElement) -> KElement {
        match self.repr {
            Repr::Prime => (self.p - x) % self.p,
            Repr::Extension { .. } if self.p == 2 => x,
            Repr::Extension { .. } => self.digitwise(x, 0, |a, _| (self.p - a) % self.p),
        }
    }

    pub fn sub(&self, x: KElement, y: KElement) -> KElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: KElement, y: KElement) -> KElement {
        match &self.repr {
            Repr::Prime => ((x as u64 * y as u64) % self.p as u64) as u32,
            Repr::Extension { exp, log, .. } => {
                if x == 0 || y == 0 {
                    return 0;
                }
                let s = log[x as usize] + log[y as usize];
                exp[(s % (self.q - 1)) as usize]
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: KElement) -> Option<KElement> {
        if x == 0 {
            return None;
        }
        match &self.repr {
            Repr::Prime => Some(mod_inverse(x as u64, self.p as u64)? as u32),
            Repr::Extension { exp, log, .. } => {
                let l = log[x as usize];
                Some(exp[((self.q - 1 - l) % (self.q - 1)) as usize])
            }
        }
    }

    fn digitwise(&self, x: u32, y: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += f(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out
    }
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn digits(p: u32, e: u32, mut x: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(x % p);
        x /= p;
    }
    out
}

fn undigits(p: u32, ds: &[u32]) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two encoded elements reduced modulo the monic polynomial with
/// lower coefficients `modulus`. Used only while building tables.
fn poly_mul_mod(p: u32, modulus: &[u32], x: u32, y: u32) -> u32 {
    let e = modulus.len();
    let xs = digits(p, e as u32, x);
    let ys = digits(p, e as u32, y);
    let mut prod = vec![0u32; 2 * e - 1];
    for (i, &a) in xs.iter().enumerate() {
        for (j, &b) in ys.iter().enumerate() {
            prod[i + j] = (prod[i + j] + a * b) % p;
        }
    }
    // t^e = -sum c_i t^i
    for deg in (e..prod.len()).rev() {
        let lead = prod[deg];
        if lead == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &c) in modulus.iter().enumerate() {
            let idx = deg - e + i;
            prod[idx] = (prod[idx] + p - (lead * c) % p) % p;
        }
    }
    undigits(p, &prod[..e])
}

fn multiplicative_order(p: u32, modulus: &[u32], g: u32) -> u32 {
    let mut acc = g;
    let mut order = 1;
    while acc != 1 {
        acc = poly_mul_mod(p, modulus, acc, g);
        order += 1;
        if acc == 0 {
            return 0;
        }
    }
    order
}

/// Remainder of `f` (dense, lowest degree first) modulo the monic `g`.
fn poly_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &c) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = p.pow(e);
    'candidates: for c in 0..count {
        let mut f = digits(p, e, c);
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        for d in 1..=e / 2 {
            for lower in 0..p.pow(d) {
                let mut g = digits(p, d, lower);
                g.push(1);
                if poly_rem(p, &f, &g).iter().all(|&x| x == 0) {
                    continue 'candidates;
                }
            }
        }
        f.pop();
        return f;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_uses_t2_t_1() {
        let k = ResidueField::new(2, 2);
        assert_eq!(k.modulus(), Some(&[1, 1][..]));
        // t * t = t + 1
        assert_eq!(k.mul(2, 2), 3);
        assert_eq!(k.mul(2, 3), 1);
    }

    #[test]
    fn every_nonzero_element_inverts() {
        for (p, e) in [(2, 1), (3, 1), (2, 3), (3, 2), (5, 2), (2, 9), (7, 3)] {
            let k = ResidueField::new(p, e);
            assert_eq!(k.inv(0), None);
            for x in 1..k.order() {
                let y = k.inv(x).unwrap();
                assert_eq!(k.mul(x, y), 1, "p={p} e={e} x={x}");
            }
        }
    }

    #[test]
    fn additive_inverse() {
        let k = ResidueField::new(3, 2);
        for x in 0..9 {
            assert_eq!(k.add(x, k.neg(x)), 0);
            assert_eq!(k.sub(x, x), 0);
        }
    }

    #[test]
    fn integers_map_mod_p() {
        let k = ResidueField::new(3, 2);
        assert_eq!(k.from_int(4), 1);
        assert_eq!(k.from_int(-1), 2);
    }
}
