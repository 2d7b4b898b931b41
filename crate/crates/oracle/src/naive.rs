//! Ring arithmetic done the slow, obvious way: integers for `Z/q^2`, and
//! schoolbook polynomials for `GF(q)` and its dual numbers.

use nangle_core::ring::{RingElement, RingFamily, RingSpec};

/// Base-`p` digits of `x`, lowest first, padded to `len`.
pub fn digits(p: u32, len: usize, mut x: u32) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

pub fn undigits(p: u32, ds: &[u32]) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two field elements in the digit encoding, reducing modulo
/// `t^e + sum modulus[i] t^i`.
pub fn field_mul(p: u32, modulus: &[u32], x: u32, y: u32) -> u32 {
    let e = modulus.len().max(1);
    if modulus.is_empty() {
        return x * y % p;
    }
    let (xs, ys) = (digits(p, e, x), digits(p, e, y));
    let mut prod = vec![0u32; 2 * e - 1];
    for (i, &a) in xs.iter().enumerate() {
        for (j, &b) in ys.iter().enumerate() {
            prod[i + j] = (prod[i + j] + a * b) % p;
        }
    }
    // t^e = -sum modulus[i] t^i
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        prod[k] = 0;
        for (i, &m) in modulus.iter().enumerate() {
            prod[k - e + i] = (prod[k - e + i] + c * (p - m % p)) % p;
        }
    }
    undigits(p, &prod[..e])
}

pub fn field_add(p: u32, e: usize, x: u32, y: u32) -> u32 {
    let (xs, ys) = (digits(p, e, x), digits(p, e, y));
    let s: Vec<u32> = xs.iter().zip(&ys).map(|(a, b)| (a + b) % p).collect();
    undigits(p, &s)
}

/// The quotient `F_p[t]/(modulus)` is a field: every nonzero element has a
/// multiplicative inverse. Checked by trying every pair.
pub fn quotient_is_field(p: u32, modulus: &[u32]) -> bool {
    let q = p.pow(modulus.len() as u32);
    (1..q).all(|x| (1..q).any(|y| field_mul(p, modulus, x, y) == 1))
}

pub fn add(ring: &RingSpec, x: RingElement, y: RingElement) -> RingElement {
    match ring.family() {
        RingFamily::IntModQSquared => ring.from_int((ring.value(x) + ring.value(y)) as i64),
        RingFamily::DualNumbers => {
            let (p, e) = field_shape(ring);
            ring.element(field_add(p, e, x.residue(), y.residue()), field_add(p, e, x.p_part(), y.p_part()))
                .unwrap()
        }
    }
}

pub fn mul(ring: &RingSpec, x: RingElement, y: RingElement) -> RingElement {
    match ring.family() {
        RingFamily::IntModQSquared => ring.from_int((ring.value(x) * ring.value(y) % ring.order()) as i64),
        RingFamily::DualNumbers => {
            let (p, e) = field_shape(ring);
            let m = ring.residue_field().modulus().unwrap_or(&[]).to_vec();
            let f = |a, b| field_mul(p, &m, a, b);
            let (a1, b1, a2, b2) = (x.residue(), x.p_part(), y.residue(), y.p_part());
            ring.element(f(a1, a2), field_add(p, e, f(a1, b2), f(b1, a2))).unwrap()
        }
    }
}

fn field_shape(ring: &RingSpec) -> (u32, usize) {
    let k = ring.residue_field();
    (k.characteristic(), k.degree() as usize)
}
