//! Isomorphism classes of minimal exact cores, computed from scratch.
//!
//! A minimal exact core of rank `r` has maps `p * B_i` with every `B_i`
//! invertible over `k = F_p`. A family of isomorphisms `ψ_i` acts through
//! residues only, sending `(B_i)` to `(ψ̄_{i+1} B_i ψ̄_i^{-1})`, so the cores
//! isomorphic to `F(up)` are exactly the orbit of `(ūI, I, ..., I)`. This
//! module enumerates `GL_r(F_p)` and that orbit directly, with its own
//! arithmetic on at most `2 x 2` matrices.

use std::collections::{HashMap, HashSet};

/// An `r x r` matrix over `F_p` with `r <= 2`, row-major; unused slots are 0.
pub type Small = [u32; 4];

#[derive(Clone, Debug)]
pub struct SmallGroup {
    pub p: u32,
    pub r: usize,
    pub elements: Vec<Small>,
}

impl SmallGroup {
    /// `GL_r(F_p)` as the matrices with nonzero determinant.
    pub fn new(p: u32, r: usize) -> Self {
        assert!((1..=2).contains(&r), "only ranks 1 and 2 are tabulated");
        let slots = r * r;
        let mut elements = Vec::new();
        for code in 0..p.pow(slots as u32) {
            let mut m = [0u32; 4];
            let mut c = code;
            for slot in m.iter_mut().take(slots) {
                *slot = c % p;
                c /= p;
            }
            if det(p, r, &m) != 0 {
                elements.push(m);
            }
        }
        SmallGroup { p, r, elements }
    }

    pub fn mul(&self, a: &Small, b: &Small) -> Small {
        let (p, r) = (self.p, self.r);
        let mut c = [0u32; 4];
        for i in 0..r {
            for j in 0..r {
                c[i * r + j] = (0..r).map(|k| a[i * r + k] * b[k * r + j]).sum::<u32>() % p;
            }
        }
        c
    }

    /// Inverse found by searching the group.
    pub fn inv(&self, a: &Small) -> Small {
        let id = self.scalar(1);
        *self.elements.iter().find(|b| self.mul(a, b) == id).expect("group element")
    }

    pub fn scalar(&self, c: u32) -> Small {
        let mut m = [0u32; 4];
        for i in 0..self.r {
            m[i * self.r + i] = c % self.p;
        }
        m
    }

    /// Calls `f` on every tuple `(B_0, ..., B_{n-1})` in `GL_r^n`.
    pub fn for_each_tuple(&self, n: usize, mut f: impl FnMut(&[Small])) {
        let mut choice = vec![0usize; n];
        let mut tuple: Vec<Small> = vec![self.elements[0]; n];
        loop {
            f(&tuple);
            let mut k = 0;
            loop {
                if k == n {
                    return;
                }
                choice[k] += 1;
                if choice[k] < self.elements.len() {
                    tuple[k] = self.elements[choice[k]];
                    break;
                }
                choice[k] = 0;
                tuple[k] = self.elements[0];
                k += 1;
            }
        }
    }

    /// The orbit of `(ūI, I, ..., I)` under every change of basis.
    pub fn standard_orbit(&self, n: usize, ubar: u32) -> HashSet<Vec<Small>> {
        let base: Vec<Small> = (0..n).map(|i| if i == 0 { self.scalar(ubar) } else { self.scalar(1) }).collect();
        let inverses: HashMap<Small, Small> = self.elements.iter().map(|g| (*g, self.inv(g))).collect();
        let mut orbit = HashSet::new();
        self.for_each_tuple(n, |g| {
            let t: Vec<Small> = (0..n)
                .map(|i| self.mul(&self.mul(&g[(i + 1) % n], &base[i]), &inverses[&g[i]]))
                .collect();
            orbit.insert(t);
        });
        orbit
    }
}

pub fn det(p: u32, r: usize, m: &Small) -> u32 {
    match r {
        1 => m[0] % p,
        _ => (m[0] * m[3] % p + p - m[1] * m[2] % p) % p,
    }
}
