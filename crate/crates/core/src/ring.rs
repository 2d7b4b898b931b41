//! Local rings `R` with principal maximal ideal `m = (p)` and `m^2 = 0`.
//!
//! Two families are supported: `Z/q^2` for a prime `q` (uniformizer `q`),
//! and the dual numbers `GF(q)[x]/(x^2)` (uniformizer `x`). Every element is
//! kept in the canonical form `a + b*p` with `a, b` taken from the fixed
//! representative set of the residue field, so equality is plain data
//! equality.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{KElement, ResidueField};

/// Largest residue field order accepted for the dual numbers.
pub const MAX_DUAL_ORDER: u32 = 512;

/// Largest prime accepted for `Z/q^2`, so that `q^2` fits in a `u32`.
pub const MAX_INT_PRIME: u32 = 65_521;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingFamily {
    /// `Z/q^2`, `q` prime.
    IntModQSquared,
    /// `GF(q)[x]/(x^2)`, `q` a prime power.
    DualNumbers,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    Parse(String),
    NotPrimeSquare(u64),
    NotPrimePower(u64),
    TooLarge(u64),
    ElementOutOfRange,
    Mismatch,
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::Parse(s) => write!(f, "cannot parse ring spec {s:?}; expected Z/<q^2> or GF(<q>)[x]/(x^2)"),
            RingError::NotPrimeSquare(m) => write!(f, "{m} is not the square of a prime"),
            RingError::NotPrimePower(q) => write!(f, "{q} is not a prime power"),
            RingError::TooLarge(q) => write!(f, "residue field order {q} is above the supported bound"),
            RingError::ElementOutOfRange => write!(f, "element is not in canonical form for this ring"),
            RingError::Mismatch => write!(f, "operands live over different rings"),
        }
    }
}

impl core::error::Error for RingError {}

/// An element `a + b*p` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RingElement {
    a: KElement,
    b: KElement,
}

impl RingElement {
    /// The residue part `a`.
    pub fn residue(self) -> KElement {
        self.a
    }

    /// The `p`-part `b`.
    pub fn p_part(self) -> KElement {
        self.b
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// In the maximal ideal, i.e. zero residue.
    pub fn in_maximal_ideal(self) -> bool {
        self.a == 0
    }
}

/// Result of sorting an element into zero, unit, or unit times `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementClass {
    Zero,
    Unit { inverse: RingElement },
    /// `x = u*p` with `u` the unit representative whose `p`-part is zero.
    UnitTimesP { u: RingElement },
}

#[derive(Debug, PartialEq, Eq)]
struct RingInner {
    family: RingFamily,
    q: u32,
    field: ResidueField,
}

/// A validated ring. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec(Arc<RingInner>);

impl RingSpec {
    /// `Z/q^2` for a prime `q`.
    pub fn int_mod_q_squared(q: u32) -> Result<Self, RingError> {
        if !is_prime(q as u64) {
            return Err(RingError::NotPrimeSquare(q as u64 * q as u64));
        }
        if q > MAX_INT_PRIME {
            return Err(RingError::TooLarge(q as u64));
        }
        Ok(RingSpec(Arc::new(RingInner {
            family: RingFamily::IntModQSquared,
            q,
            field: ResidueField::new(q, 1),
        })))
    }

    /// `GF(q)[x]/(x^2)` for a prime power `q <= 512`.
    pub fn dual_numbers(q: u32) -> Result<Self, RingError> {
        if q > MAX_DUAL_ORDER {
            return Err(RingError::TooLarge(q as u64));
        }
        let (p, e) = prime_power(q as u64).ok_or(RingError::NotPrimePower(q as u64))?;
        Ok(RingSpec(Arc::new(RingInner {
            family: RingFamily::DualNumbers,
            q,
            field: ResidueField::new(p as u32, e),
        })))
    }

    /// Parses `Z/<m>` with `m = q^2`, or `GF(<q>)[x]/(x^2)`.
    pub fn parse(spec: &str) -> Result<Self, RingError> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_err = || RingError::Parse(String::from(spec));
        if let Some(m) = s.strip_prefix("Z/") {
            let m: u64 = m.parse().map_err(|_| parse_err())?;
            let q = isqrt(m);
            if q * q != m || !is_prime(q) {
                return Err(RingError::NotPrimeSquare(m));
            }
            if q > MAX_INT_PRIME as u64 {
                return Err(RingError::TooLarge(q));
            }
            return Self::int_mod_q_squared(q as u32);
        }
        if let Some(rest) = s.strip_prefix("GF(") {
            let (q, tail) = rest.split_once(')').ok_or_else(parse_err)?;
            if tail != "[x]/(x^2)" {
                return Err(parse_err());
            }
            let q: u64 = q.parse().map_err(|_| parse_err())?;
            if q > MAX_DUAL_ORDER as u64 {
                return Err(RingError::TooLarge(q));
            }
            return Self::dual_numbers(q as u32);
        }
        Err(parse_err())
    }

    pub fn family(&self) -> RingFamily {
        self.0.family
    }

    /// Order of the residue field.
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.0.field
    }

    /// Number of elements of `R`.
    pub fn order(&self) -> u64 {
        self.0.q as u64 * self.0.q as u64
    }

    /// Whether `2p = 0` in `R`.
    pub fn two_p_zero(&self) -> bool {
        match self.0.family {
            RingFamily::IntModQSquared => self.0.q == 2,
            RingFamily::DualNumbers => self.0.field.characteristic() == 2,
        }
    }

    /// Name of the uniformizer.
    pub fn uniformizer_name(&self) -> String {
        match self.0.family {
            RingFamily::IntModQSquared => format!("{}", self.0.q),
            RingFamily::DualNumbers => String::from("x"),
        }
    }

    pub fn zero(&self) -> RingElement {
        RingElement { a: 0, b: 0 }
    }

    pub fn one(&self) -> RingElement {
        RingElement { a: 1, b: 0 }
    }

    /// The uniformizer `p`.
    pub fn p(&self) -> RingElement {
        RingElement { a: 0, b: 1 }
    }

    /// Builds `a + b*p`, checking that both parts are residue representatives.
    pub fn element(&self, a: KElement, b: KElement) -> Result<RingElement, RingError> {
        let k = &self.0.field;
        if !k.contains(a) || !k.contains(b) {
            return Err(RingError::ElementOutOfRange);
        }
        Ok(RingElement { a, b })
    }

    /// Lift of a residue with zero `p`-part.
    pub fn lift(&self, a: KElement) -> RingElement {
        debug_assert!(self.0.field.contains(a));
        RingElement { a, b: 0 }
    }

    pub fn contains(&self, x: RingElement) -> bool {
        self.0.field.contains(x.a) && self.0.field.contains(x.b)
    }

    /// Image of an integer under `Z -> R`.
    pub fn from_int(&self, m: i64) -> RingElement {
        match self.0.family {
            RingFamily::IntModQSquared => {
                let q2 = self.order() as i64;
                self.from_value(m.rem_euclid(q2) as u64)
            }
            RingFamily::DualNumbers => RingElement { a: self.0.field.from_int(m), b: 0 },
        }
    }

    /// For `Z/q^2`: the integer `a + b*q` in `0..q^2`.
    pub fn value(&self, x: RingElement) -> u64 {
        x.a as u64 + x.b as u64 * self.0.q as u64
    }

    fn from_value(&self, v: u64) -> RingElement {
        let q = self.0.q as u64;
        RingElement { a: (v % q) as u32, b: (v / q) as u32 }
    }

    pub fn add(&self, x: RingElement, y: RingElement) -> RingElement {
        match self.0.family {
            RingFamily::IntModQSquared => self.from_value((self.value(x) + self.value(y)) % self.order()),
            RingFamily::DualNumbers => {
                let k = &self.0.field;
                RingElement { a: k.add(x.a, y.a), b: k.add(x.b, y.b) }
            }
        }
    }

    pub fn neg(&self, x: RingElement) -> RingElement {
        match self.0.family {
            RingFamily::IntModQSquared => {
                let q2 = self.order();
                self.from_value((q2 - self.value(x)) % q2)
            }
            RingFamily::DualNumbers => {
                let k = &self.0.field;
                RingElement { a: k.neg(x.a), b: k.neg(x.b) }
            }
        }
    }

    pub fn sub(&self, x: RingElement, y: RingElement) -> RingElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: RingElement, y: RingElement) -> RingElement {
        match self.0.family {
            RingFamily::IntModQSquared => self.from_value((self.value(x) * self.value(y)) % self.order()),
            RingFamily::DualNumbers => {
                let k = &self.0.field;
                RingElement {
                    a: k.mul(x.a, y.a),
                    b: k.add(k.mul(x.a, y.b), k.mul(x.b, y.a)),
                }
            }
        }
    }

    /// Checked arithmetic for elements of unknown provenance.
    pub fn arith(&self, op: ArithOp, x: RingElement, y: RingElement) -> Result<RingElement, RingError> {
        if !self.contains(x) || !self.contains(y) {
            return Err(RingError::ElementOutOfRange);
        }
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Sub => self.sub(x, y),
            ArithOp::Mul => self.mul(x, y),
            ArithOp::Neg => self.neg(x),
        })
    }

    pub fn is_unit(&self, x: RingElement) -> bool {
        x.a != 0
    }

    pub fn inverse(&self, x: RingElement) -> Option<RingElement> {
        if x.a == 0 {
            return None;
        }
        match self.0.family {
            RingFamily::IntModQSquared => {
                let inv = crate::field::mod_inverse(self.value(x), self.order())?;
                Some(self.from_value(inv))
            }
            RingFamily::DualNumbers => {
                // (a + b x)^-1 = a^-1 - b a^-2 x
                let k = &self.0.field;
                let ai = k.inv(x.a)?;
                Some(RingElement { a: ai, b: k.neg(k.mul(x.b, k.mul(ai, ai))) })
            }
        }
    }

    pub fn classify(&self, x: RingElement) -> ElementClass {
        if x.a != 0 {
            ElementClass::Unit { inverse: self.inverse(x).expect("nonzero residue") }
        } else if x.b != 0 {
            ElementClass::UnitTimesP { u: RingElement { a: x.b, b: 0 } }
        } else {
            ElementClass::Zero
        }
    }

    /// One representative per class of units under `u ~ v <=> up = vp`:
    /// the zero-`p`-part lifts of `k \ {0}`.
    pub fn unit_classes(&self) -> Vec<RingElement> {
        (1..self.0.q).map(|a| RingElement { a, b: 0 }).collect()
    }

    /// Canonical representative of the class of the unit `u`.
    pub fn unit_class_of(&self, u: RingElement) -> RingElement {
        RingElement { a: u.a, b: 0 }
    }

    /// Every element of `R`, in `(b, a)`-lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        let q = self.0.q;
        (0..q).flat_map(move |b| (0..q).map(move |a| RingElement { a, b }))
    }

    /// Human-readable rendering: integers for `Z/q^2`, `[a,b]` for dual numbers.
    pub fn format_element(&self, x: RingElement) -> String {
        match self.0.family {
            RingFamily::IntModQSquared => format!("{}", self.value(x)),
            RingFamily::DualNumbers => format!("[{},{}]", x.a, x.b),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.family {
            RingFamily::IntModQSquared => write!(f, "Z/{}", self.order()),
            RingFamily::DualNumbers => write!(f, "GF({})[x]/(x^2)", self.0.q),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Negates the first operand; the second is ignored.
    Neg,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn isqrt(m: u64) -> u64 {
    m.isqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn z(m: &str) -> RingSpec {
        RingSpec::parse(m).unwrap()
    }

    #[test]
    fn parses_both_families() {
        let r = z("Z/4");
        assert_eq!(r.family(), RingFamily::IntModQSquared);
        assert_eq!(r.q(), 2);
        assert!(r.two_p_zero());
        assert_eq!(r.uniformizer_name(), "2");

        let d = z("GF(2)[x]/(x^2)");
        assert_eq!(d.family(), RingFamily::DualNumbers);
        assert_eq!(d.uniformizer_name(), "x");
        assert!(d.two_p_zero());

        assert!(!z("Z/9").two_p_zero());
        assert!(!z("GF(9)[x]/(x^2)").two_p_zero());
        assert_eq!(z(" GF( 4 )[x]/(x^2) ").to_string(), "GF(4)[x]/(x^2)");
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(RingSpec::parse("Z/6"), Err(RingError::NotPrimeSquare(6)));
        assert_eq!(RingSpec::parse("Z/36"), Err(RingError::NotPrimeSquare(36)));
        assert_eq!(RingSpec::parse("GF(6)[x]/(x^2)"), Err(RingError::NotPrimePower(6)));
        assert_eq!(RingSpec::parse("GF(1024)[x]/(x^2)"), Err(RingError::TooLarge(1024)));
        assert!(matches!(RingSpec::parse("Q"), Err(RingError::Parse(_))));
        assert!(matches!(RingSpec::parse("GF(4)[y]/(y^2)"), Err(RingError::Parse(_))));
    }

    #[test]
    fn small_products() {
        let r = z("Z/4");
        assert_eq!(r.mul(r.from_int(3), r.from_int(3)), r.one());
        assert_eq!(r.mul(r.p(), r.p()), r.zero());

        let d = z("GF(2)[x]/(x^2)");
        let one_plus_x = d.element(1, 1).unwrap();
        assert_eq!(d.mul(one_plus_x, one_plus_x), d.one());
    }

    #[test]
    fn classification_examples() {
        let r = z("Z/4");
        assert_eq!(r.classify(r.from_int(3)), ElementClass::Unit { inverse: r.from_int(3) });
        assert_eq!(r.classify(r.zero()), ElementClass::Zero);
        let r9 = z("Z/9");
        assert_eq!(r9.classify(r9.from_int(6)), ElementClass::UnitTimesP { u: r9.from_int(2) });
    }

    #[test]
    fn unit_class_examples() {
        assert_eq!(z("Z/4").unit_classes().len(), 1);
        let r9 = z("Z/9");
        assert_eq!(r9.unit_classes(), alloc::vec![r9.from_int(1), r9.from_int(2)]);
        assert_eq!(z("GF(4)[x]/(x^2)").unit_classes().len(), 3);
    }

    #[test]
    fn checked_arith_rejects_foreign_elements() {
        let r = z("Z/4");
        let foreign = z("Z/9").from_int(8);
        assert_eq!(r.arith(ArithOp::Add, foreign, r.one()), Err(RingError::ElementOutOfRange));
        assert_eq!(r.arith(ArithOp::Neg, r.one(), r.zero()), Ok(r.from_int(3)));
    }
}
