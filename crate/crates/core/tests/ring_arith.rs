use nangle_core::ring::{ElementClass, RingSpec};
use nangle_core::ResidueField;
use nangle_oracle::naive;

fn rings() -> Vec<RingSpec> {
    let mut out = Vec::new();
    for q in [2, 3, 5, 7] {
        out.push(RingSpec::int_mod_q_squared(q).unwrap());
    }
    for q in [2, 3, 4, 5, 7, 8, 9, 16] {
        out.push(RingSpec::dual_numbers(q).unwrap());
    }
    out
}

#[test]
fn addition_and_multiplication_match_naive() {
    for ring in rings() {
        let elems: Vec<_> = ring.elements().collect();
        assert_eq!(elems.len() as u64, ring.order());
        for &x in &elems {
            for &y in &elems {
                assert_eq!(ring.add(x, y), naive::add(&ring, x, y), "{ring}: add");
                assert_eq!(ring.mul(x, y), naive::mul(&ring, x, y), "{ring}: mul");
            }
        }
    }
}

#[test]
fn classification_matches_search() {
    for ring in rings() {
        let elems: Vec<_> = ring.elements().collect();
        for &x in &elems {
            let inverse = elems.iter().copied().find(|&y| naive::mul(&ring, x, y) == ring.one());
            match ring.classify(x) {
                ElementClass::Zero => assert!(x.is_zero()),
                ElementClass::Unit { inverse: inv } => assert_eq!(Some(inv), inverse),
                ElementClass::UnitTimesP { u } => {
                    assert!(inverse.is_none());
                    assert!(ring.is_unit(u));
                    assert_eq!(naive::mul(&ring, u, ring.p()), x);
                }
            }
            // non-units are exactly the multiples of p
            let multiple = elems.iter().any(|&y| naive::mul(&ring, y, ring.p()) == x);
            assert_eq!(inverse.is_none(), multiple, "{ring}");
        }
    }
}

#[test]
fn square_of_maximal_ideal_vanishes() {
    for ring in rings() {
        let p = ring.p();
        assert!(!p.is_zero());
        assert!(naive::mul(&ring, p, p).is_zero());
        let two_p = naive::add(&ring, p, p);
        assert_eq!(two_p.is_zero(), ring.two_p_zero(), "{ring}");
    }
}

#[test]
fn unit_classes_are_one_per_residue() {
    for ring in rings() {
        let classes = ring.unit_classes();
        assert_eq!(classes.len() as u32, ring.q() - 1);
        for u in ring.elements().filter(|&x| ring.is_unit(x)) {
            let c = ring.unit_class_of(u);
            assert!(classes.contains(&c));
            assert_eq!(c.residue(), u.residue());
        }
    }
}

#[test]
fn extension_modulus_is_smallest_irreducible() {
    for (p, e) in [(2, 2), (2, 3), (2, 4), (3, 2), (5, 2), (7, 2)] {
        let k = ResidueField::new(p, e);
        let m = k.modulus().unwrap().to_vec();
        assert!(naive::quotient_is_field(p, &m), "GF({p}^{e})");
        let code = naive::undigits(p, &m);
        for smaller in 0..code {
            let c = naive::digits(p, e as usize, smaller);
            assert!(!naive::quotient_is_field(p, &c), "GF({p}^{e}): {c:?} is smaller");
        }
    }
}

#[test]
fn field_multiplication_matches_naive() {
    for (p, e) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        let k = ResidueField::new(p, e);
        let m = k.modulus().unwrap().to_vec();
        for x in 0..k.order() {
            for y in 0..k.order() {
                assert_eq!(k.mul(x, y), naive::field_mul(p, &m, x, y));
            }
            if x != 0 {
                assert_eq!(naive::field_mul(p, &m, x, k.inv(x).unwrap()), 1);
            }
        }
    }
}
