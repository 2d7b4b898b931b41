use std::collections::HashSet;

use nangle_core::angulation::{random_invertible, random_matrix, trial_rng};
use nangle_core::matrix::{image_length, invariants, kernel_length, normal_form, solve_or_certify, RMatrix};
use nangle_core::ring::RingSpec;
use nangle_oracle as oracle;
use proptest::prelude::*;

fn small_rings() -> Vec<RingSpec> {
    vec![RingSpec::parse("Z/4").unwrap(), RingSpec::parse("GF(2)[x]/(x^2)").unwrap()]
}

fn shapes() -> Vec<(usize, usize)> {
    vec![(1, 1), (1, 2), (2, 1), (2, 2)]
}

#[test]
fn lengths_match_enumerated_image_and_kernel() {
    for ring in small_rings() {
        for (r, c) in shapes() {
            for m in oracle::matrices(&ring, r, c) {
                let im = oracle::length(&ring, oracle::image(&ring, &m).len());
                let ker = oracle::length(&ring, oracle::kernel(&ring, &m).len());
                assert_eq!(image_length(&ring, &m), im, "{m:?}");
                assert_eq!(kernel_length(&ring, &m), ker, "{m:?}");
                assert_eq!(im + ker, 2 * c);
            }
        }
    }
}

#[test]
fn normal_form_reconstructs() {
    for ring in small_rings() {
        for (r, c) in shapes() {
            for m in oracle::matrices(&ring, r, c) {
                let nf = normal_form(&ring, &m);
                assert_eq!(nf.p.mul(&ring, &m).mul(&ring, &nf.q), nf.d);
                assert!(nf.p.is_invertible(&ring) && nf.q.is_invertible(&ring));
                assert_eq!(invariants(&ring, &m), (nf.u, nf.v));
            }
        }
    }
}

#[test]
fn solutions_match_enumeration() {
    for ring in small_rings() {
        for (r, c) in shapes() {
            for a in oracle::matrices(&ring, r, c) {
                for b in oracle::vectors(&ring, r) {
                    let expected = oracle::solutions(&ring, &a, &b);
                    let bm = RMatrix::column(b.clone());
                    match solve_or_certify(&ring, &a, &bm).unwrap() {
                        Ok(sol) => {
                            let kernel: Vec<_> = sol.kernel.iter().map(|k| k.entries().to_vec()).collect();
                            let got: HashSet<_> = oracle::span(&ring, &kernel, c)
                                .into_iter()
                                .map(|k| {
                                    k.iter()
                                        .zip(sol.particular.entries())
                                        .map(|(&x, &y)| ring.add(x, y))
                                        .collect::<Vec<_>>()
                                })
                                .collect();
                            assert_eq!(got, expected, "A={a:?} b={b:?}");
                        }
                        Err(cert) => {
                            assert!(expected.is_empty(), "A={a:?} b={b:?} is solvable");
                            assert!(cert.verify(&ring, &a, &bm));
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invariants_survive_change_of_basis(seed in any::<u64>(), ring_ix in 0usize..3, r in 0usize..5, c in 0usize..5) {
        let ring = [
            RingSpec::parse("Z/4").unwrap(),
            RingSpec::parse("Z/9").unwrap(),
            RingSpec::parse("GF(4)[x]/(x^2)").unwrap(),
        ][ring_ix].clone();
        let mut rng = trial_rng(seed, 0);
        let m = random_matrix(&mut rng, &ring, r, c);
        let s = random_invertible(&mut rng, &ring, r);
        let t = random_invertible(&mut rng, &ring, c);
        let moved = s.mul(&ring, &m).mul(&ring, &t);
        prop_assert_eq!(invariants(&ring, &m), invariants(&ring, &moved));
        let nf = normal_form(&ring, &m);
        prop_assert_eq!(nf.image_length() + nf.kernel_length(), 2 * c);
    }
}
