mod common;

use common::{all_sequences, rank_vectors};
use nangle_core::homotopy::{find_homotopy, find_homotopy_or_certify};
use nangle_core::ring::RingSpec;
use nangle_core::sequences::{NSequence, SeqMorphism};
use nangle_oracle as oracle;

fn candidates(ring: &RingSpec, n: usize) -> Vec<NSequence> {
    rank_vectors(n, 2)
        .into_iter()
        .filter(|r| r.iter().sum::<usize>() > 0)
        .flat_map(|r| all_sequences(ring, &r))
        .filter(NSequence::is_candidate)
        .collect()
}

fn homotopy_unknowns(x: &NSequence, y: &NSequence) -> usize {
    (0..x.n()).map(|i| y.rank(i) * x.rank(i + 1)).sum()
}

#[test]
fn homotopy_existence_matches_exhaustive_search() {
    let ring = RingSpec::parse("Z/4").unwrap();
    let mut checked = 0;
    let mut homotopic = 0;
    for n in [3, 4] {
        let seqs = candidates(&ring, n);
        // thin the pairs out deterministically to keep the run short
        for (ix, x) in seqs.iter().enumerate().step_by(3) {
            for y in seqs.iter().skip(ix % 5).step_by(7) {
                let morphisms_size: usize = (0..n).map(|i| x.rank(i) * y.rank(i)).sum();
                if homotopy_unknowns(x, y) > 6 || morphisms_size > 4 {
                    continue;
                }
                let zero = x.zero_morphism(y).unwrap();
                for phis in oracle::morphisms(x, y) {
                    let phi = SeqMorphism::new(x, y, phis).unwrap();
                    let expected = oracle::homotopy_exists(&phi, &zero);
                    match find_homotopy_or_certify(&phi, &zero).unwrap() {
                        Ok(h) => {
                            assert!(expected, "{phi:?}");
                            assert!(h.verifies(&phi, &zero));
                            homotopic += 1;
                        }
                        Err(_) => assert!(!expected, "{phi:?} is null-homotopic"),
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 200 && homotopic > 0 && homotopic < checked, "{checked} {homotopic}");
}

#[test]
fn homotopy_depends_only_on_the_difference() {
    let ring = RingSpec::parse("GF(2)[x]/(x^2)").unwrap();
    let seqs = candidates(&ring, 3);
    for x in seqs.iter().step_by(5).take(20) {
        for y in seqs.iter().step_by(11).take(10) {
            if homotopy_unknowns(x, y) > 6 {
                continue;
            }
            let all = oracle::morphisms(x, y);
            for (a, b) in all.iter().zip(all.iter().rev()).take(8) {
                let phi = SeqMorphism::new(x, y, a.clone()).unwrap();
                let psi = SeqMorphism::new(x, y, b.clone()).unwrap();
                let found = find_homotopy(&phi, &psi).unwrap();
                assert_eq!(found.is_some(), oracle::homotopy_exists(&phi, &psi));
                if let Some(h) = found {
                    assert!(h.verifies(&phi, &psi));
                }
            }
        }
    }
}
