use std::path::PathBuf;

use nangle::cli::{run, Outcome};
use nangle::json::{element_from_json, MatrixJson, MorphismJson, PairJson, SequenceJson};
use nangle_core::algebraicity::UnsolvabilityCertificate;
use nangle_core::angulation::membership;
use nangle_core::homotopy::Homotopy;
use nangle_core::matrix::{Infeasibility, InfeasibilityKind};
use nangle_core::{NSequence, RMatrix, RingSpec, SeqMorphism};
use serde_json::Value;

fn nangle(args: &[&str]) -> Outcome {
    run(std::iter::once("nangle").chain(args.iter().copied()))
}

fn write(name: &str, value: &impl serde::Serialize) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn json_of(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap()
}

fn z4() -> RingSpec {
    RingSpec::parse("Z/4").unwrap()
}

fn decode_matrix(ring: &RingSpec, v: &Value) -> RMatrix {
    serde_json::from_value::<MatrixJson>(v.clone()).unwrap().decode(ring).unwrap()
}

#[test]
fn angulation_count_for_z4() {
    let out = nangle(&["angulations", "--ring", "Z/4", "--n", "3"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "1 angulation: [u=1]\n"));
}

#[test]
fn odd_length_over_z4_is_not_algebraic() {
    let out = nangle(&["algebraicity", "--ring", "Z/4", "--n", "5"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "NOT ALGEBRAIC (obstruction d=2)\n"));
    let out = nangle(&["algebraicity", "--ring", "Z/4", "--n", "5", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["verdict"], "not_algebraic");
    assert_eq!(v["d"], 2);
    let ring = z4();
    let cert = &v["certificate"];
    let inf = &cert["infeasibility"];
    let kind = if inf["kind"] == "zero_row" { InfeasibilityKind::ZeroRow } else { InfeasibilityKind::ResidueRow };
    let c = UnsolvabilityCertificate {
        system: decode_matrix(&ring, &cert["system"]),
        rhs: decode_matrix(&ring, &cert["rhs"]),
        infeasibility: Infeasibility { combination: decode_matrix(&ring, &inf["combination"]), kind },
    };
    assert!(c.verify(&ring));
}

#[test]
fn even_length_reports_the_witness() {
    let out = nangle(&["algebraicity", "--ring", "Z/4", "--n", "6", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["verdict"], "inconclusive");
    assert_eq!(v["reason"], "even-n");
    assert_eq!(v["witness"], serde_json::json!([1, 0, 1]));
}

#[test]
fn generator_is_a_member_of_its_class() {
    let ring = z4();
    let x = NSequence::standard_angle(&ring, 3, ring.one(), 1).unwrap();
    let path = write("generator.json", &SequenceJson::encode(&x));
    let p = path.to_str().unwrap();
    let out = nangle(&["angle-classify", "--file", p, "--u", "1"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "member of N_1\n"));
    let out = nangle(&["angle-check", "--file", p, "--u", "3"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn classification_witness_reverifies() {
    let ring = RingSpec::parse("Z/9").unwrap();
    let x = NSequence::standard_angle(&ring, 4, ring.from_int(2), 2).unwrap();
    let psi = vec![RMatrix::from_ints(&ring, &[&[1, 3], &[2, 7]]); 4];
    let x = x.apply_iso(&psi).unwrap();
    let path = write("moved.json", &SequenceJson::encode(&x));
    let out = nangle(&["angle-classify", "--file", path.to_str().unwrap(), "--u", "2", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["member"], true);
    assert_eq!(v["verdict"]["kind"], "in_nu");
    let u = element_from_json(&ring, &v["verdict"]["u"]).unwrap();
    let witness: Vec<RMatrix> = v["witness"].as_array().unwrap().iter().map(|m| decode_matrix(&ring, m)).collect();
    let target = NSequence::standard_angle(&ring, 4, u, 2).unwrap();
    assert_eq!(x.apply_iso(&witness).unwrap(), target);
}

#[test]
fn failed_check_exits_one_with_certificate() {
    let ring = RingSpec::parse("Z/9").unwrap();
    let x = NSequence::standard_angle(&ring, 3, ring.one(), 1).unwrap().rotate_left();
    let path = write("rotated.json", &SequenceJson::encode(&x));
    let out = nangle(&["angle-check", "--file", path.to_str().unwrap(), "--u", "1", "--json"]);
    assert_eq!(out.code, 1);
    let v = json_of(&out);
    assert_eq!(v["exact"], true);
    assert_eq!(v["member"], false);
    assert_eq!(v["certificate"]["product_residue"]["entries"], serde_json::json!([2]));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["angulations", "--ring", "Z/4"][..],
        &["angulations", "--ring", "Z/6", "--n", "3"],
        &["angulations", "--ring", "Z/4", "--n", "2"],
        &["axioms", "--ring", "Z/9", "--n", "3"],
        &["axioms", "--ring", "Z/9", "--n", "4", "--u", "3"],
        &["angle-classify"],
        &["frobnicate"],
    ] {
        let out = nangle(args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn axiom_reports_are_byte_identical() {
    let args = ["axioms", "--ring", "GF(2)[x]/(x^2)", "--n", "3", "--trials", "40", "--seed", "9", "--rank", "2", "--json"];
    let a = nangle(&args);
    let b = nangle(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["checks"], 320);
}

#[test]
fn completion_of_a_map() {
    let ring = z4();
    let alpha = RMatrix::from_ints(&ring, &[&[2, 1], &[0, 2]]);
    let path = write("alpha.json", &MatrixJson::encode(&ring, &alpha));
    let out = nangle(&["complete", "--ring", "Z/4", "--n", "4", "--u", "1", "--file", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json_of(&out);
    let x = serde_json::from_value::<SequenceJson>(v["sequence"].clone()).unwrap().decode().unwrap();
    assert_eq!(x.map(0), &alpha);
    assert!(membership(&x, ring.one()));
}

#[test]
fn completion_of_a_square() {
    let ring = z4();
    let x = NSequence::standard_angle(&ring, 4, ring.one(), 1).unwrap();
    let square = MorphismJson {
        source: SequenceJson::encode(&x),
        target: SequenceJson::encode(&x),
        phis: vec![
            MatrixJson::encode(&ring, &RMatrix::from_ints(&ring, &[&[1]])),
            MatrixJson::encode(&ring, &RMatrix::from_ints(&ring, &[&[3]])),
        ],
    };
    let path = write("square.json", &square);
    let out = nangle(&["complete", "--u", "1", "--file", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json_of(&out);
    let phi = serde_json::from_value::<MorphismJson>(v["morphism"].clone()).unwrap().decode().unwrap();
    assert!(membership(&phi.mapping_cone(), ring.one()));
    assert_ne!(v["cone_certificate"]["verdict"]["kind"], "not_in_any");
}

#[test]
fn rotation_and_cone() {
    let ring = z4();
    let x = NSequence::standard_angle(&ring, 3, ring.one(), 1).unwrap();
    let path = write("rot.json", &SequenceJson::encode(&x));
    let out = nangle(&["rotate", "--file", path.to_str().unwrap(), "--json"]);
    let y = serde_json::from_value::<SequenceJson>(json_of(&out)).unwrap().decode().unwrap();
    assert_eq!(y, x.rotate_left());
    let id = MorphismJson::encode(&x.identity_morphism());
    let path = write("id.json", &id);
    let out = nangle(&["cone", "--file", path.to_str().unwrap(), "--json"]);
    assert_eq!(json_of(&out)["certificate"]["verdict"]["kind"], "contractible");
}

#[test]
fn homotopy_command_returns_checkable_thetas() {
    let ring = z4();
    let x = NSequence::standard_angle(&ring, 4, ring.one(), 1).unwrap();
    // 2 = Θα + βΘ with Θ = 1 at one index
    let two = |_| RMatrix::from_ints(&ring, &[&[2]]);
    let zero = |_| RMatrix::from_ints(&ring, &[&[0]]);
    let phi = SeqMorphism::new(&x, &x, vec![two(0), two(1), zero(2), zero(3)]).unwrap();
    let psi = x.zero_morphism(&x).unwrap();
    let pair = PairJson { phi: MorphismJson::encode(&phi), psi: MorphismJson::encode(&psi) };
    let path = write("pair.json", &pair);
    let out = nangle(&["homotopy", "--file", path.to_str().unwrap(), "--json"]);
    let v = json_of(&out);
    assert_eq!(v["homotopic"], true);
    let thetas = v["homotopy"]["thetas"].as_array().unwrap().iter().map(|m| decode_matrix(&ring, m)).collect();
    assert!(Homotopy::new(&phi, &psi, thetas).is_ok());

    let id = x.identity_morphism();
    let pair = PairJson { phi: MorphismJson::encode(&id), psi: MorphismJson::encode(&psi) };
    let path = write("pair2.json", &pair);
    let out = nangle(&["homotopy", "--file", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("not homotopic"));
}

#[test]
fn ring_info_reports_structure() {
    let out = nangle(&["ring-info", "--ring", "GF(4)[x]/(x^2)", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["order"], 16);
    assert_eq!(v["two_p_zero"], true);
    assert_eq!(v["residue_modulus"], serde_json::json!([1, 1]));
    assert_eq!(v["obstruction_d"], Value::Null);
}
