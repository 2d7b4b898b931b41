//! JSON encodings of rings, matrices, sequences, morphisms, homotopies and
//! reports.
//!
//! Elements of `Z/q^2` are plain integers in `0..q^2`; dual-number elements
//! are pairs `[a, b]` of field elements in base-`p` digit encoding. Object
//! keys come out sorted, so equal values always print as equal bytes.

use std::fmt;

use nangle_core::algebraicity::{ObstructionReport, ObstructionVerdict, UnsolvabilityCertificate};
use nangle_core::angulation::{Counterexample, Enumeration, MembershipCertificate, SplitResult, SuiteReport, Verdict};
use nangle_core::homotopy::Homotopy;
use nangle_core::matrix::{Infeasibility, InfeasibilityKind, KMatrix};
use nangle_core::{NSequence, RMatrix, RingElement, RingFamily, RingSpec, SeqMorphism};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug)]
pub struct DecodeError(pub String);

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DecodeError {}

fn bad(msg: impl Into<String>) -> DecodeError {
    DecodeError(msg.into())
}

pub fn element_to_json(ring: &RingSpec, x: RingElement) -> Value {
    match ring.family() {
        RingFamily::IntModQSquared => json!(ring.value(x)),
        RingFamily::DualNumbers => json!([x.residue(), x.p_part()]),
    }
}

pub fn element_from_json(ring: &RingSpec, v: &Value) -> Result<RingElement, DecodeError> {
    match (ring.family(), v) {
        (RingFamily::IntModQSquared, Value::Number(n)) => {
            let m = n.as_u64().filter(|&m| m < ring.order()).ok_or_else(|| bad(format!("{n} is not in 0..{}", ring.order())))?;
            Ok(ring.from_int(m as i64))
        }
        (RingFamily::DualNumbers, Value::Array(ab)) if ab.len() == 2 => {
            let digit = |v: &Value| v.as_u64().and_then(|x| u32::try_from(x).ok());
            let (a, b) = digit(&ab[0]).zip(digit(&ab[1])).ok_or_else(|| bad(format!("bad pair {v}")))?;
            ring.element(a, b).map_err(|e| bad(e.to_string()))
        }
        (RingFamily::IntModQSquared, _) => Err(bad(format!("expected an integer element of {ring}, got {v}"))),
        (RingFamily::DualNumbers, _) => Err(bad(format!("expected a pair [a,b] in {ring}, got {v}"))),
    }
}

/// Parses a command-line element: the JSON encoding, or for dual numbers also
/// a bare integer standing for its image under `Z -> R`.
pub fn parse_element(ring: &RingSpec, s: &str) -> Result<RingElement, DecodeError> {
    let v: Value = serde_json::from_str(s.trim()).map_err(|_| bad(format!("cannot parse element {s:?}")))?;
    match (ring.family(), &v) {
        (RingFamily::DualNumbers, Value::Number(n)) => {
            n.as_i64().map(|m| ring.from_int(m)).ok_or_else(|| bad(format!("cannot parse element {s:?}")))
        }
        _ => element_from_json(ring, &v),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Value>,
}

impl MatrixJson {
    pub fn encode(ring: &RingSpec, m: &RMatrix) -> Self {
        MatrixJson { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|&x| element_to_json(ring, x)).collect() }
    }

    pub fn decode(&self, ring: &RingSpec) -> Result<RMatrix, DecodeError> {
        let entries = self.entries.iter().map(|v| element_from_json(ring, v)).collect::<Result<Vec<_>, _>>()?;
        RMatrix::from_entries(self.rows, self.cols, entries).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceJson {
    pub ring: String,
    pub n: usize,
    pub ranks: Vec<usize>,
    pub maps: Vec<MatrixJson>,
}

impl SequenceJson {
    pub fn encode(x: &NSequence) -> Self {
        let ring = x.ring();
        SequenceJson {
            ring: ring.to_string(),
            n: x.n(),
            ranks: x.ranks().to_vec(),
            maps: x.maps().iter().map(|m| MatrixJson::encode(ring, m)).collect(),
        }
    }

    pub fn decode(&self) -> Result<NSequence, DecodeError> {
        let ring = RingSpec::parse(&self.ring).map_err(|e| bad(e.to_string()))?;
        if self.ranks.len() != self.n || self.maps.len() != self.n {
            return Err(bad(format!("n = {} but {} ranks and {} maps", self.n, self.ranks.len(), self.maps.len())));
        }
        let maps = self.maps.iter().map(|m| m.decode(&ring)).collect::<Result<Vec<_>, _>>()?;
        NSequence::new(&ring, self.ranks.clone(), maps).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: SequenceJson,
    pub target: SequenceJson,
    pub phis: Vec<MatrixJson>,
}

impl MorphismJson {
    pub fn encode(f: &SeqMorphism) -> Self {
        let ring = f.source().ring();
        MorphismJson {
            source: SequenceJson::encode(f.source()),
            target: SequenceJson::encode(f.target()),
            phis: f.phis().iter().map(|m| MatrixJson::encode(ring, m)).collect(),
        }
    }

    /// The source, target and component list, without requiring every
    /// square to commute (a completion request carries only two components).
    pub fn decode_parts(&self) -> Result<(NSequence, NSequence, Vec<RMatrix>), DecodeError> {
        let (x, y) = (self.source.decode()?, self.target.decode()?);
        if x.ring() != y.ring() {
            return Err(bad("source and target live over different rings"));
        }
        let phis = self.phis.iter().map(|m| m.decode(x.ring())).collect::<Result<Vec<_>, _>>()?;
        Ok((x, y, phis))
    }

    pub fn decode(&self) -> Result<SeqMorphism, DecodeError> {
        let (x, y, phis) = self.decode_parts()?;
        SeqMorphism::new(&x, &y, phis).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyJson {
    pub thetas: Vec<MatrixJson>,
}

impl HomotopyJson {
    pub fn encode(ring: &RingSpec, h: &Homotopy) -> Self {
        HomotopyJson { thetas: h.thetas().iter().map(|m| MatrixJson::encode(ring, m)).collect() }
    }
}

/// A pair of parallel morphisms, as read by the `homotopy` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub phi: MorphismJson,
    pub psi: MorphismJson,
}

pub fn matrix_value(ring: &RingSpec, m: &RMatrix) -> Value {
    serde_json::to_value(MatrixJson::encode(ring, m)).expect("plain data")
}

pub fn sequence_value(x: &NSequence) -> Value {
    serde_json::to_value(SequenceJson::encode(x)).expect("plain data")
}

pub fn morphism_value(f: &SeqMorphism) -> Value {
    serde_json::to_value(MorphismJson::encode(f)).expect("plain data")
}

pub fn homotopy_value(ring: &RingSpec, h: &Homotopy) -> Value {
    serde_json::to_value(HomotopyJson::encode(ring, h)).expect("plain data")
}

pub fn kmatrix_value(m: &KMatrix) -> Value {
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": m.entries() })
}

fn isos_value(ring: &RingSpec, isos: &[RMatrix]) -> Value {
    Value::Array(isos.iter().map(|m| matrix_value(ring, m)).collect())
}

pub fn split_value(ring: &RingSpec, s: &SplitResult) -> Value {
    json!({
        "core": sequence_value(&s.core),
        "trivials": s.trivials.iter().map(|t| json!({ "rank": t.rank, "position": t.position })).collect::<Vec<_>>(),
        "iso": isos_value(ring, &s.iso),
    })
}

pub fn verdict_value(ring: &RingSpec, v: &Verdict) -> Value {
    match v {
        Verdict::InNu(ubar) => json!({ "kind": "in_nu", "u": element_to_json(ring, ring.lift(*ubar)) }),
        Verdict::Contractible => json!({ "kind": "contractible" }),
        Verdict::NotInAny(reason) => json!({ "kind": "not_in_any", "reason": reason.label() }),
    }
}

pub fn certificate_value(ring: &RingSpec, c: &MembershipCertificate) -> Value {
    json!({
        "verdict": verdict_value(ring, &c.verdict),
        "split": c.split.as_ref().map(|s| split_value(ring, s)),
        "product_residue": c.product_residue.as_ref().map(kmatrix_value),
        "witness": c.witness.as_ref().map(|w| isos_value(ring, w)),
    })
}

pub fn infeasibility_value(ring: &RingSpec, inf: &Infeasibility) -> Value {
    let kind = match inf.kind {
        InfeasibilityKind::ZeroRow => "zero_row",
        InfeasibilityKind::ResidueRow => "residue_row",
    };
    json!({ "combination": matrix_value(ring, &inf.combination), "kind": kind })
}

pub fn unsolvability_value(ring: &RingSpec, c: &UnsolvabilityCertificate) -> Value {
    json!({
        "system": matrix_value(ring, &c.system),
        "rhs": matrix_value(ring, &c.rhs),
        "infeasibility": infeasibility_value(ring, &c.infeasibility),
    })
}

pub fn obstruction_value(ring: &RingSpec, r: &ObstructionReport) -> Value {
    match &r.verdict {
        ObstructionVerdict::NotAlgebraic(cert) => json!({
            "verdict": "not_algebraic",
            "d": r.d,
            "witness": Value::Null,
            "reason": Value::Null,
            "certificate": unsolvability_value(ring, cert),
        }),
        ObstructionVerdict::Inconclusive { reason, witness } => json!({
            "verdict": "inconclusive",
            "d": r.d,
            "witness": witness.as_ref().map(|w| w.iter().map(|&x| element_to_json(ring, x)).collect::<Vec<_>>()),
            "reason": reason.label(),
        }),
    }
}

pub fn enumeration_value(ring: &RingSpec, e: &Enumeration) -> Value {
    match e {
        Enumeration::Classes(classes) => json!({
            "kind": "classes",
            "count": classes.len(),
            "classes": classes.iter().map(|c| json!({
                "u": element_to_json(ring, c.u_rep),
                "generator": sequence_value(&c.generator),
            })).collect::<Vec<_>>(),
        }),
        Enumeration::NoneExist(w) => json!({
            "kind": "none_exist",
            "reason": w.reason,
            "rotation_leaves_every_class": w.rotation_leaves_every_class(),
            "table": w.table.iter().map(|t| json!({
                "u": element_to_json(ring, t.u),
                "v": element_to_json(ring, t.v),
                "rotated_member": t.rotated_member,
            })).collect::<Vec<_>>(),
        }),
        Enumeration::InfiniteFamily(d) => json!({ "kind": "infinite_family", "description": d }),
    }
}

pub fn counterexample_value(c: &Counterexample) -> Value {
    json!({
        "trial": c.trial,
        "axiom": c.axiom.label(),
        "detail": c.detail,
        "sequences": c.sequences.iter().map(sequence_value).collect::<Vec<_>>(),
    })
}

pub fn suite_value(r: &SuiteReport) -> Value {
    let tallies: serde_json::Map<String, Value> = nangle_core::angulation::Axiom::ALL
        .iter()
        .map(|&a| {
            let t = r.tally(a);
            (a.label().to_string(), json!({ "passed": t.passed, "failed": t.failed }))
        })
        .collect();
    json!({
        "trials": r.trials,
        "checks": r.checks(),
        "failures": r.failures(),
        "tallies": tallies,
        "first_failure": r.first_failure.as_ref().map(counterexample_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_round_trip() {
        for spec in ["Z/9", "GF(4)[x]/(x^2)"] {
            let ring = RingSpec::parse(spec).unwrap();
            for x in ring.elements() {
                assert_eq!(element_from_json(&ring, &element_to_json(&ring, x)).unwrap(), x);
            }
        }
    }

    #[test]
    fn element_encodings() {
        let z9 = RingSpec::parse("Z/9").unwrap();
        assert_eq!(element_to_json(&z9, z9.from_int(6)), json!(6));
        assert!(element_from_json(&z9, &json!(9)).is_err());
        let d = RingSpec::parse("GF(2)[x]/(x^2)").unwrap();
        assert_eq!(element_to_json(&d, d.p()), json!([0, 1]));
        assert_eq!(parse_element(&d, "1").unwrap(), d.one());
        assert!(element_from_json(&d, &json!([2, 0])).is_err());
    }

    #[test]
    fn sequences_round_trip() {
        let ring = RingSpec::parse("Z/4").unwrap();
        let x = NSequence::standard_angle(&ring, 3, ring.one(), 2).unwrap();
        let text = serde_json::to_string(&SequenceJson::encode(&x)).unwrap();
        let back: SequenceJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.decode().unwrap(), x);
    }
}
