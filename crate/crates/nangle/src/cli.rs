//! The `nangle` command line: argument parsing, validation and reports.
//!
//! [`run`] never touches the process; it returns the exit code and both
//! output streams, which keeps the binary a one-liner and the tests simple.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nangle_core::algebraicity::{algebraicity_verdict, ObstructionVerdict};
use nangle_core::angulation::{
    classify, complete_morphism, complete_to_angle, enumerate_angulations, Axiom, Enumeration, MembershipCertificate,
    Verdict,
};
use nangle_core::homotopy::find_homotopy_or_certify;
use nangle_core::{NSequence, RMatrix, RingElement, RingFamily, RingSpec, SeqMorphism};
use serde_json::{json, Value};

use crate::json::{self as j, MatrixJson, MorphismJson, PairJson, SequenceJson};
use crate::suite::run_axiom_suite_parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "nangle", version, about = "n-angulated categories of free modules over Z/q^2 and GF(q)[x]/(x^2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Ring: `Z/<q^2>` or `GF(<q>)[x]/(x^2)`
    #[arg(long, global = true)]
    pub ring: Option<String>,
    /// Length of the sequences
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Unit selecting the class N_u (JSON element encoding)
    #[arg(long, global = true)]
    pub u: Option<String>,
    /// Largest object rank drawn by the axiom suite
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Number of axiom-suite trials
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Seed for the axiom suite
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Emit a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Input file (sequence, matrix, morphism or morphism pair)
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    /// Rotate to the right instead of the left
    #[arg(long, global = true)]
    pub right: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Describe a ring
    RingInfo,
    /// Check that a sequence is exact and, with --u, lies in N_u
    AngleCheck,
    /// Decide which N_u contain a sequence, with a certificate
    AngleClassify,
    /// Complete a map (--file matrix) to an angle, or a square (--file morphism with two components) to a morphism
    Complete,
    /// Rotate a sequence
    Rotate,
    /// Mapping cone of a morphism
    Cone,
    /// Search for a homotopy between two morphisms (--file {"phi":…,"psi":…})
    Homotopy,
    /// List the n-angulations over a ring
    Angulations,
    /// Run the seeded axiom suite
    Axioms,
    /// Run the non-algebraicity obstruction test
    Algebraicity,
}

/// Exit code and the text for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn with_code(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {}\n", msg.into()) }
    }
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Checked<T> = Result<T, Usage>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(Usage(msg)) => Outcome::usage(msg),
    }
}

fn dispatch(cli: &Cli) -> Checked<Outcome> {
    let f = &cli.flags;
    match cli.command {
        Command::RingInfo => ring_info(f),
        Command::AngleCheck => angle_check(f),
        Command::AngleClassify => angle_classify(f),
        Command::Complete => complete(f),
        Command::Rotate => rotate(f),
        Command::Cone => cone(f),
        Command::Homotopy => homotopy(f),
        Command::Angulations => angulations(f),
        Command::Axioms => axioms(f),
        Command::Algebraicity => algebraicity(f),
    }
}

// ---- flag handling ----

fn need_ring(f: &Flags) -> Checked<RingSpec> {
    let spec = f.ring.as_deref().ok_or_else(|| Usage("--ring is required".into()))?;
    Ok(RingSpec::parse(spec)?)
}

fn need_n(f: &Flags) -> Checked<usize> {
    let n = f.n.ok_or_else(|| Usage("--n is required".into()))?;
    if n < 3 {
        return Err(Usage(format!("--n must be at least 3, got {n}")));
    }
    Ok(n)
}

fn unit(ring: &RingSpec, s: &str) -> Checked<RingElement> {
    let u = j::parse_element(ring, s)?;
    if !ring.is_unit(u) {
        return Err(Usage(format!("--u {s} is not a unit of {ring}")));
    }
    Ok(u)
}

fn need_unit(f: &Flags, ring: &RingSpec) -> Checked<RingElement> {
    unit(ring, f.u.as_deref().ok_or_else(|| Usage("--u is required".into()))?)
}

fn optional_unit(f: &Flags, ring: &RingSpec) -> Checked<Option<RingElement>> {
    f.u.as_deref().map(|s| unit(ring, s)).transpose()
}

fn need_file(f: &Flags) -> Checked<Value> {
    let path = f.file.as_deref().ok_or_else(|| Usage("--file is required".into()))?;
    read_json(path)
}

fn read_json(path: &Path) -> Checked<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn sequence_file(f: &Flags) -> Checked<NSequence> {
    let s: SequenceJson = serde_json::from_value(need_file(f)?)?;
    let x = s.decode()?;
    check_ring_flag(f, x.ring())?;
    Ok(x)
}

/// A `--ring` given alongside a file must agree with it.
fn check_ring_flag(f: &Flags, ring: &RingSpec) -> Checked<()> {
    if let Some(spec) = &f.ring {
        if &RingSpec::parse(spec)? != ring {
            return Err(Usage(format!("--ring {spec} does not match the file's ring {ring}")));
        }
    }
    Ok(())
}

// ---- text rendering ----

fn elem(ring: &RingSpec, x: RingElement) -> String {
    ring.format_element(x)
}

fn matrix_text(ring: &RingSpec, m: &RMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|c| elem(ring, m[(i, c)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn sequence_text(x: &NSequence) -> String {
    let ring = x.ring();
    let n = x.n();
    let mut out = format!("{n}-sequence over {ring}, ranks {:?}\n", x.ranks());
    for i in 0..n {
        let _ = writeln!(
            out,
            "  a{}: R^{} -> R^{}  {}",
            i + 1,
            x.rank(i),
            x.rank(i + 1),
            matrix_text(ring, x.map(i))
        );
    }
    out
}

fn class_name(ring: &RingSpec, u: RingElement) -> String {
    format!("N_{}", elem(ring, ring.unit_class_of(u)))
}

fn verdict_text(ring: &RingSpec, cert: &MembershipCertificate) -> String {
    match cert.verdict {
        Verdict::InNu(ubar) => format!("in {} only", class_name(ring, ring.lift(ubar))),
        Verdict::Contractible => "contractible: in every N_u".into(),
        Verdict::NotInAny(reason) => format!("in no N_u ({})", reason.label()),
    }
}

fn emit(f: &Flags, code: i32, value: Value, text: String) -> Checked<Outcome> {
    let stdout = if f.json { format!("{}\n", serde_json::to_string_pretty(&value)?) } else { text };
    Ok(Outcome::with_code(code, stdout))
}

// ---- commands ----

fn ring_info(f: &Flags) -> Checked<Outcome> {
    let ring = need_ring(f)?;
    let k = ring.residue_field();
    let family = match ring.family() {
        RingFamily::IntModQSquared => "integers mod q^2",
        RingFamily::DualNumbers => "dual numbers over GF(q)",
    };
    let d = nangle_core::algebraicity::find_obstruction_d(&ring);
    let value = json!({
        "ring": ring.to_string(),
        "family": family,
        "q": ring.q(),
        "characteristic": k.characteristic(),
        "order": ring.order(),
        "uniformizer": ring.uniformizer_name(),
        "unit_classes": ring.q() - 1,
        "two_p_zero": ring.two_p_zero(),
        "residue_modulus": k.modulus(),
        "obstruction_d": d,
    });
    let mut text = String::new();
    let _ = writeln!(text, "ring: {ring} ({family}, q = {})", ring.q());
    let _ = writeln!(text, "order: {}", ring.order());
    let _ = writeln!(text, "uniformizer p = {}", ring.uniformizer_name());
    let _ = writeln!(text, "residue field: GF({}), characteristic {}", ring.q(), k.characteristic());
    if let Some(m) = k.modulus() {
        let _ = writeln!(text, "residue field modulus (constant term first): t^{} + {m:?}", m.len());
    }
    let _ = writeln!(text, "unit classes: {}", ring.q() - 1);
    let _ = writeln!(text, "2p = 0: {}", if ring.two_p_zero() { "yes" } else { "no" });
    match d {
        Some(d) => {
            let _ = writeln!(text, "obstruction d: {d}");
        }
        None => text.push_str("obstruction d: none\n"),
    }
    emit(f, EXIT_OK, value, text)
}

fn membership_line(ring: &RingSpec, cert: &MembershipCertificate, u: RingElement) -> String {
    let name = class_name(ring, u);
    if cert.is_member(u) {
        format!("member of {name}")
    } else {
        match cert.verdict {
            Verdict::NotInAny(reason) => format!("not a member of {name} ({})", reason.label()),
            _ => format!("not a member of {name} ({})", verdict_text(ring, cert)),
        }
    }
}

fn angle_check(f: &Flags) -> Checked<Outcome> {
    let x = sequence_file(f)?;
    let ring = x.ring().clone();
    let u = optional_unit(f, &ring)?;
    let cert = classify(&x);
    let (candidate, exact) = (x.is_candidate(), x.is_exact());
    let member = u.map(|u| cert.is_member(u));
    let ok = exact && member.unwrap_or(true);
    let value = json!({
        "candidate": candidate,
        "exact": exact,
        "u": u.map(|u| j::element_to_json(&ring, u)),
        "member": member,
        "ok": ok,
        "certificate": j::certificate_value(&ring, &cert),
    });
    let mut text = String::new();
    let _ = writeln!(text, "candidate: {}", if candidate { "yes" } else { "no" });
    let _ = writeln!(text, "exact: {}", if exact { "yes" } else { "no" });
    if let Some(u) = u {
        let _ = writeln!(text, "{}", membership_line(&ring, &cert, u));
    }
    emit(f, if ok { EXIT_OK } else { EXIT_VIOLATION }, value, text)
}

fn angle_classify(f: &Flags) -> Checked<Outcome> {
    let x = sequence_file(f)?;
    let ring = x.ring().clone();
    let u = optional_unit(f, &ring)?;
    let cert = classify(&x);
    let mut value = j::certificate_value(&ring, &cert);
    if let Some(u) = u {
        value["u"] = j::element_to_json(&ring, u);
        value["member"] = json!(cert.is_member(u));
    }
    let text = match u {
        Some(u) => format!("{}\n", membership_line(&ring, &cert, u)),
        None => format!("{}\n", verdict_text(&ring, &cert)),
    };
    emit(f, EXIT_OK, value, text)
}

fn complete(f: &Flags) -> Checked<Outcome> {
    let file = need_file(f)?;
    if file.get("phis").is_some() {
        return complete_square(f, file);
    }
    let ring = need_ring(f)?;
    let n = need_n(f)?;
    let u = need_unit(f, &ring)?;
    let alpha = serde_json::from_value::<MatrixJson>(file)?.decode(&ring)?;
    let x = complete_to_angle(&ring, n, &alpha, u)?;
    let value = json!({ "u": j::element_to_json(&ring, u), "sequence": j::sequence_value(&x) });
    let text = format!("completion in {}:\n{}", class_name(&ring, u), sequence_text(&x));
    emit(f, EXIT_OK, value, text)
}

fn complete_square(f: &Flags, file: Value) -> Checked<Outcome> {
    let (x, y, phis) = serde_json::from_value::<MorphismJson>(file)?.decode_parts()?;
    let ring = x.ring().clone();
    check_ring_flag(f, &ring)?;
    let u = need_unit(f, &ring)?;
    if phis.len() != 2 {
        return Err(Usage(format!("a square has two components, the file has {}", phis.len())));
    }
    let phi = complete_morphism(&x, &y, &phis[0], &phis[1], u)?;
    let cone = phi.mapping_cone();
    let cert = classify(&cone);
    let value = json!({
        "u": j::element_to_json(&ring, u),
        "morphism": j::morphism_value(&phi),
        "cone_certificate": j::certificate_value(&ring, &cert),
    });
    let mut text = String::from("completed morphism:\n");
    for (i, m) in phi.phis().iter().enumerate() {
        let _ = writeln!(text, "  phi{}: {}", i + 1, matrix_text(&ring, m));
    }
    let _ = writeln!(text, "cone: {}", verdict_text(&ring, &cert));
    emit(f, EXIT_OK, value, text)
}

fn rotate(f: &Flags) -> Checked<Outcome> {
    let x = sequence_file(f)?;
    let y = if f.right { x.rotate_right() } else { x.rotate_left() };
    emit(f, EXIT_OK, j::sequence_value(&y), sequence_text(&y))
}

fn morphism_file(f: &Flags) -> Checked<SeqMorphism> {
    let m: MorphismJson = serde_json::from_value(need_file(f)?)?;
    let phi = m.decode()?;
    check_ring_flag(f, phi.source().ring())?;
    Ok(phi)
}

fn cone(f: &Flags) -> Checked<Outcome> {
    let phi = morphism_file(f)?;
    let ring = phi.source().ring().clone();
    let c = phi.mapping_cone();
    let cert = classify(&c);
    let value = json!({ "cone": j::sequence_value(&c), "certificate": j::certificate_value(&ring, &cert) });
    let text = format!("{}classification: {}\n", sequence_text(&c), verdict_text(&ring, &cert));
    emit(f, EXIT_OK, value, text)
}

fn homotopy(f: &Flags) -> Checked<Outcome> {
    let pair: PairJson = serde_json::from_value(need_file(f)?)?;
    let (phi, psi) = (pair.phi.decode()?, pair.psi.decode()?);
    let ring = phi.source().ring().clone();
    check_ring_flag(f, &ring)?;
    let (value, text) = match find_homotopy_or_certify(&phi, &psi)? {
        Ok(h) => {
            let mut text = String::from("homotopic\n");
            for (i, t) in h.thetas().iter().enumerate() {
                let _ = writeln!(text, "  theta{}: {}", i + 1, matrix_text(&ring, t));
            }
            (json!({ "homotopic": true, "homotopy": j::homotopy_value(&ring, &h) }), text)
        }
        Err(inf) => (
            json!({ "homotopic": false, "certificate": j::infeasibility_value(&ring, &inf) }),
            format!("not homotopic (certificate row {})\n", matrix_text(&ring, &inf.combination)),
        ),
    };
    emit(f, EXIT_OK, value, text)
}

fn angulations(f: &Flags) -> Checked<Outcome> {
    let ring = need_ring(f)?;
    let n = need_n(f)?;
    let e = enumerate_angulations(&ring, n)?;
    let text = match &e {
        Enumeration::Classes(classes) => {
            let names: Vec<String> = classes.iter().map(|c| format!("u={}", elem(&ring, c.u_rep))).collect();
            let noun = if classes.len() == 1 { "angulation" } else { "angulations" };
            format!("{} {noun}: [{}]\n", classes.len(), names.join(", "))
        }
        Enumeration::NoneExist(w) => {
            let mut text = format!("no angulation: {}\n", w.reason);
            for u in ring.unit_classes() {
                let hits: Vec<String> = w
                    .table
                    .iter()
                    .filter(|t| t.u == u && t.rotated_member)
                    .map(|t| class_name(&ring, t.v))
                    .collect();
                let _ = writeln!(text, "  rotated F(up) for u={} lies in {}", elem(&ring, u), hits.join(", "));
            }
            text
        }
        Enumeration::InfiniteFamily(d) => format!("{d}\n"),
    };
    emit(f, EXIT_OK, j::enumeration_value(&ring, &e), text)
}

fn axioms(f: &Flags) -> Checked<Outcome> {
    let ring = need_ring(f)?;
    let n = need_n(f)?;
    let u = match &f.u {
        Some(s) => unit(&ring, s)?,
        None => ring.one(),
    };
    let max_rank = f.rank.unwrap_or(3);
    let trials = f.trials.unwrap_or(500);
    let seed = f.seed.unwrap_or(0);
    let report = run_axiom_suite_parallel(&ring, n, u, max_rank, trials, seed)?;
    let mut value = j::suite_value(&report);
    value["parameters"] = json!({
        "ring": ring.to_string(),
        "n": n,
        "u": j::element_to_json(&ring, u),
        "max_rank": max_rank,
        "trials": trials,
        "seed": seed,
    });
    let mut text = format!("axiom suite on {ring}, n = {n}, {}, max rank {max_rank}, seed {seed}\n", class_name(&ring, u));
    for a in Axiom::ALL {
        let t = report.tally(a);
        let _ = writeln!(text, "  {:<12} {} passed, {} failed", a.label(), t.passed, t.failed);
    }
    let code = if report.all_passed() {
        let _ = writeln!(text, "all {} checks passed in {} trials", report.checks(), report.trials);
        EXIT_OK
    } else {
        let _ = writeln!(text, "{} of {} checks failed", report.failures(), report.checks());
        if let Some(c) = &report.first_failure {
            let _ = writeln!(text, "first failure: trial {} axiom {}: {}", c.trial, c.axiom.label(), c.detail);
            for s in &c.sequences {
                text.push_str(&sequence_text(s));
            }
        }
        EXIT_VIOLATION
    };
    emit(f, code, value, text)
}

fn algebraicity(f: &Flags) -> Checked<Outcome> {
    let ring = need_ring(f)?;
    let n = need_n(f)?;
    let report = algebraicity_verdict(&ring, n)?;
    let d = report.d.map(|d| d.to_string()).unwrap_or_else(|| "none".into());
    let text = match &report.verdict {
        ObstructionVerdict::NotAlgebraic(_) => format!("NOT ALGEBRAIC (obstruction d={d})\n"),
        ObstructionVerdict::Inconclusive { reason, witness } => match witness {
            Some(w) => {
                let w: Vec<String> = w.iter().map(|&x| elem(&ring, x)).collect();
                format!("INCONCLUSIVE ({}, d={d}, null-homotopy ({}))\n", reason.label(), w.join(","))
            }
            None => format!("INCONCLUSIVE ({})\n", reason.label()),
        },
    };
    emit(f, EXIT_OK, j::obstruction_value(&ring, &report), text)
}
