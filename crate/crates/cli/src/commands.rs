//! One handler per subcommand. Each returns an [`Outcome`]; errors are
//! turned into reports by the caller.

use std::path::Path;

use matrange_core::compactmodel::{
    model_minimal, nonsingular, singular_structure, zero_compression_probe, zero_compression_residual, ProbeBudget, ZeroCompression,
};
use matrange_core::extremal::{absolute_extreme, euclidean_extreme, shilov_trivial, wmin_classify, WminClass};
use matrange_core::minmax::{atom_residuals, isolated_extreme_points, normal_fully_compress, wmax_member, wmin_member, NormalModel};
use matrange_core::mrange::{contains_with, equal_with, member_with, Ambient, Certificate, MembershipVerdict};
use matrange_core::numlin::{lambda_max, to_pairs, ComplexMatrix};
use matrange_core::sdp::{check_certificate, solve};
use matrange_core::structure::{classify, minimalize, unify};
use matrange_core::tuples::{irreducible_decompose, Decomposition};
use matrange_core::{Decision, Error, MatrixTuple, Result};
use serde_json::{json, Value};

use crate::input::Inputs;
use crate::report::{Outcome, RunContext, Status};

fn tuple_json(t: &MatrixTuple) -> Value {
    serde_json::to_value(t.to_json()).expect("plain data")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    json!(to_pairs(m))
}

fn membership_rules(v: &MembershipVerdict) -> Vec<&'static str> {
    match (&v.decision, &v.certificate) {
        (Decision::Yes, _) => vec!["ucp-choi-witness"],
        (Decision::No, Some(Certificate::Support(_))) => vec!["level1-support-separation"],
        (Decision::No, _) => vec!["separating-functional"],
        (Decision::Indeterminate, _) => vec![],
    }
}

/// Re-verifies a membership verdict against the ambient it was computed for.
fn verify_membership(amb: &Ambient, x: &MatrixTuple, v: &MembershipVerdict, ctx: &RunContext) -> Result<Value> {
    if let Some(w) = &v.witness {
        let check = w.verify(amb, x)?;
        let valid = check.valid(&ctx.tol, x);
        return Ok(json!({"witness": check, "valid": valid}));
    }
    if let Some(c) = &v.certificate {
        return Ok(json!({"certificate_separates": c.separates(amb, x, &ctx.tol)}));
    }
    Ok(Value::Null)
}

fn membership_outcome(amb: &Ambient, x: &MatrixTuple, v: MembershipVerdict, ctx: &RunContext, extra: &[&'static str]) -> Result<Outcome> {
    let mut o = Outcome::decided(v.decision).rules(&membership_rules(&v));
    if v.decision != Decision::Indeterminate {
        o = o.rules(extra);
    }
    o.witness = v.witness.as_ref().map(|w| serde_json::to_value(w.to_json()).expect("plain data"));
    o.certificate = v.certificate.as_ref().map(Certificate::to_json);
    o.margins = Some(serde_json::to_value(&v.margins).expect("plain data"));
    if ctx.verify {
        o.verification = Some(verify_membership(amb, x, &v, ctx)?);
    }
    Ok(o)
}

pub fn member_mrange(inp: &mut Inputs, a: &Path, x: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("ambient", a)?;
    let x = inp.tuple("target", x)?;
    let v = member_with(&a, &x, &ctx.tol)?;
    membership_outcome(&Ambient::of(&a), &x, v, ctx, &[])
}

pub fn contains(inp: &mut Inputs, a: &Path, b: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("outer", a)?;
    let b = inp.tuple("inner", b)?;
    let v = contains_with(&a, &b, &ctx.tol)?;
    membership_outcome(&Ambient::of(&a), &b, v, ctx, &["blockwise-containment"])
}

pub fn equal(inp: &mut Inputs, a: &Path, b: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("first", a)?;
    let b = inp.tuple("second", b)?;
    let v = equal_with(&a, &b, &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    if v.decision != Decision::Indeterminate {
        o = o.rules(&["mutual-containment"]);
        let failing = if v.forward.decision.is_no() { &v.forward } else { &v.backward };
        if v.decision.is_no() {
            o = o.rules(&membership_rules(failing));
        } else {
            o = o.rules(&["ucp-choi-witness"]);
        }
    }
    o.result = json!({"forward": v.forward.to_json(), "backward": v.backward.to_json()});
    o.margins = Some(json!({"forward": v.forward.margins, "backward": v.backward.margins}));
    if ctx.verify {
        o.verification = Some(json!({
            "forward": verify_membership(&Ambient::of(&b), &a, &v.forward, ctx)?,
            "backward": verify_membership(&Ambient::of(&a), &b, &v.backward, ctx)?,
        }));
    }
    Ok(o)
}

pub fn member_wmax(inp: &mut Inputs, x: &Path, k: &Path, ctx: &RunContext) -> Result<Outcome> {
    let x = inp.tuple("target", x)?;
    let k = inp.polytope("polytope", k)?;
    let v = wmax_member(&x, &k, &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    if v.decision != Decision::Indeterminate {
        o = o.rules(&["level1-halfspace-test"]);
    }
    o.certificate = v.violated.as_ref().map(|h| serde_json::to_value(h).expect("plain data"));
    o.margins = Some(json!({"max_excess": v.max_excess}));
    if ctx.verify {
        o.verification = Some(match &v.violated {
            Some(h) => {
                let mut m = ComplexMatrix::zeros(x.n(), x.n());
                for (xi, &a) in x.matrices().iter().zip(&h.halfspace.a) {
                    m += xi * matrange_core::numlin::c64(a, 0.0);
                }
                json!({"recomputed_excess": lambda_max(&m).0 - h.halfspace.b})
            }
            None => Value::Null,
        });
    }
    Ok(o)
}

pub fn member_wmin(inp: &mut Inputs, x: &Path, k: &Path, ctx: &RunContext) -> Result<Outcome> {
    let x = inp.tuple("target", x)?;
    let k = inp.polytope("polytope", k)?;
    let v = wmin_member(&x, &k, &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    o = match (&v.decision, &v.certificate) {
        (Decision::Yes, _) => o.rules(&["vertex-atoms"]),
        (Decision::No, Some(Certificate::Support(_))) => o.rules(&["level1-support-separation"]),
        (Decision::No, _) => o.rules(&["separating-functional"]),
        _ => o,
    };
    o.result = json!({"vertices": v.vertices});
    o.witness = v.atoms.as_ref().map(|a| json!({"atoms": a.iter().map(to_pairs).collect::<Vec<_>>()}));
    o.certificate = v.certificate.as_ref().map(Certificate::to_json);
    o.margins = v.membership.as_ref().map(|m| serde_json::to_value(&m.margins).expect("plain data"));
    if ctx.verify {
        let amb = Ambient::from_blocks(v.vertices.iter().map(|p| MatrixTuple::point(p)).collect())?;
        o.verification = Some(if let Some(a) = &v.atoms {
            let (unit, image, eig) = atom_residuals(a, &v.vertices, &x);
            json!({"unitality_residual": unit, "image_residual": image, "min_eigenvalue": eig})
        } else if let Some(c) = &v.certificate {
            json!({"certificate_separates": c.separates(&amb, &x, &ctx.tol)})
        } else {
            Value::Null
        });
    }
    Ok(o)
}

fn decomposition_json(d: &Decomposition, a: &MatrixTuple) -> Value {
    json!({
        "unitary": matrix_json(&d.unitary),
        "blocks": d.blocks.iter().map(|b| json!({"tuple": tuple_json(&b.tuple), "multiplicity": b.multiplicity})).collect::<Vec<_>>(),
        "size_multiplicities": d.size_multiplicities(),
        "residual": d.residual(a),
    })
}

pub fn decompose(inp: &mut Inputs, a: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let d = irreducible_decompose(&a, ctx.seed)?;
    let mut o = Outcome::success().rules(&["commutant-splitting"]).result(decomposition_json(&d, &a));
    if ctx.verify {
        o.verification = Some(json!({"residual": d.residual(&a)}));
    }
    Ok(o)
}

pub fn minimalize_cmd(inp: &mut Inputs, a: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let (b, rep) = minimalize(&a, ctx.seed, &ctx.tol)?;
    let mut o = Outcome::success().rules(&["greedy-block-removal"]);
    o.result = json!({"tuple": tuple_json(&b), "report": rep});
    if ctx.verify {
        o.verification = Some(json!({"equal": equal_with(&a, &b, &ctx.tol)?.decision}));
    }
    Ok(o)
}

pub fn unify_cmd(inp: &mut Inputs, a: &Path, b: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("first", a)?;
    let b = inp.tuple("second", b)?;
    let u = unify(&a, &b, &ctx.tol)?;
    let mut o = Outcome::decided(Decision::from_bool(u.is_some())).rules(&["minimal-range-determines-tuple"]);
    if let Some(u) = &u {
        o.witness = Some(json!({"unitary": matrix_json(u)}));
        o.result = json!({"residual": a.conjugate_by(u).distance(&b)});
        if ctx.verify {
            o.verification = Some(json!({"residual": a.conjugate_by(u).distance(&b)}));
        }
    }
    Ok(o)
}

pub fn check_minimal(inp: &mut Inputs, a: &Path, ctx: &RunContext, fully: bool) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let (_, rep) = minimalize(&a, ctx.seed, &ctx.tol)?;
    let mut o = Outcome::decided(rep.minimal);
    if rep.minimal != Decision::Indeterminate {
        o = o.rules(&["greedy-block-removal"]);
        if fully {
            o = o.rules(&["fully-compressed-iff-minimal"]);
        }
    }
    o.result = json!({"report": rep});
    if rep.minimal == Decision::Indeterminate {
        o.margins = Some(json!({"undecided_blocks": rep.undecided}));
    }
    Ok(o)
}

pub fn check_multiplicity_free(inp: &mut Inputs, a: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let d = irreducible_decompose(&a, ctx.seed)?;
    Ok(Outcome::decided(Decision::from_bool(d.is_multiplicity_free()))
        .rules(&["irreducible-decomposition"])
        .result(json!({"size_multiplicities": d.size_multiplicities()})))
}

pub fn check_shilov(inp: &mut Inputs, a: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let v = shilov_trivial(&a, &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    if v.decision != Decision::Indeterminate {
        o = o.rules(&["boundary-block-dilation-probes"]);
    }
    let blocks: Vec<Value> = v
        .blocks
        .iter()
        .map(|b| json!({"tuple": tuple_json(&b.block), "multiplicity": b.multiplicity, "is_boundary": b.is_boundary, "probes": b.probes}))
        .collect();
    o.result = json!({"blocks": blocks, "non_boundary": v.non_boundary});
    o.margins = Some(json!({"probes": v.blocks.iter().map(|b| &b.probes).collect::<Vec<_>>()}));
    Ok(o)
}

pub fn check_classify(inp: &mut Inputs, a: &Path, samples: usize, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    let rep = classify(&a, ctx.seed, samples, &ctx.tol)?;
    let mut o = Outcome::decided(rep.minimal);
    if rep.minimal != Decision::Indeterminate {
        o = o.rules(&["minimal-iff-multiplicity-free-and-boundary", "fully-compressed-iff-minimal", "finite-dimension-nonsingular"]);
    }
    o.result = json!({
        "minimal": rep.minimal,
        "multiplicity_free": rep.multiplicity_free,
        "shilov_trivial": rep.shilov_trivial,
        "fully_compressed": rep.fully_compressed,
        "nonsingular": rep.nonsingular,
        "minimalize": rep.minimalize,
        "falsifier_trials": rep.falsifier_log.len(),
    });
    o.witness = rep.counterexample.as_ref().map(|c| {
        json!({"subspace": c.subspace, "isometry": matrix_json(&c.isometry), "compressed": tuple_json(&c.compressed)})
    });
    o.margins = Some(json!({"falsifier_log": rep.falsifier_log}));
    Ok(o)
}

fn budget(ctx: &RunContext, ladder: Option<Vec<usize>>) -> ProbeBudget {
    let mut b = ProbeBudget { seed: ctx.seed, ..ProbeBudget::default() };
    if let Some(l) = ladder {
        b.ladder = l;
    }
    b
}

fn zero_compression_json(z: &ZeroCompression) -> Value {
    match z {
        ZeroCompression::Found { vectors, residual, restart } => json!({
            "found": true,
            "vectors": vectors.iter().map(|v| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "residual": residual,
            "restart": restart,
        }),
        ZeroCompression::NotFound { best_residual } => json!({"found": false, "best_residual": best_residual}),
    }
}

pub fn check_nonsingular(inp: &mut Inputs, m: &Path, ladder: Option<Vec<usize>>, ctx: &RunContext) -> Result<Outcome> {
    let model = inp.model("model", m)?;
    let v = nonsingular(&model, &budget(ctx, ladder), &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    if let Some(r) = v.rule {
        o.rules.push(match r {
            matrange_core::compactmodel::Rule::FiniteDimensional => "finite-dimensional",
            matrange_core::compactmodel::Rule::FiniteDimensionalSummand => "finite-dimensional-summand",
            matrange_core::compactmodel::Rule::ZeroNotIsolated => "zero-not-isolated",
            matrange_core::compactmodel::Rule::ZeroCompression => "zero-compression",
        });
    }
    o.result = json!({
        "rule": v.rule,
        "summand_equality": v.summand_equality,
        "minimal": model_minimal(&model, &budget(ctx, None).ladder, &ctx.tol)?,
    });
    o.witness = v.zero_compression.as_ref().filter(|z| z.found()).map(zero_compression_json);
    o.margins = Some(json!({
        "isolation": v.isolation,
        "zero_compression": v.zero_compression.as_ref().map(zero_compression_json),
    }));
    Ok(o)
}

pub fn compact_structure(inp: &mut Inputs, m: &Path, ladder: Option<Vec<usize>>, ctx: &RunContext) -> Result<Outcome> {
    let model = inp.model("model", m)?;
    let ladder = ladder.unwrap_or_else(|| vec![8, 16, 32]);
    match singular_structure(&model, &ladder, &ctx.tol)? {
        None => Ok(Outcome::success().rules(&["finite-rank-never-singular"]).result(json!({"form": "not_applicable"}))),
        Some(s) => {
            let mut o = Outcome::decided(Decision::Indeterminate);
            o.result = json!({"form": "evidence", "candidates": s.candidates, "tail": model.tail});
            o.margins = Some(json!({"truncations": s.evidence}));
            Ok(o)
        }
    }
}

pub fn probe_zero(inp: &mut Inputs, a: &Path, copies: usize, restarts: usize, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("tuple", a)?;
    if copies == 0 {
        return Err(Error::Input("copies must be at least 1".into()));
    }
    let z = zero_compression_probe(&a, copies, restarts, ctx.seed);
    let mut o = match &z {
        ZeroCompression::Found { .. } => Outcome::decided(Decision::Yes).rules(&["zero-compression-search"]),
        ZeroCompression::NotFound { .. } => Outcome::decided(Decision::Indeterminate),
    };
    if let ZeroCompression::Found { vectors, .. } = &z {
        o.witness = Some(zero_compression_json(&z));
        if ctx.verify {
            let (moment, norm) = zero_compression_residual(&a, vectors);
            o.verification = Some(json!({"moment_residual": moment, "norm_residual": norm}));
        }
    } else {
        o.margins = Some(zero_compression_json(&z));
    }
    Ok(o)
}

pub fn extreme_aep(inp: &mut Inputs, a: &Path, x: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("ambient", a)?;
    let x = inp.tuple("target", x)?;
    let v = absolute_extreme(&a, &x, &ctx.tol)?;
    let mut o = Outcome::decided(v.absolute);
    if v.absolute != Decision::Indeterminate {
        o = o.rules(if v.irreducible { &["dilation-probes"] } else { &["reducible-not-absolute-extreme"] });
    }
    o.result = json!({"euclidean": v.euclidean, "absolute": v.absolute, "irreducible": v.irreducible, "commutant_dim": v.commutant_dim});
    o.witness = v.dilation.as_ref().map(|d| json!({"dilation": tuple_json(d)}));
    o.margins = Some(json!({"probes": v.probes}));
    if ctx.verify {
        if let Some(d) = &v.dilation {
            o.verification = Some(json!({"dilation_member": member_with(&a, d, &ctx.tol)?.decision}));
        }
    }
    Ok(o)
}

pub fn extreme_euclidean(inp: &mut Inputs, a: &Path, x: &Path, ctx: &RunContext) -> Result<Outcome> {
    let a = inp.tuple("ambient", a)?;
    let x = inp.tuple("target", x)?;
    let v = euclidean_extreme(&a, &x, &ctx.tol)?;
    let mut o = Outcome::decided(v.decision);
    if v.decision != Decision::Indeterminate {
        o = o.rules(&["pair-probes"]);
    }
    o.witness = v.direction.as_ref().map(|d| json!({"direction": tuple_json(d)}));
    o.margins = Some(json!({"probes": v.probes}));
    if ctx.verify {
        if let Some(y) = &v.direction {
            let shift = |s: f64| {
                MatrixTuple::new(x.matrices().iter().zip(y.matrices()).map(|(p, q)| p + q * matrange_core::numlin::c64(s, 0.0)).collect())
            };
            o.verification = Some(json!({
                "plus_member": member_with(&a, &shift(1.0)?, &ctx.tol)?.decision,
                "minus_member": member_with(&a, &shift(-1.0)?, &ctx.tol)?.decision,
            }));
        }
    }
    Ok(o)
}

pub fn extreme_wmin_classify(inp: &mut Inputs, x: &Path, k: &Path, ctx: &RunContext) -> Result<Outcome> {
    let x = inp.tuple("target", x)?;
    let k = inp.polytope("polytope", k)?;
    let c = wmin_classify(&k, &x, &ctx.tol)?;
    let (status, rules): (Status, &[&'static str]) = match c {
        WminClass::Vertex { .. } => (Status::Yes, &["polytope-vertex-absolute-extreme", "polytope-vertex-crucial"]),
        WminClass::AbsoluteExtreme => (Status::Yes, &["dilation-probes"]),
        WminClass::MemberNotExtreme => (Status::No, &["not-a-vertex"]),
        WminClass::NotMember => (Status::No, &["wmin-nonmember"]),
        WminClass::Undecided => (Status::Indeterminate, &[]),
    };
    let mut o = Outcome { status: Some(status), ..Default::default() }.rules(rules).result(json!({"class": c}));
    if status == Status::Indeterminate {
        o.margins = Some(json!({"class": c}));
    }
    Ok(o)
}

pub fn hull_vertices(inp: &mut Inputs, p: &Path) -> Result<Outcome> {
    let pts = inp.points("points", p)?;
    let e = isolated_extreme_points(&pts)?;
    let status = if e.undecided() > 0 { Status::Indeterminate } else { Status::Success };
    let mut o = Outcome { status: Some(status), ..Default::default() };
    if status == Status::Success {
        o = o.rules(&["lp-separation"]);
    }
    o.result = json!({"vertices": e.vertices(), "points": e.points, "decisions": e.decisions});
    o.margins = Some(json!({"separation": e.margins}));
    Ok(o)
}

pub fn normal_compress(inp: &mut Inputs, p: &Path, ctx: &RunContext) -> Result<Outcome> {
    let pts = inp.points("eigenvalues", p)?;
    let n = NormalModel::new(pts)?;
    let c = normal_fully_compress(&n, &ctx.tol)?;
    let status = if c.certified() && c.extreme.undecided() == 0 { Status::Success } else { Status::Indeterminate };
    let mut o = Outcome { status: Some(status), ..Default::default() };
    if status == Status::Success {
        o = o.rules(&["isolated-extreme-points", "wmin-range-equality"]);
    }
    o.result = json!({"reduced": c.reduced, "forward": c.forward, "backward": c.backward});
    o.margins = Some(json!({"separation": c.extreme.margins, "decisions": c.extreme.decisions}));
    Ok(o)
}

pub fn sdp_solve(inp: &mut Inputs, p: &Path, ctx: &RunContext) -> Result<Outcome> {
    let inst = inp.sdp("instance", p)?;
    let out = solve(&inst, &ctx.tol)?;
    let status = match out.status {
        matrange_core::sdp::SdpStatus::Feasible | matrange_core::sdp::SdpStatus::OptimalValue(_) => Status::Yes,
        matrange_core::sdp::SdpStatus::Infeasible => Status::No,
        matrange_core::sdp::SdpStatus::Indeterminate => Status::Indeterminate,
    };
    let mut o = Outcome { status: Some(status), ..Default::default() };
    o = match status {
        Status::Yes => o.rules(&["primal-witness"]),
        Status::No => o.rules(&["dual-infeasibility-ray"]),
        _ => o,
    };
    let j = out.to_json();
    o.result = json!({"status": j.status});
    o.witness = j.witness.as_ref().map(|w| json!(w));
    o.certificate = j.certificate.as_ref().map(|c| json!(c));
    o.margins = Some(serde_json::to_value(&j.diagnostics).expect("plain data"));
    if ctx.verify && (out.witness.is_some() || out.certificate.is_some()) {
        o.verification = Some(serde_json::to_value(check_certificate(&inst, &out)?).expect("plain data"));
    }
    Ok(o)
}
