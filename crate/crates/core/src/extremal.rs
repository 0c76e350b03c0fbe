//! Extreme points of matrix ranges.
//!
//! Euclidean extremity of `X ∈ W_n(A)` asks whether `{Y : X ± Y ∈ W_n(A)}`
//! is `{0}`; absolute extremity asks, for irreducible `X`, whether every
//! dilation `[[X, b], [b*, c]] ∈ W_{n+1}(A)` has `b = 0`. Both sets are
//! convex and symmetric (the second under `b ↦ e^{iθ} b`), so each is
//! trivial exactly when a full list of linear functionals has maximum zero
//! on it; every maximum is one SDP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minmax::{isolated_extreme_points, wmin_member, Polytope};
use crate::mrange::{
    contains_in, hermitian_basis, hermitian_coords, images, solve_profile, Ambient, Basis, ChoiProgram, ChoiWitness,
};
use crate::numlin::{identity, ComplexMatrix, RealMatrix};
use crate::sdp::{self, Constraint, SdpInstance, ToleranceProfile};
use crate::tuples::{commutant_dim, irreducible_decompose, MatrixTuple};
use crate::Decision;

/// A probe optimum at or below this (relative to `1 + ‖X‖`) reads as zero.
const PROBE_ZERO: f64 = 1e-4;

/// One maximized functional: which coordinate and matrix entry, a value
/// attained by a checked feasible point and an upper bound from a dual point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub coordinate: usize,
    pub entry: (usize, usize),
    pub imaginary: bool,
    pub attained: Option<f64>,
    pub upper: Option<f64>,
    pub decision: Decision,
}

impl Probe {
    fn zero(coordinate: usize, entry: (usize, usize), imaginary: bool) -> Self {
        Probe { coordinate, entry, imaginary, attained: Some(0.0), upper: Some(0.0), decision: Decision::Yes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanVerdict {
    pub decision: Decision,
    /// Nonzero `Y` with `X ± Y ∈ W_n(A)` when the answer is No.
    pub direction: Option<MatrixTuple>,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeVerdict {
    pub euclidean: Decision,
    pub absolute: Decision,
    pub irreducible: bool,
    pub commutant_dim: usize,
    pub probes: Vec<Probe>,
    /// A dilation of `X` in `W_{n+1}(A)` with a nonzero corner, when found.
    pub dilation: Option<MatrixTuple>,
}

struct ProbeRun {
    attained: Option<f64>,
    upper: Option<f64>,
    decision: Decision,
    witness: Option<Vec<RealMatrix>>,
}

/// Solve one probe. Values are `factor · (⟨C, Z⟩ − offset)`; the Choi
/// variable has trace at most `trace_bound`.
fn run_probe(inst: &SdpInstance, tol: &ToleranceProfile, trace_bound: f64, offset: f64, factor: f64, scale: f64) -> Result<ProbeRun> {
    let zero = PROBE_ZERO * scale;
    let mut best = ProbeRun { attained: None, upper: None, decision: Decision::Indeterminate, witness: None };
    // Every dual point bounds the maximum and every checked primal point
    // attains a value, so runs at different tolerances can be combined.
    let profiles = [solve_profile(tol), *tol, ToleranceProfile { max_iter: 2 * tol.max_iter, ..tol.scaled(1e-2) }];
    for prof in &profiles {
        let out = sdp::solve(inst, prof)?;
        let attained = out.witness.as_ref().map(|w| factor * (inst.objective_value(w) - offset));
        // Any dual point bounds the maximum; this matters on faces, where the
        // dual optimum need not be attained and the solver may stop early.
        let upper = out
            .certificate
            .as_ref()
            .and_then(|y| sdp::dual_upper_bound(inst, y, trace_bound))
            .map(|v| factor * (v - offset));
        if upper.is_some_and(|u| best.upper.is_none_or(|b| u < b)) {
            best.upper = upper;
        }
        if attained.is_some_and(|a| best.attained.is_none_or(|b| a > b)) {
            best.attained = attained;
            best.witness = out.witness;
        }
        best.decision = match (best.attained, best.upper) {
            (_, Some(u)) if u <= zero => Decision::Yes,
            (Some(v), _) if v > tol.band * zero => Decision::No,
            _ => Decision::Indeterminate,
        };
        if best.decision != Decision::Indeterminate {
            break;
        }
    }
    Ok(best)
}

fn basis_probe(t: usize, f: Basis) -> (usize, (usize, usize), bool) {
    match f {
        Basis::Diag(p) => (t, (p, p), false),
        Basis::Re(p, q) => (t, (p, q), false),
        Basis::Im(p, q) => (t, (p, q), true),
    }
}

fn require_member(amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<()> {
    match contains_in(amb, x, tol)?.decision {
        Decision::Yes => Ok(()),
        Decision::No => Err(Error::Precondition("target is not in the matrix range".into())),
        Decision::Indeterminate => Err(Error::Precondition("membership of the target is undecided".into())),
    }
}

fn split_for(amb: &Ambient, x: &MatrixTuple) -> bool {
    !(amb.is_hermitian() && x.is_hermitian())
}

/// Checked UCP map with the given Choi matrices and target images.
fn checked_map(amb: &Ambient, choi: Vec<ComplexMatrix>, target: &MatrixTuple, tol: &ToleranceProfile) -> Result<bool> {
    let wit = ChoiWitness { level: target.n(), ambient_sizes: amb.sizes(), images: MatrixTuple::new(images(amb, &choi))?, choi };
    Ok(wit.verify(amb, target)?.valid(tol, target))
}

/// Is `x` a Euclidean extreme point of `W_n(a)`?
pub fn euclidean_extreme(a: &MatrixTuple, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<EuclideanVerdict> {
    let amb = Ambient::of(a);
    require_member(&amb, x, tol)?;
    euclidean_in(&amb, x, tol)
}

/// Pair program: two UCP maps with `Φ₊(A) + Φ₋(A) = 2X`, so that
/// `Y = Φ₊(A) − X` ranges over the symmetric set of directions.
pub(crate) fn euclidean_in(amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<EuclideanVerdict> {
    let split = split_for(amb, x);
    let n = x.n();
    let prog = ChoiProgram::new(amb, split, n, 2);
    let xc = hermitian_coords(x, split);
    let mut cons = Vec::new();
    for copy in 0..2 {
        for f in hermitian_basis(n) {
            cons.push(Constraint::new(prog.terms(&[(copy, 1.0)], 0, f), f.pair(&identity(n))));
        }
    }
    for (t, z) in xc.iter().enumerate() {
        for f in hermitian_basis(n) {
            let terms = prog.terms(&[(0, 1.0), (1, 1.0)], t + 1, f);
            if !terms.is_empty() {
                cons.push(Constraint::new(terms, 2.0 * f.pair(z)));
            }
        }
    }
    let sizes = prog.block_sizes();
    let mut probes = Vec::new();
    let mut decision = Decision::Yes;
    for (t, z) in xc.iter().enumerate() {
        for f in hermitian_basis(n) {
            let obj = prog.terms(&[(0, 1.0)], t + 1, f);
            let (coordinate, entry, imaginary) = basis_probe(t, f);
            if obj.is_empty() {
                probes.push(Probe::zero(coordinate, entry, imaginary));
                continue;
            }
            let inst = SdpInstance::maximize(sizes.clone(), cons.clone(), obj);
            let run = run_probe(&inst, tol, 4.0 * n as f64, f.pair(z), 1.0, x.scale())?;
            let mut d = run.decision;
            let mut direction = None;
            if d.is_no() {
                // Evidence: both maps re-checked against X ± Y.
                let w = run.witness.as_ref().ok_or(Error::MissingEvidence)?;
                let plus = prog.chois(w, 0);
                let minus = prog.chois(w, 1);
                let xp = MatrixTuple::new(images(amb, &plus))?;
                let y = MatrixTuple::new(xp.matrices().iter().zip(x.matrices()).map(|(p, q)| p - q).collect())?;
                let xm = MatrixTuple::new(x.matrices().iter().zip(y.matrices()).map(|(p, q)| p - q).collect())?;
                if checked_map(amb, plus, &xp, tol)? && checked_map(amb, minus, &xm, tol)? {
                    direction = Some(y);
                } else {
                    d = Decision::Indeterminate;
                }
            }
            probes.push(Probe { coordinate, entry, imaginary, attained: run.attained, upper: run.upper, decision: d });
            match d {
                Decision::No => return Ok(EuclideanVerdict { decision: Decision::No, direction, probes }),
                Decision::Indeterminate => decision = Decision::Indeterminate,
                Decision::Yes => {}
            }
        }
    }
    Ok(EuclideanVerdict { decision, direction: None, probes })
}

/// Corner probes: for every coordinate `t` and row `p < n`, maximize
/// `Re b_{t,p}` over dilations `[[X, b], [b*, c]] ∈ W_{n+1}(A)`. Rotating the
/// last basis vector shows this covers `|b_{t,p}|`.
pub(crate) fn dilation_probes(amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<(Decision, Vec<Probe>, Option<MatrixTuple>)> {
    let split = split_for(amb, x);
    let n = x.n();
    let m = n + 1;
    let prog = ChoiProgram::new(amb, split, m, 1);
    let xc = hermitian_coords(x, split);
    let mut cons = Vec::new();
    for f in hermitian_basis(m) {
        cons.push(Constraint::new(prog.terms(&[(0, 1.0)], 0, f), f.pair(&identity(m))));
    }
    for (t, z) in xc.iter().enumerate() {
        for f in hermitian_basis(m).into_iter().filter(|f| f.within(n)) {
            let terms = prog.terms(&[(0, 1.0)], t + 1, f);
            if !terms.is_empty() {
                cons.push(Constraint::new(terms, f.pair(z)));
            }
        }
    }
    let sizes = prog.block_sizes();
    let mut probes = Vec::new();
    let mut decision = Decision::Yes;
    for t in 0..xc.len() {
        for p in 0..n {
            let f = Basis::Re(p, n);
            let obj = prog.terms(&[(0, 1.0)], t + 1, f);
            if obj.is_empty() {
                probes.push(Probe::zero(t, (p, n), false));
                continue;
            }
            let inst = SdpInstance::maximize(sizes.clone(), cons.clone(), obj);
            // tr(F Φ) = √2 Re Φ[p, n]; the realified Choi trace is 2(n + 1).
            let run = run_probe(&inst, tol, 2.0 * m as f64, 0.0, std::f64::consts::FRAC_1_SQRT_2, x.scale())?;
            let mut d = run.decision;
            let mut dilation = None;
            if d.is_no() {
                let w = run.witness.as_ref().ok_or(Error::MissingEvidence)?;
                let chois = prog.chois(w, 0);
                let dil = MatrixTuple::new(images(amb, &chois))?;
                let corner_ok = dil
                    .matrices()
                    .iter()
                    .zip(x.matrices())
                    .all(|(dm, xm)| (dm.view((0, 0), (n, n)) - xm).norm() <= tol.feas * x.scale());
                if corner_ok && checked_map(amb, chois, &dil, tol)? {
                    dilation = Some(dil);
                } else {
                    d = Decision::Indeterminate;
                }
            }
            probes.push(Probe { coordinate: t, entry: (p, n), imaginary: false, attained: run.attained, upper: run.upper, decision: d });
            match d {
                Decision::No => return Ok((Decision::No, probes, dilation)),
                Decision::Indeterminate => decision = Decision::Indeterminate,
                Decision::Yes => {}
            }
        }
    }
    Ok((decision, probes, None))
}

/// Full classification of `x ∈ W(a)`: irreducibility, corner probes and
/// Euclidean probes.
pub fn absolute_extreme(a: &MatrixTuple, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<ExtremeVerdict> {
    let amb = Ambient::of(a);
    require_member(&amb, x, tol)?;
    absolute_in(&amb, x, tol, true)
}

pub(crate) fn absolute_in(amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile, with_euclidean: bool) -> Result<ExtremeVerdict> {
    let cd = commutant_dim(x);
    let irreducible = cd == 1;
    let (absolute, probes, dilation) = if irreducible {
        dilation_probes(amb, x, tol)?
    } else {
        (Decision::No, Vec::new(), None)
    };
    let euclidean = if with_euclidean { euclidean_in(amb, x, tol)?.decision } else { Decision::Indeterminate };
    Ok(ExtremeVerdict { euclidean, absolute, irreducible, commutant_dim: cd, probes, dilation })
}

/// A distinct irreducible block of `A` and whether it is a boundary summand,
/// read as: the block is an absolute extreme point of `W(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockBoundary {
    pub block: MatrixTuple,
    pub multiplicity: usize,
    pub is_boundary: Decision,
    pub probes: Vec<Probe>,
}

pub fn boundary_blocks(a: &MatrixTuple, tol: &ToleranceProfile) -> Result<Vec<BlockBoundary>> {
    let dec = irreducible_decompose(a, 0)?;
    let amb = Ambient::from_blocks(dec.blocks.iter().map(|b| b.tuple.clone()).collect())?;
    dec.blocks
        .iter()
        .map(|b| {
            let (is_boundary, probes, _) = dilation_probes(&amb, &b.tuple, tol)?;
            Ok(BlockBoundary { block: b.tuple.clone(), multiplicity: b.multiplicity, is_boundary, probes })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShilovVerdict {
    pub decision: Decision,
    pub blocks: Vec<BlockBoundary>,
    /// Index of a block that is not a boundary summand.
    pub non_boundary: Option<usize>,
}

/// Trivial Shilov ideal at finite dimension: every distinct block is a
/// boundary summand.
pub fn shilov_trivial(a: &MatrixTuple, tol: &ToleranceProfile) -> Result<ShilovVerdict> {
    let blocks = boundary_blocks(a, tol)?;
    let non_boundary = blocks.iter().position(|b| b.is_boundary.is_no());
    let decision = if non_boundary.is_some() {
        Decision::No
    } else if blocks.iter().all(|b| b.is_boundary.is_yes()) {
        Decision::Yes
    } else {
        Decision::Indeterminate
    };
    Ok(ShilovVerdict { decision, blocks, non_boundary })
}

/// Classification of a point against `W^min(K)` for a polytope `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WminClass {
    NotMember,
    MemberNotExtreme,
    /// A vertex of `K`: isolated in `ext K`, hence an absolute extreme point
    /// and crucial.
    Vertex { aep: bool, crucial: bool },
    /// A higher-level member that passed the absolute-extremity probes.
    AbsoluteExtreme,
    Undecided,
}

pub fn wmin_classify(k: &Polytope, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<WminClass> {
    let vertices = k.vertex_rep()?;
    let ext = isolated_extreme_points(&vertices)?;
    if ext.undecided() > 0 {
        return Err(Error::DegeneratePolytope("vertex status undecided".into()));
    }
    let m = wmin_member(x, k, tol)?;
    match m.decision {
        Decision::No => return Ok(WminClass::NotMember),
        Decision::Indeterminate => return Ok(WminClass::Undecided),
        Decision::Yes => {}
    }
    if x.n() == 1 {
        let p: Vec<f64> = x.matrices().iter().map(|c| c[(0, 0)].re).collect();
        let scale = 1.0 + p.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let is_vertex = ext.vertices().iter().any(|v| v.iter().zip(&p).all(|(a, b)| (a - b).abs() <= 1e-9 * scale));
        return Ok(if is_vertex { WminClass::Vertex { aep: true, crucial: true } } else { WminClass::MemberNotExtreme });
    }
    let amb = Ambient::from_blocks(ext.vertices().iter().map(|v| MatrixTuple::point(v)).collect())?;
    let v = absolute_in(&amb, x, tol, false)?;
    Ok(match v.absolute {
        Decision::Yes => WminClass::AbsoluteExtreme,
        Decision::No => WminClass::MemberNotExtreme,
        Decision::Indeterminate => WminClass::Undecided,
    })
}

#[cfg(test)]
mod tests;
