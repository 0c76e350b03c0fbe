//! Finite-rank compact tuples `A_F ⊕ 0` and infinite tails seen through
//! finite corners.
//!
//! Anything that depends on an infinite tail is reported as evidence from a
//! ladder of truncations, never as a verdict. Each truncation is a
//! compression of the represented operator, so a point found in the range of
//! a truncation really is in the range of the operator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::dilation_probes;
use crate::lp::{maximize, LpOutcome};
use crate::mrange::{contains_in, hermitian_coords, support_level1, Ambient};
use crate::numlin::{c64, gaussian_real, realify_matrix, rng, ComplexMatrix, RealMatrix, C64};
use crate::sdp::ToleranceProfile;
use crate::structure::is_minimal;
use crate::tuples::{direct_sum, MatrixTuple, TupleJson};
use crate::Decision;

/// Arithmetic acceptance for a zero compression.
pub const ZERO_COMPRESSION_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSummand {
    None,
    Finite(usize),
    Infinite,
}

/// `entry(i, i + offset) = scale · (i + 1)^(−power)` of one coordinate, for
/// every `i` that lands inside the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRule {
    pub coordinate: usize,
    pub offset: i64,
    pub scale: [f64; 2],
    pub power: f64,
}

/// An infinite tuple given by band rules; its `N × N` corners are the
/// truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruncationSequence {
    Table { d: usize, entries: Vec<BandRule> },
}

impl TruncationSequence {
    pub fn d(&self) -> usize {
        match self {
            TruncationSequence::Table { d, .. } => *d,
        }
    }

    fn rules(&self) -> &[BandRule] {
        match self {
            TruncationSequence::Table { entries, .. } => entries,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d() == 0 {
            return Err(Error::Input("tail with zero coordinates".into()));
        }
        for r in self.rules() {
            if r.coordinate >= self.d() {
                return Err(Error::Input(format!("rule for coordinate {} of {}", r.coordinate, self.d())));
            }
            if !(r.power > 0.0) || !r.scale.iter().all(|v| v.is_finite()) {
                return Err(Error::Input("tail rules need finite scales and positive decay".into()));
            }
        }
        Ok(())
    }

    pub fn truncation(&self, n: usize) -> MatrixTuple {
        let mut mats = vec![ComplexMatrix::zeros(n, n); self.d()];
        for r in self.rules() {
            for i in 0..n {
                let j = i as i64 + r.offset;
                if j < 0 || j >= n as i64 {
                    continue;
                }
                let w = (i as f64 + 1.0).powf(-r.power);
                mats[r.coordinate][(i, j as usize)] += c64(r.scale[0] * w, r.scale[1] * w);
            }
        }
        MatrixTuple::new(mats).expect("nonempty truncation")
    }

    /// Declared bound on the entries beyond the `n`-th corner; it tends to
    /// zero, which is what makes the tail compact.
    pub fn decay_claim(&self, n: usize) -> f64 {
        self.rules().iter().map(|r| r.scale[0].hypot(r.scale[1]) * (n as f64 + 1.0).powf(-r.power)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBlock {
    pub tuple: MatrixTuple,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactModel {
    pub blocks: Vec<ModelBlock>,
    pub zero: ZeroSummand,
    pub tail: Option<TruncationSequence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBlockJson {
    pub tuple: TupleJson,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactModelJson {
    pub blocks: Vec<ModelBlockJson>,
    pub zero: ZeroSummand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TruncationSequence>,
}

impl CompactModel {
    pub fn new(blocks: Vec<ModelBlock>, zero: ZeroSummand, tail: Option<TruncationSequence>) -> Result<Self> {
        let m = CompactModel { blocks, zero, tail };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() && self.tail.is_none() && self.zero == ZeroSummand::None {
            return Err(Error::Empty("model"));
        }
        let d = self.d();
        for b in &self.blocks {
            if b.multiplicity == 0 {
                return Err(Error::Input("block multiplicity 0".into()));
            }
            if b.tuple.d() != d {
                return Err(Error::MixedArity(d, b.tuple.d()));
            }
        }
        if let Some(t) = &self.tail {
            t.validate()?;
            if t.d() != d {
                return Err(Error::MixedArity(d, t.d()));
            }
        }
        if self.blocks.is_empty() && self.tail.is_none() {
            return Err(Error::Input("a model of zeros only has no arity".into()));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.blocks.first().map(|b| b.tuple.d()).or(self.tail.as_ref().map(|t| t.d())).unwrap_or(0)
    }

    pub fn is_infinite(&self) -> bool {
        self.zero == ZeroSummand::Infinite || self.tail.is_some()
    }

    fn zero_point(&self) -> MatrixTuple {
        MatrixTuple::point(&vec![0.0; self.d()])
    }

    /// Blocks with multiplicity, then the zeros (one copy stands in for an
    /// infinite zero summand).
    pub fn finite_tuple(&self) -> Option<MatrixTuple> {
        let mut parts: Vec<MatrixTuple> =
            self.blocks.iter().flat_map(|b| std::iter::repeat_n(b.tuple.clone(), b.multiplicity)).collect();
        let zeros = match self.zero {
            ZeroSummand::None => 0,
            ZeroSummand::Finite(k) => k,
            ZeroSummand::Infinite => 1,
        };
        parts.extend(std::iter::repeat_n(self.zero_point(), zeros));
        (!parts.is_empty()).then(|| direct_sum(&parts).expect("same arity"))
    }

    /// The finite part followed by the `n × n` corner of the tail.
    pub fn truncation(&self, n: usize) -> MatrixTuple {
        let mut parts: Vec<MatrixTuple> = self.finite_tuple().into_iter().collect();
        if let Some(t) = &self.tail {
            parts.push(t.truncation(n));
        }
        direct_sum(&parts).expect("same arity")
    }

    pub fn to_json(&self) -> CompactModelJson {
        CompactModelJson {
            blocks: self.blocks.iter().map(|b| ModelBlockJson { tuple: b.tuple.to_json(), multiplicity: b.multiplicity }).collect(),
            zero: self.zero,
            tail: self.tail.clone(),
        }
    }

    pub fn from_json(j: &CompactModelJson) -> Result<Self> {
        let blocks = j
            .blocks
            .iter()
            .map(|b| Ok(ModelBlock { tuple: MatrixTuple::from_json(&b.tuple)?, multiplicity: b.multiplicity }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks, j.zero, j.tail.clone())
    }
}

// ---------------------------------------------------------------------------
// Zero compressions

/// Unit vectors found by [`zero_compression_probe`]: `Σ_j ‖x_j‖² = 1` and
/// `Σ_j ⟨A_i x_j, x_j⟩ = 0` for every `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroCompression {
    Found { vectors: Vec<DVector<C64>>, residual: f64, restart: usize },
    NotFound { best_residual: f64 },
}

impl ZeroCompression {
    pub fn found(&self) -> bool {
        matches!(self, ZeroCompression::Found { .. })
    }
}

/// `(max_i |Σ_j ⟨A_i x_j, x_j⟩|, |Σ_j ‖x_j‖² − 1|)`.
pub fn zero_compression_residual(a: &MatrixTuple, vectors: &[DVector<C64>]) -> (f64, f64) {
    let moment = a
        .matrices()
        .iter()
        .map(|m| vectors.iter().map(|x| x.dotc(&(m * x))).sum::<C64>().norm())
        .fold(0.0, f64::max);
    let norm: f64 = vectors.iter().map(|x| x.norm_squared()).sum();
    (moment, (norm - 1.0).abs())
}

/// Seeded multi-start Gauss–Newton on the quadratic system
/// `ξᵀ R(H_k) ξ = 0`, `‖ξ‖² = 1` in the realified stacked vector `ξ`, where
/// `H_k` runs over the Hermitian coordinates of `A` (real and imaginary
/// parts when `A` is not Hermitian). `NotFound` is not a proof.
pub fn zero_compression_probe(a: &MatrixTuple, copies: usize, restarts: usize, seed: u64) -> ZeroCompression {
    let n = a.n();
    let copies = copies.max(1);
    let coords = hermitian_coords(a, !a.is_hermitian());
    let forms: Vec<RealMatrix> = coords.iter().map(realify_matrix).collect();
    let dim = 2 * n * copies;
    let mut r = rng(seed);
    let mut best = f64::INFINITY;
    for restart in 0..restarts.max(1) {
        let mut xi = DVector::from_fn(dim, |_, _| gaussian_real(&mut r));
        xi /= xi.norm();
        if let Some(xi) = gauss_newton(&forms, n, copies, xi.clone()) {
            let vectors = unstack(&xi, n, copies);
            let (moment, norm) = zero_compression_residual(a, &vectors);
            if moment <= ZERO_COMPRESSION_TOL && norm <= NORM_TOL {
                return ZeroCompression::Found { vectors, residual: moment, restart };
            }
            best = best.min(moment);
        } else {
            best = best.min(system_residual(&forms, n, copies, &xi));
        }
    }
    ZeroCompression::NotFound { best_residual: best }
}

fn quad(form: &RealMatrix, n: usize, copies: usize, xi: &DVector<f64>) -> (f64, DVector<f64>) {
    let mut grad = DVector::zeros(xi.len());
    let mut val = 0.0;
    for c in 0..copies {
        let x = xi.rows(2 * n * c, 2 * n);
        let fx = form * x;
        val += x.dot(&fx);
        grad.rows_mut(2 * n * c, 2 * n).copy_from(&(fx * 2.0));
    }
    (val, grad)
}

fn system(forms: &[RealMatrix], n: usize, copies: usize, xi: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let m = forms.len() + 1;
    let mut f = DVector::zeros(m);
    let mut j = DMatrix::zeros(m, xi.len());
    for (k, form) in forms.iter().enumerate() {
        let (v, g) = quad(form, n, copies, xi);
        f[k] = v;
        j.row_mut(k).copy_from(&g.transpose());
    }
    f[m - 1] = xi.norm_squared() - 1.0;
    j.row_mut(m - 1).copy_from(&(xi.transpose() * 2.0));
    (f, j)
}

fn system_residual(forms: &[RealMatrix], n: usize, copies: usize, xi: &DVector<f64>) -> f64 {
    system(forms, n, copies, xi).0.amax()
}

fn gauss_newton(forms: &[RealMatrix], n: usize, copies: usize, mut xi: DVector<f64>) -> Option<DVector<f64>> {
    let (mut f, mut j) = system(forms, n, copies, &xi);
    for _ in 0..200 {
        if f.amax() <= 1e-14 {
            break;
        }
        let step = j.clone().svd(true, true).solve(&(-&f), 1e-12).ok()?;
        let mut t = 1.0;
        loop {
            let trial = &xi + &step * t;
            let (ft, jt) = system(forms, n, copies, &trial);
            if ft.norm() < f.norm() {
                xi = trial;
                f = ft;
                j = jt;
                break;
            }
            t *= 0.5;
            if t < 1e-8 {
                return None;
            }
        }
    }
    xi /= xi.norm();
    Some(xi)
}

fn unstack(xi: &DVector<f64>, n: usize, copies: usize) -> Vec<DVector<C64>> {
    (0..copies)
        .map(|c| {
            let o = 2 * n * c;
            DVector::from_fn(n, |i, _| c64(xi[o + i], xi[o + n + i]))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Nonsingularity

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    FiniteDimensional,
    FiniteDimensionalSummand,
    ZeroNotIsolated,
    ZeroCompression,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeBudget {
    pub ladder: Vec<usize>,
    pub restarts: usize,
    pub copies: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget { ladder: vec![8, 16, 32, 64], restarts: 64, copies: 2, directions: 32, seed: 0 }
    }
}

/// Level-1 picture of one truncation: the `∞`-distance from 0 to the hull of
/// the nonzero support points found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEvidence {
    pub n: usize,
    pub zero_distance: f64,
    pub zero_in_hull: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonsingularVerdict {
    /// `Indeterminate` reads as unknown.
    pub decision: Decision,
    pub rule: Option<Rule>,
    /// `W(B) = W(B ⊕ 0)` for the finite summand `B`, checked at one stage.
    pub summand_equality: Option<Decision>,
    pub isolation: Vec<TruncationEvidence>,
    pub zero_compression: Option<ZeroCompression>,
}

fn support_points(t: &MatrixTuple, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let coords = hermitian_coords(t, !t.is_hermitian());
    let dim = coords.len();
    let mut r = rng(seed);
    let mut dirs: Vec<Vec<f64>> = (0..dim)
        .flat_map(|i| {
            [1.0, -1.0].map(|s| {
                let mut u = vec![0.0; dim];
                u[i] = s;
                u
            })
        })
        .collect();
    dirs.extend((0..count).map(|_| (0..dim).map(|_| gaussian_real(&mut r)).collect()));
    dirs.iter()
        .map(|u| {
            let (_, x) = support_level1(t, u)?;
            Ok(coords.iter().map(|c| x.dotc(&(c * &x)).re).collect())
        })
        .collect()
}

/// `min ‖Σ λ_k p_k‖_∞` over the simplex, via one LP.
fn hull_distance_to_zero(points: &[Vec<f64>]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    let k = points.len();
    let dim = points[0].len();
    let mut c = vec![0.0; k + 1];
    c[k] = -1.0;
    let mut bounds = vec![(0.0, f64::INFINITY); k + 1];
    bounds[k] = (0.0, f64::INFINITY);
    let mut le = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut row: Vec<f64> = points.iter().map(|p| s * p[i]).collect();
            row.push(-1.0);
            le.push((row, 0.0));
        }
    }
    let mut eq_row = vec![1.0; k];
    eq_row.push(0.0);
    match maximize(&c, &bounds, &le, &[(eq_row, 1.0)]) {
        LpOutcome::Optimal { value, .. } => -value,
        _ => f64::INFINITY,
    }
}

fn isolation_evidence(model: &CompactModel, budget: &ProbeBudget) -> Result<Vec<TruncationEvidence>> {
    budget
        .ladder
        .iter()
        .map(|&n| {
            let t = model.truncation(n);
            let floor = 1e-9 * t.scale();
            let pts: Vec<Vec<f64>> = support_points(&t, budget.directions, budget.seed)?
                .into_iter()
                .filter(|p| p.iter().fold(0.0f64, |a, v| a.max(v.abs())) > floor)
                .collect();
            let zero_distance = hull_distance_to_zero(&pts);
            Ok(TruncationEvidence { n, zero_distance, zero_in_hull: zero_distance <= floor })
        })
        .collect()
}

/// Ordered sufficient conditions for nonsingularity; the first that fires
/// decides, otherwise the answer is unknown with every piece of evidence.
pub fn nonsingular(model: &CompactModel, budget: &ProbeBudget, tol: &ToleranceProfile) -> Result<NonsingularVerdict> {
    let mut v = NonsingularVerdict { decision: Decision::Indeterminate, rule: None, summand_equality: None, isolation: Vec::new(), zero_compression: None };
    if !model.is_infinite() {
        v.decision = Decision::Yes;
        v.rule = Some(Rule::FiniteDimensional);
        return Ok(v);
    }
    if model.tail.is_none() {
        // A = B ⊕ 0 ⊕ 0 ⊕ … with B = A_F ⊕ 0 finite-dimensional and W(B) = W(A).
        let b = model.finite_tuple().expect("infinite zero summand");
        let bb = direct_sum(&[b.clone(), model.zero_point()])?;
        let eq = crate::mrange::equal_with(&b, &bb, tol)?.decision;
        v.summand_equality = Some(eq);
        v.decision = eq;
        v.rule = eq.is_yes().then_some(Rule::FiniteDimensionalSummand);
        return Ok(v);
    }
    v.isolation = isolation_evidence(model, budget)?;
    if v.isolation.iter().any(|e| e.zero_in_hull) {
        v.decision = Decision::Yes;
        v.rule = Some(Rule::ZeroNotIsolated);
        return Ok(v);
    }
    let top = *budget.ladder.iter().max().unwrap_or(&8);
    let z = zero_compression_probe(&model.truncation(top), budget.copies, budget.restarts, budget.seed);
    if z.found() {
        v.decision = Decision::Yes;
        v.rule = Some(Rule::ZeroCompression);
    }
    v.zero_compression = Some(z);
    Ok(v)
}

// ---------------------------------------------------------------------------
// Structure of models with a tail

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationClaim {
    pub n: usize,
    /// Per finite block: absolute extremity in the range of the truncation.
    pub block_extreme: Vec<Decision>,
    /// `W(truncation) ⊆ W(⊕ X ⊕ 0)` for the candidate blocks `X`.
    pub claim: Decision,
    pub note: Option<String>,
}

/// `A ≅ ⊕ X ⊕ Y` with candidate nonzero absolute extreme points `X` among
/// the finite blocks and `Y` the tail; evidence only.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralForm {
    /// Indices of finite blocks that were absolute extreme at the largest
    /// truncation examined; `None` when there are no finite blocks.
    pub candidates: Option<Vec<usize>>,
    pub evidence: Vec<TruncationClaim>,
}

pub fn singular_structure(model: &CompactModel, ladder: &[usize], tol: &ToleranceProfile) -> Result<Option<StructuralForm>> {
    if model.tail.is_none() {
        return Ok(None);
    }
    if model.blocks.is_empty() {
        return Ok(Some(StructuralForm { candidates: None, evidence: Vec::new() }));
    }
    let mut evidence = Vec::new();
    let mut candidates = Vec::new();
    for &n in ladder {
        let t = model.truncation(n);
        let amb = Ambient::of(&t);
        let mut block_extreme = Vec::new();
        let mut note = None;
        for b in &model.blocks {
            match dilation_probes(&amb, &b.tuple, tol) {
                Ok((d, _, _)) => block_extreme.push(d),
                Err(Error::DimensionCap { .. }) => {
                    block_extreme.push(Decision::Indeterminate);
                    note = Some("dimension cap".to_string());
                }
                Err(e) => return Err(e),
            }
        }
        candidates = block_extreme.iter().enumerate().filter(|(_, d)| d.is_yes()).map(|(i, _)| i).collect();
        let mut parts: Vec<MatrixTuple> = candidates.iter().map(|&i| model.blocks[i].tuple.clone()).collect();
        parts.push(model.zero_point());
        let claim = match contains_in(&Ambient::of(&direct_sum(&parts)?), &t, tol) {
            Ok(v) => v.decision,
            Err(Error::DimensionCap { .. }) => {
                note = Some("dimension cap".to_string());
                Decision::Indeterminate
            }
            Err(e) => return Err(e),
        };
        evidence.push(TruncationClaim { n, block_extreme, claim, note });
    }
    Ok(Some(StructuralForm { candidates: Some(candidates), evidence }))
}

/// Minimality of the represented tuple where it can be decided.
pub fn model_minimal(model: &CompactModel, ladder: &[usize], tol: &ToleranceProfile) -> Result<Decision> {
    if model.is_infinite() && model.zero != ZeroSummand::None {
        // A minimal tuple with a zero summand lives on a finite-dimensional space.
        return Ok(Decision::No);
    }
    if model.blocks.iter().any(|b| b.multiplicity > 1) {
        return Ok(Decision::No);
    }
    let Some(tail) = &model.tail else {
        return is_minimal(&model.finite_tuple().expect("nonempty model"), tol);
    };
    // A block in the range of the others plus a corner of the tail is in the
    // range of the others plus the tail itself.
    for &n in ladder {
        for (i, b) in model.blocks.iter().enumerate() {
            let mut rest: Vec<MatrixTuple> =
                model.blocks.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, o)| o.tuple.clone()).collect();
            rest.push(tail.truncation(n));
            let amb = Ambient::of(&direct_sum(&rest)?);
            match contains_in(&amb, &b.tuple, tol) {
                Ok(v) if v.decision.is_yes() => return Ok(Decision::No),
                Ok(_) | Err(Error::DimensionCap { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Decision::Indeterminate)
}

#[cfg(test)]
mod tests;
