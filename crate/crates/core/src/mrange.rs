//! Matrix ranges. `X ∈ W_n(A)` exactly when some unital completely positive
//! map sends every `A_i` to `X_i`. Such a map is searched for on the
//! C*-algebra generated by `A`, which is `⊕_j M_{k_j}` over the distinct
//! irreducible blocks of `A`; any UCP map on the operator system of `A`
//! extends to it (Arveson), so nothing is lost.
//!
//! Each summand map `Φ_j: M_{k_j} → M_n` is encoded by its Choi matrix
//! `C_j = Σ_{ab} E_ab ⊗ Φ_j(E_ab)`, realified for the real SDP kernel.
//! Infeasibility certificates decode into affine functionals on tuple space
//! that are positive at `X` and non-positive on all of `W_n(A)`.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minmax::{Halfspace, Polytope};
use crate::numlin::{
    c64, frob, gaussian_real, hermitian_part, identity, kron, lambda_max, lambda_min, random_isometry, rng,
    skew_part, to_pairs, ComplexMatrix, RealMatrix, C64, ZERO,
};
use crate::sdp::{self, Constraint, SdpInstance, SdpStatus, SparseSym, ToleranceProfile};
use crate::tuples::{direct_sum, irreducible_decompose, irreducible_intertwiner, MatrixTuple};
use crate::Decision;

/// Random directions tried by the first-level prefilter, on top of the
/// signed coordinate axes.
const PREFILTER_DIRECTIONS: usize = 8;
const PREFILTER_SEED: u64 = 0x5eed;

/// Host algebra of the UCP maps: a list of irreducible blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Ambient {
    blocks: Vec<MatrixTuple>,
}

impl Ambient {
    /// Distinct irreducible blocks of `a`; falls back to `a` itself (which is
    /// equally valid, only larger) if the decomposition fails.
    pub fn of(a: &MatrixTuple) -> Ambient {
        let blocks = match irreducible_decompose(a, 0) {
            Ok(dec) => dec.blocks.into_iter().map(|b| b.tuple).collect(),
            Err(_) => vec![a.clone()],
        };
        Ambient { blocks }
    }

    pub fn from_blocks(blocks: Vec<MatrixTuple>) -> Result<Ambient> {
        let Some(first) = blocks.first() else {
            return Err(Error::Empty("ambient has no blocks"));
        };
        if let Some(b) = blocks.iter().find(|b| b.d() != first.d()) {
            return Err(Error::MixedArity(first.d(), b.d()));
        }
        Ok(Ambient { blocks })
    }

    pub fn blocks(&self) -> &[MatrixTuple] {
        &self.blocks
    }

    pub fn d(&self) -> usize {
        self.blocks[0].d()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(MatrixTuple::n).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.blocks.iter().all(MatrixTuple::is_hermitian)
    }

    pub fn tuple(&self) -> MatrixTuple {
        direct_sum(&self.blocks).expect("blocks share arity")
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(MatrixTuple::norm).fold(0.0, f64::max)
    }

    /// `max_j λ_max(Σ u_i A_i^{(j)})` over Hermitian coordinates.
    fn support(&self, split: bool, u: &[f64]) -> f64 {
        self.blocks.iter().map(|b| support_of(&hermitian_coords(b, split), u).0).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Hermitian coordinates: the matrices themselves, or `(Re A_i, Im A_i)`
/// pairs when `split`.
pub(crate) fn hermitian_coords(t: &MatrixTuple, split: bool) -> Vec<ComplexMatrix> {
    if split {
        t.matrices().iter().flat_map(|m| [hermitian_part(m), skew_part(m)]).collect()
    } else {
        t.matrices().to_vec()
    }
}

fn support_of(coords: &[ComplexMatrix], u: &[f64]) -> (f64, DVector<C64>) {
    let n = coords[0].nrows();
    let mut m = ComplexMatrix::zeros(n, n);
    for (c, &w) in coords.iter().zip(u) {
        m += c * c64(w, 0.0);
    }
    lambda_max(&m)
}

/// Support function of the first level: `max {⟨u, x⟩ : x ∈ W₁(A)}` together
/// with a maximizing unit vector. Non-Hermitian tuples are realified first,
/// so `u` then has length `2d`.
pub fn support_level1(a: &MatrixTuple, u: &[f64]) -> Result<(f64, DVector<C64>)> {
    let coords = hermitian_coords(a, !a.is_hermitian());
    if u.len() != coords.len() {
        return Err(Error::DimensionMismatch(format!("direction of length {} for {} coordinates", u.len(), coords.len())));
    }
    if u.iter().map(|x| x * x).sum::<f64>() == 0.0 || u.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateDirections);
    }
    Ok(support_of(&coords, u))
}

/// Outer approximation of `W₁(A)`: `∩_u {x : ⟨u, x⟩ ≤ h_A(u)}` over the
/// given directions (normalised).
pub fn level1_outer_polytope(a: &MatrixTuple, directions: &[Vec<f64>]) -> Result<Polytope> {
    let dim = if a.is_hermitian() { a.d() } else { 2 * a.d() };
    if directions.len() < dim + 1 {
        return Err(Error::DegenerateDirections);
    }
    let mut hs = Vec::with_capacity(directions.len());
    for u in directions {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateDirections);
        }
        let u: Vec<f64> = u.iter().map(|x| x / norm).collect();
        let (h, _) = support_level1(a, &u)?;
        hs.push(Halfspace { a: u, b: h });
    }
    Polytope::from_halfspaces(dim, hs).map_err(|e| match e {
        Error::UnboundedPolytope | Error::DegeneratePolytope(_) => Error::DegenerateDirections,
        other => other,
    })
}

// ---------------------------------------------------------------------------
// Choi programs

/// Orthonormal basis element of the real space of Hermitian `n×n` matrices:
/// `E_pp`, `(E_pq + E_qp)/√2` or `i(E_pq − E_qp)/√2` for `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Basis {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

pub(crate) fn hermitian_basis(n: usize) -> Vec<Basis> {
    let mut out: Vec<Basis> = (0..n).map(Basis::Diag).collect();
    for p in 0..n {
        for q in p + 1..n {
            out.push(Basis::Re(p, q));
            out.push(Basis::Im(p, q));
        }
    }
    out
}

impl Basis {
    fn entries(self) -> Vec<(usize, usize, C64)> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Basis::Diag(p) => vec![(p, p, c64(1.0, 0.0))],
            Basis::Re(p, q) => vec![(p, q, c64(s, 0.0)), (q, p, c64(s, 0.0))],
            Basis::Im(p, q) => vec![(p, q, c64(0.0, s)), (q, p, c64(0.0, -s))],
        }
    }

    /// `Re tr(Z F)`
    pub(crate) fn pair(self, z: &ComplexMatrix) -> f64 {
        self.entries().into_iter().map(|(p, q, f)| (z[(q, p)] * f).re).sum()
    }

    pub(crate) fn matrix(self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for (p, q, f) in self.entries() {
            m[(p, q)] = f;
        }
        m
    }

    pub(crate) fn within(self, n: usize) -> bool {
        match self {
            Basis::Diag(p) => p < n,
            Basis::Re(p, q) | Basis::Im(p, q) => p < n && q < n,
        }
    }
}

/// `½ R(Bᵀ ⊗ F)` on the realified Choi space, where
/// `R(H) = [[Re H, −Im H], [Im H, Re H]]`; pairing it with `R(C)` gives
/// `tr((Bᵀ ⊗ F) C) = tr(F Φ(B))`.
fn choi_coefficient(b: &ComplexMatrix, f: Basis, n: usize) -> SparseSym {
    let k = b.nrows();
    let big = k * n;
    let fe = f.entries();
    let mut t = Vec::new();
    let mut push = |r: usize, c: usize, v: f64| {
        if r <= c && v != 0.0 {
            t.push((r, c, 0.5 * v));
        }
    };
    for a in 0..k {
        for bb in 0..k {
            let w = b[(bb, a)];
            if w == ZERO {
                continue;
            }
            for &(p, q, fv) in &fe {
                let h = w * fv;
                let (r, c) = (a * n + p, bb * n + q);
                push(r, c, h.re);
                push(r + big, c + big, h.re);
                push(r, c + big, -h.im);
                push(r + big, c, h.im);
            }
        }
    }
    SparseSym::from_triplets(2 * big, t)
}

/// Complex Hermitian matrix represented by a real symmetric `2N×2N` block.
fn complexify_choi(z: &RealMatrix) -> ComplexMatrix {
    let n = z.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        c64(0.5 * (z[(i, j)] + z[(i + n, j + n)]), 0.5 * (z[(i + n, j)] - z[(i, j + n)]))
    })
}

/// One or more UCP maps `⊕_j M_{k_j} → M_level` sharing an ambient; `copies`
/// separate maps occupy consecutive groups of SDP blocks.
pub(crate) struct ChoiProgram {
    pub level: usize,
    /// Per ambient block: the identity followed by the Hermitian coordinates.
    pub coords: Vec<Vec<ComplexMatrix>>,
    pub copies: usize,
}

impl ChoiProgram {
    pub(crate) fn new(amb: &Ambient, split: bool, level: usize, copies: usize) -> Self {
        let coords = amb
            .blocks
            .iter()
            .map(|b| {
                let mut c = vec![identity(b.n())];
                c.extend(hermitian_coords(b, split));
                c
            })
            .collect();
        ChoiProgram { level, coords, copies }
    }

    pub(crate) fn block_sizes(&self) -> Vec<usize> {
        let one: Vec<usize> = self.coords.iter().map(|c| 2 * c[0].nrows() * self.level).collect();
        (0..self.copies).flat_map(|_| one.iter().copied()).collect()
    }

    /// Terms of `Σ_c w_c tr(F Φ_c(B_e))` for coordinate `e` (0 is the unit).
    pub(crate) fn terms(&self, weights: &[(usize, f64)], e: usize, f: Basis) -> Vec<(usize, SparseSym)> {
        let nb = self.coords.len();
        let mut out = Vec::new();
        for (j, c) in self.coords.iter().enumerate() {
            let s = choi_coefficient(&c[e], f, self.level);
            if s.is_zero() {
                continue;
            }
            for &(copy, w) in weights {
                out.push((copy * nb + j, if w == 1.0 { s.clone() } else { s.scaled(w) }));
            }
        }
        out
    }

    pub(crate) fn chois(&self, z: &[RealMatrix], copy: usize) -> Vec<ComplexMatrix> {
        let nb = self.coords.len();
        z[copy * nb..(copy + 1) * nb].iter().map(complexify_choi).collect()
    }
}

/// `Φ(Y) = Σ_{ab} Y_ab C[a-th row block, b-th column block]`.
pub fn apply_choi(c: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let k = y.nrows();
    let n = c.nrows() / k;
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..k {
        for b in 0..k {
            if y[(a, b)] != ZERO {
                out += c.view((a * n, b * n), (n, n)) * y[(a, b)];
            }
        }
    }
    out
}

/// `Σ_j Φ_j(Y_j)` applied to every coordinate of the ambient.
pub(crate) fn images(amb: &Ambient, chois: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    (0..amb.d())
        .map(|i| amb.blocks.iter().zip(chois).map(|(b, c)| apply_choi(c, b.get(i))).fold(None, add_opt).unwrap())
        .collect()
}

fn add_opt(acc: Option<ComplexMatrix>, m: ComplexMatrix) -> Option<ComplexMatrix> {
    Some(match acc {
        Some(a) => a + m,
        None => m,
    })
}

// ---------------------------------------------------------------------------
// Verdicts

/// A UCP map `⊕_j M_{k_j} → M_n`, one Choi matrix per ambient block, and
/// the images of the ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiWitness {
    pub level: usize,
    pub ambient_sizes: Vec<usize>,
    pub choi: Vec<ComplexMatrix>,
    pub images: MatrixTuple,
}

/// Independent re-check of a [`ChoiWitness`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub choi_min_eig: f64,
    pub unitality_residual: f64,
    pub image_residual: f64,
}

impl WitnessCheck {
    pub fn valid(&self, tol: &ToleranceProfile, x: &MatrixTuple) -> bool {
        self.choi_min_eig >= -tol.psd && self.unitality_residual <= tol.feas && self.image_residual <= tol.feas * x.scale()
    }
}

impl ChoiWitness {
    /// Choi matrix on `M_m`, `m = Σ k_j`, of the map that first compresses to
    /// the block diagonal.
    pub fn full_choi(&self) -> ComplexMatrix {
        let n = self.level;
        let m: usize = self.ambient_sizes.iter().sum();
        let mut c = ComplexMatrix::zeros(m * n, m * n);
        let mut off = 0;
        for (k, cj) in self.ambient_sizes.iter().zip(&self.choi) {
            c.view_mut((off * n, off * n), (k * n, k * n)).copy_from(cj);
            off += k;
        }
        c
    }

    pub fn verify(&self, amb: &Ambient, x: &MatrixTuple) -> Result<WitnessCheck> {
        if self.choi.len() != amb.blocks.len() || self.level != x.n() || amb.d() != x.d() {
            return Err(Error::DimensionMismatch("witness does not match ambient and target".into()));
        }
        for (c, b) in self.choi.iter().zip(&amb.blocks) {
            if c.nrows() != b.n() * self.level || !c.is_square() {
                return Err(Error::DimensionMismatch("Choi block of wrong size".into()));
            }
        }
        let choi_min_eig = self.choi.iter().map(lambda_min).fold(f64::INFINITY, f64::min);
        let unit = self.choi.iter().zip(&amb.blocks).map(|(c, b)| apply_choi(c, &identity(b.n()))).fold(None, add_opt).unwrap();
        let unitality_residual = frob(&(unit - identity(self.level)));
        let img = images(amb, &self.choi);
        let image_residual = img.iter().zip(x.matrices()).map(|(p, q)| frob(&(p - q))).fold(0.0, f64::max);
        Ok(WitnessCheck { choi_min_eig, unitality_residual, image_residual })
    }

    pub fn to_json(&self) -> ChoiWitnessJson {
        ChoiWitnessJson {
            level: self.level,
            ambient_sizes: self.ambient_sizes.clone(),
            choi: self.choi.iter().map(to_pairs).collect(),
            images: self.images.to_json(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiWitnessJson {
    pub level: usize,
    pub ambient_sizes: Vec<usize>,
    pub choi: Vec<Vec<Vec<[f64; 2]>>>,
    pub images: crate::tuples::TupleJson,
}

/// Affine functional `ℓ(Y) = tr H₀ + Σ_t tr(H_t Y_t)` on Hermitian
/// coordinates (split into real and imaginary parts when `split`), with
/// `ℓ(X) = target_value` and `ℓ ≤ range_bound` on all of `W_n(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingFunctional {
    pub split: bool,
    pub constant: ComplexMatrix,
    pub coefficients: Vec<ComplexMatrix>,
    pub target_value: f64,
    pub range_bound: f64,
    /// Lower bound on the Frobenius distance from `X` to `W_n(A)`.
    pub separation: f64,
    /// Dual ray returned by the SDP the functional was read from.
    pub dual: Vec<f64>,
}

impl SeparatingFunctional {
    pub fn eval(&self, y: &MatrixTuple) -> f64 {
        let coords = hermitian_coords(y, self.split);
        let mut v = self.constant.trace().re;
        for (h, c) in self.coefficients.iter().zip(&coords) {
            v += (h * c).trace().re;
        }
        v
    }

    fn gradient_norm(&self) -> f64 {
        self.coefficients.iter().map(|h| frob(h).powi(2)).sum::<f64>().sqrt()
    }

    /// `min_j λ_min(−(I ⊗ H₀ + Σ_t B_{j,t}ᵀ ⊗ H_t))`; non-negative exactly
    /// when `ℓ ≤ 0` on the range.
    fn slack_min_eig(&self, amb: &Ambient) -> f64 {
        amb.blocks
            .iter()
            .map(|b| {
                let mut s = kron(&identity(b.n()), &self.constant);
                for (h, c) in self.coefficients.iter().zip(hermitian_coords(b, self.split)) {
                    s += kron(&c.transpose(), h);
                }
                lambda_min(&(-s))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Recomputes `range_bound` and `separation` against `amb` and `x`.
    fn recheck(&mut self, amb: &Ambient, x: &MatrixTuple) {
        self.target_value = self.eval(x);
        let neg = (-self.slack_min_eig(amb)).max(0.0);
        // tr C_j sums to the level, so ℓ(Φ(A)) ≤ n · max negative eigenvalue.
        self.range_bound = neg * x.n() as f64;
        let g = self.gradient_norm();
        let gap = self.target_value - self.range_bound;
        self.separation = if g > 0.0 { gap / g } else if gap > 0.0 { f64::INFINITY } else { 0.0 };
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "split": self.split,
            "constant": to_pairs(&self.constant),
            "coefficients": self.coefficients.iter().map(to_pairs).collect::<Vec<_>>(),
            "target_value": self.target_value,
            "range_bound": self.range_bound,
            "separation": self.separation,
        })
    }
}

/// First-level obstruction: `λ_max(Σ u_i X_i)` exceeds the support of
/// `W₁(A)` in direction `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCertificate {
    pub split: bool,
    pub direction: Vec<f64>,
    pub target_support: f64,
    pub ambient_support: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Support(SupportCertificate),
    Functional(SeparatingFunctional),
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Certificate::Support(s) => serde_json::json!({"kind": "support", "support": s}),
            Certificate::Functional(f) => serde_json::json!({"kind": "functional", "functional": f.to_json()}),
        }
    }

    /// Independent check that `x` is separated from `W(amb)`.
    pub fn separates(&self, amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile) -> bool {
        match self {
            Certificate::Support(s) => {
                let t = support_of(&hermitian_coords(x, s.split), &s.direction).0;
                let h = amb.support(s.split, &s.direction);
                t - h > tol.band * tol.feas * x.scale()
            }
            Certificate::Functional(f) => {
                let mut g = f.clone();
                g.recheck(amb, x);
                g.target_value > 0.0 && g.separation > tol.band * tol.feas * x.scale()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// Largest `λ_max(Σu X) − h_A(u)` over the probed directions.
    pub level1_excess: f64,
    pub check: Option<WitnessCheck>,
    pub separation: Option<f64>,
    pub sdp_iterations: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub decision: Decision,
    pub witness: Option<ChoiWitness>,
    pub certificate: Option<Certificate>,
    pub margins: Margins,
}

impl MembershipVerdict {
    fn indeterminate(margins: Margins) -> Self {
        MembershipVerdict { decision: Decision::Indeterminate, witness: None, certificate: None, margins }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.decision,
            "margins": self.margins,
            "witness": self.witness.as_ref().map(ChoiWitness::to_json),
            "certificate": self.certificate.as_ref().map(Certificate::to_json),
        })
    }
}

// ---------------------------------------------------------------------------
// Membership

fn check_arity(amb: &Ambient, x: &MatrixTuple) -> Result<()> {
    if amb.d() != x.d() {
        return Err(Error::MixedArity(amb.d(), x.d()));
    }
    Ok(())
}

fn needs_split(amb: &Ambient, x: &MatrixTuple) -> bool {
    !(amb.is_hermitian() && x.is_hermitian())
}

fn prefilter_directions(dim: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * dim + PREFILTER_DIRECTIONS);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; dim];
            u[i] = s;
            dirs.push(u);
        }
    }
    let mut r = rng(PREFILTER_SEED);
    for _ in 0..PREFILTER_DIRECTIONS {
        let u: Vec<f64> = (0..dim).map(|_| gaussian_real(&mut r)).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            dirs.push(u.iter().map(|x| x / norm).collect());
        }
    }
    dirs
}

/// Cheap first-level test; returns the largest excess and, when it is beyond
/// the band, a certificate.
fn prefilter(amb: &Ambient, x: &MatrixTuple, split: bool, tol: &ToleranceProfile) -> (f64, Option<SupportCertificate>) {
    let xc = hermitian_coords(x, split);
    let mut best = (f64::NEG_INFINITY, None);
    for u in prefilter_directions(xc.len()) {
        let t = support_of(&xc, &u).0;
        let h = amb.support(split, &u);
        if t - h > best.0 {
            best = (t - h, Some(SupportCertificate { split, direction: u, target_support: t, ambient_support: h }));
        }
    }
    let margin = tol.band * tol.feas * x.scale();
    (best.0, if best.0 > margin { best.1 } else { None })
}

/// Rows of the membership program: `(coordinate, basis element)` per
/// constraint, in order.
pub(crate) type RowIndex = Vec<(usize, Basis)>;

/// Feasibility SDP whose solutions are Choi matrices of UCP maps sending the
/// ambient to `x`, with the row bookkeeping needed to decode certificates.
pub fn membership_sdp(amb: &Ambient, x: &MatrixTuple) -> Result<SdpInstance> {
    check_arity(amb, x)?;
    Ok(build_membership(amb, x, needs_split(amb, x)).0)
}

fn build_membership(amb: &Ambient, x: &MatrixTuple, split: bool) -> (SdpInstance, RowIndex, ChoiProgram) {
    let n = x.n();
    let prog = ChoiProgram::new(amb, split, n, 1);
    let mut targets = vec![identity(n)];
    targets.extend(hermitian_coords(x, split));
    let mut cons = Vec::new();
    let mut rows = Vec::new();
    for (e, z) in targets.iter().enumerate() {
        for f in hermitian_basis(n) {
            let terms = prog.terms(&[(0, 1.0)], e, f);
            if terms.is_empty() {
                continue;
            }
            cons.push(Constraint::new(terms, f.pair(z)));
            rows.push((e, f));
        }
    }
    (SdpInstance::feasibility(prog.block_sizes(), cons), rows, prog)
}

/// Solver tolerance used for membership programs: tighter feasibility than
/// the acceptance threshold so that re-verification has headroom.
pub(crate) fn solve_profile(tol: &ToleranceProfile) -> ToleranceProfile {
    ToleranceProfile { feas: tol.feas * 1e-2, ..*tol }
}

fn decode_functional(rows: &RowIndex, y: &[f64], n: usize, d: usize, split: bool) -> SeparatingFunctional {
    let mut h = vec![ComplexMatrix::zeros(n, n); d + 1];
    for (&(e, f), &w) in rows.iter().zip(y) {
        h[e] += f.matrix(n) * c64(w, 0.0);
    }
    let constant = h.remove(0);
    SeparatingFunctional {
        split,
        constant,
        coefficients: h,
        target_value: 0.0,
        range_bound: 0.0,
        separation: 0.0,
        dual: y.to_vec(),
    }
}

/// Decides `x ∈ W_n(A)` for the UCP maps on the given ambient.
pub fn member_in(amb: &Ambient, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MembershipVerdict> {
    check_arity(amb, x)?;
    let split = needs_split(amb, x);
    let (excess, cert) = prefilter(amb, x, split, tol);
    let mut margins = Margins { level1_excess: excess, ..Margins::default() };
    if let Some(c) = cert {
        return Ok(MembershipVerdict {
            decision: Decision::No,
            witness: None,
            certificate: Some(Certificate::Support(c)),
            margins,
        });
    }
    let (inst, rows, prog) = build_membership(amb, x, split);
    let out = sdp::solve(&inst, &solve_profile(tol))?;
    margins.sdp_iterations = out.diagnostics.iterations;
    match out.status {
        SdpStatus::Feasible => {
            let z = out.witness.as_ref().ok_or(Error::MissingEvidence)?;
            let choi = prog.chois(z, 0);
            let w = ChoiWitness {
                level: x.n(),
                ambient_sizes: amb.sizes(),
                images: MatrixTuple::new(images(amb, &choi))?,
                choi,
            };
            let check = w.verify(amb, x)?;
            margins.check = Some(check);
            if check.valid(tol, x) {
                Ok(MembershipVerdict { decision: Decision::Yes, witness: Some(w), certificate: None, margins })
            } else {
                margins.note = Some("solver point failed re-verification".into());
                Ok(MembershipVerdict::indeterminate(margins))
            }
        }
        SdpStatus::Infeasible => {
            let y = out.certificate.as_ref().ok_or(Error::MissingEvidence)?;
            let mut f = decode_functional(&rows, y, x.n(), prog.coords[0].len() - 1, split);
            f.recheck(amb, x);
            margins.separation = Some(f.separation);
            if f.target_value > 0.0 && f.separation > tol.band * tol.feas * x.scale() {
                Ok(MembershipVerdict {
                    decision: Decision::No,
                    witness: None,
                    certificate: Some(Certificate::Functional(f)),
                    margins,
                })
            } else {
                margins.note = Some("separation inside the tolerance band".into());
                Ok(MembershipVerdict::indeterminate(margins))
            }
        }
        _ => {
            margins.note = Some(if out.diagnostics.note.is_empty() { "solver did not converge".into() } else { out.diagnostics.note.clone() });
            Ok(MembershipVerdict::indeterminate(margins))
        }
    }
}

/// Decides `x ∈ W_n(a)`.
pub fn member(a: &MatrixTuple, x: &MatrixTuple) -> Result<MembershipVerdict> {
    member_with(a, x, &ToleranceProfile::default())
}

pub fn member_with(a: &MatrixTuple, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MembershipVerdict> {
    if a.d() != x.d() {
        return Err(Error::MixedArity(a.d(), x.d()));
    }
    member_in(&Ambient::of(a), x, tol)
}

/// Choi matrix of `Y ↦ W Y W*` for a `n×k` matrix `W`.
fn conjugation_choi(w: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = (w.nrows(), w.ncols());
    let v = DVector::from_fn(k * n, |i, _| w[(i % n, i / n)]);
    &v * v.adjoint()
}

/// Membership of one irreducible block, short-circuiting when it is
/// unitarily equivalent to an ambient block.
fn member_block(amb: &Ambient, b: &MatrixTuple, tol: &ToleranceProfile) -> Result<MembershipVerdict> {
    for (j, blk) in amb.blocks.iter().enumerate() {
        if blk.n() != b.n() {
            continue;
        }
        if let Ok(Some(w)) = irreducible_intertwiner(blk, b) {
            let choi: Vec<ComplexMatrix> = amb
                .blocks
                .iter()
                .enumerate()
                .map(|(i, a)| if i == j { conjugation_choi(&w) } else { ComplexMatrix::zeros(a.n() * b.n(), a.n() * b.n()) })
                .collect();
            let wit = ChoiWitness { level: b.n(), ambient_sizes: amb.sizes(), images: MatrixTuple::new(images(amb, &choi))?, choi };
            let check = wit.verify(amb, b)?;
            if check.valid(tol, b) {
                let margins = Margins { check: Some(check), note: Some("equivalent to an ambient block".into()), ..Margins::default() };
                return Ok(MembershipVerdict { decision: Decision::Yes, witness: Some(wit), certificate: None, margins });
            }
        }
    }
    member_in(amb, b, tol)
}

/// Decides `W(b) ⊆ W(a)`, i.e. `b ∈ W_{n_b}(a)`, one irreducible block of
/// `b` at a time; the block witnesses are assembled into a single witness for
/// `b` and a failing block's functional is lifted to `b`.
pub fn contains(a: &MatrixTuple, b: &MatrixTuple) -> Result<MembershipVerdict> {
    contains_with(a, b, &ToleranceProfile::default())
}

pub fn contains_with(a: &MatrixTuple, b: &MatrixTuple, tol: &ToleranceProfile) -> Result<MembershipVerdict> {
    if a.d() != b.d() {
        return Err(Error::MixedArity(a.d(), b.d()));
    }
    contains_in(&Ambient::of(a), b, tol)
}

pub fn contains_in(amb: &Ambient, b: &MatrixTuple, tol: &ToleranceProfile) -> Result<MembershipVerdict> {
    check_arity(amb, b)?;
    let split = needs_split(amb, b);
    let (excess, cert) = prefilter(amb, b, split, tol);
    if let Some(c) = cert {
        return Ok(MembershipVerdict {
            decision: Decision::No,
            witness: None,
            certificate: Some(Certificate::Support(c)),
            margins: Margins { level1_excess: excess, ..Margins::default() },
        });
    }
    let Ok(dec) = irreducible_decompose(b, 0) else {
        return member_in(amb, b, tol);
    };
    let mut verdicts = Vec::with_capacity(dec.blocks.len());
    for blk in &dec.blocks {
        let v = member_block(amb, &blk.tuple, tol)?;
        if v.decision.is_no() {
            return lift_no(amb, b, &dec, verdicts.len(), v, tol);
        }
        verdicts.push(v);
    }
    let iterations = verdicts.iter().map(|v| v.margins.sdp_iterations).sum();
    if verdicts.iter().any(|v| v.decision == Decision::Indeterminate) {
        let margins = Margins { level1_excess: excess, sdp_iterations: iterations, note: Some("a block is indeterminate".into()), ..Margins::default() };
        return Ok(MembershipVerdict::indeterminate(margins));
    }
    // Φ(Y) = U (⊕_l Φ_l(Y) ⊗ 1_{m_l}) U*
    let n = b.n();
    let sizes = amb.sizes();
    let choi: Vec<ComplexMatrix> = sizes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mut c = ComplexMatrix::zeros(k * n, k * n);
            for p in 0..k {
                for q in 0..k {
                    let mut dmat = ComplexMatrix::zeros(n, n);
                    let mut off = 0;
                    for (blk, v) in dec.blocks.iter().zip(&verdicts) {
                        let nl = blk.tuple.n();
                        let cl = &v.witness.as_ref().expect("member verdicts carry witnesses").choi[j];
                        let piece = cl.view((p * nl, q * nl), (nl, nl));
                        for _ in 0..blk.multiplicity {
                            dmat.view_mut((off, off), (nl, nl)).copy_from(&piece);
                            off += nl;
                        }
                    }
                    let full = &dec.unitary * dmat * dec.unitary.adjoint();
                    c.view_mut((p * n, q * n), (n, n)).copy_from(&full);
                }
            }
            c
        })
        .collect();
    let wit = ChoiWitness { level: n, ambient_sizes: sizes, images: MatrixTuple::new(images(amb, &choi))?, choi };
    let check = wit.verify(amb, b)?;
    let mut margins = Margins { level1_excess: excess, check: Some(check), sdp_iterations: iterations, ..Margins::default() };
    if check.valid(tol, b) {
        Ok(MembershipVerdict { decision: Decision::Yes, witness: Some(wit), certificate: None, margins })
    } else {
        margins.note = Some("assembled witness failed re-verification".into());
        Ok(MembershipVerdict::indeterminate(margins))
    }
}

fn lift_no(
    amb: &Ambient,
    b: &MatrixTuple,
    dec: &crate::tuples::Decomposition,
    block: usize,
    v: MembershipVerdict,
    tol: &ToleranceProfile,
) -> Result<MembershipVerdict> {
    let mut margins = v.margins.clone();
    let cert = match v.certificate {
        Some(Certificate::Functional(f)) => {
            let iso = dec.block_isometry(block, 0);
            let lift = |h: &ComplexMatrix| &iso * h * iso.adjoint();
            let mut g = SeparatingFunctional {
                constant: lift(&f.constant),
                coefficients: f.coefficients.iter().map(lift).collect(),
                ..f
            };
            g.recheck(amb, b);
            margins.separation = Some(g.separation);
            Certificate::Functional(g)
        }
        Some(Certificate::Support(s)) => {
            let t = support_of(&hermitian_coords(b, s.split), &s.direction).0;
            Certificate::Support(SupportCertificate { target_support: t, ..s })
        }
        None => return Err(Error::MissingEvidence),
    };
    if cert.separates(amb, b, tol) {
        Ok(MembershipVerdict { decision: Decision::No, witness: None, certificate: Some(cert), margins })
    } else {
        margins.note = Some("lifted certificate failed re-verification".into());
        Ok(MembershipVerdict::indeterminate(margins))
    }
}

/// `W(a) = W(b)`: both containments.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityVerdict {
    pub decision: Decision,
    pub forward: MembershipVerdict,
    pub backward: MembershipVerdict,
}

pub fn equal(a: &MatrixTuple, b: &MatrixTuple) -> Result<EqualityVerdict> {
    equal_with(a, b, &ToleranceProfile::default())
}

pub fn equal_with(a: &MatrixTuple, b: &MatrixTuple, tol: &ToleranceProfile) -> Result<EqualityVerdict> {
    let forward = contains_with(a, b, tol)?;
    let backward = contains_with(b, a, tol)?;
    let decision = match (forward.decision, backward.decision) {
        (Decision::Yes, Decision::Yes) => Decision::Yes,
        (Decision::No, _) | (_, Decision::No) => Decision::No,
        _ => Decision::Indeterminate,
    };
    Ok(EqualityVerdict { decision, forward, backward })
}

/// `V*(A ⊕ A)V` for a random isometry `V`: a random point of `W_n(A)` for
/// `n ≤ 2·size(A)`.
pub fn random_ucp_image<R: Rng>(r: &mut R, a: &MatrixTuple, n: usize) -> MatrixTuple {
    let aa = direct_sum(&[a.clone(), a.clone()]).expect("same arity");
    let v = random_isometry(r, aa.n(), n);
    aa.conjugate_by(&v.adjoint())
}

#[cfg(test)]
mod tests;
