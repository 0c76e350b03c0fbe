//! Polytopes and the smallest and largest matrix convex sets over them.
//!
//! `W^max(K)` holds the Hermitian tuples whose first-level range lies in `K`,
//! tested halfspace by halfspace with top eigenvalues. `W^min(K)` holds the
//! tuples with a commuting normal dilation whose joint spectrum lies in `K`;
//! for a polytope with vertices `v_j` this is the existence of PSD atoms
//! `T_j` with `Σ T_j = I` and `Σ_j v_j T_j = X`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{convex_weights, maximize, LpOutcome};
use crate::mrange::{member_in, Ambient, Certificate, MembershipVerdict, SupportCertificate};
use crate::numlin::{c64, frob, herm_eig_unchecked, identity, lambda_max, lambda_min, ComplexMatrix};
use crate::sdp::ToleranceProfile;
use crate::tuples::MatrixTuple;
use crate::Decision;

/// Points closer than this (relative to the coordinate scale) are the same.
const POINT_TOL: f64 = 1e-9;
/// LP separation margin needed to certify a vertex, relative to scale.
const VERTEX_MARGIN: f64 = 1e-9;

/// `⟨a, x⟩ ≤ b`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

/// A bounded polytope in `ℝ^dim`, given by vertices, halfspaces or both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Halfspace>>,
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    1.0 + points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Distinct points in first-occurrence order.
fn dedupe_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let tol = POINT_TOL * scale_of(points);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.iter().zip(p).all(|(x, y)| (x - y).abs() <= tol)) {
            out.push(p.clone());
        }
    }
    out
}

fn check_points(points: &[Vec<f64>], dim: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::DegeneratePolytope("no points".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch(format!("point of length {} in dimension {dim}", p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(())
}

impl Polytope {
    pub fn from_vertices(points: Vec<Vec<f64>>) -> Result<Polytope> {
        let dim = points.first().map_or(0, Vec::len);
        check_points(&points, dim)?;
        if dim == 0 {
            return Err(Error::DegeneratePolytope("dimension zero".into()));
        }
        Ok(Polytope { dim, vertices: Some(dedupe_points(&points)), halfspaces: None })
    }

    pub fn from_halfspaces(dim: usize, hs: Vec<Halfspace>) -> Result<Polytope> {
        if dim == 0 {
            return Err(Error::DegeneratePolytope("dimension zero".into()));
        }
        for h in &hs {
            if h.a.len() != dim {
                return Err(Error::DimensionMismatch(format!("normal of length {} in dimension {dim}", h.a.len())));
            }
            if h.a.iter().any(|x| !x.is_finite()) || !h.b.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let le: Vec<(Vec<f64>, f64)> = hs.iter().map(|h| (h.a.clone(), h.b)).collect();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; dim];
                c[i] = s;
                match maximize(&c, &vec![(f64::NEG_INFINITY, f64::INFINITY); dim], &le, &[]) {
                    LpOutcome::Unbounded => return Err(Error::UnboundedPolytope),
                    LpOutcome::Infeasible => return Err(Error::DegeneratePolytope("empty".into())),
                    LpOutcome::Optimal { .. } => {}
                }
            }
        }
        Ok(Polytope { dim, vertices: None, halfspaces: Some(hs) })
    }

    /// Checks a deserialized polytope: some representation present, bounded,
    /// nonempty, and both representations agreeing when both are given.
    pub fn validated(self) -> Result<Polytope> {
        let (dim, vs, hs) = (self.dim, self.vertices, self.halfspaces);
        let out = match (vs, hs) {
            (None, None) => return Err(Error::Input("polytope needs vertices or halfspaces".into())),
            (Some(v), None) => Polytope::from_vertices(v)?,
            (None, Some(h)) => Polytope::from_halfspaces(dim, h)?,
            (Some(v), Some(h)) => {
                let hp = Polytope::from_halfspaces(dim, h)?;
                let vp = Polytope::from_vertices(v)?;
                if !hp.same_set(&vp)? {
                    return Err(Error::Input("vertex and halfspace representations disagree".into()));
                }
                Polytope { dim, vertices: vp.vertices, halfspaces: hp.halfspaces }
            }
        };
        if out.dim != dim {
            return Err(Error::DimensionMismatch(format!("dim {dim} but points of length {}", out.dim)));
        }
        Ok(out)
    }

    fn same_set(&self, other: &Polytope) -> Result<bool> {
        let (hs, vs) = (self.halfspace_rep()?, other.vertex_rep()?);
        let tol = 1e-7 * scale_of(&vs);
        let inside = vs.iter().all(|v| hs.iter().all(|h| dot(&h.a, v) <= h.b + tol));
        let covered = self.vertex_rep()?.iter().all(|p| convex_weights(&vs, p).is_some() || near_hull(&vs, p, tol));
        Ok(inside && covered)
    }

    /// Vertex list, enumerated from the halfspaces when not stored.
    pub fn vertex_rep(&self) -> Result<Vec<Vec<f64>>> {
        if let Some(v) = &self.vertices {
            return Ok(v.clone());
        }
        let hs = self.halfspaces.as_ref().ok_or_else(|| Error::Input("empty polytope record".into()))?;
        enumerate_vertices(self.dim, hs)
    }

    /// Halfspace list, computed from the vertices when not stored; a
    /// lower-dimensional polytope gets pairs of opposite halfspaces for its
    /// affine hull.
    pub fn halfspace_rep(&self) -> Result<Vec<Halfspace>> {
        if let Some(h) = &self.halfspaces {
            return Ok(h.clone());
        }
        let v = self.vertices.as_ref().ok_or_else(|| Error::Input("empty polytope record".into()))?;
        Ok(facets(v))
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> Result<usize> {
        Ok(affine_frame(&self.vertex_rep()?).1.ncols())
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.halfspace_rep()?.iter().all(|h| dot(&h.a, x) <= h.b + tol))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

fn near_hull(vs: &[Vec<f64>], p: &[f64], tol: f64) -> bool {
    vs.iter().any(|v| v.iter().zip(p).all(|(a, b)| (a - b).abs() <= tol))
}

/// Centroid and an orthonormal basis (columns) of the affine hull.
fn affine_frame(points: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let dim = points[0].len();
    let k = points.len();
    let c: Vec<f64> = (0..dim).map(|i| points.iter().map(|p| p[i]).sum::<f64>() / k as f64).collect();
    let m = DMatrix::from_fn(dim, k, |i, j| points[j][i] - c[i]);
    let tol = POINT_TOL * scale_of(points);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol).collect();
    let basis = DMatrix::from_fn(dim, cols.len(), |i, j| u[(i, cols[j])]);
    (c, basis)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn facets(points: &[Vec<f64>]) -> Vec<Halfspace> {
    let dim = points[0].len();
    let (c, basis) = affine_frame(points);
    let r = basis.ncols();
    let tol = 1e-9 * scale_of(points);
    let mut out = Vec::new();
    // Equalities cutting out the affine hull.
    if r < dim {
        let full = DMatrix::from_fn(dim, dim, |i, j| if j < r { basis[(i, j)] } else { 0.0 });
        let qr = full.clone().qr();
        let q = qr.q();
        // Columns of q orthogonal to the hull.
        for j in 0..dim {
            let w: Vec<f64> = (0..dim).map(|i| q[(i, j)]).collect();
            let along: f64 = (0..r).map(|t| dot(&w, basis.column(t).as_slice()).powi(2)).sum();
            if along > 1e-12 {
                continue;
            }
            let b = dot(&w, &c);
            out.push(Halfspace { a: w.clone(), b });
            out.push(Halfspace { a: w.iter().map(|x| -x).collect(), b: -b });
        }
    }
    if r == 0 {
        return out;
    }
    // Coordinates within the hull.
    let local: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let d: Vec<f64> = p.iter().zip(&c).map(|(x, y)| x - y).collect();
            (0..r).map(|t| dot(&d, basis.column(t).as_slice())).collect()
        })
        .collect();
    let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
    for s in subsets(local.len(), r) {
        let p0 = &local[s[0]];
        let mut m = DMatrix::<f64>::zeros(r, r);
        for (row, &i) in s.iter().enumerate().skip(1) {
            for t in 0..r {
                m[(row - 1, t)] = local[i][t] - p0[t];
            }
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested V");
        let (imin, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        if r >= 2 && sv[1] <= tol {
            continue;
        }
        let normal: Vec<f64> = (0..r).map(|t| vt[(imin, t)]).collect();
        let off = dot(&normal, p0);
        let vals: Vec<f64> = local.iter().map(|q| dot(&normal, q) - off).collect();
        let (hi, lo) = (vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max), vals.iter().cloned().fold(f64::INFINITY, f64::min));
        let (nrm, b) = if hi <= tol {
            (normal, off)
        } else if lo >= -tol {
            (normal.iter().map(|x| -x).collect(), -off)
        } else {
            continue;
        };
        if found.iter().any(|(a, bb)| a.iter().zip(&nrm).all(|(x, y)| (x - y).abs() <= 1e-9) && (bb - b).abs() <= tol) {
            continue;
        }
        found.push((nrm, b));
    }
    for (a_loc, b_loc) in found {
        let a: Vec<f64> = (0..dim).map(|i| (0..r).map(|t| basis[(i, t)] * a_loc[t]).sum()).collect();
        out.push(Halfspace { b: b_loc + dot(&a, &c), a });
    }
    out
}

fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Result<Vec<Vec<f64>>> {
    let scale = 1.0 + hs.iter().fold(0.0f64, |m, h| m.max(h.b.abs()));
    let tol = 1e-9 * scale;
    let mut pts = Vec::new();
    for s in subsets(hs.len(), dim) {
        let a = DMatrix::from_fn(dim, dim, |i, j| hs[s[i]].a[j]);
        let b = nalgebra::DVector::from_fn(dim, |i, _| hs[s[i]].b);
        let svd = a.clone().svd(false, false);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        if smin <= 1e-10 * smax {
            continue;
        }
        let Some(x) = a.lu().solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if hs.iter().all(|h| dot(&h.a, &x) <= h.b + tol) {
            pts.push(x);
        }
    }
    if pts.is_empty() {
        return Err(Error::DegeneratePolytope("no vertices found".into()));
    }
    Ok(dedupe_points(&pts))
}

/// LP margin `max_{‖a‖_∞ ≤ 1} min_q ⟨a, p − q⟩` and the maximizing `a`.
fn separation(p: &[f64], others: &[&Vec<f64>]) -> (f64, Vec<f64>) {
    let dim = p.len();
    if others.is_empty() {
        return (f64::INFINITY, vec![0.0; dim]);
    }
    let mut c = vec![0.0; dim + 1];
    c[dim] = 1.0;
    let mut bounds = vec![(-1.0, 1.0); dim];
    bounds.push((f64::NEG_INFINITY, f64::INFINITY));
    let le: Vec<(Vec<f64>, f64)> = others
        .iter()
        .map(|q| {
            let mut row: Vec<f64> = p.iter().zip(q.iter()).map(|(x, y)| -(x - y)).collect();
            row.push(1.0);
            (row, 0.0)
        })
        .collect();
    match maximize(&c, &bounds, &le, &[]) {
        LpOutcome::Optimal { value, x } => (value, x[..dim].to_vec()),
        _ => (0.0, vec![0.0; dim]),
    }
}

/// Distinct input points with a vertex decision and LP margin each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoints {
    pub points: Vec<Vec<f64>>,
    pub decisions: Vec<Decision>,
    pub margins: Vec<f64>,
}

impl ExtremePoints {
    /// Points certified as vertices.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.select(|d| d == Decision::Yes)
    }

    /// Certified vertices plus the undecided ones; spans the same hull as
    /// the input.
    pub fn spanning(&self) -> Vec<Vec<f64>> {
        self.select(|d| d != Decision::No)
    }

    pub fn undecided(&self) -> usize {
        self.decisions.iter().filter(|&&d| d == Decision::Indeterminate).count()
    }

    fn select(&self, keep: impl Fn(Decision) -> bool) -> Vec<Vec<f64>> {
        self.points.iter().zip(&self.decisions).filter(|(_, &d)| keep(d)).map(|(p, _)| p.clone()).collect()
    }
}

/// Vertices of the convex hull of a finite set, each certified by an LP
/// separating it from the hull of the remaining points.
pub fn isolated_extreme_points(points: &[Vec<f64>]) -> Result<ExtremePoints> {
    let dim = points.first().map_or(0, Vec::len);
    check_points(points, dim)?;
    let pts = dedupe_points(points);
    let scale = scale_of(&pts);
    let mut decisions = Vec::with_capacity(pts.len());
    let mut margins = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<&Vec<f64>> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).collect();
        let (t, _) = separation(p, &others);
        margins.push(t);
        decisions.push(if t >= VERTEX_MARGIN * scale {
            Decision::Yes
        } else if t <= 0.1 * VERTEX_MARGIN * scale {
            Decision::No
        } else {
            Decision::Indeterminate
        });
    }
    Ok(ExtremePoints { points: pts, decisions, margins })
}

/// Vertex count equals affine dimension plus one.
pub fn simplex_check(k: &Polytope) -> Result<bool> {
    let ext = isolated_extreme_points(&k.vertex_rep()?)?;
    if ext.undecided() > 0 {
        return Err(Error::DegeneratePolytope("vertex status undecided".into()));
    }
    let v = ext.vertices();
    Ok(v.len() == affine_frame(&v).1.ncols() + 1)
}

// ---------------------------------------------------------------------------
// W^max and W^min

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolatedHalfspace {
    pub halfspace: Halfspace,
    pub excess: f64,
    pub state: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmaxVerdict {
    pub decision: Decision,
    pub max_excess: f64,
    pub violated: Option<ViolatedHalfspace>,
}

fn require_hermitian(x: &MatrixTuple, dim: usize) -> Result<()> {
    if !x.is_hermitian() {
        let residual = x.matrices().iter().map(crate::numlin::hermitian_residual).fold(0.0, f64::max);
        return Err(Error::NotHermitian { residual });
    }
    if x.d() != dim {
        return Err(Error::DimensionMismatch(format!("tuple of arity {} against a polytope in dimension {dim}", x.d())));
    }
    Ok(())
}

fn combo(x: &MatrixTuple, a: &[f64]) -> ComplexMatrix {
    x.matrices().iter().zip(a).fold(ComplexMatrix::zeros(x.n(), x.n()), |acc, (m, &w)| acc + m * c64(w, 0.0))
}

/// `W₁(X) ⊆ K`, checked with `λ_max(Σ a_i X_i) ≤ b` per halfspace.
pub fn wmax_member(x: &MatrixTuple, k: &Polytope, tol: &ToleranceProfile) -> Result<WmaxVerdict> {
    require_hermitian(x, k.dim)?;
    let hs = k.halfspace_rep()?;
    let mut worst: Option<ViolatedHalfspace> = None;
    for h in &hs {
        let (l, v) = lambda_max(&combo(x, &h.a));
        let norm = h.a.iter().map(|t| t * t).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let excess = (l - h.b) / norm;
        if worst.as_ref().is_none_or(|w| excess > w.excess) {
            worst = Some(ViolatedHalfspace { halfspace: h.clone(), excess, state: v.iter().map(|z| [z.re, z.im]).collect() });
        }
    }
    let Some(w) = worst else {
        return Err(Error::UnboundedPolytope);
    };
    let eps = tol.psd * x.scale();
    let decision = if w.excess <= eps {
        Decision::Yes
    } else if w.excess > tol.band * eps {
        Decision::No
    } else {
        Decision::Indeterminate
    };
    Ok(WmaxVerdict { decision, max_excess: w.excess, violated: (decision != Decision::Yes).then_some(w) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WminVerdict {
    pub decision: Decision,
    pub vertices: Vec<Vec<f64>>,
    /// `T_j ⪰ 0` with `Σ T_j = I` and `Σ v_j T_j = X`.
    pub atoms: Option<Vec<ComplexMatrix>>,
    pub certificate: Option<Certificate>,
    pub membership: Option<MembershipVerdict>,
}

/// Residuals of an atom decomposition: `(‖Σ T_j − I‖_F, max_i ‖Σ v_j T_j − X_i‖_F, min eigenvalue)`.
pub fn atom_residuals(atoms: &[ComplexMatrix], vertices: &[Vec<f64>], x: &MatrixTuple) -> (f64, f64, f64) {
    let n = x.n();
    let sum = atoms.iter().fold(ComplexMatrix::zeros(n, n), |a, t| a + t);
    let unit = frob(&(sum - identity(n)));
    let img = (0..x.d())
        .map(|i| {
            let s = atoms.iter().zip(vertices).fold(ComplexMatrix::zeros(n, n), |a, (t, v)| a + t * c64(v[i], 0.0));
            frob(&(s - x.get(i)))
        })
        .fold(0.0, f64::max);
    let eig = atoms.iter().map(lambda_min).fold(f64::INFINITY, f64::min);
    (unit, img, eig)
}

/// Joint eigenbasis of a commuting Hermitian tuple, as (points, unit vectors).
fn joint_spectrum(x: &MatrixTuple) -> Option<(Vec<Vec<f64>>, ComplexMatrix)> {
    if !x.is_commuting_normal(1e-10) {
        return None;
    }
    let n = x.n();
    // Rationally independent weights separate distinct joint eigenvalues generically.
    let w: Vec<f64> = (0..x.d()).map(|i| ((i + 2) as f64).sqrt()).collect();
    let e = herm_eig_unchecked(&combo(x, &w));
    let v = e.vectors;
    let mut pts = Vec::with_capacity(n);
    for i in 0..x.d() {
        let d = v.adjoint() * x.get(i) * &v;
        let off = frob(&(&d - ComplexMatrix::from_diagonal(&d.diagonal())));
        if off > 1e-9 * x.scale() {
            return None;
        }
        if i == 0 {
            pts = vec![Vec::with_capacity(x.d()); n];
        }
        for (p, pt) in pts.iter_mut().enumerate() {
            pt.push(d[(p, p)].re);
        }
    }
    Some((pts, v))
}

/// `X ∈ W^min(K)` through vertex atoms. Commuting tuples are settled with
/// linear programs on the joint spectrum; the rest go through the
/// membership SDP with the vertices as 1×1 ambient blocks.
pub fn wmin_member(x: &MatrixTuple, k: &Polytope, tol: &ToleranceProfile) -> Result<WminVerdict> {
    require_hermitian(x, k.dim)?;
    let vertices = k.vertex_rep()?;
    let amb = Ambient::from_blocks(vertices.iter().map(|v| MatrixTuple::point(v)).collect())?;
    if let Some((pts, vecs)) = joint_spectrum(x) {
        let n = x.n();
        let mut atoms = vec![ComplexMatrix::zeros(n, n); vertices.len()];
        for (p, pt) in pts.iter().enumerate() {
            let col = vecs.column(p);
            let proj = &col * col.adjoint();
            match convex_weights(&vertices, pt) {
                Some(w) => {
                    for (t, &wj) in atoms.iter_mut().zip(&w) {
                        *t += &proj * c64(wj, 0.0);
                    }
                }
                None => {
                    let refs: Vec<&Vec<f64>> = vertices.iter().collect();
                    let (gap, a) = separation(pt, &refs);
                    let target = lambda_max(&combo(x, &a)).0;
                    let hull = vertices.iter().map(|v| dot(&a, v)).fold(f64::NEG_INFINITY, f64::max);
                    let cert = SupportCertificate { split: false, direction: a, target_support: target, ambient_support: hull };
                    let decision = if gap > tol.band * tol.feas * x.scale() { Decision::No } else { Decision::Indeterminate };
                    return Ok(WminVerdict { decision, vertices, atoms: None, certificate: Some(Certificate::Support(cert)), membership: None });
                }
            }
        }
        let (u, i, e) = atom_residuals(&atoms, &vertices, x);
        if u <= tol.feas && i <= tol.feas * x.scale() && e >= -tol.psd {
            return Ok(WminVerdict { decision: Decision::Yes, vertices, atoms: Some(atoms), certificate: None, membership: None });
        }
    }
    let m = member_in(&amb, x, tol)?;
    let atoms = m.witness.as_ref().map(|w| w.choi.clone());
    Ok(WminVerdict { decision: m.decision, vertices, atoms, certificate: m.certificate.clone(), membership: Some(m) })
}

// ---------------------------------------------------------------------------
// Normal tuples

/// Joint eigenvalues of a finite diagonal normal tuple, repeats allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModel {
    pub eigenvalues: Vec<Vec<f64>>,
}

impl NormalModel {
    pub fn new(eigenvalues: Vec<Vec<f64>>) -> Result<Self> {
        let dim = eigenvalues.first().map_or(0, Vec::len);
        check_points(&eigenvalues, dim)?;
        if dim == 0 {
            return Err(Error::Empty("eigenvalues of dimension zero"));
        }
        Ok(NormalModel { eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues[0].len()
    }

    pub fn diagonal_tuple(&self) -> MatrixTuple {
        MatrixTuple::diagonal(&self.eigenvalues).expect("validated points")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalCompression {
    pub reduced: NormalModel,
    pub extreme: ExtremePoints,
    /// `diag(N) ∈ W^min(conv reduced)`
    pub forward: Decision,
    /// `diag(reduced) ∈ W^min(conv N)`
    pub backward: Decision,
}

impl NormalCompression {
    pub fn certified(&self) -> bool {
        self.forward.is_yes() && self.backward.is_yes()
    }
}

/// Keeps exactly the isolated extreme points of the joint spectrum, once
/// each; the two `W^min` checks confirm the ranges agree.
pub fn normal_fully_compress(n: &NormalModel, tol: &ToleranceProfile) -> Result<NormalCompression> {
    let extreme = isolated_extreme_points(&n.eigenvalues)?;
    let reduced = NormalModel::new(extreme.spanning())?;
    let k_reduced = Polytope::from_vertices(reduced.eigenvalues.clone())?;
    let k_full = Polytope::from_vertices(n.eigenvalues.clone())?;
    let forward = wmin_member(&n.diagonal_tuple(), &k_reduced, tol)?.decision;
    let backward = wmin_member(&reduced.diagonal_tuple(), &k_full, tol)?.decision;
    Ok(NormalCompression { reduced, extreme, forward, backward })
}
