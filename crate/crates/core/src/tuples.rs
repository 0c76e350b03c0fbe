//! Tuples of square complex matrices and their *-algebraic structure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{
    c64, frob, gaussian_complex, gaussian_real, hermitian_part, hermitian_residual, herm_eig_unchecked, identity,
    isometry_residual, kron, nullspace_basis_floor, polar_unitary, rng, skew_part, smallest_right_singular, unvec,
    ComplexMatrix, C64, DEFAULT_REL_TOL, ZERO,
};
use crate::Decision;

const HERMITIAN_TOL: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-8;
/// Decomposition residual allowed, relative to `1 + ‖A‖`.
const DECOMPOSITION_TOL: f64 = 1e-8;
/// Equivalence witness residual allowed, relative to `1 + ‖Y‖`.
const EQUIVALENCE_TOL: f64 = 1e-7;

/// A d-tuple of n×n complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<ComplexMatrix>,
    hermitian: bool,
}

impl MatrixTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::Empty("tuple has no coordinates"));
        };
        let n = first.nrows();
        if n == 0 {
            return Err(Error::Empty("matrices of size zero"));
        }
        for m in &mats {
            if !m.is_square() {
                return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
            }
            if m.nrows() != n {
                return Err(Error::DimensionMismatch(format!("coordinates of size {n} and {}", m.nrows())));
            }
            crate::numlin::ensure_finite(m)?;
        }
        let hermitian = mats.iter().all(|m| hermitian_residual(m) <= HERMITIAN_TOL * frob(m).max(1.0));
        Ok(MatrixTuple { mats, hermitian })
    }

    /// Like [`MatrixTuple::new`] but rejects non-Hermitian coordinates.
    pub fn hermitian(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let t = Self::new(mats)?;
        if !t.hermitian {
            let residual = t.mats.iter().map(hermitian_residual).fold(0.0, f64::max);
            return Err(Error::NotHermitian { residual });
        }
        Ok(t)
    }

    /// 1×1 tuple with the given real coordinates.
    pub fn point(coords: &[f64]) -> Self {
        Self::new(coords.iter().map(|&x| ComplexMatrix::from_element(1, 1, c64(x, 0.0))).collect())
            .expect("nonempty point")
    }

    /// Diagonal (commuting Hermitian) tuple whose joint eigenvalues are the
    /// given points, all of the same dimension.
    pub fn diagonal(points: &[Vec<f64>]) -> Result<Self> {
        let Some(p0) = points.first() else {
            return Err(Error::Empty("no points"));
        };
        let d = p0.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::MixedArity(d, points.iter().map(Vec::len).find(|&l| l != d).unwrap_or(d)));
        }
        let n = points.len();
        Self::new(
            (0..d)
                .map(|i| ComplexMatrix::from_fn(n, n, |r, c| if r == c { c64(points[r][i], 0.0) } else { ZERO }))
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.mats[i]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `(Σ_i ‖A_i‖_F²)^{1/2}`
    pub fn norm(&self) -> f64 {
        self.mats.iter().map(|m| frob(m).powi(2)).sum::<f64>().sqrt()
    }

    pub fn scale(&self) -> f64 {
        1.0 + self.norm()
    }

    /// `max_i ‖A_i − B_i‖_F`
    pub fn distance(&self, other: &MatrixTuple) -> f64 {
        self.mats.iter().zip(&other.mats).map(|(a, b)| frob(&(a - b))).fold(0.0, f64::max)
    }

    /// `U A U*` coordinatewise (no isometry check).
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> MatrixTuple {
        let ua = u.adjoint();
        MatrixTuple { mats: self.mats.iter().map(|m| u * m * &ua).collect(), hermitian: self.hermitian }
    }

    /// `V* A V` coordinatewise (no isometry check).
    pub(crate) fn compress_unchecked(&self, v: &ComplexMatrix) -> MatrixTuple {
        let va = v.adjoint();
        let mats: Vec<ComplexMatrix> = self
            .mats
            .iter()
            .map(|m| {
                let c = &va * m * v;
                if self.hermitian {
                    hermitian_part(&c)
                } else {
                    c
                }
            })
            .collect();
        MatrixTuple { mats, hermitian: self.hermitian }
    }

    /// True when all coordinates and their adjoints commute, so the tuple is
    /// jointly unitarily diagonalisable.
    pub fn is_commuting_normal(&self, rel_tol: f64) -> bool {
        let s = self.scale().powi(2) * rel_tol;
        let adj: Vec<ComplexMatrix> = self.mats.iter().map(|m| m.adjoint()).collect();
        for (i, a) in self.mats.iter().enumerate() {
            if !self.hermitian && frob(&(a * &adj[i] - &adj[i] * a)) > s {
                return false;
            }
            for b in &self.mats[i + 1..] {
                if frob(&(a * b - b * a)) > s {
                    return false;
                }
                if !self.hermitian {
                    let ba = b.adjoint();
                    if frob(&(a * &ba - &ba * a)) > s {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coordinates of a 1×1 tuple.
    pub fn as_point(&self) -> Option<Vec<C64>> {
        (self.n() == 1).then(|| self.mats.iter().map(|m| m[(0, 0)]).collect())
    }

    pub fn to_json(&self) -> TupleJson {
        TupleJson {
            d: self.d(),
            n: self.n(),
            matrices: self
                .mats
                .iter()
                .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &TupleJson) -> Result<Self> {
        if j.matrices.len() != j.d {
            return Err(Error::Input(format!("d = {} but {} matrices given", j.d, j.matrices.len())));
        }
        let mut mats = Vec::with_capacity(j.d);
        for m in &j.matrices {
            if m.len() != j.n || m.iter().any(|r| r.len() != j.n) {
                return Err(Error::Input(format!("matrix is not {}x{}", j.n, j.n)));
            }
            let entries = m.iter().flat_map(|r| r.iter().map(|z| c64(z[0], z[1]))).collect();
            mats.push(crate::numlin::from_row_major(j.n, j.n, entries)?);
        }
        Self::new(mats)
    }
}

/// Tuple JSON schema: `{"d": int, "n": int, "matrices": [d][n][n][2]}` with
/// entries as `(re, im)` pairs, rows first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub d: usize,
    pub n: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Block-diagonal direct sum.
pub fn direct_sum(parts: &[MatrixTuple]) -> Result<MatrixTuple> {
    let Some(first) = parts.first() else {
        return Err(Error::Empty("direct sum of nothing"));
    };
    let d = first.d();
    if let Some(p) = parts.iter().find(|p| p.d() != d) {
        return Err(Error::MixedArity(d, p.d()));
    }
    let n: usize = parts.iter().map(MatrixTuple::n).sum();
    let mut mats = vec![ComplexMatrix::zeros(n, n); d];
    let mut off = 0;
    for p in parts {
        let k = p.n();
        for (i, m) in mats.iter_mut().enumerate() {
            m.view_mut((off, off), (k, k)).copy_from(p.get(i));
        }
        off += k;
    }
    Ok(MatrixTuple { mats, hermitian: parts.iter().all(MatrixTuple::is_hermitian) })
}

/// `V* A V` for an isometry `V` (n × k).
pub fn compress(a: &MatrixTuple, v: &ComplexMatrix) -> Result<MatrixTuple> {
    if v.nrows() != a.n() || v.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!("isometry is {}x{} for size {}", v.nrows(), v.ncols(), a.n())));
    }
    let r = isometry_residual(v);
    if r > ISOMETRY_TOL {
        return Err(Error::NotIsometry(r));
    }
    Ok(a.compress_unchecked(v))
}

/// Hermitian tuple `((A_i + A_i*)/2, (A_i − A_i*)/2i)_i`; a Hermitian input
/// is returned unchanged.
pub fn realify(a: &MatrixTuple) -> MatrixTuple {
    if a.hermitian {
        return a.clone();
    }
    let mats = a.mats.iter().flat_map(|m| [hermitian_part(m), skew_part(m)]).collect();
    MatrixTuple { mats, hermitian: true }
}

/// Stacked linear system whose nullspace is `{S : S X_i = Y_i S, S X_i* = Y_i* S}`
/// acting on column-major `vec(S)`.
fn intertwiner_system(x: &MatrixTuple, y: &MatrixTuple) -> ComplexMatrix {
    let (nx, ny) = (x.n(), y.n());
    let with_adj = !(x.hermitian && y.hermitian);
    let per = if with_adj { 2 } else { 1 };
    let rows = nx * ny;
    let mut sys = ComplexMatrix::zeros(per * x.d() * rows, nx * ny);
    let (ix, iy) = (identity(nx), identity(ny));
    let mut r = 0;
    for (a, b) in x.mats.iter().zip(&y.mats) {
        let blk = kron(&a.transpose(), &iy) - kron(&ix, b);
        sys.view_mut((r, 0), (rows, nx * ny)).copy_from(&blk);
        r += rows;
        if with_adj {
            let blk = kron(&a.adjoint().transpose(), &iy) - kron(&ix, &b.adjoint());
            sys.view_mut((r, 0), (rows, nx * ny)).copy_from(&blk);
            r += rows;
        }
    }
    sys
}

/// Orthonormal basis of the commutant `{M : M A_i = A_i M, M A_i* = A_i* M}`.
pub fn commutant_basis(a: &MatrixTuple) -> Vec<ComplexMatrix> {
    let n = a.n();
    let sys = intertwiner_system(a, a);
    let ns = nullspace_basis_floor(&sys, DEFAULT_REL_TOL, DEFAULT_REL_TOL * a.scale());
    (0..ns.ncols()).map(|j| unvec(ns.column(j).as_slice(), n)).collect()
}

pub fn commutant_dim(a: &MatrixTuple) -> usize {
    if a.n() == 1 {
        return 1;
    }
    commutant_basis(a).len().max(1)
}

/// Canonical sort key of an irreducible block: size, then the rounded
/// spectra of the realified coordinates, then rounded entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderingKey(pub Vec<i64>);

fn round6(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

pub fn ordering_key(t: &MatrixTuple) -> OrderingKey {
    let mut k = vec![t.n() as i64];
    for h in realify(t).mats.iter() {
        let mut ev = herm_eig_unchecked(&hermitian_part(h)).values;
        ev.reverse();
        k.extend(ev.iter().map(|&v| round6(v)));
    }
    for m in &t.mats {
        for z in m.iter() {
            k.push(round6(z.re));
            k.push(round6(z.im));
        }
    }
    OrderingKey(k)
}

/// Sorted spectra of the realified coordinates; a unitary invariant.
fn spectral_signature(t: &MatrixTuple) -> Vec<Vec<f64>> {
    realify(t).mats.iter().map(|h| herm_eig_unchecked(&hermitian_part(h)).values).collect()
}

fn signatures_match(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub tuple: MatrixTuple,
    pub multiplicity: usize,
    pub key: OrderingKey,
}

/// `U* A U = ⊕_b (B_b ⊕ … ⊕ B_b)` with each block repeated `multiplicity`
/// times, in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub unitary: ComplexMatrix,
    pub blocks: Vec<Block>,
}

impl Decomposition {
    pub fn direct_sum(&self) -> MatrixTuple {
        let parts: Vec<MatrixTuple> = self
            .blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.tuple.clone(), b.multiplicity))
            .collect();
        direct_sum(&parts).expect("blocks share arity")
    }

    /// `max_i ‖U* A_i U − ⊕ blocks‖_F`
    pub fn residual(&self, a: &MatrixTuple) -> f64 {
        a.conjugate_by(&self.unitary.adjoint()).distance(&self.direct_sum())
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.blocks.iter().all(|b| b.multiplicity == 1)
    }

    pub fn size_multiplicities(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.blocks.iter().map(|b| (b.tuple.n(), b.multiplicity)).collect();
        v.sort_unstable();
        v
    }

    /// Isometry onto the `copy`-th summand of block `b`.
    pub fn block_isometry(&self, b: usize, copy: usize) -> ComplexMatrix {
        let mut off = 0;
        for blk in &self.blocks[..b] {
            off += blk.tuple.n() * blk.multiplicity;
        }
        let k = self.blocks[b].tuple.n();
        self.unitary.columns(off + copy * k, k).into_owned()
    }
}

/// Unitary `W` with `W X W* = Y` for irreducible `X`, `Y` of equal size, or
/// `None` when they are inequivalent.
pub fn irreducible_intertwiner(x: &MatrixTuple, y: &MatrixTuple) -> Result<Option<ComplexMatrix>> {
    if x.n() != y.n() || x.d() != y.d() {
        return Ok(None);
    }
    let scale = x.scale().max(y.scale());
    if !signatures_match(&spectral_signature(x), &spectral_signature(y), 1e-6 * scale) {
        return Ok(None);
    }
    let n = x.n();
    let w = if n == 1 {
        identity(1)
    } else {
        let (_, _, v) = smallest_right_singular(&intertwiner_system(x, y));
        polar_unitary(&unvec(v.as_slice(), n))
    };
    let res = x.conjugate_by(&w).distance(y);
    if res <= 1e-9 * scale {
        Ok(Some(w))
    } else if res >= 1e-7 * scale {
        Ok(None)
    } else {
        Err(Error::NumericalFailure(format!("intertwiner residual {res:e} inside the indeterminate band")))
    }
}

fn cluster_eigen(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn reduces(a: &MatrixTuple, v: &ComplexMatrix, tol: f64) -> bool {
    let va = v.adjoint();
    a.mats.iter().all(|m| {
        let mv = m * v;
        let ok = frob(&(&mv - v * (&va * &mv))) <= tol;
        ok && (a.hermitian || {
            let mav = m.adjoint() * v;
            frob(&(&mav - v * (&va * &mav))) <= tol
        })
    })
}

fn columns(m: &ComplexMatrix, r: std::ops::Range<usize>) -> ComplexMatrix {
    m.columns(r.start, r.len()).into_owned()
}

/// Isometries onto mutually orthogonal irreducible reducing subspaces that
/// together span the space.
fn split_irreducible(a: &MatrixTuple, r: &mut ChaCha8Rng, depth: usize) -> Result<Vec<ComplexMatrix>> {
    let n = a.n();
    if n == 1 {
        return Ok(vec![identity(1)]);
    }
    let basis = commutant_basis(a);
    if basis.len() <= 1 {
        return Ok(vec![identity(n)]);
    }
    if depth > n {
        return Err(Error::NumericalFailure("decomposition did not terminate".into()));
    }
    let tol = 1e-9 * a.scale();
    for _ in 0..12 {
        let mut h = ComplexMatrix::zeros(n, n);
        for m in &basis {
            let g = gaussian_complex(r);
            h += m * g + m.adjoint() * g.conj();
        }
        let h = hermitian_part(&h);
        let e = herm_eig_unchecked(&h);
        let spread = (e.values[0] - e.values[n - 1]).abs();
        let clusters = cluster_eigen(&e.values, 1e-7 * spread.max(f64::MIN_POSITIVE));
        if clusters.len() < 2 {
            continue;
        }
        let parts: Vec<ComplexMatrix> = clusters.into_iter().map(|c| columns(&e.vectors, c)).collect();
        if !parts.iter().all(|v| reduces(a, v, tol)) {
            continue;
        }
        let mut out = Vec::new();
        for v in parts {
            let sub = a.compress_unchecked(&v);
            for p in split_irreducible(&sub, r, depth + 1)? {
                out.push(&v * p);
            }
        }
        return Ok(out);
    }
    Err(Error::NumericalFailure("no random commutant element split the tuple".into()))
}

struct Group {
    rep: MatrixTuple,
    isos: Vec<ComplexMatrix>,
}

/// Joint eigenspaces of a commuting normal tuple, one group per distinct
/// joint eigenvalue.
fn normal_groups(a: &MatrixTuple, r: &mut ChaCha8Rng) -> Option<Vec<Group>> {
    let n = a.n();
    let hs = realify(a).mats;
    let tol = 1e-9 * a.scale();
    'attempt: for _ in 0..8 {
        let mut h = ComplexMatrix::zeros(n, n);
        for m in &hs {
            h += m * c64(gaussian_real(r), 0.0);
        }
        let e = herm_eig_unchecked(&hermitian_part(&h));
        let mut groups = Vec::new();
        for c in cluster_eigen(&e.values, tol) {
            let v = columns(&e.vectors, c);
            let k = v.ncols();
            let comp = a.compress_unchecked(&v);
            let mut vals = Vec::with_capacity(a.d());
            for m in &comp.mats {
                let mean = m.trace() / c64(k as f64, 0.0);
                if frob(&(m - identity(k) * mean)) > tol {
                    continue 'attempt;
                }
                vals.push(mean);
            }
            let rep = MatrixTuple::new(vals.iter().map(|&z| ComplexMatrix::from_element(1, 1, z)).collect()).ok()?;
            let rep = if a.hermitian { MatrixTuple { hermitian: true, ..rep } } else { rep };
            let isos = (0..k).map(|j| v.columns(j, 1).into_owned()).collect();
            groups.push(Group { rep, isos });
        }
        return Some(groups);
    }
    None
}

/// Irreducible decomposition with multiplicities. Deterministic for a fixed
/// `seed`.
pub fn irreducible_decompose(a: &MatrixTuple, seed: u64) -> Result<Decomposition> {
    let mut r = rng(seed);
    let normal = if a.is_commuting_normal(1e-12) { normal_groups(a, &mut r) } else { None };
    let mut groups = match normal {
        Some(g) => g,
        None => {
            let mut groups: Vec<Group> = Vec::new();
            for v in split_irreducible(a, &mut r, 0)? {
                let leaf = a.compress_unchecked(&v);
                let mut placed = false;
                for g in groups.iter_mut() {
                    if let Some(w) = irreducible_intertwiner(&leaf, &g.rep)? {
                        g.isos.push(v.clone() * w.adjoint());
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    groups.push(Group { rep: leaf, isos: vec![v] });
                }
            }
            groups
        }
    };
    let mut keyed: Vec<(OrderingKey, Group)> = groups.drain(..).map(|g| (ordering_key(&g.rep), g)).collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0));
    let cols: Vec<ComplexMatrix> = keyed.iter().flat_map(|(_, g)| g.isos.iter().cloned()).collect();
    let n = a.n();
    let mut u = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for c in &cols {
        u.view_mut((0, off), (n, c.ncols())).copy_from(c);
        off += c.ncols();
    }
    if off != n {
        return Err(Error::NumericalFailure(format!("recovered {off} of {n} dimensions")));
    }
    let blocks = keyed
        .into_iter()
        .map(|(key, g)| Block { multiplicity: g.isos.len(), tuple: g.rep, key })
        .collect();
    let dec = Decomposition { unitary: u, blocks };
    let res = dec.residual(a);
    if res > DECOMPOSITION_TOL * a.scale() {
        return Err(Error::NumericalFailure(format!("decomposition residual {res:e}")));
    }
    Ok(dec)
}

/// Verdict of [`unitarily_equivalent`]; `witness` satisfies `U X U* = Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub decision: Decision,
    pub witness: Option<ComplexMatrix>,
}

impl Equivalence {
    fn no() -> Self {
        Equivalence { decision: Decision::No, witness: None }
    }
}

fn block_offsets(d: &Decomposition) -> Vec<Vec<usize>> {
    let mut off = 0;
    d.blocks
        .iter()
        .map(|b| {
            (0..b.multiplicity)
                .map(|_| {
                    let o = off;
                    off += b.tuple.n();
                    o
                })
                .collect()
        })
        .collect()
}

pub fn unitarily_equivalent(x: &MatrixTuple, y: &MatrixTuple) -> Result<Equivalence> {
    if x.d() != y.d() || x.n() != y.n() {
        return Ok(Equivalence::no());
    }
    let scale = x.scale().max(y.scale());
    if !signatures_match(&spectral_signature(x), &spectral_signature(y), 1e-6 * scale) {
        return Ok(Equivalence::no());
    }
    let dx = irreducible_decompose(x, 0)?;
    let dy = irreducible_decompose(y, 0)?;
    if dx.size_multiplicities() != dy.size_multiplicities() {
        return Ok(Equivalence::no());
    }
    let (ox, oy) = (block_offsets(&dx), block_offsets(&dy));
    let n = x.n();
    let mut z = ComplexMatrix::zeros(n, n);
    let mut used = vec![false; dy.blocks.len()];
    for (i, bx) in dx.blocks.iter().enumerate() {
        let mut found = false;
        for (j, by) in dy.blocks.iter().enumerate() {
            if used[j] || by.multiplicity != bx.multiplicity || by.tuple.n() != bx.tuple.n() {
                continue;
            }
            if let Some(w) = irreducible_intertwiner(&bx.tuple, &by.tuple)? {
                let k = bx.tuple.n();
                for c in 0..bx.multiplicity {
                    z.view_mut((oy[j][c], ox[i][c]), (k, k)).copy_from(&w);
                }
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Equivalence::no());
        }
    }
    let u = &dy.unitary * z * dx.unitary.adjoint();
    let res = x.conjugate_by(&u).distance(y);
    if res > EQUIVALENCE_TOL * y.scale() {
        return Err(Error::NumericalFailure(format!("equivalence witness residual {res:e}")));
    }
    Ok(Equivalence { decision: Decision::Yes, witness: Some(u) })
}

/// Direct sum of each distinct block once, in canonical order.
pub fn dedupe_multiplicity(d: &Decomposition) -> MatrixTuple {
    let parts: Vec<MatrixTuple> = d.blocks.iter().map(|b| b.tuple.clone()).collect();
    direct_sum(&parts).expect("blocks share arity")
}

/// Random tuple helpers used by tests and suites.
pub mod random {
    use super::*;
    use crate::numlin::{ginibre, random_hermitian, random_unitary};

    /// A generic block: Hermitian coordinates when `hermitian`, otherwise
    /// Ginibre coordinates. Irreducible almost surely unless `k ≥ 2` with a
    /// single Hermitian coordinate.
    pub fn generic_block<R: Rng>(r: &mut R, d: usize, k: usize, hermitian: bool) -> MatrixTuple {
        let mats = (0..d)
            .map(|_| if hermitian { random_hermitian(r, k) } else { ginibre(r, k, k) * c64(1.0 / (k as f64).sqrt(), 0.0) })
            .collect();
        MatrixTuple::new(mats).expect("well formed")
    }

    /// `U* A U` for a Haar-random `U`.
    pub fn haar_conjugate<R: Rng>(r: &mut R, a: &MatrixTuple) -> MatrixTuple {
        let u = random_unitary(r, a.n());
        a.conjugate_by(&u.adjoint())
    }
}

#[cfg(test)]
mod tests;
