//! Dense complex linear-algebra kernel.
//!
//! Everything here is a pure function of its inputs. Rank and nullity
//! decisions are relative to the largest singular value so that verdicts do
//! not depend on the overall scale of the data.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Row-major dense complex matrix. Finite entries are enforced at every
/// construction boundary that accepts external data (see [`from_row_major`]).
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

/// Default relative threshold for rank/nullity decisions.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Build a matrix from row-major entries, rejecting NaN/Inf.
pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, &entries))
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn frob(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_real(m: &RealMatrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖m − m*‖_F`
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    s.sqrt()
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    hermitian_residual(m) <= tol * frob(m).max(1.0)
}

/// `(m + m*) / 2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `(m − m*) / 2i`
pub fn skew_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * c64(0.0, -0.5)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues sorted descending and
/// the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let l = self.values[j];
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= l);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn herm_eig(m: &ComplexMatrix, tol: f64) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::Empty("matrix"));
    }
    ensure_finite(m)?;
    let residual = hermitian_residual(m);
    if residual > tol * frob(m) && residual > 0.0 {
        return Err(Error::NotHermitian { residual });
    }
    Ok(herm_eig_unchecked(&hermitian_part(m)))
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub fn herm_eig_unchecked(h: &ComplexMatrix) -> HermEig {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermEig { values, vectors }
}

/// Largest eigenvalue of a Hermitian matrix together with a unit eigenvector.
pub fn lambda_max(h: &ComplexMatrix) -> (f64, DVector<C64>) {
    let e = herm_eig_unchecked(&hermitian_part(h));
    (e.values[0], e.vectors.column(0).into_owned())
}

pub fn lambda_min(h: &ComplexMatrix) -> f64 {
    let e = herm_eig_unchecked(&hermitian_part(h));
    *e.values.last().unwrap()
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn sym_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn sym_lambda_min(m: &RealMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    sym_eigenvalues(m)[0]
}

fn singular_values_and_vt(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    // The thin SVD of a wide matrix does not expose the full right singular
    // basis, so wide inputs are padded with zero rows.
    let (r, c) = m.shape();
    let padded;
    let mat = if r < c {
        let mut p = ComplexMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = nalgebra::SVD::new(mat.clone(), false, true);
    let vt = svd.v_t.expect("requested V^T");
    (svd.singular_values.iter().copied().collect(), vt)
}

/// Orthonormal basis (as columns) of the numerical nullspace of `m`: the span
/// of right singular vectors whose singular value is at most
/// `rel_tol · σ_max`. Returns an `ncols × k` matrix, `k` possibly zero.
pub fn nullspace_basis(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    nullspace_basis_floor(m, rel_tol, 0.0)
}

/// As [`nullspace_basis`] with the cut raised to at least `floor`, for
/// systems whose natural scale is known and may exceed `σ_max`.
pub fn nullspace_basis_floor(m: &ComplexMatrix, rel_tol: f64, floor: f64) -> ComplexMatrix {
    let c = m.ncols();
    if c == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(c);
    }
    let (sv, vt) = singular_values_and_vt(m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = (rel_tol * smax).max(floor);
    let idx: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= cut).collect();
    let mut out = ComplexMatrix::zeros(c, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        for j in 0..c {
            out[(j, k)] = vt[(i, j)].conj();
        }
    }
    out
}

/// Numerical rank from the singular values (relative threshold).
pub fn rank_svd(m: &ComplexMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Numerical rank from a column-pivoted QR factorisation: the count of
/// diagonal entries of `R` above `rel_tol · |R₀₀|`.
pub fn rank_qr(m: &ComplexMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let k = r.nrows().min(r.ncols());
    let r00 = r[(0, 0)].norm();
    (0..k).filter(|&i| r[(i, i)].norm() > rel_tol * r00).count()
}

/// Deterministic generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) / std::f64::consts::SQRT_2
}

pub fn gaussian_real<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn ginibre<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Random Hermitian matrix from the Gaussian unitary ensemble, scaled so the
/// spectrum is O(1).
pub fn random_hermitian<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    hermitian_part(&g) * c64(1.0 / (n as f64).sqrt(), 0.0)
}

/// `n × k` isometry with Haar-distributed range.
pub fn random_isometry<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    assert!(k <= n && n >= 1);
    let g = ginibre(rng, n, k);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.columns(0, k).into_owned();
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        out.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    out
}

/// Haar-random unitary, a deterministic function of `(n, seed)`.
pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed);
    random_isometry_rng(&mut r, n)
}

pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry_rng(rng, n)
}

fn random_isometry_rng<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(rng, n, n)
}

/// `‖V*V − I‖_F`
pub fn isometry_residual(v: &ComplexMatrix) -> f64 {
    let k = v.ncols();
    frob(&(v.adjoint() * v - identity(k)))
}

/// Modified Gram–Schmidt on the columns of `m`, dropping columns whose
/// remaining norm falls below `tol`.
pub fn orthonormal_columns(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let mut cols: Vec<DVector<C64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let nrm = v.norm();
        if nrm > tol {
            cols.push(v / c64(nrm, 0.0));
        }
    }
    if cols.is_empty() {
        return ComplexMatrix::zeros(m.nrows(), 0);
    }
    ComplexMatrix::from_columns(&cols)
}

/// Real-symmetric doubling `[[Re H, −Im H], [Im H, Re H]]` of a complex matrix.
pub fn realify_matrix(h: &ComplexMatrix) -> RealMatrix {
    let (r, c) = h.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(r + i, c + j)] = z.re;
            out[(i, c + j)] = -z.im;
            out[(r + i, j)] = z.im;
        }
    }
    out
}

/// Inverse of the doubling for a symmetric `2n × 2n` matrix, averaging the
/// two copies: `(W₁₁ + W₂₂)/2 + i (W₂₁ − W₁₂)/2`. PSD in, PSD out.
pub fn complexify_matrix(w: &RealMatrix) -> ComplexMatrix {
    let n = w.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        c64(
            0.5 * (w[(i, j)] + w[(n + i, n + j)]),
            0.5 * (w[(n + i, j)] - w[(i, n + j)]),
        )
    })
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real diagonal matrix as a complex matrix.
pub fn diag(vals: &[f64]) -> ComplexMatrix {
    let n = vals.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(vals[i], 0.0) } else { ZERO })
}

/// Right singular vector for the smallest singular value of `m`, together
/// with `(σ_min, σ_max)`. Wide inputs are padded so the vector always exists.
pub fn smallest_right_singular(m: &ComplexMatrix) -> (f64, f64, DVector<C64>) {
    let (sv, vt) = singular_values_and_vt(m);
    let c = m.ncols();
    let (imin, smin) = sv.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (i, s)| if s < a.1 { (i, s) } else { a });
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let v = DVector::from_fn(c, |j, _| vt[(imin, j)].conj());
    (smin, smax, v)
}

/// Unitary factor `P Q*` of the polar decomposition `S = P Σ Q*`.
pub fn polar_unitary(s: &ComplexMatrix) -> ComplexMatrix {
    let svd = nalgebra::SVD::new(s.clone(), true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested V^T")
}

/// Column-major vectorisation.
pub fn vec_of(m: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v)
}


/// Rows of `(re, im)` pairs, the JSON layout shared by every complex matrix.
pub fn to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Input("ragged matrix rows".into()));
    }
    from_row_major(r, c, rows.iter().flat_map(|row| row.iter().map(|z| c64(z[0], z[1]))).collect())
}

pub fn real_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> ComplexMatrix {
        let r = rows.len();
        let c = rows[0].len();
        ComplexMatrix::from_fn(r, c, |i, j| c64(rows[i][j], 0.0))
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = herm_eig(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-12).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let e = herm_eig(&identity(3), 1e-12).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert!(isometry_residual(&e.vectors) < 1e-12);
        let d = m(&[&[5.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, 0.5]]);
        let e = herm_eig(&d, 1e-12).unwrap();
        let want = [5.0, 0.5, -2.0];
        for (a, b) in e.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn herm_eig_rejects_bad_input() {
        let s = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&s, 1e-8), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&r, 1e-8), Err(Error::NonSquare { .. })));
        assert!(from_row_major(1, 1, vec![c64(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn herm_eig_reconstructs_random_matrices() {
        let mut r = rng(11);
        for trial in 0..1000 {
            let n = 1 + trial % 16;
            let h = random_hermitian(&mut r, n) * c64(1.0 + (trial % 7) as f64, 0.0);
            let e = herm_eig(&h, 1e-12).unwrap();
            let res = frob(&(&h - e.reconstruct()));
            assert!(res <= 1e-10 * frob(&h).max(1.0), "n={n} res={res:e}");
            assert!(isometry_residual(&e.vectors) <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn nullspace_examples() {
        let ns = nullspace_basis(&m(&[&[1.0, 0.0], &[0.0, 0.0]]), DEFAULT_REL_TOL);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(ns[(0, 0)].norm() < 1e-12);
        assert_eq!(nullspace_basis(&identity(2), DEFAULT_REL_TOL).ncols(), 0);
        let z = nullspace_basis(&ComplexMatrix::zeros(2, 2), DEFAULT_REL_TOL);
        assert_eq!(z.ncols(), 2);
        assert!(isometry_residual(&z) < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let w = m(&[&[1.0, 1.0, 0.0]]);
        let ns = nullspace_basis(&w, DEFAULT_REL_TOL);
        assert_eq!(ns.ncols(), 2);
        assert!(frob(&(&w * &ns)) < 1e-12);
    }

    #[test]
    fn haar_examples() {
        let u = haar_unitary(1, 99);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(haar_unitary(3, 7), haar_unitary(3, 7));
        assert!(frob(&(haar_unitary(4, 1) - haar_unitary(4, 2))) > 0.1);
        for seed in 0..100 {
            assert!(isometry_residual(&haar_unitary(1 + (seed as usize % 9), seed)) <= 1e-10);
        }
    }

    #[test]
    fn realify_round_trip() {
        let mut r = rng(3);
        let h = random_hermitian(&mut r, 4);
        let w = realify_matrix(&h);
        assert!(frob(&(complexify_matrix(&w) - &h)) < 1e-14);
        let ev = sym_eigenvalues(&w);
        let e = herm_eig(&h, 1e-12).unwrap();
        // every complex eigenvalue appears twice in the doubled matrix
        let mut doubled: Vec<f64> = e.values.iter().flat_map(|&x| [x, x]).collect();
        doubled.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(doubled) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// Commutant system `I⊗X − Xᵀ⊗I` of a random matrix: integer nullity must
    /// agree between the SVD and pivoted-QR paths.
    fn commutant_system(x: &ComplexMatrix) -> ComplexMatrix {
        let n = x.nrows();
        kron(&identity(n), x) - kron(&x.transpose(), &identity(n))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn nullity_svd_matches_qr(seed in 0u64..10_000, n in 1usize..5, repeat in 0usize..3) {
            let mut r = rng(seed);
            // block-diagonal input with repeated eigenvalues to force nontrivial nullity
            let vals: Vec<f64> = (0..n).map(|i| (i % (repeat + 1)) as f64).collect();
            let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(vals[i], 0.0) } else { ZERO });
            let u = random_unitary(&mut r, n);
            let x = &u * d * u.adjoint();
            let sys = commutant_system(&x);
            let null_svd = nullspace_basis(&sys, DEFAULT_REL_TOL).ncols();
            let rank_q = rank_qr(&sys, DEFAULT_REL_TOL);
            prop_assert_eq!(null_svd, n * n - rank_q);
            prop_assert_eq!(null_svd, n * n - rank_svd(&sys, DEFAULT_REL_TOL));
        }
    }
}
