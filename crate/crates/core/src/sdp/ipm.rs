//! Homogeneous self-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector).
//!
//! The embedding solves for `(X, y, S, τ, κ)` with
//!
//! ```text
//! 𝒜(X) = bτ,   𝒜*(y) + S = Cτ,   ⟨C, X⟩ − ⟨b, y⟩ + κ = 0
//! ```
//!
//! starting from `X = S = I`, `y = 0`, `τ = κ = 1`. A feasible problem drives
//! `X/τ` to a solution; an infeasible one drives `τ → 0` and `y/⟨b, y⟩` to a
//! dual ray.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::presolve::{presolve, Presolve, Presolved};
use super::{Diagnostics, SdpInstance, SdpOutcome, SdpStatus, Sense, SparseSym, ToleranceProfile};
use crate::error::{Error, Result};
use crate::numlin::{sym_lambda_min, RealMatrix};

const STEP_FRACTION: f64 = 0.98;

struct Term {
    con: usize,
    upper: Vec<(usize, usize, f64)>,
    full: Vec<(usize, usize, f64)>,
    cols: Vec<usize>,
}

impl Term {
    fn new(con: usize, s: &SparseSym) -> Self {
        let upper = s.entries().to_vec();
        let mut full = Vec::with_capacity(2 * upper.len());
        for &(i, j, v) in &upper {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        let mut cols: Vec<usize> = full.iter().map(|e| e.1).collect();
        cols.sort_unstable();
        cols.dedup();
        Term { con, upper, full, cols }
    }

    fn dot(&self, y: &RealMatrix) -> f64 {
        self.upper
            .iter()
            .map(|&(i, j, v)| if i == j { v * y[(i, i)] } else { v * (y[(i, j)] + y[(j, i)]) })
            .sum()
    }

    fn axpy_into(&self, a: f64, out: &mut RealMatrix) {
        for &(i, j, v) in &self.full {
            out[(i, j)] += a * v;
        }
    }
}

struct Block {
    n: usize,
    terms: Vec<Term>,
    use_sparse: bool,
}

/// Constraint rows `0..m` plus the objective as row `m`.
struct Operator {
    m: usize,
    blocks: Vec<Block>,
}

impl Operator {
    fn new(sizes: &[usize], cons: &[Vec<(usize, SparseSym)>], obj: &[(usize, SparseSym)]) -> Self {
        let m = cons.len();
        let mut blocks: Vec<Block> = sizes.iter().map(|&n| Block { n, terms: Vec::new(), use_sparse: false }).collect();
        for (k, c) in cons.iter().enumerate() {
            for (b, s) in c {
                blocks[*b].terms.push(Term::new(k, s));
            }
        }
        for (b, s) in obj {
            if !s.is_zero() {
                blocks[*b].terms.push(Term::new(m, s));
            }
        }
        for blk in &mut blocks {
            let n = blk.n as f64;
            let total: f64 = blk.terms.iter().map(|t| t.full.len() as f64).sum();
            let dense: f64 = blk
                .terms
                .iter()
                .map(|t| n * t.full.len() as f64 + n * n * t.cols.len() as f64)
                .sum::<f64>()
                + blk.terms.len() as f64 * total;
            blk.use_sparse = total * total / 2.0 <= dense;
        }
        Operator { m, blocks }
    }

    /// Rows `0..=m` of `𝒜(X)` (the last entry is `⟨C, X⟩`).
    fn apply(&self, x: &[RealMatrix]) -> Vec<f64> {
        let mut out = vec![0.0; self.m + 1];
        for (blk, xb) in self.blocks.iter().zip(x) {
            for t in &blk.terms {
                out[t.con] += t.dot(xb);
            }
        }
        out
    }

    /// `Σ_k w_k C_k` with `w` of length `m + 1`.
    fn adjoint(&self, w: &[f64]) -> Vec<RealMatrix> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut out = RealMatrix::zeros(blk.n, blk.n);
                for t in &blk.terms {
                    if w[t.con] != 0.0 {
                        t.axpy_into(w[t.con], &mut out);
                    }
                }
                out
            })
            .collect()
    }

    /// `M_kl = Σ_b tr(C_k X C_l S⁻¹)` over rows `0..=m`.
    fn schur(&self, x: &[RealMatrix], sinv: &[RealMatrix]) -> DMatrix<f64> {
        let dim = self.m + 1;
        let mut mm = DMatrix::<f64>::zeros(dim, dim);
        for ((blk, xb), sb) in self.blocks.iter().zip(x).zip(sinv) {
            if blk.use_sparse {
                schur_sparse(blk, xb, sb, &mut mm);
            } else {
                schur_dense(blk, xb, sb, &mut mm);
            }
        }
        let t = mm.transpose();
        (mm + t) * 0.5
    }
}

fn schur_sparse(blk: &Block, x: &RealMatrix, sinv: &RealMatrix, mm: &mut DMatrix<f64>) {
    for (ki, tk) in blk.terms.iter().enumerate() {
        for tl in &blk.terms[ki..] {
            let mut v = 0.0;
            for &(a, b, p) in &tk.full {
                for &(c, d, q) in &tl.full {
                    v += p * q * x[(b, c)] * sinv[(d, a)];
                }
            }
            mm[(tk.con, tl.con)] += v;
            if tk.con != tl.con {
                mm[(tl.con, tk.con)] += v;
            }
        }
    }
}

fn schur_dense(blk: &Block, x: &RealMatrix, sinv: &RealMatrix, mm: &mut DMatrix<f64>) {
    let n = blk.n;
    let mut pos = vec![usize::MAX; n];
    for tl in &blk.terms {
        let nj = tl.cols.len();
        for (p, &j) in tl.cols.iter().enumerate() {
            pos[j] = p;
        }
        // T = X C_l restricted to the nonzero columns of C_l.
        let mut t = RealMatrix::zeros(n, nj);
        for &(i, j, v) in &tl.full {
            let mut col = t.column_mut(pos[j]);
            col.axpy(v, &x.column(i), 1.0);
        }
        let srows = RealMatrix::from_fn(nj, n, |p, c| sinv[(tl.cols[p], c)]);
        let prod = t * srows;
        for tk in &blk.terms {
            let v: f64 = tk.full.iter().map(|&(i, j, w)| w * prod[(j, i)]).sum();
            mm[(tk.con, tl.con)] += v;
        }
    }
}

fn sym(m: RealMatrix) -> RealMatrix {
    let t = m.transpose();
    (m + t) * 0.5
}

fn inner(a: &[RealMatrix], b: &[RealMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// Largest `α ≤ cap` with `X + α dX ⪰ 0`, given the Cholesky factor of `X`.
fn max_step(chol: &Cholesky<f64, Dyn>, dx: &RealMatrix) -> f64 {
    let l = chol.l();
    let Some(a) = l.solve_lower_triangular(dx) else { return 0.0 };
    let Some(q) = l.solve_lower_triangular(&a.transpose()) else { return 0.0 };
    let lmin = sym_lambda_min(&q);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn scalar_step(v: f64, dv: f64) -> f64 {
    if dv < 0.0 {
        -v / dv
    } else {
        f64::INFINITY
    }
}

fn chol_all(ms: &[RealMatrix]) -> Option<Vec<Cholesky<f64, Dyn>>> {
    ms.iter().map(|m| Cholesky::new(m.clone())).collect()
}

struct Direction {
    dx: Vec<RealMatrix>,
    ds: Vec<RealMatrix>,
    dy: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

struct Solver<'a> {
    op: Operator,
    pre: &'a Presolved,
    inst: &'a SdpInstance,
    tol: ToleranceProfile,
    obj_scale: f64,
}

enum Factor {
    Chol(Cholesky<f64, Dyn>),
    Lu(nalgebra::LU<f64, Dyn, Dyn>),
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Option<Factor> {
        if m.nrows() == 0 {
            return Some(Factor::Chol(Cholesky::new(m)?));
        }
        if let Some(c) = Cholesky::new(m.clone()) {
            return Some(Factor::Chol(c));
        }
        // Near an optimum on a face the Schur complement loses rank; a small
        // diagonal shift keeps the direction usable since residuals are
        // recomputed every iteration.
        let top = m.diagonal().amax();
        for shift in [1e-14, 1e-12, 1e-10] {
            let mut r = m.clone();
            for i in 0..r.nrows() {
                r[(i, i)] += shift * top;
            }
            if let Some(c) = Cholesky::new(r) {
                return Some(Factor::Chol(c));
            }
        }
        let lu = m.lu();
        if lu.is_invertible() {
            Some(Factor::Lu(lu))
        } else {
            None
        }
    }

    fn solve(&self, r: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            Factor::Chol(c) => Some(c.solve(r)),
            Factor::Lu(l) => l.solve(r),
        }
    }
}

struct State {
    x: Vec<RealMatrix>,
    s: Vec<RealMatrix>,
    y: Vec<f64>,
    tau: f64,
    kappa: f64,
}

impl<'a> Solver<'a> {
    /// Original-scale witness `X/τ` and its constraint residual over every
    /// original constraint (dropped rows included).
    fn witness(&self, st: &State) -> (Vec<RealMatrix>, f64) {
        let w: Vec<RealMatrix> = st.x.iter().map(|m| sym(m / st.tau)).collect();
        let res = self.inst.constraints.iter().map(|c| (c.value(&w) - c.rhs).abs()).fold(0.0, f64::max);
        (w, res)
    }

    /// Least-norm correction of `w` onto the affine constraint set, kept only
    /// if the blocks stay PSD.
    fn polish(&self, w: &[RealMatrix]) -> Option<(Vec<RealMatrix>, f64)> {
        let cons = &self.inst.constraints;
        let m = cons.len();
        let mut g = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let mut s = 0.0;
                for (bi, ci) in &cons[i].terms {
                    for (bj, cj) in &cons[j].terms {
                        if bi == bj {
                            s += ci.inner(cj);
                        }
                    }
                }
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        let shift = 1e-14 * (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max);
        for i in 0..m {
            g[(i, i)] += shift;
        }
        let chol = Cholesky::new(g)?;
        let mut out: Vec<RealMatrix> = w.to_vec();
        for _ in 0..2 {
            let r = DVector::from_iterator(m, cons.iter().map(|c| c.value(&out) - c.rhs));
            let z = chol.solve(&r);
            for (c, zi) in cons.iter().zip(z.iter()) {
                for (b, a) in &c.terms {
                    for &(i, j, v) in a.entries() {
                        out[*b][(i, j)] -= zi * v;
                        if i != j {
                            out[*b][(j, i)] -= zi * v;
                        }
                    }
                }
            }
        }
        if out.iter().any(|m| sym_lambda_min(m) < -self.tol.psd) {
            return None;
        }
        let res = cons.iter().map(|c| (c.value(&out) - c.rhs).abs()).fold(0.0, f64::max);
        res.is_finite().then_some((out, res))
    }

    fn rhs_scale(&self) -> f64 {
        1.0 + self.inst.constraints.iter().fold(0.0f64, |a, c| a.max(c.rhs.abs()))
    }

    /// Dual ray over original constraints if `y` certifies infeasibility.
    fn ray(&self, y: &[f64]) -> Option<Vec<f64>> {
        let by: f64 = y.iter().zip(&self.pre.b).map(|(a, b)| a * b).sum();
        if by <= 0.0 || !by.is_finite() {
            return None;
        }
        let mut full = vec![0.0; self.inst.constraints.len()];
        for (i, &k) in self.pre.kept.iter().enumerate() {
            full[k] = y[i] / by / self.pre.scale[i];
        }
        let val: f64 = self.inst.constraints.iter().zip(&full).map(|(c, v)| c.rhs * v).sum();
        let slack = self.inst.dual_slack(&full);
        let lmin = slack.iter().map(|s| sym_lambda_min(&(-s))).fold(f64::INFINITY, f64::min);
        (val > 0.0 && lmin >= -self.tol.psd * val).then_some(full)
    }

    fn direction(
        &self,
        st: &State,
        sinv: &[RealMatrix],
        fac: &Factor,
        schur: &DMatrix<f64>,
        uvec: &DVector<f64>,
        w: f64,
        resid: (&[f64], &[RealMatrix], f64),
        sigma_mu: f64,
        eta: f64,
        corr: Option<&Direction>,
    ) -> Option<Direction> {
        let m = self.op.m;
        let (p, d, g) = resid;
        let b = DVector::from_column_slice(&self.pre.b);
        // R_c = σμS⁻¹ − X − η·sym(X D S⁻¹) − sym(dXa dSa S⁻¹)
        let rc: Vec<RealMatrix> = (0..st.x.len())
            .map(|i| {
                let mut r = &sinv[i] * sigma_mu - &st.x[i];
                if eta != 0.0 {
                    r -= sym(&st.x[i] * &d[i] * &sinv[i]) * eta;
                }
                if let Some(c) = corr {
                    r -= sym(&c.dx[i] * &c.ds[i] * &sinv[i]);
                }
                r
            })
            .collect();
        let corr_tau = corr.map_or(0.0, |c| c.dtau * c.dkappa);
        let arc = self.op.apply(&rc);
        let r1 = DVector::from_fn(m, |k, _| -eta * p[k] - arc[k]);
        let r2 = -eta * g + arc[m] + (sigma_mu - st.tau * st.kappa - corr_tau) / st.tau;
        let z1 = fac.solve(&r1)?;
        let z2 = fac.solve(&(uvec + &b))?;
        let bmu = &b - uvec;
        let corner = w + st.kappa / st.tau;
        let den = bmu.dot(&z2) + corner;
        let (dy, dtau) = if den.is_finite() && den > 0.0 {
            let dtau = (r2 - bmu.dot(&z1)) / den;
            (z1 + z2 * dtau, dtau)
        } else {
            // The eliminated τ-row lost its sign to cancellation; solve the
            // bordered system [[M, −(u+b)], [(b−u)ᵀ, w + κ/τ]] directly.
            let mut k = DMatrix::zeros(m + 1, m + 1);
            k.view_mut((0, 0), (m, m)).copy_from(schur);
            for i in 0..m {
                k[(i, m)] = -(uvec[i] + b[i]);
                k[(m, i)] = bmu[i];
            }
            k[(m, m)] = corner;
            let mut rhs = DVector::zeros(m + 1);
            rhs.rows_mut(0, m).copy_from(&r1);
            rhs[m] = r2;
            let sol = k.lu().solve(&rhs)?;
            (sol.rows(0, m).into_owned(), sol[m])
        };
        let mut coeff: Vec<f64> = dy.iter().map(|v| -v).collect();
        coeff.push(dtau);
        let ads = self.op.adjoint(&coeff);
        let ds: Vec<RealMatrix> = ads.into_iter().zip(d).map(|(a, di)| a + di * eta).collect();
        let dx: Vec<RealMatrix> = (0..st.x.len())
            .map(|i| {
                let mut r = &sinv[i] * sigma_mu - &st.x[i] - sym(&st.x[i] * &ds[i] * &sinv[i]);
                if let Some(c) = corr {
                    r -= sym(&c.dx[i] * &c.ds[i] * &sinv[i]);
                }
                r
            })
            .collect();
        let dkappa = (sigma_mu - st.tau * st.kappa - corr_tau - st.kappa * dtau) / st.tau;
        let ok = dx.iter().chain(&ds).all(|m| m.iter().all(|v| v.is_finite())) && dtau.is_finite();
        ok.then_some(Direction { dx, ds, dy: dy.iter().copied().collect(), dtau, dkappa })
    }

    fn step_length(&self, st: &State, cx: &[Cholesky<f64, Dyn>], cs: &[Cholesky<f64, Dyn>], dir: &Direction) -> f64 {
        let mut a = scalar_step(st.tau, dir.dtau).min(scalar_step(st.kappa, dir.dkappa));
        for i in 0..st.x.len() {
            a = a.min(max_step(&cx[i], &dir.dx[i])).min(max_step(&cs[i], &dir.ds[i]));
        }
        a
    }

    fn run(&self) -> SdpOutcome {
        let m = self.op.m;
        let nu: f64 = self.inst.blocks.iter().sum::<usize>() as f64;
        let mut st = State {
            x: self.inst.blocks.iter().map(|&n| RealMatrix::identity(n, n)).collect(),
            s: self.inst.blocks.iter().map(|&n| RealMatrix::identity(n, n)).collect(),
            y: vec![0.0; m],
            tau: 1.0,
            kappa: 1.0,
        };
        let bnorm = 1.0 + self.pre.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let maximize = self.inst.sense == Sense::Maximize;
        let mut diag = Diagnostics { dropped_constraints: self.pre.dropped, ..Default::default() };
        let mut small_steps = 0;

        for iter in 0..self.tol.max_iter {
            diag.iterations = iter;
            let ax = self.op.apply(&st.x);
            let p: Vec<f64> = (0..m).map(|k| ax[k] - self.pre.b[k] * st.tau).collect();
            let mut coeff: Vec<f64> = st.y.iter().map(|v| -v).collect();
            coeff.push(st.tau);
            let d: Vec<RealMatrix> = self.op.adjoint(&coeff).into_iter().zip(&st.s).map(|(a, s)| a - s).collect();
            let by: f64 = st.y.iter().zip(&self.pre.b).map(|(a, b)| a * b).sum();
            let g = by - ax[m] - st.kappa;
            let mu = (inner(&st.x, &st.s) + st.tau * st.kappa) / (nu + 1.0);

            let pres = p.iter().fold(0.0f64, |a, v| a.max(v.abs())) / st.tau;
            let dres = d.iter().map(|m| m.norm()).fold(0.0, f64::max) / st.tau;
            let gap = (ax[m] - by).abs() / st.tau / (1.0 + (ax[m] / st.tau).abs());
            diag.primal_residual = pres;
            diag.dual_residual = dres;
            diag.gap = gap;
            diag.tau = st.tau;
            diag.kappa = st.kappa;

            let primal_ok = pres <= 0.1 * self.tol.feas * bnorm;
            let done = if maximize { primal_ok && dres <= 0.1 * self.tol.feas && gap <= self.tol.gap } else { primal_ok };
            if done {
                if let Some(out) = self.accept(&st, &diag, 0.5) {
                    return out;
                }
            }
            if by > 0.0 && st.tau <= 10.0 * st.kappa {
                if let Some(ray) = self.ray(&st.y) {
                    return self.infeasible(ray, diag);
                }
            }
            if !(mu.is_finite()) || mu < 1e-30 || small_steps >= 3 {
                diag.note = "stalled".into();
                break;
            }
            if maximize && ax[m] > 0.0 && by <= 0.0 && st.tau < 1e-10 * st.kappa {
                diag.note = "unbounded".into();
                break;
            }

            let (Some(cx), Some(cs)) = (chol_all(&st.x), chol_all(&st.s)) else {
                diag.note = "lost positive definiteness".into();
                break;
            };
            let sinv: Vec<RealMatrix> = cs.iter().map(|c| sym(c.inverse())).collect();
            let full = self.op.schur(&st.x, &sinv);
            let mblk = full.view((0, 0), (m, m)).into_owned();
            let uvec = DVector::from_fn(m, |k, _| full[(k, m)]);
            let w = full[(m, m)];
            let Some(fac) = Factor::new(mblk.clone()) else {
                diag.note = "singular Schur complement".into();
                break;
            };
            let resid = (p.as_slice(), d.as_slice(), g);

            let Some(aff) = self.direction(&st, &sinv, &fac, &mblk, &uvec, w, resid, 0.0, 1.0, None) else {
                diag.note = "predictor failed".into();
                break;
            };
            let a_aff = self.step_length(&st, &cx, &cs, &aff).min(1.0);
            let xs_aff: f64 = (0..st.x.len())
                .map(|i| (&st.x[i] + &aff.dx[i] * a_aff).dot(&(&st.s[i] + &aff.ds[i] * a_aff)))
                .sum();
            let mu_aff = (xs_aff + (st.tau + a_aff * aff.dtau) * (st.kappa + a_aff * aff.dkappa)) / (nu + 1.0);
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            let Some(dir) = self.direction(&st, &sinv, &fac, &mblk, &uvec, w, resid, sigma * mu, 1.0 - sigma, Some(&aff))
            else {
                diag.note = "corrector failed".into();
                break;
            };
            let alpha = (STEP_FRACTION * self.step_length(&st, &cx, &cs, &dir)).min(1.0);
            if alpha < 1e-8 {
                small_steps += 1;
            } else {
                small_steps = 0;
            }
            for i in 0..st.x.len() {
                st.x[i] = sym(&st.x[i] + &dir.dx[i] * alpha);
                st.s[i] = sym(&st.s[i] + &dir.ds[i] * alpha);
            }
            for (y, dy) in st.y.iter_mut().zip(&dir.dy) {
                *y += alpha * dy;
            }
            st.tau += alpha * dir.dtau;
            st.kappa += alpha * dir.dkappa;
            // Rescale the homogeneous iterate when it drifts, which does not
            // change any ratio the termination tests look at.
            let norm = st.tau + st.kappa;
            if !(1e-6..=1e6).contains(&norm) {
                for xi in st.x.iter_mut().chain(st.s.iter_mut()) {
                    *xi /= norm;
                }
                st.y.iter_mut().for_each(|v| *v /= norm);
                st.tau /= norm;
                st.kappa /= norm;
            }
        }
        diag.iterations = diag.iterations.max(1);
        if let Some(out) = self.accept(&st, &diag, 1.0) {
            return out;
        }
        if let Some(ray) = self.ray(&st.y) {
            return self.infeasible(ray, diag);
        }
        if diag.note.is_empty() {
            diag.note = "iteration limit".into();
        }
        let certificate = (self.inst.sense == Sense::Maximize && st.tau > 0.0)
            .then(|| self.dual_point(&st))
            .filter(|y| y.iter().all(|v| v.is_finite()));
        SdpOutcome { status: SdpStatus::Indeterminate, witness: None, certificate, diagnostics: diag }
    }

    fn accept(&self, st: &State, diag: &Diagnostics, slack: f64) -> Option<SdpOutcome> {
        if !(st.tau > 0.0) {
            return None;
        }
        let (mut w, mut res) = self.witness(st);
        if res > slack * self.tol.feas * self.rhs_scale() {
            return None;
        }
        if res > 0.1 * self.tol.feas {
            if let Some((pw, pres)) = self.polish(&w) {
                if pres < res {
                    (w, res) = (pw, pres);
                }
            }
        }
        if w.iter().any(|m| sym_lambda_min(m) < -self.tol.psd) {
            return None;
        }
        let mut diag = diag.clone();
        diag.primal_residual = res;
        let y = self.dual_point(st);
        let status = match self.inst.sense {
            Sense::Feasibility => SdpStatus::Feasible,
            Sense::Maximize => {
                if diag.dual_residual > self.tol.feas || diag.gap > self.tol.gap {
                    // A checked feasible point without an optimality proof;
                    // only reported once iterating has stopped.
                    if slack < 1.0 {
                        return None;
                    }
                    diag.note = "optimality not certified".into();
                    SdpStatus::Feasible
                } else {
                    SdpStatus::OptimalValue(self.inst.objective_value(&w))
                }
            }
        };
        let certificate = (self.inst.sense == Sense::Maximize).then_some(y);
        Some(SdpOutcome { status, witness: Some(w), certificate, diagnostics: diag })
    }

    /// Dual iterate over the original constraints, in the units of the
    /// maximisation.
    fn dual_point(&self, st: &State) -> Vec<f64> {
        let mut full = vec![0.0; self.inst.constraints.len()];
        for (i, &k) in self.pre.kept.iter().enumerate() {
            full[k] = -st.y[i] / st.tau / self.pre.scale[i] * self.obj_scale;
        }
        full
    }

    fn infeasible(&self, ray: Vec<f64>, mut diag: Diagnostics) -> SdpOutcome {
        diag.note = "dual ray".into();
        SdpOutcome { status: SdpStatus::Infeasible, witness: None, certificate: Some(ray), diagnostics: diag }
    }
}

/// Solve an SDP. `Feasible`/`OptimalValue` always carry a witness with
/// constraint residual at most `tol.feas · (1 + max|b|)`; `Infeasible`
/// always carries a dual ray checked against the original data.
pub fn solve(inst: &SdpInstance, tol: &ToleranceProfile) -> Result<SdpOutcome> {
    inst.validate()?;
    let size = inst.total_dim();
    if size > tol.dim_cap {
        return Err(Error::DimensionCap { size, cap: tol.dim_cap });
    }
    if inst.constraints.len() > tol.constraint_cap {
        return Err(Error::DimensionCap { size: inst.constraints.len(), cap: tol.constraint_cap });
    }
    let pre = match presolve(inst, tol) {
        Presolve::Inconsistent(y) => {
            return Ok(SdpOutcome {
                status: SdpStatus::Infeasible,
                witness: None,
                certificate: Some(y),
                diagnostics: Diagnostics { note: "inconsistent linear constraints".into(), ..Default::default() },
            })
        }
        Presolve::Ready(p) => p,
    };
    let (obj, obj_scale) = match &inst.objective {
        Some(o) if inst.sense == Sense::Maximize => {
            let nrm = o.iter().map(|(_, s)| s.frob_sq()).sum::<f64>().sqrt();
            let sc = if nrm > 0.0 { nrm } else { 1.0 };
            // The embedding minimises, so the objective enters negated.
            (o.iter().map(|(b, s)| (*b, s.scaled(-1.0 / sc))).collect::<Vec<_>>(), sc)
        }
        _ => (Vec::new(), 1.0),
    };
    let op = Operator::new(&inst.blocks, &pre.cons, &obj);
    let solver = Solver { op, pre: &pre, inst, tol: *tol, obj_scale };
    Ok(solver.run())
}
