//! Constraint normalisation and removal of linearly dependent rows.

use super::{SdpInstance, SparseSym, ToleranceProfile};

/// Squared residual norm (of a unit-norm constraint) below which a row counts
/// as a combination of earlier ones.
const DEPENDENCE_SQ: f64 = 1e-13;

pub(crate) struct Presolved {
    /// Original index of each kept constraint.
    pub kept: Vec<usize>,
    /// Kept constraint `i` is the original one divided by `scale[i]`.
    pub scale: Vec<f64>,
    pub cons: Vec<Vec<(usize, SparseSym)>>,
    pub b: Vec<f64>,
    pub dropped: usize,
}

pub(crate) enum Presolve {
    Ready(Presolved),
    /// A dependent row with an incompatible right-hand side; carries a dual
    /// ray over the original constraints with `⟨b, y⟩ = 1`.
    Inconsistent(Vec<f64>),
}

fn merged_terms(terms: &[(usize, SparseSym)]) -> Vec<(usize, SparseSym)> {
    let mut out: Vec<(usize, SparseSym)> = Vec::new();
    let mut sorted: Vec<&(usize, SparseSym)> = terms.iter().collect();
    sorted.sort_by_key(|t| t.0);
    for (b, s) in sorted {
        match out.last_mut() {
            Some((pb, ps)) if pb == b => {
                let t = ps.entries().iter().chain(s.entries()).copied().collect::<Vec<_>>();
                *ps = SparseSym::from_triplets(s.dim(), t);
            }
            _ => out.push((*b, s.clone())),
        }
    }
    out.retain(|(_, s)| !s.is_zero());
    out
}

fn inner(a: &[(usize, SparseSym)], b: &[(usize, SparseSym)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1.inner(&b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    s
}

pub(crate) fn presolve(inst: &SdpInstance, tol: &ToleranceProfile) -> Presolve {
    let m = inst.constraints.len();
    let mut cons = Vec::with_capacity(m);
    let mut scale = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for c in &inst.constraints {
        let t = merged_terms(&c.terms);
        let nrm = t.iter().map(|(_, s)| s.frob_sq()).sum::<f64>().sqrt();
        let s = if nrm > 0.0 { nrm } else { 1.0 };
        cons.push(t.into_iter().map(|(k, m)| (k, m.scaled(1.0 / s))).collect::<Vec<_>>());
        scale.push(s);
        b.push(c.rhs / s);
    }

    // Pivoted Cholesky of the Gram matrix, one column at a time.
    let mut diag: Vec<f64> = cons.iter().map(|c| inner(c, c)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut lcols: Vec<Vec<f64>> = Vec::new();
    let mut is_pivot = vec![false; m];
    loop {
        let mut best = None;
        for k in 0..m {
            if !is_pivot[k] && diag[k] > DEPENDENCE_SQ && best.is_none_or(|(_, d)| diag[k] > d) {
                best = Some((k, diag[k]));
            }
        }
        let Some((p, dp)) = best else { break };
        let sq = dp.sqrt();
        let mut col = vec![0.0; m];
        for k in 0..m {
            if is_pivot[k] {
                continue;
            }
            let mut g = if k == p { dp } else { inner(&cons[k], &cons[p]) };
            if k != p {
                for l in &lcols {
                    g -= l[k] * l[p];
                }
            }
            col[k] = g / sq;
        }
        col[p] = sq;
        for k in 0..m {
            if !is_pivot[k] && k != p {
                diag[k] -= col[k] * col[k];
            }
        }
        is_pivot[p] = true;
        pivots.push(p);
        lcols.push(col);
    }

    let r = pivots.len();
    // z = L_I^{-1} b_I
    let mut z = vec![0.0; r];
    for i in 0..r {
        let mut v = b[pivots[i]];
        for j in 0..i {
            v -= lcols[j][pivots[i]] * z[j];
        }
        z[i] = v / lcols[i][pivots[i]];
    }
    let bscale = 1.0 + b.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for k in 0..m {
        if is_pivot[k] {
            continue;
        }
        let lk: Vec<f64> = (0..r).map(|j| lcols[j][k]).collect();
        let delta = b[k] - lk.iter().zip(&z).map(|(a, c)| a * c).sum::<f64>();
        if delta.abs() > tol.feas * bscale {
            // c = L_I^{-T} l_k
            let mut c = vec![0.0; r];
            for i in (0..r).rev() {
                let mut v = lk[i];
                for j in i + 1..r {
                    v -= lcols[i][pivots[j]] * c[j];
                }
                c[i] = v / lcols[i][pivots[i]];
            }
            let sgn = delta.signum() / delta.abs();
            let mut y = vec![0.0; m];
            y[k] = sgn / scale[k];
            for (i, &p) in pivots.iter().enumerate() {
                y[p] = -sgn * c[i] / scale[p];
            }
            return Presolve::Inconsistent(y);
        }
    }

    let mut kept = pivots.clone();
    kept.sort_unstable();
    Presolve::Ready(Presolved {
        scale: kept.iter().map(|&k| scale[k]).collect(),
        cons: kept.iter().map(|&k| cons[k].clone()).collect(),
        b: kept.iter().map(|&k| b[k]).collect(),
        dropped: m - r,
        kept,
    })
}
