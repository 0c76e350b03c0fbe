//! Seeded instance generators shared by the acceptance suite, the CLI
//! `corpus` command and the benches.

use rand::Rng;

use crate::compactmodel::{CompactModel, ModelBlock, ZeroSummand};
use crate::mrange::random_ucp_image;
use crate::numlin::{gaussian_real, rng, RealMatrix};
use crate::sdp::{Constraint, SdpInstance, SparseSym};
use crate::tuples::random::{generic_block, haar_conjugate};
use crate::tuples::{direct_sum, MatrixTuple};

fn random_symmetric<R: Rng>(r: &mut R, n: usize) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| gaussian_real(r));
    (&g + g.transpose()) * 0.5
}

fn random_pd<R: Rng>(r: &mut R, n: usize, floor: f64) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| gaussian_real(r));
    &g * g.transpose() / n as f64 + RealMatrix::identity(n, n) * floor
}

fn block_sizes<R: Rng>(r: &mut R) -> Vec<usize> {
    let nb = r.random_range(1..=3);
    (0..nb).map(|_| r.random_range(1..=6)).collect()
}

fn sparse(m: &RealMatrix) -> SparseSym {
    SparseSym::from_dense(m).expect("symmetric by construction")
}

/// A feasible instance built around a planted positive definite point.
/// Returns the instance and the planted point.
pub fn planted_feasible_sdp(seed: u64) -> (SdpInstance, Vec<RealMatrix>) {
    let mut r = rng(seed);
    let sizes = block_sizes(&mut r);
    let x0: Vec<RealMatrix> = sizes.iter().map(|&n| random_pd(&mut r, n, 0.05)).collect();
    let free: usize = sizes.iter().map(|n| n * (n + 1) / 2).sum();
    let m = r.random_range(1..=free.max(1));
    let constraints = (0..m)
        .map(|_| {
            let terms: Vec<(usize, SparseSym)> =
                sizes.iter().enumerate().map(|(b, &n)| (b, sparse(&random_symmetric(&mut r, n)))).collect();
            let rhs = terms.iter().map(|(b, c)| c.dot(&x0[*b])).sum();
            Constraint::new(terms, rhs)
        })
        .collect();
    (SdpInstance::feasibility(sizes, constraints), x0)
}

/// An infeasible instance built around a planted dual ray `y` with
/// `⟨b, y⟩ = 1` and `−Σ y_k C_k` positive definite.
pub fn planted_infeasible_sdp(seed: u64) -> (SdpInstance, Vec<f64>) {
    let mut r = rng(seed);
    let sizes = block_sizes(&mut r);
    let free: usize = sizes.iter().map(|n| n * (n + 1) / 2).sum();
    let m = r.random_range(1..=free.max(1));
    let mut y: Vec<f64> = (0..m).map(|_| gaussian_real(&mut r)).collect();
    if y[m - 1].abs() < 0.3 {
        y[m - 1] = 0.3f64.copysign(y[m - 1]);
    }
    let mut coeffs: Vec<Vec<RealMatrix>> =
        (0..m - 1).map(|_| sizes.iter().map(|&n| random_symmetric(&mut r, n)).collect()).collect();
    let last: Vec<RealMatrix> = sizes
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            let mut acc = -random_pd(&mut r, n, 0.1);
            for (k, c) in coeffs.iter().enumerate() {
                acc -= &c[b] * y[k];
            }
            acc / y[m - 1]
        })
        .collect();
    coeffs.push(last);
    let mut b: Vec<f64> = (0..m).map(|_| gaussian_real(&mut r)).collect();
    let partial: f64 = (0..m - 1).map(|k| b[k] * y[k]).sum();
    b[m - 1] = (1.0 - partial) / y[m - 1];
    let constraints = coeffs
        .iter()
        .zip(&b)
        .map(|(c, &rhs)| Constraint::new(c.iter().enumerate().map(|(i, m)| (i, sparse(m))).collect(), rhs))
        .collect();
    (SdpInstance::feasibility(sizes, constraints), y)
}

// ---------------------------------------------------------------------------
// Tuple families

fn mixed_state<R: Rng>(r: &mut R, a: &MatrixTuple) -> MatrixTuple {
    random_ucp_image(r, a, 1)
}

/// Random direct sum for the round-robin check: distinct generic blocks, an
/// occasional duplicate and an occasional scalar sitting inside the range of
/// another block, Haar-conjugated. `d ≤ 3`, blocks of size `≤ 4`, `n ≤ 10`.
pub fn round_robin_tuple(seed: u64) -> MatrixTuple {
    let mut r = rng(seed);
    let d = r.random_range(1..=3);
    // A single Hermitian matrix of size ≥ 2 is never irreducible.
    let hermitian = d >= 2 && r.random_bool(0.7);
    let mut room = 10usize;
    let mut blocks: Vec<MatrixTuple> = Vec::new();
    for _ in 0..r.random_range(1..=3) {
        if room == 0 {
            break;
        }
        let k = r.random_range(1..=room.min(4));
        blocks.push(generic_block(&mut r, d, k, hermitian));
        room -= k;
    }
    if room > 0 && r.random_bool(0.4) {
        let b = blocks[r.random_range(0..blocks.len())].clone();
        if b.n() <= room {
            room -= b.n();
            blocks.push(b);
        }
    }
    if room > 0 && r.random_bool(0.4) {
        let src = blocks[r.random_range(0..blocks.len())].clone();
        blocks.push(mixed_state(&mut r, &src));
    }
    haar_conjugate(&mut r, &direct_sum(&blocks).expect("same arity"))
}

/// `(A, U*(A ⊕ junk)U)` with every junk block a member of `W(A)`.
pub fn uniqueness_pair(seed: u64) -> (MatrixTuple, MatrixTuple) {
    let mut r = rng(seed);
    let d = r.random_range(2..=3);
    let parts: Vec<MatrixTuple> = (0..r.random_range(1..=2)).map(|_| {
        let k = r.random_range(1..=3);
        generic_block(&mut r, d, k, true)
    }).collect();
    let a = direct_sum(&parts).expect("same arity");
    let mut with_junk = vec![a.clone()];
    for _ in 0..r.random_range(1..=2) {
        let level = r.random_range(1..=2);
        with_junk.push(random_ucp_image(&mut r, &a, level));
    }
    let b = haar_conjugate(&mut r, &direct_sum(&with_junk).expect("same arity"));
    (a, b)
}

/// Random points in ℝ² or ℝ³, at most six of them, affinely spanning.
pub fn random_polytope_points(seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let dim = r.random_range(2..=3);
    let count = r.random_range(dim + 1..=6);
    (0..count).map(|_| (0..dim).map(|_| gaussian_real(&mut r)).collect()).collect()
}

/// A joint eigenvalue multiset in ℝ¹–ℝ³ with at most twelve points,
/// including repeats and points inside the hull.
pub fn normal_multiset(seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let dim = r.random_range(1..=3);
    let hull = r.random_range(dim + 1..=(dim + 4).min(8));
    let mut pts: Vec<Vec<f64>> = (0..hull).map(|_| (0..dim).map(|_| gaussian_real(&mut r)).collect()).collect();
    let extra = r.random_range(0..=12 - hull);
    for _ in 0..extra {
        if r.random_bool(0.3) {
            let p = pts[r.random_range(0..pts.len())].clone();
            pts.push(p);
        } else {
            let w: Vec<f64> = (0..hull).map(|_| r.random_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            pts.push((0..dim).map(|i| (0..hull).map(|j| w[j] * pts[j][i]).sum::<f64>() / s).collect());
        }
    }
    pts
}

/// A compact model without tail: one or two blocks, small multiplicities and
/// a zero summand of any kind.
pub fn finite_compact_model(seed: u64) -> CompactModel {
    let mut r = rng(seed);
    let d = r.random_range(1..=3);
    let hermitian = d >= 2 && r.random_bool(0.5);
    let blocks = (0..r.random_range(1..=2))
        .map(|_| {
            let k = r.random_range(1..=3);
            ModelBlock { tuple: generic_block(&mut r, d, k, hermitian), multiplicity: r.random_range(1..=2) }
        })
        .collect();
    let zero = match r.random_range(0..3) {
        0 => ZeroSummand::None,
        1 => ZeroSummand::Finite(r.random_range(1..=3)),
        _ => ZeroSummand::Infinite,
    };
    CompactModel::new(blocks, zero, None).expect("valid model")
}

/// A Haar-conjugated direct sum of distinct generic blocks with planted
/// multiplicities, `n ≤ 10`.
pub fn planted_decomposition(seed: u64) -> (MatrixTuple, Vec<(MatrixTuple, usize)>) {
    let mut r = rng(seed);
    let d = r.random_range(1..=3);
    let hermitian = d >= 2 && r.random_bool(0.7);
    let mut room = 10usize;
    let mut planted: Vec<(MatrixTuple, usize)> = Vec::new();
    while room > 0 && (planted.is_empty() || r.random_bool(0.6)) {
        let k = r.random_range(1..=room.min(4));
        let m = r.random_range(1..=(room / k).min(3));
        planted.push((generic_block(&mut r, d, k, hermitian), m));
        room -= k * m;
    }
    let parts: Vec<MatrixTuple> =
        planted.iter().flat_map(|(b, m)| std::iter::repeat_n(b.clone(), *m)).collect();
    (haar_conjugate(&mut r, &direct_sum(&parts).expect("same arity")), planted)
}
