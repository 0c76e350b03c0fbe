use super::random::{generic_block, haar_conjugate};
use super::*;

use crate::numlin::{diag, pauli_x, pauli_y, pauli_z};
use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest, ProptestConfig};

fn paulis_xz() -> MatrixTuple {
    MatrixTuple::new(vec![pauli_x(), pauli_z()]).unwrap()
}

fn single(m: ComplexMatrix) -> MatrixTuple {
    MatrixTuple::new(vec![m]).unwrap()
}

/// Commutant dimension by brute force: real Gaussian elimination on the
/// linear conditions `[M, A_i] = 0`, `[M, A_i*] = 0`, written entrywise over
/// the `2n²` real unknowns of `M`.
fn commutant_dim_oracle(a: &MatrixTuple) -> usize {
    let n = a.n();
    let unknowns = 2 * n * n;
    let basis = |u: usize| -> ComplexMatrix {
        let (k, im) = (u / 2, u % 2 == 1);
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k / n, k % n)] = if im { c64(0.0, 1.0) } else { c64(1.0, 0.0) };
        m
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let gens: Vec<ComplexMatrix> = a.matrices().iter().flat_map(|m| [m.clone(), m.adjoint()]).collect();
    for g in &gens {
        let cols: Vec<ComplexMatrix> = (0..unknowns).map(|u| basis(u) * g - g * basis(u)).collect();
        for i in 0..n {
            for j in 0..n {
                rows.push(cols.iter().map(|c| c[(i, j)].re).collect());
                rows.push(cols.iter().map(|c| c[(i, j)].im).collect());
            }
        }
    }
    let mut rank = 0;
    for col in 0..unknowns {
        let piv = (rank..rows.len()).max_by(|&x, &y| rows[x][col].abs().total_cmp(&rows[y][col].abs()));
        let Some(p) = piv else { break };
        if rows[p][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                if f != 0.0 {
                    for c in col..unknowns {
                        rows[r][c] -= f * rows[rank][c];
                    }
                }
            }
        }
        rank += 1;
    }
    // The commutant is a complex space; its real dimension is twice that.
    (unknowns - rank) / 2
}

#[test]
fn direct_sum_examples() {
    let s = direct_sum(&[MatrixTuple::point(&[0.0]), MatrixTuple::point(&[1.0])]).unwrap();
    assert_eq!(s, single(diag(&[0.0, 1.0])));
    let a = paulis_xz();
    let aa = direct_sum(&[a.clone(), a.clone()]).unwrap();
    assert_eq!((aa.d(), aa.n()), (2, 4));
    let b = direct_sum(&[a, MatrixTuple::point(&[1.0, 0.0])]).unwrap();
    assert_eq!((b.d(), b.n()), (2, 3));
    assert_eq!(b.get(0)[(2, 2)], c64(1.0, 0.0));
    assert_eq!(b.get(1)[(1, 1)], c64(-1.0, 0.0));
    assert!(matches!(direct_sum(&[MatrixTuple::point(&[0.0]), MatrixTuple::point(&[0.0, 1.0])]), Err(Error::MixedArity(1, 2))));
}

#[test]
fn compress_examples() {
    let a = paulis_xz();
    assert_eq!(compress(&a, &identity(2)).unwrap(), a);
    let d = single(diag(&[0.0, 1.0]));
    let e1 = ComplexMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), ZERO]);
    assert_eq!(compress(&d, &e1).unwrap(), MatrixTuple::point(&[0.0]));
    let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let v = ComplexMatrix::from_column_slice(2, 1, &[h, h]);
    let c = compress(&single(pauli_x()), &v).unwrap();
    assert!((c.get(0)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
    let bad = ComplexMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(1.0, 0.0)]);
    assert!(matches!(compress(&d, &bad), Err(Error::NotIsometry(_))));
}

#[test]
fn realify_examples() {
    let a = paulis_xz();
    assert_eq!(realify(&a), a);
    let s = single(ComplexMatrix::from_row_slice(2, 2, &[ZERO, c64(1.0, 0.0), ZERO, ZERO]));
    let r = realify(&s);
    assert!(r.is_hermitian());
    assert_eq!(r.d(), 2);
    assert!(frob(&(r.get(0) - pauli_x() * c64(0.5, 0.0))) < 1e-15);
    assert!(frob(&(r.get(1) - pauli_y() * c64(0.5, 0.0))) < 1e-15);
    assert_eq!(realify(&r), r);
}

#[test]
fn commutant_examples() {
    assert_eq!(commutant_dim(&paulis_xz()), 1);
    assert_eq!(commutant_dim_oracle(&paulis_xz()), 1);
    assert_eq!(commutant_dim(&MatrixTuple::point(&[3.0])), 1);
    let d = single(diag(&[0.0, 1.0]));
    assert_eq!(commutant_dim(&d), 2);
    assert_eq!(commutant_dim_oracle(&d), 2);
}

#[test]
fn decompose_irreducible_is_single_block() {
    let a = paulis_xz();
    let dec = irreducible_decompose(&a, 1).unwrap();
    assert_eq!(dec.size_multiplicities(), vec![(2, 1)]);
    assert!(dec.residual(&a) < 1e-12);
}

#[test]
fn decompose_doubled_block() {
    let mut r = rng(5);
    let b = generic_block(&mut r, 2, 3, true);
    let a = haar_conjugate(&mut r, &direct_sum(&[b.clone(), b.clone()]).unwrap());
    let dec = irreducible_decompose(&a, 9).unwrap();
    assert_eq!(dec.size_multiplicities(), vec![(3, 2)]);
    assert!(dec.residual(&a) <= 1e-8 * a.scale());
    let eq = unitarily_equivalent(&dec.blocks[0].tuple, &b).unwrap();
    assert_eq!(eq.decision, Decision::Yes);
}

#[test]
fn decompose_diagonal() {
    let a = single(diag(&[0.0, 1.0, 1.0]));
    let dec = irreducible_decompose(&a, 0).unwrap();
    assert_eq!(dec.blocks.len(), 2);
    assert_eq!(dec.blocks[0].tuple, MatrixTuple::point(&[0.0]));
    assert_eq!(dec.blocks[0].multiplicity, 1);
    assert_eq!(dec.blocks[1].tuple, MatrixTuple::point(&[1.0]));
    assert_eq!(dec.blocks[1].multiplicity, 2);
}

#[test]
fn equivalence_examples() {
    let mut r = rng(8);
    let x = generic_block(&mut r, 3, 4, false);
    let y = haar_conjugate(&mut r, &x);
    let eq = unitarily_equivalent(&x, &y).unwrap();
    assert_eq!(eq.decision, Decision::Yes);
    let u = eq.witness.unwrap();
    assert!(x.conjugate_by(&u).distance(&y) <= 1e-7 * y.scale());

    let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let hadamard = ComplexMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
    assert!(frob(&(&hadamard * pauli_x() * hadamard.adjoint() - pauli_z())) < 1e-15);
    let eq = unitarily_equivalent(&single(pauli_x()), &single(pauli_z())).unwrap();
    assert_eq!(eq.decision, Decision::Yes);
    let u = eq.witness.unwrap();
    assert!(frob(&(&u * pauli_x() * u.adjoint() - pauli_z())) < 1e-10);

    let eq = unitarily_equivalent(&single(diag(&[0.0, 1.0])), &single(diag(&[0.0, 2.0]))).unwrap();
    assert_eq!(eq.decision, Decision::No);
}

#[test]
fn equivalence_with_multiplicities() {
    let mut r = rng(21);
    let b = generic_block(&mut r, 2, 2, true);
    let c = generic_block(&mut r, 2, 3, false);
    let x = direct_sum(&[b.clone(), c.clone(), b.clone()]).unwrap();
    let y = haar_conjugate(&mut r, &direct_sum(&[c.clone(), b.clone(), b.clone()]).unwrap());
    assert_eq!(unitarily_equivalent(&x, &y).unwrap().decision, Decision::Yes);
    let z = haar_conjugate(&mut r, &direct_sum(&[c.clone(), b.clone(), c]).unwrap());
    assert_eq!(unitarily_equivalent(&x, &z).unwrap().decision, Decision::No);
}

#[test]
fn dedupe_examples() {
    let mut r = rng(2);
    let b = generic_block(&mut r, 2, 2, true);
    let b3 = direct_sum(&[b.clone(), b.clone(), b.clone()]).unwrap();
    let dd = dedupe_multiplicity(&irreducible_decompose(&b3, 0).unwrap());
    assert_eq!(unitarily_equivalent(&dd, &b).unwrap().decision, Decision::Yes);

    let dd = dedupe_multiplicity(&irreducible_decompose(&single(diag(&[0.0, 1.0, 1.0])), 0).unwrap());
    assert_eq!(dd, single(diag(&[0.0, 1.0])));

    let c = generic_block(&mut r, 2, 3, true);
    let free = direct_sum(&[b, c]).unwrap();
    let d1 = irreducible_decompose(&free, 0).unwrap();
    let again = irreducible_decompose(&dedupe_multiplicity(&d1), 0).unwrap();
    assert_eq!(again.size_multiplicities(), d1.size_multiplicities());
}

#[test]
fn decomposition_is_seed_deterministic() {
    let mut r = rng(4);
    let b = generic_block(&mut r, 2, 2, true);
    let a = haar_conjugate(&mut r, &direct_sum(&[b.clone(), b, MatrixTuple::point(&[0.3, 0.1])]).unwrap());
    assert_eq!(irreducible_decompose(&a, 17).unwrap(), irreducible_decompose(&a, 17).unwrap());
}

#[test]
fn tuple_json_round_trip() {
    let mut r = rng(1);
    let a = generic_block(&mut r, 2, 3, false);
    let j = serde_json::to_string(&a.to_json()).unwrap();
    assert_eq!(MatrixTuple::from_json(&serde_json::from_str(&j).unwrap()).unwrap(), a);
    let bad: TupleJson = serde_json::from_str(r#"{"d":2,"n":1,"matrices":[[[[0,0]]]]}"#).unwrap();
    assert!(MatrixTuple::from_json(&bad).is_err());
}

#[test]
fn constructor_errors() {
    assert!(matches!(MatrixTuple::new(vec![]), Err(Error::Empty(_))));
    assert!(matches!(MatrixTuple::new(vec![ComplexMatrix::zeros(2, 3)]), Err(Error::NonSquare { .. })));
    assert!(matches!(MatrixTuple::new(vec![identity(2), identity(3)]), Err(Error::DimensionMismatch(_))));
    let s = ComplexMatrix::from_row_slice(2, 2, &[ZERO, c64(1.0, 0.0), ZERO, ZERO]);
    assert!(matches!(MatrixTuple::hermitian(vec![s]), Err(Error::NotHermitian { .. })));
}

/// Random block-diagonal tuple conjugated by a Haar unitary, with the
/// planted `(size, multiplicity)` multiset.
fn planted(seed: u64) -> (MatrixTuple, Vec<(usize, usize)>) {
    let mut r = rng(seed);
    let d = r.random_range(1..=3);
    let herm = d > 1 && r.random_bool(0.5);
    let nblocks = r.random_range(1..=3);
    let mut parts = Vec::new();
    let mut want = Vec::new();
    for _ in 0..nblocks {
        let k = r.random_range(1..=3);
        let b = if k == 1 {
            MatrixTuple::point(&(0..d).map(|_| gaussian_real(&mut r)).collect::<Vec<_>>())
        } else {
            generic_block(&mut r, d, k, herm)
        };
        let m = r.random_range(1..=2);
        for _ in 0..m {
            parts.push(b.clone());
        }
        want.push((k, m));
    }
    want.sort_unstable();
    (haar_conjugate(&mut r, &direct_sum(&parts).unwrap()), want)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decomposition_recovers_planted_blocks(seed in 0u64..100_000) {
        let (a, want) = planted(seed);
        let dec = irreducible_decompose(&a, seed).unwrap();
        prop_assert_eq!(dec.size_multiplicities(), want);
        prop_assert!(dec.residual(&a) <= 1e-8 * a.scale());
        for b in &dec.blocks {
            prop_assert_eq!(commutant_dim(&b.tuple), 1);
        }
    }

    #[test]
    fn commutant_matches_oracle(seed in 0u64..100_000) {
        let (a, _) = planted(seed);
        prop_assume!(a.n() <= 6);
        prop_assert_eq!(commutant_dim(&a), commutant_dim_oracle(&a));
    }

    #[test]
    fn irreducible_iff_single_block(seed in 0u64..100_000) {
        let (a, _) = planted(seed);
        let dec = irreducible_decompose(&a, 0).unwrap();
        let single = dec.blocks.len() == 1 && dec.blocks[0].multiplicity == 1;
        prop_assert_eq!(commutant_dim(&a) == 1, single);
    }

    #[test]
    fn equivalence_is_an_equivalence_relation(seed in 0u64..100_000) {
        let (a, _) = planted(seed);
        let mut r = rng(seed ^ 0xabc);
        let b = haar_conjugate(&mut r, &a);
        let c = haar_conjugate(&mut r, &b);
        let (other, _) = planted(seed + 1);
        prop_assert_eq!(unitarily_equivalent(&a, &a).unwrap().decision, Decision::Yes);
        let ab = unitarily_equivalent(&a, &b).unwrap().decision;
        prop_assert_eq!(ab, unitarily_equivalent(&b, &a).unwrap().decision);
        prop_assert_eq!(ab, Decision::Yes);
        prop_assert_eq!(unitarily_equivalent(&a, &c).unwrap().decision, Decision::Yes);
        let ao = unitarily_equivalent(&a, &other).unwrap().decision;
        prop_assert_eq!(ao, unitarily_equivalent(&other, &a).unwrap().decision);
    }
}

