use super::*;
use crate::mrange::{level1_outer_polytope, member};
use crate::numlin::{c64, diag, pauli_x, pauli_z, random_unitary, rng};
use crate::tuples::direct_sum;
use crate::tuples::random::generic_block;
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn d01() -> MatrixTuple {
    MatrixTuple::new(vec![diag(&[0.0, 1.0])]).unwrap()
}

fn pauli_pair(s: f64) -> MatrixTuple {
    MatrixTuple::new(vec![pauli_x() * c64(s, 0.0), pauli_z() * c64(s, 0.0)]).unwrap()
}

fn triangle() -> Vec<Vec<f64>> {
    let h = 3f64.sqrt() / 2.0;
    vec![vec![1.0, 0.0], vec![-0.5, h], vec![-0.5, -h]]
}

/// Triangle vertices plus a small Pauli disk inside the triangle.
fn triangle_with_disk() -> MatrixTuple {
    let n = MatrixTuple::diagonal(&triangle()).unwrap();
    direct_sum(&[n, pauli_pair(0.4)]).unwrap()
}

#[test]
fn interval_endpoints_and_midpoint() {
    for e in [0.0, 1.0] {
        let v = absolute_extreme(&d01(), &MatrixTuple::point(&[e]), &tol()).unwrap();
        assert_eq!((v.euclidean, v.absolute), (Decision::Yes, Decision::Yes), "{e}: {:?}", v.probes);
    }
    let x = MatrixTuple::point(&[0.5]);
    let v = absolute_extreme(&d01(), &x, &tol()).unwrap();
    assert_eq!((v.euclidean, v.absolute), (Decision::No, Decision::No));
    let dil = v.dilation.unwrap();
    assert_eq!(dil.n(), 2);
    assert!((dil.get(0)[(0, 0)].re - 0.5).abs() < 1e-6);
    assert!(dil.get(0)[(0, 1)].norm() > 1e-3);
}

#[test]
fn euclidean_direction_is_two_sided() {
    let a = pauli_pair(1.0);
    let x = MatrixTuple::point(&[0.2, -0.1]);
    let v = euclidean_extreme(&a, &x, &tol()).unwrap();
    assert_eq!(v.decision, Decision::No);
    let y = v.direction.unwrap();
    assert!(y.norm() > 1e-3);
    for s in [1.0, -1.0] {
        let z = MatrixTuple::new(x.matrices().iter().zip(y.matrices()).map(|(p, q)| p + q * c64(s, 0.0)).collect()).unwrap();
        assert_ne!(member(&a, &z).unwrap().decision, Decision::No);
    }
}

/// Points of the unit circle are extreme in `W₁`, but a unitary whose first
/// column is the compressing state dilates them with a nonzero corner.
#[test]
fn circle_points_are_euclidean_not_absolute() {
    let a = pauli_pair(1.0);
    let t = 0.7f64;
    let x = MatrixTuple::point(&[t.cos(), t.sin()]);
    let v = absolute_extreme(&a, &x, &tol()).unwrap();
    assert_eq!((v.euclidean, v.absolute), (Decision::Yes, Decision::No), "{:?}", v.probes);
    let dil = v.dilation.unwrap();
    assert!(member(&a, &dil).unwrap().decision.is_yes());
}

#[test]
fn irreducible_tuple_is_its_own_boundary() {
    let a = pauli_pair(1.0);
    let v = absolute_extreme(&a, &a, &tol()).unwrap();
    assert!(v.irreducible);
    assert_eq!((v.euclidean, v.absolute), (Decision::Yes, Decision::Yes));
    assert_eq!(shilov_trivial(&a, &tol()).unwrap().decision, Decision::Yes);
}

#[test]
fn reducible_target_is_not_absolute() {
    let a = pauli_pair(1.0);
    let x = direct_sum(&[MatrixTuple::point(&[1.0, 0.0]), MatrixTuple::point(&[0.0, 1.0])]).unwrap();
    let v = absolute_extreme(&a, &x, &tol()).unwrap();
    assert!(!v.irreducible);
    assert_eq!(v.commutant_dim, 2);
    assert_eq!(v.absolute, Decision::No);
}

#[test]
fn interior_block_is_not_boundary() {
    let a = triangle_with_disk();
    let blocks = boundary_blocks(&a, &tol()).unwrap();
    assert_eq!(blocks.len(), 4);
    for b in &blocks {
        let expect = if b.block.n() == 1 { Decision::Yes } else { Decision::No };
        assert_eq!(b.is_boundary, expect, "{:?}", b.block);
    }
    let s = shilov_trivial(&a, &tol()).unwrap();
    assert_eq!(s.decision, Decision::No);
    assert_eq!(s.blocks[s.non_boundary.unwrap()].block.n(), 2);
}

#[test]
fn non_member_target_is_rejected() {
    let x = MatrixTuple::point(&[2.0]);
    assert!(matches!(absolute_extreme(&d01(), &x, &tol()), Err(Error::Precondition(_))));
}

#[test]
fn wmin_classification() {
    let k = Polytope::from_vertices(triangle()).unwrap();
    let t = triangle();
    assert_eq!(wmin_classify(&k, &MatrixTuple::point(&t[1]), &tol()).unwrap(), WminClass::Vertex { aep: true, crucial: true });
    assert_eq!(wmin_classify(&k, &MatrixTuple::point(&[0.0, 0.0]), &tol()).unwrap(), WminClass::MemberNotExtreme);
    assert_eq!(wmin_classify(&k, &MatrixTuple::point(&[0.9, 0.5]), &tol()).unwrap(), WminClass::NotMember);
    let two = MatrixTuple::diagonal(&[t[0].clone(), t[2].clone()]).unwrap();
    assert_eq!(wmin_classify(&k, &two, &tol()).unwrap(), WminClass::MemberNotExtreme);
    assert_eq!(wmin_classify(&k, &pauli_pair(0.4), &tol()).unwrap(), WminClass::MemberNotExtreme);
}

/// Vertices of a dense level-1 outer polytope that belong to `W₁(A)` are
/// absolute extreme points.
#[test]
fn outer_polytope_member_vertices_are_absolute() {
    let a = triangle_with_disk();
    let dirs: Vec<Vec<f64>> = (0..24)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 24.0 + 0.1;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let p = level1_outer_polytope(&a, &dirs).unwrap();
    let mut checked = 0;
    for v in p.vertex_rep().unwrap() {
        let x = MatrixTuple::point(&v);
        if member(&a, &x).unwrap().decision != Decision::Yes {
            continue;
        }
        assert_eq!(absolute_extreme(&a, &x, &tol()).unwrap().absolute, Decision::Yes, "{v:?}");
        checked += 1;
    }
    assert!(checked >= 3);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn absolute_implies_euclidean(seed in 0u64..10_000, own in proptest::bool::ANY) {
        let mut r = rng(seed);
        let a = generic_block(&mut r, 2, 3, true);
        let x = if own { a.clone() } else { crate::mrange::random_ucp_image(&mut r, &a, 2) };
        let v = absolute_extreme(&a, &x, &tol()).unwrap();
        prop_assert!(v.absolute != Decision::Yes || v.euclidean == Decision::Yes, "{v:?}");
        if own {
            prop_assert_eq!(v.absolute, Decision::Yes);
        }
    }

    #[test]
    fn unitary_invariance(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let a = generic_block(&mut r, 2, 3, true);
        let x = crate::mrange::random_ucp_image(&mut r, &a, 2);
        let u = random_unitary(&mut r, 3);
        let w = random_unitary(&mut r, 2);
        let v1 = absolute_extreme(&a, &x, &tol()).unwrap();
        let v2 = absolute_extreme(&a.conjugate_by(&u), &x.conjugate_by(&w), &tol()).unwrap();
        prop_assert_eq!((v1.euclidean, v1.absolute), (v2.euclidean, v2.absolute));
    }
}

#[test]
fn zero_compression_is_not_absolute() {
    let a = pauli_pair(1.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = ComplexMatrix::from_column_slice(2, 1, &[c64(s, 0.0), c64(0.0, s)]);
    let zero = crate::tuples::compress(&a, &x).unwrap();
    assert!(zero.norm() < 1e-12);
    let v = absolute_extreme(&a, &zero, &tol()).unwrap();
    assert_eq!((v.euclidean, v.absolute), (Decision::No, Decision::No));
}
