use super::*;
use crate::numlin::{diag, pauli_x, pauli_z, random_unitary};
use crate::sdp::check_certificate;
use crate::tuples::random::generic_block;
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn pauli_pair() -> MatrixTuple {
    MatrixTuple::new(vec![pauli_x(), pauli_z()]).unwrap()
}

fn d01() -> MatrixTuple {
    MatrixTuple::new(vec![diag(&[0.0, 1.0])]).unwrap()
}

fn assert_member(v: &MembershipVerdict, amb: &Ambient, x: &MatrixTuple) {
    assert_eq!(v.decision, Decision::Yes, "{:?}", v.margins);
    let w = v.witness.as_ref().unwrap();
    assert!(w.verify(amb, x).unwrap().valid(&tol(), x));
}

fn assert_separated(v: &MembershipVerdict, amb: &Ambient, x: &MatrixTuple) {
    assert_eq!(v.decision, Decision::No, "{:?}", v.margins);
    assert!(v.certificate.as_ref().unwrap().separates(amb, x, &tol()));
}

#[test]
fn midpoint_of_interval_is_member() {
    let x = MatrixTuple::point(&[0.5]);
    let v = member(&d01(), &x).unwrap();
    assert_member(&v, &Ambient::of(&d01()), &x);
}

#[test]
fn point_outside_interval_is_not_member() {
    let x = MatrixTuple::point(&[2.0]);
    let v = member(&d01(), &x).unwrap();
    assert_separated(&v, &Ambient::of(&d01()), &x);
}

#[test]
fn choi_coefficients_pair_to_traces() {
    // tr(F Φ(B)) computed through the realified coefficient matches the
    // direct formula on a random Choi matrix.
    let mut r = rng(4);
    let (k, n) = (2, 3);
    let g = crate::numlin::ginibre(&mut r, k * n, k * n);
    let c = &g * g.adjoint();
    let z = crate::numlin::realify_matrix(&c);
    let b = crate::numlin::random_hermitian(&mut r, k);
    for f in hermitian_basis(n) {
        let direct = (f.matrix(n) * apply_choi(&c, &b)).trace();
        let via = choi_coefficient(&b, f, n).dot(&z);
        assert!((direct.re - via).abs() < 1e-12 && direct.im.abs() < 1e-12, "{f:?}");
        assert!((f.pair(&apply_choi(&c, &b)) - via).abs() < 1e-12);
    }
    assert!((complexify_choi(&z) - &c).norm() < 1e-12);
}

#[test]
fn compression_is_member() {
    let mut r = rng(1);
    let a = generic_block(&mut r, 2, 4, true);
    let v = random_isometry(&mut r, 4, 2);
    let x = crate::tuples::compress(&a, &v).unwrap();
    let out = member(&a, &x).unwrap();
    assert_member(&out, &Ambient::of(&a), &x);
}

#[test]
fn outside_point_needs_sdp_certificate() {
    // W₁ of the Pauli pair is the unit disk; (0.72, 0.72) passes every axis
    // test but lies outside it.
    let x = MatrixTuple::point(&[0.72, 0.72]);
    let amb = Ambient::of(&pauli_pair());
    let v = member_in(&amb, &x, &tol()).unwrap();
    assert_separated(&v, &amb, &x);
    let inside = MatrixTuple::point(&[0.6, 0.6]);
    assert_member(&member_in(&amb, &inside, &tol()).unwrap(), &amb, &inside);
}

#[test]
fn not_member_dual_passes_kernel_check() {
    let x = MatrixTuple::point(&[0.72, 0.72]);
    let amb = Ambient::of(&pauli_pair());
    let v = member_in(&amb, &x, &tol()).unwrap();
    let Some(Certificate::Functional(f)) = &v.certificate else { panic!("{v:?}") };
    let inst = membership_sdp(&amb, &x).unwrap();
    let out = crate::sdp::SdpOutcome {
        status: SdpStatus::Infeasible,
        witness: None,
        certificate: Some(f.dual.clone()),
        diagnostics: Default::default(),
    };
    assert!(check_certificate(&inst, &out).unwrap().infeasibility_valid(&solve_profile(&tol())));
}

#[test]
fn contains_itself_and_doubles() {
    let a = pauli_pair();
    let aa = direct_sum(&[a.clone(), a.clone()]).unwrap();
    let amb = Ambient::of(&a);
    assert_member(&contains(&a, &a).unwrap(), &amb, &a);
    assert_member(&contains(&a, &aa).unwrap(), &amb, &aa);
    assert_member(&contains(&aa, &a).unwrap(), &Ambient::of(&aa), &a);
}

#[test]
fn wider_interval_not_contained() {
    let b = MatrixTuple::new(vec![diag(&[0.0, 2.0])]).unwrap();
    let v = contains(&d01(), &b).unwrap();
    assert_separated(&v, &Ambient::of(&d01()), &b);
}

#[test]
fn equality_examples() {
    let mut r = rng(3);
    let a = generic_block(&mut r, 2, 3, true);
    let u = random_unitary(&mut r, 3);
    assert_eq!(equal(&a, &a.conjugate_by(&u)).unwrap().decision, Decision::Yes);
    let aa = direct_sum(&[a.clone(), a.clone()]).unwrap();
    assert_eq!(equal(&a, &aa).unwrap().decision, Decision::Yes);
    let half = MatrixTuple::new(vec![diag(&[0.0, 0.5])]).unwrap();
    assert_eq!(equal(&d01(), &half).unwrap().decision, Decision::No);
}

#[test]
fn support_examples() {
    let a = pauli_pair();
    assert!((support_level1(&a, &[1.0, 0.0]).unwrap().0 - 1.0).abs() < 1e-12);
    assert!(support_level1(&d01(), &[-1.0]).unwrap().0.abs() < 1e-12);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // λ_max(u₁σ_x + u₂σ_z) = ‖u‖
    let (v, state) = support_level1(&a, &[s, s]).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let m = pauli_x() * c64(s, 0.0) + pauli_z() * c64(s, 0.0);
    assert!(((state.adjoint() * m * &state)[(0, 0)].re - 1.0).abs() < 1e-12);
    assert!(matches!(support_level1(&a, &[0.0, 0.0]), Err(Error::DegenerateDirections)));
}

#[test]
fn outer_polytope_examples() {
    let p = level1_outer_polytope(&d01(), &[vec![1.0], vec![-1.0]]).unwrap();
    let mut v = p.vertex_rep().unwrap();
    v.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert!(v[0][0].abs() < 1e-12 && (v[1][0] - 1.0).abs() < 1e-12);

    let dirs: Vec<Vec<f64>> = (0..64)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let p = level1_outer_polytope(&pauli_pair(), &dirs).unwrap();
    let bound = 1.0 / (std::f64::consts::PI / 64.0).cos();
    let verts = p.vertex_rep().unwrap();
    assert_eq!(verts.len(), 64);
    for v in &verts {
        let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
        assert!(r >= 1.0 - 1e-9 && r <= bound + 1e-9, "{r}");
    }

    let c = MatrixTuple::point(&[0.3, -0.2]);
    let p = level1_outer_polytope(&c, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]).unwrap();
    assert!(p.contains(&[0.3, -0.2], 1e-12).unwrap());
    assert!(matches!(level1_outer_polytope(&c, &dirs[..2]), Err(Error::DegenerateDirections)));
    assert!(matches!(level1_outer_polytope(&c, &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]]), Err(Error::DegenerateDirections)));
}

#[test]
fn non_hermitian_tuples() {
    // A single non-normal matrix; its compressions are members.
    let mut r = rng(11);
    let a = generic_block(&mut r, 1, 3, false);
    let x = random_ucp_image(&mut r, &a, 2);
    let amb = Ambient::of(&a);
    assert_member(&member_in(&amb, &x, &tol()).unwrap(), &amb, &x);
    let far = MatrixTuple::new(vec![x.get(0) * c64(0.0, 5.0)]).unwrap();
    assert_separated(&member_in(&amb, &far, &tol()).unwrap(), &amb, &far);
}

#[test]
fn arity_mismatch() {
    assert!(matches!(member(&pauli_pair(), &d01()), Err(Error::MixedArity(2, 1))));
}

fn random_hermitian_tuple(seed: u64, d: usize, n: usize) -> MatrixTuple {
    let mut r = rng(seed);
    generic_block(&mut r, d, n, true)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn monotone_under_compression(seed in 0u64..10_000, n in 2usize..5, k in 1usize..4) {
        let a = random_hermitian_tuple(seed, 2, n);
        let mut r = rng(seed + 1);
        let v = random_isometry(&mut r, n, k.min(n));
        let b = crate::tuples::compress(&a, &v).unwrap();
        prop_assert_eq!(contains(&a, &b).unwrap().decision, Decision::Yes);
    }

    #[test]
    fn unitary_invariance(seed in 0u64..10_000, s in 0.6f64..1.6) {
        let a = random_hermitian_tuple(seed, 2, 3);
        let mut r = rng(seed + 2);
        let x = random_ucp_image(&mut r, &a, 2);
        let x = MatrixTuple::new(x.matrices().iter().map(|m| m * c64(s, 0.0)).collect()).unwrap();
        let u = random_unitary(&mut r, 3);
        let v1 = member(&a, &x).unwrap().decision;
        let v2 = member(&a.conjugate_by(&u), &x).unwrap().decision;
        prop_assert!(v1 == Decision::Indeterminate || v2 == Decision::Indeterminate || v1 == v2);
        prop_assert_eq!(v1, v2);
    }

    #[test]
    fn level_consistency(seed in 0u64..10_000) {
        let a = random_hermitian_tuple(seed, 2, 3);
        let mut r = rng(seed + 3);
        let x = random_ucp_image(&mut r, &a, 2);
        prop_assert_eq!(member(&a, &x).unwrap().decision, Decision::Yes);
        let xx = direct_sum(&[x.clone(), x]).unwrap();
        prop_assert_eq!(member(&a, &xx).unwrap().decision, Decision::Yes);
    }
}

/// Every NotMember functional is positive at the target and non-positive on
/// 50 random UCP images of the ambient.
#[test]
fn separating_functionals_are_sound() {
    let mut checked = 0;
    for seed in 0..12u64 {
        let a = random_hermitian_tuple(100 + seed, 2, 3);
        let mut r = rng(200 + seed);
        let x = random_ucp_image(&mut r, &a, 2);
        let x = MatrixTuple::new(x.matrices().iter().map(|m| m * c64(1.4, 0.0)).collect()).unwrap();
        let amb = Ambient::of(&a);
        let v = member_in(&amb, &x, &tol()).unwrap();
        let Some(Certificate::Functional(f)) = v.certificate else { continue };
        assert!(f.eval(&x) > 0.5);
        for _ in 0..50 {
            let y = random_ucp_image(&mut r, &a, 2);
            assert!(f.eval(&y) <= f.range_bound + 1e-9, "{} vs {}", f.eval(&y), f.range_bound);
        }
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} functional certificates");
}
