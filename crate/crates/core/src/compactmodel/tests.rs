use super::*;
use crate::extremal::absolute_extreme;
use crate::numlin::{diag, pauli_x, pauli_z};
use crate::tuples::compress;
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn pauli_pair() -> MatrixTuple {
    MatrixTuple::new(vec![pauli_x(), pauli_z()]).unwrap()
}

fn block(t: MatrixTuple) -> ModelBlock {
    ModelBlock { tuple: t, multiplicity: 1 }
}

fn diagonal_tail(d: usize, c: f64, p: f64) -> TruncationSequence {
    TruncationSequence::Table {
        d,
        entries: (0..d).map(|k| BandRule { coordinate: k, offset: 0, scale: [c, 0.0], power: p }).collect(),
    }
}

fn small_budget() -> ProbeBudget {
    ProbeBudget { ladder: vec![4, 8], restarts: 8, copies: 2, directions: 8, seed: 1 }
}

#[test]
fn zero_compression_examples() {
    let a = MatrixTuple::new(vec![diag(&[-1.0, 1.0])]).unwrap();
    let z = zero_compression_probe(&a, 1, 16, 0);
    let ZeroCompression::Found { vectors, .. } = &z else { panic!("{z:?}") };
    let (m, n) = zero_compression_residual(&a, vectors);
    assert!(m <= 1e-9 && n <= 1e-12);
    // Balanced state: equal weight on both eigenvectors.
    assert!((vectors[0][0].norm() - vectors[0][1].norm()).abs() < 1e-6);

    let one = MatrixTuple::point(&[1.0]);
    for copies in [1, 3] {
        assert!(!zero_compression_probe(&one, copies, 8, 0).found());
    }

    let z = zero_compression_probe(&pauli_pair(), 1, 16, 0);
    let ZeroCompression::Found { vectors, .. } = &z else { panic!("{z:?}") };
    let x = ComplexMatrix::from_column_slice(2, 1, vectors[0].as_slice());
    assert!(compress(&pauli_pair(), &x).unwrap().norm() < 1e-9);
}

#[test]
fn closed_form_pauli_zero_state() {
    // x = (e₁ + i e₂)/√2: ⟨σ_x x, x⟩ = Re(i) = 0 and ⟨σ_z x, x⟩ = ½ − ½ = 0.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = DVector::from_vec(vec![c64(s, 0.0), c64(0.0, s)]);
    let (m, n) = zero_compression_residual(&pauli_pair(), &[x]);
    assert!(m < 1e-15 && n < 1e-15);
}

#[test]
fn zero_compression_rules_out_absolute_zero() {
    let a = pauli_pair();
    let z = zero_compression_probe(&a, 1, 16, 3);
    assert!(z.found());
    let v = absolute_extreme(&a, &MatrixTuple::point(&[0.0, 0.0]), &tol()).unwrap();
    assert_eq!(v.absolute, Decision::No);
}

#[test]
fn truncations_are_nested_corners() {
    let t = TruncationSequence::Table {
        d: 2,
        entries: vec![
            BandRule { coordinate: 0, offset: 1, scale: [1.0, 0.0], power: 1.0 },
            BandRule { coordinate: 0, offset: -1, scale: [1.0, 0.0], power: 1.0 },
            BandRule { coordinate: 1, offset: 0, scale: [0.5, 0.5], power: 2.0 },
        ],
    };
    let small = t.truncation(5);
    let big = t.truncation(9);
    for k in 0..2 {
        assert!((big.get(k).view((0, 0), (5, 5)) - small.get(k)).norm() < 1e-15);
    }
    assert_eq!(small.get(0)[(2, 3)], c64(1.0 / 3.0, 0.0));
    assert!(t.decay_claim(100) < t.decay_claim(10));
}

#[test]
fn nonsingular_examples() {
    let fin = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::Finite(2), None).unwrap();
    let v = nonsingular(&fin, &small_budget(), &tol()).unwrap();
    assert_eq!((v.decision, v.rule), (Decision::Yes, Some(Rule::FiniteDimensional)));

    let inf = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::Infinite, None).unwrap();
    let v = nonsingular(&inf, &small_budget(), &tol()).unwrap();
    assert_eq!((v.decision, v.rule), (Decision::Yes, Some(Rule::FiniteDimensionalSummand)));
    assert_eq!(v.summand_equality, Some(Decision::Yes));

    // Positive decaying diagonal: 0 stays outside every truncated W₁.
    let shift = CompactModel::new(vec![], ZeroSummand::None, Some(diagonal_tail(1, 1.0, 1.0))).unwrap();
    let v = nonsingular(&shift, &small_budget(), &tol()).unwrap();
    assert_eq!(v.decision, Decision::Indeterminate);
    assert!(v.rule.is_none());
    assert_eq!(v.isolation.len(), 2);
    assert!(v.isolation.iter().all(|e| !e.zero_in_hull && e.zero_distance > 0.05));
    assert!(matches!(v.zero_compression, Some(ZeroCompression::NotFound { .. })));

    // A Pauli block puts 0 inside the hull of the other support points.
    let mixed = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::None, Some(diagonal_tail(2, 0.5, 1.0))).unwrap();
    let v = nonsingular(&mixed, &small_budget(), &tol()).unwrap();
    assert_eq!((v.decision, v.rule), (Decision::Yes, Some(Rule::ZeroNotIsolated)));

    // Opposite signs on the tail alone: the zero compression fires first or the hull does.
    let signed = TruncationSequence::Table {
        d: 1,
        entries: vec![BandRule { coordinate: 0, offset: 0, scale: [1.0, 0.0], power: 1.0 }, BandRule { coordinate: 0, offset: 1, scale: [2.0, 0.0], power: 1.0 }],
    };
    let m = CompactModel::new(vec![], ZeroSummand::None, Some(signed)).unwrap();
    let v = nonsingular(&m, &small_budget(), &tol()).unwrap();
    assert_ne!(v.decision, Decision::No);
}

#[test]
fn structure_examples() {
    let fin = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::None, None).unwrap();
    assert!(singular_structure(&fin, &[8], &tol()).unwrap().is_none());

    let tail_only = CompactModel::new(vec![], ZeroSummand::None, Some(diagonal_tail(2, 0.3, 1.0))).unwrap();
    let s = singular_structure(&tail_only, &[8], &tol()).unwrap().unwrap();
    assert!(s.candidates.is_none() && s.evidence.is_empty());

    // A small decaying diagonal inside the Pauli disk.
    let absorbed = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::None, Some(diagonal_tail(2, 0.3, 1.0))).unwrap();
    let s = singular_structure(&absorbed, &[8, 16, 32], &tol()).unwrap().unwrap();
    assert_eq!(s.candidates, Some(vec![0]));
    assert_eq!(s.evidence.len(), 3);
    for e in &s.evidence {
        assert_eq!(e.block_extreme, vec![Decision::Yes]);
        assert_eq!(e.claim, Decision::Yes, "{e:?}");
    }
}

#[test]
fn model_minimal_examples() {
    let inf = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::Infinite, None).unwrap();
    assert_eq!(model_minimal(&inf, &[8], &tol()).unwrap(), Decision::No);

    let d01 = MatrixTuple::new(vec![diag(&[0.0, 1.0])]).unwrap();
    let fin = CompactModel::new(vec![block(d01)], ZeroSummand::None, None).unwrap();
    assert_eq!(model_minimal(&fin, &[8], &tol()).unwrap(), Decision::Yes);

    let twice = CompactModel::new(vec![ModelBlock { tuple: pauli_pair(), multiplicity: 2 }], ZeroSummand::None, None).unwrap();
    assert_eq!(model_minimal(&twice, &[8], &tol()).unwrap(), Decision::No);

    let tail_only = CompactModel::new(vec![], ZeroSummand::None, Some(diagonal_tail(1, 1.0, 1.0))).unwrap();
    assert_eq!(model_minimal(&tail_only, &[8], &tol()).unwrap(), Decision::Indeterminate);

    // The point 0.5 lies in the range of the tail corner diag(1, 1/2, …).
    let absorbed = CompactModel::new(vec![block(MatrixTuple::point(&[0.5]))], ZeroSummand::None, Some(diagonal_tail(1, 1.0, 1.0))).unwrap();
    assert_eq!(model_minimal(&absorbed, &[8], &tol()).unwrap(), Decision::No);
}

#[test]
fn json_shape() {
    let m = CompactModel::new(vec![block(pauli_pair())], ZeroSummand::Finite(3), Some(diagonal_tail(2, 1.0, 2.0))).unwrap();
    let s = serde_json::to_value(m.to_json()).unwrap();
    assert_eq!(s["zero"], serde_json::json!({"finite": 3}));
    assert_eq!(s["tail"]["kind"], "table");
    let back = CompactModel::from_json(&serde_json::from_value(s).unwrap()).unwrap();
    assert_eq!(back, m);
    let inf: ZeroSummand = serde_json::from_str("\"infinite\"").unwrap();
    assert_eq!(inf, ZeroSummand::Infinite);
    assert!(CompactModel::new(vec![], ZeroSummand::Infinite, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn finite_models_are_nonsingular(seed in 0u64..10_000, zeros in 0usize..3, infinite in proptest::bool::ANY) {
        let mut r = rng(seed);
        let b = crate::tuples::random::generic_block(&mut r, 2, 2, true);
        let zero = if infinite { ZeroSummand::Infinite } else if zeros == 0 { ZeroSummand::None } else { ZeroSummand::Finite(zeros) };
        let m = CompactModel::new(vec![block(b)], zero, None).unwrap();
        let v = nonsingular(&m, &small_budget(), &tol()).unwrap();
        prop_assert_eq!(v.decision, Decision::Yes);
    }

    #[test]
    fn found_compressions_reverify(seed in 0u64..10_000, copies in 1usize..4) {
        let mut r = rng(seed);
        let a = crate::tuples::random::generic_block(&mut r, 2, 3, true);
        if let ZeroCompression::Found { vectors, .. } = zero_compression_probe(&a, copies, 8, seed) {
            let (m, n) = zero_compression_residual(&a, &vectors);
            prop_assert!(m <= ZERO_COMPRESSION_TOL && n <= NORM_TOL);
        }
    }
}
