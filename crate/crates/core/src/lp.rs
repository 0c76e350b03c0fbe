//! Small dense linear programs on top of `minilp`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// `max cᵀx` subject to `lo ≤ x ≤ hi`, rows `aᵀx ≤ b` and rows `aᵀx = b`.
pub(crate) fn maximize(
    c: &[f64],
    bounds: &[(f64, f64)],
    le: &[(Vec<f64>, f64)],
    eq: &[(Vec<f64>, f64)],
) -> LpOutcome {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = c.iter().zip(bounds).map(|(&ci, &b)| p.add_var(ci, b)).collect();
    let mut add = |a: &[f64], op: ComparisonOp, rhs: f64| {
        let terms: Vec<_> = vars.iter().zip(a).filter(|(_, &v)| v != 0.0).map(|(&x, &v)| (x, v)).collect();
        p.add_constraint(terms.as_slice(), op, rhs);
    };
    for (a, b) in le {
        add(a, ComparisonOp::Le, *b);
    }
    for (a, b) in eq {
        add(a, ComparisonOp::Eq, *b);
    }
    match p.solve() {
        Ok(sol) => {
            let x: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
            // minilp can report a free variable at infinity as optimal.
            if !sol.objective().is_finite() || x.iter().any(|v| !v.is_finite()) {
                return LpOutcome::Unbounded;
            }
            LpOutcome::Optimal { value: sol.objective(), x }
        }
        Err(minilp::Error::Infeasible) => LpOutcome::Infeasible,
        Err(minilp::Error::Unbounded) => LpOutcome::Unbounded,
    }
}

/// Barycentric weights `λ ≥ 0`, `Σλ = 1`, `Σ λ_j q_j = p`, if any exist.
pub(crate) fn convex_weights(points: &[Vec<f64>], p: &[f64]) -> Option<Vec<f64>> {
    let k = points.len();
    let mut eq: Vec<(Vec<f64>, f64)> = (0..p.len()).map(|i| (points.iter().map(|q| q[i]).collect(), p[i])).collect();
    eq.push((vec![1.0; k], 1.0));
    match maximize(&vec![0.0; k], &vec![(0.0, f64::INFINITY); k], &[], &eq) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // max x + y, x + 2y ≤ 4, 3x + y ≤ 6 → (8/5, 6/5)
        let out = maximize(&[1.0, 1.0], &[(0.0, f64::INFINITY); 2], &[(vec![1.0, 2.0], 4.0), (vec![3.0, 1.0], 6.0)], &[]);
        let LpOutcome::Optimal { value, x } = out else { panic!("{out:?}") };
        assert!((value - 2.8).abs() < 1e-9);
        assert!((x[0] - 1.6).abs() < 1e-9 && (x[1] - 1.2).abs() < 1e-9);
        assert_eq!(maximize(&[1.0], &[(0.0, f64::INFINITY)], &[], &[]), LpOutcome::Unbounded);
        assert_eq!(maximize(&[1.0], &[(0.0, 1.0)], &[(vec![-1.0], -2.0)], &[]), LpOutcome::Infeasible);
        let free = [(f64::NEG_INFINITY, f64::INFINITY); 2];
        let strip = [(vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], 1.0), (vec![0.0, 1.0], 1.0)];
        assert_eq!(maximize(&[0.0, -1.0], &free, &strip, &[]), LpOutcome::Unbounded);
    }

    #[test]
    fn weights_of_centroid() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = convex_weights(&tri, &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(w.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-9));
        assert!(convex_weights(&tri, &[1.0, 1.0]).is_none());
    }
}
