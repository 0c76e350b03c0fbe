//! Small dense semidefinite programs over block-diagonal real symmetric
//! variables.
//!
//! ```text
//! find / maximize   Σ_b ⟨F_b, X_b⟩
//! subject to        Σ_b ⟨C_kb, X_b⟩ = b_k   for every constraint k
//!                   X_b ⪰ 0                 for every block b
//! ```
//!
//! Infeasibility is certified by a dual ray `y` with `⟨b, y⟩ > 0` and
//! `−Σ_k y_k C_k ⪰ 0`: pairing any feasible `X` with that slack gives
//! `0 ≥ ⟨Σ y_k C_k, X⟩ = ⟨b, y⟩ > 0`.
//!
//! Complex Hermitian data is realified by callers before it gets here; the
//! solver only sees real symmetric blocks.

mod ipm;
mod presolve;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{sym_lambda_min, RealMatrix};

pub use ipm::solve;

/// Symmetric sparse matrix stored by its upper triangle, entries unique and
/// sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSym {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds from `(i, j, v)` triplets meaning `M[i,j] = M[j,i] += v` for
    /// `i ≠ j` and `M[i,i] += v` on the diagonal.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "entry ({i},{j}) outside {dim}x{dim}");
            let key = if i <= j { (i, j) } else { (j, i) };
            *acc.entry(key).or_insert(0.0) += v;
        }
        let entries = acc.into_iter().filter(|(_, v)| *v != 0.0).map(|((i, j), v)| (i, j, v)).collect();
        SparseSym { dim, entries }
    }

    pub fn from_dense(m: &RealMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::IllFormed("coefficient block is not square".into()));
        }
        let n = m.nrows();
        let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        let mut t = Vec::new();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::IllFormed(format!("coefficient block not symmetric at ({i},{j})")));
                }
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Ok(SparseSym::from_triplets(n, t))
    }

    pub fn identity(dim: usize) -> Self {
        SparseSym::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)))
    }

    pub fn to_dense(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    /// `⟨self, Y⟩ = tr(self · Y)` for a dense `Y` (not necessarily symmetric).
    pub fn dot(&self, y: &RealMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * y[(i, i)] } else { v * (y[(i, j)] + y[(j, i)]) })
            .sum()
    }

    pub fn frob_sq(&self) -> f64 {
        self.entries.iter().map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum()
    }

    pub(crate) fn scaled(&self, s: f64) -> SparseSym {
        SparseSym { dim: self.dim, entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect() }
    }

    /// `⟨self, other⟩` for two sparse symmetric matrices.
    pub(crate) fn inner(&self, other: &SparseSym) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut s = 0.0;
        while a < self.entries.len() && b < other.entries.len() {
            let (i, j, v) = self.entries[a];
            let (k, l, w) = other.entries[b];
            match (i, j).cmp(&(k, l)) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s += if i == j { v * w } else { 2.0 * v * w };
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }
}

/// One linear equality `Σ_b ⟨C_b, X_b⟩ = rhs`. Blocks missing from `terms`
/// have a zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseSym)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, SparseSym)>, rhs: f64) -> Self {
        Constraint { terms, rhs }
    }

    pub fn value(&self, x: &[RealMatrix]) -> f64 {
        self.terms.iter().map(|(b, c)| c.dot(&x[*b])).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Feasibility,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance {
    pub blocks: Vec<usize>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Vec<(usize, SparseSym)>>,
    pub sense: Sense,
}

impl SdpInstance {
    pub fn feasibility(blocks: Vec<usize>, constraints: Vec<Constraint>) -> Self {
        SdpInstance { blocks, constraints, objective: None, sense: Sense::Feasibility }
    }

    pub fn maximize(blocks: Vec<usize>, constraints: Vec<Constraint>, objective: Vec<(usize, SparseSym)>) -> Self {
        SdpInstance { blocks, constraints, objective: Some(objective), sense: Sense::Maximize }
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.iter().any(|&n| n == 0) {
            return Err(Error::IllFormed("need at least one nonempty block".into()));
        }
        let check_terms = |terms: &[(usize, SparseSym)]| -> Result<()> {
            for (b, c) in terms {
                let Some(&n) = self.blocks.get(*b) else {
                    return Err(Error::IllFormed(format!("block index {b} out of range")));
                };
                if c.dim() != n {
                    return Err(Error::IllFormed(format!("coefficient of size {} for block of size {n}", c.dim())));
                }
                if c.entries().iter().any(|e| !e.2.is_finite()) {
                    return Err(Error::NonFinite);
                }
            }
            Ok(())
        };
        for c in &self.constraints {
            check_terms(&c.terms)?;
            if !c.rhs.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        match (&self.objective, self.sense) {
            (Some(o), _) => check_terms(o)?,
            (None, Sense::Maximize) => return Err(Error::IllFormed("maximize without objective".into())),
            (None, Sense::Feasibility) => {}
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[RealMatrix]) -> f64 {
        self.objective.as_ref().map_or(0.0, |o| o.iter().map(|(b, c)| c.dot(&x[*b])).sum())
    }

    /// `Σ_k y_k C_k` per block.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<RealMatrix> {
        let mut s: Vec<RealMatrix> = self.blocks.iter().map(|&n| RealMatrix::zeros(n, n)).collect();
        for (c, &yk) in self.constraints.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for (b, m) in &c.terms {
                for &(i, j, v) in m.entries() {
                    s[*b][(i, j)] += yk * v;
                    if i != j {
                        s[*b][(j, i)] += yk * v;
                    }
                }
            }
        }
        s
    }
}

/// Numerical tolerances shared by the solver and every downstream decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Constraint residual accepted for a witness.
    pub feas: f64,
    /// Eigenvalue slack accepted for PSD checks.
    pub psd: f64,
    /// Relative duality gap for optimisation problems.
    pub gap: f64,
    pub max_iter: usize,
    /// Cap on the total real dimension of the variable.
    pub dim_cap: usize,
    /// Cap on the number of equality constraints (Schur complement size).
    pub constraint_cap: usize,
    /// Width of the indeterminate band, as a multiple of the base tolerance.
    pub band: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            feas: 1e-7,
            psd: 1e-8,
            gap: 1e-7,
            max_iter: 200,
            dim_cap: 500,
            constraint_cap: 2500,
            band: 10.0,
        }
    }
}

impl ToleranceProfile {
    /// Multiply every tolerance (not the caps) by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.feas *= factor;
        self.psd *= factor;
        self.gap *= factor;
        self
    }

    pub fn with_max_iter(mut self, it: usize) -> Self {
        self.max_iter = it;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    Indeterminate,
    OptimalValue(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub tau: f64,
    pub kappa: f64,
    /// Constraints dropped as linearly dependent during presolve.
    pub dropped_constraints: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOutcome {
    pub status: SdpStatus,
    /// Primal point, one matrix per block.
    pub witness: Option<Vec<RealMatrix>>,
    /// Dual vector over the original constraint list. For `Infeasible` it is
    /// normalised to `⟨b, y⟩ = 1`. For maximisations it is the last dual
    /// iterate, also when the status is `Indeterminate`; see
    /// [`dual_upper_bound`].
    pub certificate: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl SdpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SdpStatus::Feasible | SdpStatus::OptimalValue(_))
    }

    pub fn optimal_value(&self) -> Option<f64> {
        match self.status {
            SdpStatus::OptimalValue(v) => Some(v),
            _ => None,
        }
    }
}

/// Residuals recomputed from the instance data alone.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `max_k |⟨C_k, X⟩ − b_k|`
    pub constraint_residual: Option<f64>,
    /// Smallest eigenvalue over the witness blocks.
    pub witness_min_eig: Option<f64>,
    /// Objective at the witness.
    pub objective: Option<f64>,
    /// `⟨b, y⟩`
    pub dual_value: Option<f64>,
    /// Smallest eigenvalue of `−Σ y_k C_k` over blocks.
    pub slack_min_eig: Option<f64>,
    pub rhs_scale: f64,
}

impl CertificateReport {
    pub fn witness_valid(&self, tol: &ToleranceProfile) -> bool {
        matches!((self.constraint_residual, self.witness_min_eig),
            (Some(r), Some(e)) if r <= tol.feas * self.rhs_scale && e >= -tol.psd)
    }

    pub fn infeasibility_valid(&self, tol: &ToleranceProfile) -> bool {
        matches!((self.dual_value, self.slack_min_eig),
            (Some(v), Some(e)) if v > 0.0 && e >= -tol.psd * v)
    }
}

/// Upper bound on `max ⟨C, X⟩` from an arbitrary dual point `y`, given that
/// every feasible `X` has `tr X ≤ trace_bound`:
/// `⟨C, X⟩ = bᵀy − ⟨Σ y_k A_k − C, X⟩ ≤ bᵀy + max(0, −λ_min(Σ y_k A_k − C))·trace_bound`.
pub fn dual_upper_bound(inst: &SdpInstance, y: &[f64], trace_bound: f64) -> Option<f64> {
    let obj = inst.objective.as_ref()?;
    if y.len() != inst.constraints.len() {
        return None;
    }
    let by: f64 = inst.constraints.iter().zip(y).map(|(c, v)| c.rhs * v).sum();
    let mut slack = inst.dual_slack(y);
    for (b, c) in obj {
        slack[*b] -= c.to_dense();
    }
    let lmin = slack.iter().map(sym_lambda_min).fold(f64::INFINITY, f64::min);
    let bound = by + (-lmin).max(0.0) * trace_bound;
    bound.is_finite().then_some(bound)
}

/// Recompute every residual of `outcome` against `inst` using only the
/// instance data and eigenvalue computations.
pub fn check_certificate(inst: &SdpInstance, outcome: &SdpOutcome) -> Result<CertificateReport> {
    if outcome.witness.is_none() && outcome.certificate.is_none() {
        return Err(Error::MissingEvidence);
    }
    let rhs_scale = 1.0 + inst.constraints.iter().fold(0.0f64, |a, c| a.max(c.rhs.abs()));
    let mut rep = CertificateReport { rhs_scale, ..Default::default() };
    if let Some(x) = &outcome.witness {
        if x.len() != inst.blocks.len() || x.iter().zip(&inst.blocks).any(|(m, &n)| m.nrows() != n || m.ncols() != n) {
            return Err(Error::IllFormed("witness shape does not match blocks".into()));
        }
        let res = inst.constraints.iter().map(|c| (c.value(x) - c.rhs).abs()).fold(0.0, f64::max);
        rep.constraint_residual = Some(res);
        rep.witness_min_eig = Some(x.iter().map(sym_lambda_min).fold(f64::INFINITY, f64::min));
        rep.objective = inst.objective.as_ref().map(|_| inst.objective_value(x));
    }
    if let Some(y) = &outcome.certificate {
        if y.len() != inst.constraints.len() {
            return Err(Error::IllFormed("certificate length does not match constraints".into()));
        }
        let by: f64 = inst.constraints.iter().zip(y).map(|(c, v)| c.rhs * v).sum();
        let slack = inst.dual_slack(y);
        let min_eig = slack.iter().map(|s| sym_lambda_min(&(-s))).fold(f64::INFINITY, f64::min);
        rep.dual_value = Some(by);
        rep.slack_min_eig = Some(min_eig);
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// JSON debug schema: dense row-major blocks.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintJson {
    /// One dense matrix per block (rows of reals); `null` for a zero block.
    pub coefficients: Vec<Option<Vec<Vec<f64>>>>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpInstanceJson {
    pub blocks: Vec<usize>,
    pub sense: Sense,
    pub constraints: Vec<ConstraintJson>,
    #[serde(default)]
    pub objective: Option<Vec<Option<Vec<Vec<f64>>>>>,
}

fn dense_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn rows_to_dense(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::IllFormed("coefficient block is not square".into()));
    }
    Ok(RealMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn terms_to_json(blocks: &[usize], terms: &[(usize, SparseSym)]) -> Vec<Option<Vec<Vec<f64>>>> {
    let mut out: Vec<Option<RealMatrix>> = vec![None; blocks.len()];
    for (b, c) in terms {
        let d = c.to_dense();
        out[*b] = Some(match out[*b].take() {
            Some(prev) => prev + d,
            None => d,
        });
    }
    out.into_iter().map(|m| m.map(|m| dense_rows(&m))).collect()
}

fn terms_from_json(blocks: &[usize], coeffs: &[Option<Vec<Vec<f64>>>]) -> Result<Vec<(usize, SparseSym)>> {
    if coeffs.len() != blocks.len() {
        return Err(Error::IllFormed("one coefficient entry per block required".into()));
    }
    let mut terms = Vec::new();
    for (b, c) in coeffs.iter().enumerate() {
        if let Some(rows) = c {
            let d = rows_to_dense(rows)?;
            if d.nrows() != blocks[b] {
                return Err(Error::IllFormed(format!("block {b}: expected size {}", blocks[b])));
            }
            let s = SparseSym::from_dense(&d)?;
            if !s.is_zero() {
                terms.push((b, s));
            }
        }
    }
    Ok(terms)
}

impl SdpInstance {
    pub fn to_json(&self) -> SdpInstanceJson {
        SdpInstanceJson {
            blocks: self.blocks.clone(),
            sense: self.sense,
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintJson { coefficients: terms_to_json(&self.blocks, &c.terms), rhs: c.rhs })
                .collect(),
            objective: self.objective.as_ref().map(|o| terms_to_json(&self.blocks, o)),
        }
    }

    pub fn from_json(j: &SdpInstanceJson) -> Result<Self> {
        let constraints = j
            .constraints
            .iter()
            .map(|c| Ok(Constraint::new(terms_from_json(&j.blocks, &c.coefficients)?, c.rhs)))
            .collect::<Result<Vec<_>>>()?;
        let objective = j.objective.as_ref().map(|o| terms_from_json(&j.blocks, o)).transpose()?;
        let inst = SdpInstance { blocks: j.blocks.clone(), constraints, objective, sense: j.sense };
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpOutcomeJson {
    pub status: SdpStatus,
    pub witness: Option<Vec<Vec<Vec<f64>>>>,
    pub certificate: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl SdpOutcome {
    pub fn to_json(&self) -> SdpOutcomeJson {
        SdpOutcomeJson {
            status: self.status,
            witness: self.witness.as_ref().map(|w| w.iter().map(dense_rows).collect()),
            certificate: self.certificate.clone(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn from_json(j: &SdpOutcomeJson) -> Result<Self> {
        let witness = j
            .witness
            .as_ref()
            .map(|w| w.iter().map(|rows| rows_to_dense(rows)).collect::<Result<Vec<_>>>())
            .transpose()?;
        Ok(SdpOutcome { status: j.status, witness, certificate: j.certificate.clone(), diagnostics: j.diagnostics.clone() })
    }
}
