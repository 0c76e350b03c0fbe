//! Minimality, full compression and their agreement with the boundary
//! criterion at finite dimension.
//!
//! At finite dimension a tuple is fully compressed exactly when it is
//! minimal, and minimal exactly when it is multiplicity-free with every
//! distinct irreducible block a boundary summand. [`classify`] computes each
//! side independently and refuses to reconcile a disagreement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::shilov_trivial;
use crate::mrange::{contains_in, contains_with, Ambient};
use crate::numlin::{random_isometry, rng, ComplexMatrix};
use crate::sdp::ToleranceProfile;
use crate::tuples::{compress, direct_sum, irreducible_decompose, unitarily_equivalent, MatrixTuple};
use crate::Decision;

pub const DEFAULT_FALSIFIER_SAMPLES: usize = 200;

/// Outcome of greedy block removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalizeReport {
    /// Sizes of the distinct blocks, in canonical order.
    pub block_sizes: Vec<usize>,
    pub multiplicities: Vec<usize>,
    /// Indices into the distinct blocks.
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    /// Blocks whose removability could not be decided; they are kept.
    pub undecided: Vec<usize>,
    /// `W(A) = W(B)` re-checked after removal.
    pub equality: Decision,
    pub minimal: Decision,
}

/// Direct sum of a subset of the distinct blocks of `a` with the same matrix
/// range. Blocks are tried in canonical order; a block is removed when it lies
/// in the range of the blocks still kept.
pub fn minimalize(a: &MatrixTuple, seed: u64, tol: &ToleranceProfile) -> Result<(MatrixTuple, MinimalizeReport)> {
    let dec = irreducible_decompose(a, seed)?;
    let blocks: Vec<MatrixTuple> = dec.blocks.iter().map(|b| b.tuple.clone()).collect();
    let multiplicities: Vec<usize> = dec.blocks.iter().map(|b| b.multiplicity).collect();
    let mut kept: Vec<usize> = (0..blocks.len()).collect();
    let mut removed = Vec::new();
    let mut undecided = Vec::new();
    for i in 0..blocks.len() {
        if kept.len() == 1 {
            break;
        }
        let rest: Vec<MatrixTuple> = kept.iter().filter(|&&j| j != i).map(|&j| blocks[j].clone()).collect();
        let amb = Ambient::from_blocks(rest)?;
        match contains_in(&amb, &blocks[i], tol)?.decision {
            Decision::Yes => {
                kept.retain(|&j| j != i);
                removed.push(i);
            }
            Decision::Indeterminate => undecided.push(i),
            Decision::No => {}
        }
    }
    let b = direct_sum(&kept.iter().map(|&j| blocks[j].clone()).collect::<Vec<_>>())?;
    let equality = if removed.is_empty() {
        Decision::Yes
    } else {
        contains_in(&Ambient::from_blocks(kept.iter().map(|&j| blocks[j].clone()).collect())?, a, tol)?.decision
    };
    let minimal = if !removed.is_empty() || multiplicities.iter().any(|&m| m > 1) {
        Decision::No
    } else if undecided.is_empty() {
        Decision::Yes
    } else {
        Decision::Indeterminate
    };
    let report = MinimalizeReport {
        block_sizes: blocks.iter().map(|b| b.n()).collect(),
        multiplicities,
        kept,
        removed,
        undecided,
        equality,
        minimal,
    };
    Ok((b, report))
}

pub fn is_minimal(a: &MatrixTuple, tol: &ToleranceProfile) -> Result<Decision> {
    Ok(minimalize(a, 0, tol)?.1.minimal)
}

/// Decided through minimality, which is equivalent at finite dimension.
pub fn is_fully_compressed(a: &MatrixTuple, tol: &ToleranceProfile) -> Result<Decision> {
    is_minimal(a, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coordinates", rename_all = "snake_case")]
pub enum SubspaceKind {
    Coordinate(Vec<usize>),
    Haar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifierTrial {
    pub subspace: SubspaceKind,
    pub dim: usize,
    /// Whether `W(A) ⊆ W(V* A V)`.
    pub preserves_range: Decision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub subspace: SubspaceKind,
    pub isometry: ComplexMatrix,
    pub compressed: MatrixTuple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifierOutcome {
    pub counterexample: Option<Counterexample>,
    pub log: Vec<FalsifierTrial>,
}

/// Proper coordinate subspaces, largest first.
fn coordinate_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..n).rev().flat_map(move |k| combinations(n, k))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn coordinate_isometry(n: usize, subset: &[usize]) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(n, subset.len());
    for (c, &i) in subset.iter().enumerate() {
        v[(i, c)] = crate::numlin::c64(1.0, 0.0);
    }
    v
}

/// Hunts for a proper subspace `G` with `W(P_G A|_G) = W(A)`, alternating
/// coordinate subspaces (largest first) with Haar-random codimension-one
/// subspaces. `None` is not a proof that no such subspace exists.
pub fn compression_falsifier(a: &MatrixTuple, samples: usize, seed: u64, tol: &ToleranceProfile) -> Result<FalsifierOutcome> {
    let n = a.n();
    let mut log = Vec::new();
    if n < 2 {
        return Ok(FalsifierOutcome { counterexample: None, log });
    }
    let mut r = rng(seed);
    let mut coords = coordinate_subsets(n);
    for s in 0..samples {
        let coordinate = if s % 2 == 0 { coords.next() } else { None };
        let (subspace, v) = match coordinate {
            Some(c) => {
                let v = coordinate_isometry(n, &c);
                (SubspaceKind::Coordinate(c), v)
            }
            None => (SubspaceKind::Haar, random_isometry(&mut r, n, n - 1)),
        };
        let c = compress(a, &v)?;
        let d = contains_with(&c, a, tol)?.decision;
        log.push(FalsifierTrial { subspace: subspace.clone(), dim: v.ncols(), preserves_range: d });
        if d.is_yes() {
            return Ok(FalsifierOutcome { counterexample: Some(Counterexample { subspace, isometry: v, compressed: c }), log });
        }
    }
    Ok(FalsifierOutcome { counterexample: None, log })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub minimal: Decision,
    pub multiplicity_free: bool,
    pub shilov_trivial: Decision,
    pub fully_compressed: Decision,
    /// Always Yes: finite-dimensional tuples are nonsingular.
    pub nonsingular: Decision,
    pub minimalize: MinimalizeReport,
    pub falsifier_log: Vec<FalsifierTrial>,
    pub counterexample: Option<Counterexample>,
}

impl StructureReport {
    /// `minimal ⟺ multiplicity-free ∧ Shilov-trivial ⟺ fully compressed`
    /// wherever the three are decided.
    pub fn consistent(&self) -> bool {
        let boundary = match (self.multiplicity_free, self.shilov_trivial) {
            (false, _) => Decision::No,
            (true, d) => d,
        };
        let known = [self.minimal, boundary, self.fully_compressed];
        let decided: Vec<bool> = known.iter().filter(|d| **d != Decision::Indeterminate).map(|d| d.is_yes()).collect();
        let agree = decided.windows(2).all(|w| w[0] == w[1]);
        agree && !(self.fully_compressed.is_yes() && self.counterexample.is_some())
    }

    pub fn undecided(&self) -> bool {
        self.minimal == Decision::Indeterminate
            || (self.multiplicity_free && self.shilov_trivial == Decision::Indeterminate)
    }
}

/// All three characterizations, computed separately, plus a falsifier run.
pub fn classify(a: &MatrixTuple, seed: u64, samples: usize, tol: &ToleranceProfile) -> Result<StructureReport> {
    let (_, mreport) = minimalize(a, seed, tol)?;
    let multiplicity_free = mreport.multiplicities.iter().all(|&m| m == 1);
    let shilov = shilov_trivial(a, tol)?.decision;
    let fully_compressed = mreport.minimal;
    let fal = compression_falsifier(a, samples, seed, tol)?;
    let report = StructureReport {
        minimal: mreport.minimal,
        multiplicity_free,
        shilov_trivial: shilov,
        fully_compressed,
        nonsingular: Decision::Yes,
        minimalize: mreport,
        falsifier_log: fal.log,
        counterexample: fal.counterexample,
    };
    if !report.consistent() {
        return Err(Error::InconsistentTheorems(format!(
            "minimal {:?}, multiplicity-free {}, shilov-trivial {:?}, fully compressed {:?}, counterexample {}",
            report.minimal,
            report.multiplicity_free,
            report.shilov_trivial,
            report.fully_compressed,
            report.counterexample.is_some()
        )));
    }
    Ok(report)
}

/// For two minimal tuples, a unitary `U` with `U A U* = B` when their ranges
/// agree, `None` when they differ.
pub fn unify(a: &MatrixTuple, b: &MatrixTuple, tol: &ToleranceProfile) -> Result<Option<ComplexMatrix>> {
    for t in [a, b] {
        match is_minimal(t, tol)? {
            Decision::Yes => {}
            Decision::No => return Err(Error::Precondition("tuple is not minimal".into())),
            Decision::Indeterminate => return Err(Error::Precondition("minimality undecided".into())),
        }
    }
    match crate::mrange::equal_with(a, b, tol)?.decision {
        Decision::No => Ok(None),
        Decision::Indeterminate => Err(Error::Precondition("range equality undecided".into())),
        Decision::Yes => {
            let eq = unitarily_equivalent(a, b)?;
            match eq.witness {
                Some(u) => Ok(Some(u)),
                None => Err(Error::InconsistentTheorems("equal ranges of minimal tuples without a unitary".into())),
            }
        }
    }
}
