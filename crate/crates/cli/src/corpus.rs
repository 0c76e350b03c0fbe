//! Deterministic corpus runner: each `*.json` config in a directory names a
//! generator suite, a case count and a base seed.

use std::path::Path;

use matrange_core::compactmodel::{nonsingular, ProbeBudget};
use matrange_core::extremal::{absolute_extreme, wmin_classify, WminClass};
use matrange_core::minmax::{isolated_extreme_points, normal_fully_compress, NormalModel};
use matrange_core::sdp::{check_certificate, solve, SdpStatus};
use matrange_core::structure::{classify, is_minimal, minimalize, unify, DEFAULT_FALSIFIER_SAMPLES};
use matrange_core::suites;
use matrange_core::tuples::irreducible_decompose;
use matrange_core::{Decision, Error, MatrixTuple, Polytope, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::{Outcome, RunContext, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Equivalence,
    Uniqueness,
    Vertices,
    Normal,
    Nonsingular,
    Decomposition,
    SdpFeasible,
    SdpInfeasible,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub count: u64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteSummary {
    pub config: String,
    pub suite: Option<Suite>,
    pub cases: u64,
    pub passed: u64,
    pub failed: u64,
    pub indeterminate: u64,
    pub inconsistent: u64,
    pub errors: u64,
    pub failing_seeds: Vec<u64>,
}

enum Case {
    Pass,
    Fail,
    Indeterminate,
}

fn run_case(suite: Suite, seed: u64, ctx: &RunContext) -> Result<Case> {
    let tol = &ctx.tol;
    Ok(match suite {
        Suite::Equivalence => {
            let rep = classify(&suites::round_robin_tuple(seed), seed, DEFAULT_FALSIFIER_SAMPLES, tol)?;
            if rep.undecided() { Case::Indeterminate } else { Case::Pass }
        }
        Suite::Uniqueness => {
            let (a, b) = suites::uniqueness_pair(seed);
            let (ma, _) = minimalize(&a, seed, tol)?;
            let (mb, _) = minimalize(&b, seed, tol)?;
            match unify(&ma, &mb, tol)? {
                Some(u) if ma.conjugate_by(&u).distance(&mb) <= 1e-6 => Case::Pass,
                _ => Case::Fail,
            }
        }
        Suite::Vertices => {
            let pts = suites::random_polytope_points(seed);
            let ext = isolated_extreme_points(&pts)?;
            if ext.undecided() > 0 {
                return Ok(Case::Indeterminate);
            }
            let vs = ext.vertices();
            let k = Polytope::from_vertices(pts)?;
            let n = MatrixTuple::diagonal(&vs)?;
            let mut ok = true;
            for v in &vs {
                let x = MatrixTuple::point(v);
                ok &= absolute_extreme(&n, &x, tol)?.absolute.is_yes();
                ok &= wmin_classify(&k, &x, tol)? == WminClass::Vertex { aep: true, crucial: true };
            }
            let centroid: Vec<f64> = (0..k.dim).map(|i| vs.iter().map(|v| v[i]).sum::<f64>() / vs.len() as f64).collect();
            ok &= absolute_extreme(&n, &MatrixTuple::point(&centroid), tol)?.absolute.is_no();
            if ok { Case::Pass } else { Case::Fail }
        }
        Suite::Normal => {
            let model = NormalModel::new(suites::normal_multiset(seed))?;
            let once = normal_fully_compress(&model, tol)?;
            let twice = normal_fully_compress(&once.reduced, tol)?;
            let ok = once.certified()
                && twice.reduced.eigenvalues.len() == once.reduced.eigenvalues.len()
                && is_minimal(&once.reduced.diagonal_tuple(), tol)?.is_yes();
            if ok { Case::Pass } else { Case::Fail }
        }
        Suite::Nonsingular => {
            let budget = ProbeBudget { seed, ..ProbeBudget::default() };
            match nonsingular(&suites::finite_compact_model(seed), &budget, tol)?.decision {
                Decision::Yes => Case::Pass,
                _ => Case::Fail,
            }
        }
        Suite::Decomposition => {
            let (a, planted) = suites::planted_decomposition(seed);
            let d = irreducible_decompose(&a, seed)?;
            let mut expect: Vec<(usize, usize)> = planted.iter().map(|(b, m)| (b.n(), *m)).collect();
            expect.sort_unstable();
            if d.size_multiplicities() == expect && d.residual(&a) <= 1e-8 { Case::Pass } else { Case::Fail }
        }
        Suite::SdpFeasible => {
            let (inst, _) = suites::planted_feasible_sdp(seed);
            let out = solve(&inst, tol)?;
            let good = out.status == SdpStatus::Feasible && check_certificate(&inst, &out)?.witness_valid(tol);
            if good { Case::Pass } else { Case::Fail }
        }
        Suite::SdpInfeasible => {
            let (inst, _) = suites::planted_infeasible_sdp(seed);
            let out = solve(&inst, tol)?;
            match out.status {
                SdpStatus::Infeasible if check_certificate(&inst, &out)?.infeasibility_valid(tol) => Case::Pass,
                SdpStatus::Indeterminate => Case::Indeterminate,
                _ => Case::Fail,
            }
        }
    })
}

pub fn run(dir: &Path, ctx: &RunContext) -> Result<Outcome> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Input(format!("no suite configs in {}", dir.display())));
    }
    let mut configs = Vec::new();
    for p in &paths {
        let bytes = std::fs::read(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
        let c: SuiteConfig = serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        configs.push((name, c));
    }
    let mut summaries = Vec::new();
    for (name, c) in configs {
        let base = c.seed.unwrap_or(ctx.seed);
        let mut s = SuiteSummary { config: name, suite: Some(c.suite), cases: c.count, ..Default::default() };
        for i in 0..c.count {
            let seed = base + i;
            match run_case(c.suite, seed, ctx) {
                Ok(Case::Pass) => s.passed += 1,
                Ok(Case::Indeterminate) => s.indeterminate += 1,
                Ok(Case::Fail) => {
                    s.failed += 1;
                    s.failing_seeds.push(seed);
                }
                Err(Error::InconsistentTheorems(_)) => {
                    s.inconsistent += 1;
                    s.failing_seeds.push(seed);
                }
                Err(_) => {
                    s.errors += 1;
                    s.failing_seeds.push(seed);
                }
            }
        }
        summaries.push(s);
    }
    let errors: u64 = summaries.iter().map(|s| s.errors).sum();
    let bad: u64 = summaries.iter().map(|s| s.failed + s.inconsistent).sum();
    let undecided: u64 = summaries.iter().map(|s| s.indeterminate).sum();
    let status = if errors > 0 {
        Status::NumericalFailure
    } else if bad > 0 {
        Status::No
    } else if undecided > 0 {
        Status::Indeterminate
    } else {
        Status::Success
    };
    let mut o = Outcome { status: Some(status), ..Default::default() };
    if matches!(status, Status::Success | Status::No) {
        o = o.rules(&["seeded-suite-replay"]);
    }
    o.result = json!({"suites": summaries});
    o.margins = Some(Value::Null);
    Ok(o)
}
