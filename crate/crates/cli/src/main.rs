mod commands;
mod corpus;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use matrange_core::structure::DEFAULT_FALSIFIER_SAMPLES;
use matrange_core::{Error, ToleranceProfile};
use serde_json::json;

use input::Inputs;
use report::{diagnostics, error_status, Outcome, Report, RunContext, Status, SCHEMA_VERSION};

/// Matrix ranges of matrix tuples: membership, extreme points, minimality.
#[derive(Parser, Debug)]
#[command(name = "matrange", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Multiply every numerical tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Interior-point iteration cap.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Re-check witnesses and certificates independently.
    #[arg(long, global = true)]
    verify: bool,
    /// Record wall-clock time in the diagnostics (reports are then no longer
    /// byte-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Irreducible blocks with multiplicities and the splitting unitary.
    Decompose { tuple: PathBuf },
    /// Direct sum of distinct blocks with the same matrix range.
    Minimalize { tuple: PathBuf },
    /// Unitary between two minimal tuples with equal matrix ranges.
    Unify { a: PathBuf, b: PathBuf },
    #[command(subcommand)]
    Check(Check),
    #[command(subcommand)]
    Member(Member),
    /// W(inner) ⊆ W(outer).
    Contains { outer: PathBuf, inner: PathBuf },
    /// W(a) = W(b).
    Equal { a: PathBuf, b: PathBuf },
    #[command(subcommand)]
    Extreme(Extreme),
    /// Keep the isolated extreme points of a joint eigenvalue list.
    NormalCompress { points: PathBuf },
    /// Vertices of the convex hull of a point list.
    HullVertices { points: PathBuf },
    #[command(subcommand)]
    Compact(Compact),
    /// Solve a semidefinite program given in the JSON debug schema.
    SdpSolve { instance: PathBuf },
    /// Run every suite config in a directory.
    Corpus { dir: PathBuf },
}

#[derive(Subcommand, Debug)]
enum Check {
    IsMinimal { tuple: PathBuf },
    IsFullyCompressed { tuple: PathBuf },
    ShilovTrivial { tuple: PathBuf },
    MultiplicityFree { tuple: PathBuf },
    /// Accepts a compact model or a plain tuple.
    Nonsingular {
        model: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
    },
    Classify {
        tuple: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FALSIFIER_SAMPLES)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Member {
    /// X ∈ W_n(A).
    Mrange { ambient: PathBuf, target: PathBuf },
    Wmin { target: PathBuf, polytope: PathBuf },
    Wmax { target: PathBuf, polytope: PathBuf },
}

#[derive(Subcommand, Debug)]
enum Extreme {
    Aep { ambient: PathBuf, target: PathBuf },
    Euclidean { ambient: PathBuf, target: PathBuf },
    WminClassify { target: PathBuf, polytope: PathBuf },
}

#[derive(Subcommand, Debug)]
enum Compact {
    Structure {
        model: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
    },
    ProbeZero {
        tuple: PathBuf,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
}

impl Command {
    fn name(&self) -> String {
        let s = match self {
            Command::Decompose { .. } => "decompose",
            Command::Minimalize { .. } => "minimalize",
            Command::Unify { .. } => "unify",
            Command::Check(c) => match c {
                Check::IsMinimal { .. } => "check is-minimal",
                Check::IsFullyCompressed { .. } => "check is-fully-compressed",
                Check::ShilovTrivial { .. } => "check shilov-trivial",
                Check::MultiplicityFree { .. } => "check multiplicity-free",
                Check::Nonsingular { .. } => "check nonsingular",
                Check::Classify { .. } => "check classify",
            },
            Command::Member(m) => match m {
                Member::Mrange { .. } => "member mrange",
                Member::Wmin { .. } => "member wmin",
                Member::Wmax { .. } => "member wmax",
            },
            Command::Contains { .. } => "contains",
            Command::Equal { .. } => "equal",
            Command::Extreme(e) => match e {
                Extreme::Aep { .. } => "extreme aep",
                Extreme::Euclidean { .. } => "extreme euclidean",
                Extreme::WminClassify { .. } => "extreme wmin-classify",
            },
            Command::NormalCompress { .. } => "normal-compress",
            Command::HullVertices { .. } => "hull-vertices",
            Command::Compact(c) => match c {
                Compact::Structure { .. } => "compact structure",
                Compact::ProbeZero { .. } => "compact probe-zero",
            },
            Command::SdpSolve { .. } => "sdp-solve",
            Command::Corpus { .. } => "corpus",
        };
        s.to_string()
    }
}

fn dispatch(cmd: &Command, inp: &mut Inputs, ctx: &RunContext) -> matrange_core::Result<Outcome> {
    use commands as c;
    match cmd {
        Command::Decompose { tuple } => c::decompose(inp, tuple, ctx),
        Command::Minimalize { tuple } => c::minimalize_cmd(inp, tuple, ctx),
        Command::Unify { a, b } => c::unify_cmd(inp, a, b, ctx),
        Command::Check(Check::IsMinimal { tuple }) => c::check_minimal(inp, tuple, ctx, false),
        Command::Check(Check::IsFullyCompressed { tuple }) => c::check_minimal(inp, tuple, ctx, true),
        Command::Check(Check::ShilovTrivial { tuple }) => c::check_shilov(inp, tuple, ctx),
        Command::Check(Check::MultiplicityFree { tuple }) => c::check_multiplicity_free(inp, tuple, ctx),
        Command::Check(Check::Nonsingular { model, ladder }) => c::check_nonsingular(inp, model, ladder.clone(), ctx),
        Command::Check(Check::Classify { tuple, samples }) => c::check_classify(inp, tuple, *samples, ctx),
        Command::Member(Member::Mrange { ambient, target }) => c::member_mrange(inp, ambient, target, ctx),
        Command::Member(Member::Wmin { target, polytope }) => c::member_wmin(inp, target, polytope, ctx),
        Command::Member(Member::Wmax { target, polytope }) => c::member_wmax(inp, target, polytope, ctx),
        Command::Contains { outer, inner } => c::contains(inp, outer, inner, ctx),
        Command::Equal { a, b } => c::equal(inp, a, b, ctx),
        Command::Extreme(Extreme::Aep { ambient, target }) => c::extreme_aep(inp, ambient, target, ctx),
        Command::Extreme(Extreme::Euclidean { ambient, target }) => c::extreme_euclidean(inp, ambient, target, ctx),
        Command::Extreme(Extreme::WminClassify { target, polytope }) => c::extreme_wmin_classify(inp, target, polytope, ctx),
        Command::NormalCompress { points } => c::normal_compress(inp, points, ctx),
        Command::HullVertices { points } => c::hull_vertices(inp, points),
        Command::Compact(Compact::Structure { model, ladder }) => c::compact_structure(inp, model, ladder.clone(), ctx),
        Command::Compact(Compact::ProbeZero { tuple, copies, restarts }) => c::probe_zero(inp, tuple, *copies, *restarts, ctx),
        Command::SdpSolve { instance } => c::sdp_solve(inp, instance, ctx),
        Command::Corpus { dir } => corpus::run(dir, ctx),
    }
}

fn threads() -> Result<usize, Error> {
    match std::env::var("MRANGE_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Input(format!("MRANGE_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

fn context(g: &Global) -> Result<RunContext, Error> {
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(Error::Input(format!("--tol must be positive, got {}", g.tol)));
    }
    let mut tol = ToleranceProfile::default().scaled(g.tol);
    if let Some(it) = g.max_iter {
        if it == 0 {
            return Err(Error::Input("--max-iter must be positive".into()));
        }
        tol = tol.with_max_iter(it);
    }
    Ok(RunContext { tol, tol_scale: g.tol, seed: g.seed, threads: threads()?, verify: g.verify, timing: g.timing })
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let start = Instant::now();
    let command = cli.command.name();
    let mut inputs = Inputs::new();
    let (ctx, outcome) = match context(&cli.global) {
        Ok(ctx) => {
            let o = dispatch(&cli.command, &mut inputs, &ctx);
            (ctx, o)
        }
        Err(e) => {
            let fallback = RunContext {
                tol: ToleranceProfile::default(),
                tol_scale: cli.global.tol,
                seed: cli.global.seed,
                threads: 1,
                verify: false,
                timing: false,
            };
            (fallback, Err(e))
        }
    };
    let runtime = ctx.timing.then(|| start.elapsed().as_secs_f64());
    let report = match outcome {
        Ok(o) => {
            let status = o.status.unwrap_or(Status::Success);
            let margins = match (status, o.margins) {
                (Status::Indeterminate, None) => Some(json!({"note": "no margin recorded"})),
                (_, m) => m,
            };
            Report {
                schema_version: SCHEMA_VERSION,
                command,
                inputs: inputs.digests,
                status,
                rule_citations: o.rules.iter().map(|s| s.to_string()).collect(),
                result: o.result,
                witness: o.witness,
                certificate: o.certificate,
                verification: o.verification,
                diagnostics: diagnostics(&ctx, margins, runtime),
            }
        }
        Err(e) => {
            let status = error_status(&e);
            Report {
                schema_version: SCHEMA_VERSION,
                command,
                inputs: inputs.digests,
                status,
                rule_citations: Vec::new(),
                result: json!({"error": e.to_string()}),
                witness: None,
                certificate: None,
                verification: None,
                diagnostics: diagnostics(&ctx, Some(json!({"error": e.to_string()})), runtime),
            }
        }
    };
    if let Err(e) = emit(&report, cli.global.out.as_ref()) {
        eprintln!("{e}");
        return ExitCode::from(3);
    }
    ExitCode::from(report.status.exit_code() as u8)
}
