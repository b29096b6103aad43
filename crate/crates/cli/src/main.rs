use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qplexkit::acceptance::{self, AcceptanceConfig, CriterionResult};
use qplexkit::gleason::{
    check_frame_property, fit_regular_operator, hemisphere_experiment, BasisSet, BornFrameFunction,
    FrameFunctionSample,
};
use qplexkit::io::{self, Reference};
use qplexkit::linalg::{max_abs_diff, trace_product};
use qplexkit::operator::{random_pure, DensityMatrix};
use qplexkit::overlap::verify_overlap;
use qplexkit::qplex::{bit_ball_check, mmd_max_set, pair_bounds_check, radii_and_dimension, PointSet};
use qplexkit::rep::{
    general_mu, measurement_to_cond_matrix, prob_to_state, prob_to_state_general, sic_params, state_to_prob,
    urgleichung, ProbVector, UrgleichungParams,
};
use qplexkit::search::{find_sic_fiducial_with, SearchConfig};
use qplexkit::{fixtures, tol, Exec, QplexError};

const SYNOPSIS: &str = "usage: qplexkit <sic|rep|born|qplex|overlap|gleason|report> <command> [flags]  (try --help)";

/// Numerics for the probabilistic representation of quantum states.
#[derive(Debug, Parser)]
#[command(name = "qplexkit", version)]
struct Cli {
    /// Run every sweep on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    group: Group,
}

#[derive(Debug, Subcommand)]
enum Group {
    /// SIC fiducial search and verification
    #[command(subcommand)]
    Sic(SicCmd),
    /// Maps between states, measurements and probabilities
    #[command(subcommand)]
    Rep(RepCmd),
    /// The Born rule in probabilistic form
    #[command(subcommand)]
    Born(BornCmd),
    /// Qplex inner-product bounds, radii and MMD sets
    #[command(subcommand)]
    Qplex(QplexCmd),
    /// Orthogonal states have overlapping probability vectors
    #[command(subcommand)]
    Overlap(OverlapCmd),
    /// Frame functions and the qubit hemisphere
    #[command(subcommand)]
    Gleason(GleasonCmd),
    /// End-to-end reports
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Debug, Subcommand)]
enum SicCmd {
    /// Search for a Weyl–Heisenberg SIC fiducial
    Find {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixture file to write; without it the fixture goes to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also list the d² effects in the fixture
        #[arg(long)]
        effects: bool,
    },
    /// Print the equiangularity report of a fixture
    Verify { file: PathBuf },
}

#[derive(Debug, Args)]
struct RefArg {
    /// Reference measurement (SIC fixture or POVM file); defaults to the built-in SIC
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum RepCmd {
    /// State file to probability CSV
    ToProb {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probability CSV to density JSON
    ToState {
        #[arg(long)]
        prob: PathBuf,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// POVM file to the conditional matrix r(D_j | H_i)
    Cond {
        #[arg(long)]
        povm: PathBuf,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum BornCmd {
    /// q = α P r − β r-column-sums, from a probability vector and conditional matrix
    Urgleichung {
        #[arg(long)]
        prob: PathBuf,
        #[arg(long)]
        cond: PathBuf,
        /// Defaults to the SIC value d + 1 for N = d² outcomes
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome distribution of a POVM computed through a general reference
    Mu {
        #[arg(long)]
        prob: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum QplexCmd {
    /// Pair bounds, sphere radii and MMD size of a point set
    Check {
        /// CSV with one probability vector per line; otherwise SIC images of random pure states
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, required_unless_present = "points")]
        d: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Saturation tolerance for the MMD graph
        #[arg(long, default_value_t = tol::MMD_SATURATION)]
        tol: f64,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum OverlapCmd {
    /// Dot and B-inner product of two states' probability vectors
    Check {
        #[arg(long)]
        state_a: PathBuf,
        #[arg(long)]
        state_b: PathBuf,
        #[command(flatten)]
        r: RefArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum GleasonCmd {
    /// Frame property, regular fit and POVM feasibility of the hemisphere function
    Hemisphere {
        /// Unit Bloch vector x,y,z
        #[arg(long, value_delimiter = ',', default_value = "0,0,1", allow_negative_numbers = true)]
        pole: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        bases: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the Born frame function of a state from random bases
    Fit {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 50)]
        bases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum ReportCmd {
    /// Run the acceptance criteria
    Acceptance {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Finding(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Finding(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

/// Errors from computations on already-validated inputs.
impl From<QplexError> for Failure {
    fn from(e: QplexError) -> Self {
        use QplexError::*;
        match e {
            NotAState { .. } | InconsistentPair { .. } | OverlapViolation { .. } | NotEquiangular { .. } => {
                Failure::Finding(e.to_string())
            }
            NotConverged { .. } | InsufficientSpan { .. } | TooManyCandidates { .. } | DegenerateSubspace { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Command output plus an optional finding that turns the exit code to 1.
struct Output {
    text: String,
    finding: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, finding: None }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        eprintln!("{SYNOPSIS}");
        return ExitCode::from(2);
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match run(cli.group, exec) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            match out.finding {
                Some(f) => {
                    eprintln!("finding: {f}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => {
                    eprintln!("error: {m}");
                    eprintln!("{SYNOPSIS}");
                }
                Failure::Finding(m) => eprintln!("finding: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("QPLEXKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("QPLEXKIT_THREADS must be a positive integer, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(group: Group, exec: Exec) -> CliResult<Output> {
    match group {
        Group::Sic(cmd) => sic(cmd, exec),
        Group::Rep(cmd) => rep(cmd),
        Group::Born(cmd) => born(cmd),
        Group::Qplex(QplexCmd::Check { points, d, samples, seed, tol, r, out }) => {
            qplex_check(points, d, samples, seed, tol, r, out, exec)
        }
        Group::Overlap(OverlapCmd::Check { state_a, state_b, r, out }) => overlap_check(&state_a, &state_b, r, out),
        Group::Gleason(cmd) => gleason(cmd, exec),
        Group::Report(ReportCmd::Acceptance { seed, format, only, out }) => report(seed, format, &only, out, exec),
    }
}

fn read_input<T>(path: &Path, parse: impl FnOnce(&str) -> qplexkit::Result<T>) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn check_out(out: &Option<PathBuf>) -> CliResult<()> {
    if let Some(p) = out {
        let parent = p.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(Failure::Usage(format!("output directory {} does not exist", parent.display())));
        }
    }
    Ok(())
}

/// Writes to `out` when given, else returns the text for stdout.
fn emit(text: String, out: &Option<PathBuf>) -> CliResult<String> {
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn reference_for(r: &RefArg, d: usize) -> CliResult<Reference> {
    let reference = match &r.reference {
        Some(p) => read_input(p, io::read_reference)?,
        None => Reference::Sic(
            fixtures::sic(d).map_err(|_| Failure::Usage(format!("no built-in SIC for d = {d}; pass --ref")))?,
        ),
    };
    if reference.measurement().dim() != d {
        return Err(Failure::Usage(format!(
            "reference has dimension {}, input has dimension {d}",
            reference.measurement().dim()
        )));
    }
    Ok(reference)
}

/// d with d² = n, for inputs whose only dimension hint is a SIC-sized vector.
fn sic_dim(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n && d >= 2).then_some(d)
}

fn dim_from_reference_or_len(r: &RefArg, n: usize) -> CliResult<Reference> {
    match &r.reference {
        Some(p) => {
            let reference = read_input(p, io::read_reference)?;
            if reference.measurement().len() != n {
                return Err(Failure::Usage(format!(
                    "reference has {} outcomes, probability vector has {n}",
                    reference.measurement().len()
                )));
            }
            Ok(reference)
        }
        None => {
            let d = sic_dim(n).ok_or_else(|| Failure::Usage(format!("{n} outcomes is not d²; pass --ref")))?;
            reference_for(r, d)
        }
    }
}

fn sic(cmd: SicCmd, exec: Exec) -> CliResult<Output> {
    match cmd {
        SicCmd::Find { d, restarts, seed, out, effects } => {
            check_out(&out)?;
            let config = SearchConfig::new(d, restarts, seed);
            config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let (sic, report) = find_sic_fiducial_with(&config, exec)?;
            let fixture = io::write_sic(&sic, effects)?;
            let summary = json!({ "seed": seed, "restarts": restarts, "report": report });
            match out {
                Some(_) => {
                    emit(fixture, &out)?;
                    Ok(Output::ok(pretty(&summary)))
                }
                None => {
                    eprintln!("seed {seed}: deviation {:e}", report.achieved_equiangularity_deviation);
                    Ok(Output::ok(fixture))
                }
            }
        }
        SicCmd::Verify { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
            match io::read_sic(&text) {
                Ok(sic) => {
                    let eq = sic.equiangularity();
                    Ok(Output::ok(pretty(&json!({ "equiangular": true, "report": eq }))))
                }
                Err(e @ (QplexError::NotEquiangular { .. } | QplexError::NotSicEffect { .. })) => {
                    let deviation = match e {
                        QplexError::NotEquiangular { deviation } => Some(deviation),
                        _ => None,
                    };
                    Ok(Output {
                        text: pretty(&json!({ "equiangular": false, "deviation": deviation, "reason": e.to_string() })),
                        finding: Some(e.to_string()),
                    })
                }
                Err(e) => Err(Failure::Usage(format!("{}: {e}", file.display()))),
            }
        }
    }
}

fn rep(cmd: RepCmd) -> CliResult<Output> {
    match cmd {
        RepCmd::ToProb { state, r, out } => {
            check_out(&out)?;
            let rho = read_input(&state, io::read_density)?;
            let reference = reference_for(&r, rho.dim())?;
            let p = state_to_prob(&rho, reference.measurement())?;
            Ok(Output::ok(emit(io::write_prob_vector(&p), &out)?))
        }
        RepCmd::ToState { prob, r, out } => {
            check_out(&out)?;
            let p = read_input(&prob, io::read_prob_vector)?;
            let reference = dim_from_reference_or_len(&r, p.len())?;
            let rho = match reference.sic() {
                Some(sic) => prob_to_state(&p, sic)?,
                None => prob_to_state_general(&p, reference.measurement())?,
            };
            Ok(Output::ok(emit(io::write_density(&rho), &out)?))
        }
        RepCmd::Cond { povm, r, out } => {
            check_out(&out)?;
            let povm = read_input(&povm, io::read_povm)?;
            let reference = reference_for(&r, povm.dim())?;
            let sic = reference.sic().ok_or_else(|| Failure::Usage("conditional matrices need a SIC reference".into()))?;
            let cond = measurement_to_cond_matrix(&povm, sic)?;
            Ok(Output::ok(emit(io::write_cond_matrix(&cond), &out)?))
        }
    }
}

fn born(cmd: BornCmd) -> CliResult<Output> {
    match cmd {
        BornCmd::Urgleichung { prob, cond, alpha, beta, out } => {
            check_out(&out)?;
            let p = read_input(&prob, io::read_prob_vector)?;
            let cond = read_input(&cond, io::read_cond_matrix)?;
            let params = match (alpha, beta) {
                (Some(a), Some(b)) => UrgleichungParams::new(a, b, p.len()).map_err(|e| Failure::Usage(e.to_string()))?,
                _ => sic_params(sic_dim(p.len()).ok_or_else(|| {
                    Failure::Usage(format!("{} outcomes is not d²; pass --alpha and --beta", p.len()))
                })?),
            };
            let q = urgleichung(&p, &cond, &params)?;
            Ok(Output::ok(emit(io::write_prob_vector(&q), &out)?))
        }
        BornCmd::Mu { prob, povm, r, out } => {
            check_out(&out)?;
            let p = read_input(&prob, io::read_prob_vector)?;
            let povm = read_input(&povm, io::read_povm)?;
            let reference = dim_from_reference_or_len(&r, p.len())?;
            if reference.measurement().dim() != povm.dim() {
                return Err(Failure::Usage(format!(
                    "POVM has dimension {}, reference has dimension {}",
                    povm.dim(),
                    reference.measurement().dim()
                )));
            }
            let q = general_mu(&p, &povm, reference.measurement())?;
            Ok(Output::ok(emit(io::write_prob_vector(&q), &out)?))
        }
    }
}

fn read_points(text: &str) -> qplexkit::Result<Vec<ProbVector>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(io::read_prob_vector)
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn qplex_check(
    points: Option<PathBuf>,
    d: Option<usize>,
    samples: usize,
    seed: u64,
    mmd_tol: f64,
    r: RefArg,
    out: Option<PathBuf>,
    exec: Exec,
) -> CliResult<Output> {
    check_out(&out)?;
    if !(mmd_tol >= 0.0) {
        return Err(Failure::Usage("--tol must be non-negative".into()));
    }
    let (pts, d, sampled) = match &points {
        Some(path) => {
            let pts = read_input(path, read_points)?;
            let n = pts.first().map(ProbVector::len).ok_or_else(|| Failure::Usage(format!("{} has no points", path.display())))?;
            if let Some(bad) = pts.iter().find(|p| p.len() != n) {
                return Err(Failure::Usage(format!("ragged point file: {} vs {n} entries", bad.len())));
            }
            let d = match d {
                Some(d) => d,
                None => sic_dim(n).ok_or_else(|| Failure::Usage(format!("{n} outcomes is not d²; pass --d")))?,
            };
            (pts, d, false)
        }
        None => {
            let d = d.expect("clap requires --d without --points");
            if samples == 0 {
                return Err(Failure::Usage("--samples must be positive".into()));
            }
            let reference = reference_for(&r, d)?;
            let m = reference.measurement();
            let pts = exec
                .map(samples, |k| state_to_prob(&DensityMatrix::from_pure(&random_pure(d, seed.wrapping_add(k as u64))), m))
                .into_iter()
                .collect::<qplexkit::Result<Vec<_>>>()?;
            (pts, d, true)
        }
    };
    let set = PointSet::new(pts, sic_params(d)).map_err(|e| Failure::Usage(e.to_string()))?;
    let bounds = pair_bounds_check(&set, d, exec).map_err(|e| Failure::Usage(e.to_string()))?;
    let radii = radii_and_dimension(&set);
    let mmd = match mmd_max_set(&set, mmd_tol, tol::MMD_BUDGET) {
        Ok(m) => json!(m),
        Err(e @ QplexError::TooManyCandidates { .. }) => json!({ "skipped": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let bit_ball = if d == 2 { bit_ball_check(&set).ok().map(|b| json!(b)) } else { None };
    let shown: Vec<_> = bounds.violations.iter().take(10).collect();
    let mut report = json!({
        "d": d,
        "points": set.len(),
        "pairs_checked": bounds.pairs_checked,
        "lower": bounds.lower,
        "upper": bounds.upper,
        "min_product": bounds.min_product,
        "max_product": bounds.max_product,
        "violation_count": bounds.violations.len(),
        "violations": shown,
        "saturating_pairs": bounds.saturating.len(),
        "radii": radii.radii,
        "d_estimate": radii.d_estimate,
        "mmd": mmd,
        "bit_ball": bit_ball,
    });
    if sampled {
        report["seed"] = json!(seed);
    }
    let finding = (!bounds.violations.is_empty()).then(|| format!("{} pair-bound violations", bounds.violations.len()));
    Ok(Output { text: emit(pretty(&report), &out)?, finding })
}

fn overlap_check(a: &Path, b: &Path, r: RefArg, out: Option<PathBuf>) -> CliResult<Output> {
    check_out(&out)?;
    let rho = read_input(a, io::read_density)?;
    let rho2 = read_input(b, io::read_density)?;
    if rho.dim() != rho2.dim() {
        return Err(Failure::Usage(format!("states have dimensions {} and {}", rho.dim(), rho2.dim())));
    }
    let reference = reference_for(&r, rho.dim())?;
    let report = verify_overlap(&rho, &rho2, reference.measurement())?;
    let trace = trace_product(rho.matrix(), rho2.matrix()).re;
    let v = json!({
        "dot": report.dot,
        "b_inner": report.b_inner,
        "trace_product": trace,
        "ic_rank_on_subspace": report.ic_rank_on_subspace,
    });
    Ok(Output::ok(emit(pretty(&v), &out)?))
}

fn gleason(cmd: GleasonCmd, exec: Exec) -> CliResult<Output> {
    match cmd {
        GleasonCmd::Hemisphere { pole, bases, samples, seed, out } => {
            check_out(&out)?;
            let pole: [f64; 3] = pole.try_into().map_err(|_| Failure::Usage("--pole needs three components".into()))?;
            let report = hemisphere_experiment(pole, bases, samples, seed, exec).map_err(|e| match e {
                QplexError::InvalidConfig(_) | QplexError::NotNormalized { .. } => Failure::Usage(e.to_string()),
                e => e.into(),
            })?;
            Ok(Output::ok(emit(pretty(&json!({ "seed": seed, "report": report })), &out)?))
        }
        GleasonCmd::Fit { state, bases, seed, out } => {
            check_out(&out)?;
            let rho = read_input(&state, io::read_density)?;
            let set = BasisSet::random(rho.dim(), bases, seed, exec);
            let f = BornFrameFunction(rho.clone());
            let frame_deviation = check_frame_property(&f, &set, 1.0, exec);
            let sample = FrameFunctionSample::from_bases(&f, &set, 1.0)?;
            let (op, residual) = fit_regular_operator(&sample)?;
            let v = json!({
                "seed": seed,
                "d": rho.dim(),
                "bases": bases,
                "frame_deviation": frame_deviation,
                "fit_residual": residual,
                "operator_error": max_abs_diff(op.matrix(), rho.matrix()),
            });
            Ok(Output::ok(emit(pretty(&v), &out)?))
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Timings are left out so that reports are reproducible byte for byte.
fn report(seed: u64, format: Format, only: &[u8], out: Option<PathBuf>, exec: Exec) -> CliResult<Output> {
    check_out(&out)?;
    let config = AcceptanceConfig { seed, exec };
    let results: Vec<CriterionResult> = if only.is_empty() {
        acceptance::run_all(&config)
    } else {
        only.iter()
            .map(|&id| {
                acceptance::run_criterion(id, &config).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))
            })
            .collect::<CliResult<_>>()?
    };
    for r in &results {
        eprintln!("{}", r.summary_line());
    }
    let all_passed = results.iter().all(|r| r.passed);
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "measured": r.measured,
                        "threshold": r.threshold,
                        "detail": r.detail,
                    })
                })
                .collect();
            pretty(&json!({ "seed": seed, "passed": all_passed, "criteria": rows }))
        }
        Format::Csv => {
            let mut s = format!("# seed={seed}\nid,name,passed,measured,threshold,detail\n");
            for r in &results {
                s += &format!(
                    "{},{},{},{:?},{:?},{}\n",
                    r.id,
                    r.name,
                    r.passed,
                    r.measured,
                    r.threshold,
                    csv_field(&r.detail)
                );
            }
            s
        }
    };
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    let finding = (!all_passed).then(|| format!("criteria failed: {}", failed.join(",")));
    Ok(Output { text: emit(text, &out)?, finding })
}
