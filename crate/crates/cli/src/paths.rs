use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use algpath::circuit::{parse_system, Circuit, ParametricSystem, PolySystem, System};
use algpath::homotopy::{
    build_newton, build_parametric, build_total_degree, certify_candidate, parse_start_points,
    random_gamma, Homotopy,
};
use algpath::interval::{CPoint, Dyadic, PrecisionContext, Real};
use algpath::moore::{MooreBox, MooreBoxRecord};
use algpath::refine::{refine, RefineOptions};
use algpath::tracker::{track_observed, PathStatus, PredictorKind, TraceRecord};

use crate::config::{CertifyArgs, HomotopyArg, PrecisionArg, SolveArgs, TrackArgs, TrackingArgs};
use crate::error::{CliError, CliResult};

/// Where a path starts: a start point of a homotopy, or a given box.
pub enum Job<'a> {
    Homotopy(&'a Homotopy, usize),
    Box(&'a ParametricSystem, &'a MooreBoxRecord),
}

impl Job<'_> {
    fn system(&self) -> &ParametricSystem {
        match self {
            Job::Homotopy(h, _) => &h.system,
            Job::Box(sys, _) => sys,
        }
    }

    fn start_box<E: Real>(&self, ctx: &PrecisionContext) -> algpath::Result<MooreBox<E>> {
        match self {
            Job::Homotopy(h, i) => h.start_box(*i, ctx),
            Job::Box(_, rec) => rec.to_box(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathLine {
    pub path: usize,
    pub status: String,
    pub steps: u64,
    pub rejected: u64,
    pub t_reached: f64,
    pub bits: u32,
    pub x: Option<Vec<[f64; 2]>>,
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PathLine {
    pub fn certified(&self) -> bool {
        self.status == "certified"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub paths: usize,
    pub failures: usize,
    pub median_steps: f64,
    pub max_steps: u64,
    pub total_steps: u64,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
}

impl Summary {
    pub fn new(lines: &[PathLine], wall_seconds: f64) -> Self {
        let mut steps: Vec<u64> = lines.iter().map(|l| l.steps).collect();
        steps.sort_unstable();
        let n = steps.len();
        let median_steps = match n {
            0 => 0.0,
            _ if n % 2 == 1 => steps[n / 2] as f64,
            _ => (steps[n / 2 - 1] + steps[n / 2]) as f64 / 2.0,
        };
        let total_steps: u64 = steps.iter().sum();
        Summary {
            paths: n,
            failures: lines.iter().filter(|l| !l.certified()).count(),
            median_steps,
            max_steps: steps.last().copied().unwrap_or(0),
            total_steps,
            wall_seconds,
            steps_per_second: if wall_seconds > 0.0 {
                total_steps as f64 / wall_seconds
            } else {
                0.0
            },
        }
    }
}

#[derive(Serialize)]
struct TraceLine<'a> {
    path: usize,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

fn status_name(s: PathStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn run_one<E: Real>(
    index: usize,
    job: &Job,
    args: &TrackingArgs,
    ctx: PrecisionContext,
    trace: bool,
) -> (PathLine, Vec<TraceRecord>) {
    let mut records = Vec::new();
    let failed = |status: &str, e: algpath::Error| PathLine {
        path: index,
        status: status.into(),
        steps: 0,
        rejected: 0,
        t_reached: 0.0,
        bits: ctx.bits(),
        x: None,
        r: None,
        error: Some(e.to_string()),
    };
    let start = match job.start_box::<E>(&ctx) {
        Ok(b) => b,
        Err(e) => return (failed("start_rejected", e), records),
    };
    let predictor: PredictorKind = args.predictor.into();
    let mut observer = |r: &TraceRecord| {
        if trace {
            records.push(r.clone())
        }
    };
    let res = track_observed(job.system(), &start, predictor, ctx, &args.options(), &mut observer);
    let line = match res {
        Ok(res) => {
            let rec = res.final_box.as_ref().map(|b| b.to_record());
            PathLine {
                path: index,
                status: status_name(res.status),
                steps: res.steps,
                rejected: res.rejected,
                t_reached: res.t_reached,
                bits: res.ctx.bits(),
                x: rec.as_ref().map(|b| b.x.clone()),
                r: rec.map(|b| b.r),
                error: None,
            }
        }
        Err(e) => failed("error", e),
    };
    (line, records)
}

/// Tracks all jobs on a worker pool; results come back in job order.
pub fn run_jobs(
    jobs: &[Job],
    args: &TrackingArgs,
    trace: bool,
) -> CliResult<(Vec<PathLine>, Vec<Vec<TraceRecord>>, f64)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let results: Vec<(PathLine, Vec<TraceRecord>)> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(i, job)| match args.precision {
                PrecisionArg::Fixed => run_one::<f64>(i, job, args, PrecisionContext::fixed64(), trace),
                PrecisionArg::Adaptive => {
                    run_one::<Dyadic>(i, job, args, PrecisionContext::dyadic(53), trace)
                }
            })
            .collect()
    });
    let wall = start.elapsed().as_secs_f64();
    let (lines, traces) = results.into_iter().unzip();
    Ok((lines, traces, wall))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

pub fn read_system(path: &Path) -> CliResult<PolySystem> {
    let text = read_text(path)?;
    parse_system(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn compile(sys: &PolySystem, path: &Path) -> CliResult<Circuit> {
    sys.to_circuit().map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn read_starts(path: &Path) -> CliResult<Vec<Vec<Complex64>>> {
    parse_start_points(&read_text(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).map_err(CliError::io(p))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T, path: Option<&Path>) -> CliResult<()> {
    let line = serde_json::to_string(value).expect("records serialize");
    writeln!(out, "{line}").map_err(CliError::io(path.unwrap_or(Path::new("<stdout>"))))
}

/// Writes path lines and the summary, plus the trace if requested, and
/// returns the exit code.
fn report(
    lines: &[PathLine],
    traces: &[Vec<TraceRecord>],
    wall: f64,
    output: Option<&Path>,
    trace: Option<&Path>,
) -> CliResult<u8> {
    let mut out = open_output(output)?;
    for l in lines {
        json_line(&mut out, l, output)?;
    }
    let summary = Summary::new(lines, wall);
    json_line(&mut out, &summary, output)?;
    out.flush().map_err(CliError::io(output.unwrap_or(Path::new("<stdout>"))))?;
    if let Some(p) = trace {
        let mut t = open_output(Some(p))?;
        for (i, recs) in traces.iter().enumerate() {
            for record in recs {
                json_line(&mut t, &TraceLine { path: i, record }, Some(p))?;
            }
        }
        t.flush().map_err(CliError::io(p))?;
    }
    eprintln!(
        "{} paths, {} failures, median {} / max {} steps, {:.3} s",
        summary.paths, summary.failures, summary.median_steps, summary.max_steps, wall
    );
    Ok(if summary.failures == 0 { 0 } else { 1 })
}

/// Builds the homotopies requested by `solve`; Newton homotopies get one
/// homotopy per start point.
pub fn build_homotopies(
    kind: HomotopyArg,
    sys: &PolySystem,
    target: &Circuit,
    starts: Option<Vec<Vec<Complex64>>>,
    seed: u64,
) -> CliResult<Vec<Homotopy>> {
    let parametric = sys.param.is_some();
    match kind {
        HomotopyArg::TotalDegree | HomotopyArg::Newton if parametric => Err(CliError::Usage(
            "the target system must not declare a parameter".into(),
        )),
        HomotopyArg::Parametric if !parametric => Err(CliError::Usage(
            "a parametric homotopy needs a `param:` line".into(),
        )),
        HomotopyArg::TotalDegree => {
            if starts.is_some() {
                return Err(CliError::Usage("total-degree homotopies choose their own starts".into()));
            }
            Ok(vec![build_total_degree(target, seed)?])
        }
        HomotopyArg::Newton => {
            let starts = starts.unwrap_or_else(|| vec![random_gamma(seed, target.n_inputs())]);
            starts.iter().map(|x0| Ok(build_newton(target, x0)?)).collect()
        }
        HomotopyArg::Parametric => {
            let starts = starts.ok_or_else(|| CliError::Usage("--start is required".into()))?;
            Ok(vec![build_parametric(target.clone(), starts)?])
        }
    }
}

pub fn jobs_of(homotopies: &[Homotopy]) -> Vec<Job<'_>> {
    homotopies
        .iter()
        .flat_map(|h| (0..h.n_paths()).map(move |i| Job::Homotopy(h, i)))
        .collect()
}

pub fn solve(args: &SolveArgs) -> CliResult<u8> {
    let sys = read_system(&args.system)?;
    let target = compile(&sys, &args.system)?;
    let starts = args.start.as_deref().map(read_starts).transpose()?;
    let homotopies = build_homotopies(args.homotopy, &sys, &target, starts, args.seed)?;
    let jobs = jobs_of(&homotopies);
    let (lines, traces, wall) = run_jobs(&jobs, &args.tracking, args.trace.is_some())?;
    report(&lines, &traces, wall, args.output.as_deref(), args.trace.as_deref())
}

pub fn track(args: &TrackArgs) -> CliResult<u8> {
    let sys = read_system(&args.system)?;
    if sys.param.is_none() {
        return Err(CliError::Usage("track needs a parametric system".into()));
    }
    let system = ParametricSystem::new(compile(&sys, &args.system)?)?;
    let records: Vec<MooreBoxRecord> = read_text(&args.start)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(MooreBoxRecord::from_json)
        .collect::<algpath::Result<_>>()
        .map_err(|source| CliError::Parse {
            path: args.start.display().to_string(),
            source,
        })?;
    let jobs: Vec<Job> = records.iter().map(|r| Job::Box(&system, r)).collect();
    let (lines, traces, wall) = run_jobs(&jobs, &args.tracking, args.trace.is_some())?;
    report(&lines, &traces, wall, args.output.as_deref(), args.trace.as_deref())
}

#[derive(Serialize)]
struct CertifyLine {
    status: &'static str,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    moore_box: Option<MooreBoxRecord>,
}

/// A Moore box record, bare or wrapped as `{"status": ..., "box": ...}`.
fn read_box_record(text: &str) -> algpath::Result<MooreBoxRecord> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| algpath::Error::Json(e.to_string()))?;
    let inner = value.get("box").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| algpath::Error::Json(e.to_string()))
}

fn certify_with<E: Real>(
    sys: &System,
    args: &CertifyArgs,
    mut ctx: PrecisionContext,
) -> CliResult<(CertifyLine, u8)> {
    let rejected = |status| Ok((CertifyLine { status, moore_box: None }, 1));
    let b: MooreBox<E> = if let Some(path) = &args.r#box {
        let text = read_text(path)?;
        let rec = read_box_record(text.trim()).map_err(|source| CliError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        let b = rec.to_box()?;
        if !b.certifies(sys, &ctx)? {
            return rejected("not_certified");
        }
        b
    } else {
        let point = match (&args.point, &args.start) {
            (Some(p), _) => {
                let pairs: Vec<[f64; 2]> = serde_json::from_str(p)
                    .map_err(|e| CliError::Core(algpath::Error::Json(e.to_string())))?;
                pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()
            }
            (None, Some(path)) => read_starts(path)?
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Usage(format!("{}: no start point", path.display())))?,
            (None, None) => return Err(CliError::Usage("no candidate given".into())),
        };
        let x: Vec<CPoint<E>> = point.iter().map(|&z| CPoint::from_complex(z)).collect();
        match certify_candidate(sys, &x, &ctx) {
            Ok(b) => b,
            Err(algpath::Error::CandidateRejected) => return rejected("candidate_rejected"),
            Err(algpath::Error::SingularJacobian) => return rejected("singular_jacobian"),
            Err(e) => return Err(e.into()),
        }
    };
    let b = match args.refine {
        Some(tau) => match refine(sys, &b, &E::from_f64(tau), &mut ctx, &RefineOptions::default()) {
            Ok(b) => b,
            Err(algpath::Error::InvalidArgument(m)) => return Err(CliError::Usage(m)),
            Err(_) => return rejected("refine_failed"),
        },
        None => b,
    };
    Ok((
        CertifyLine {
            status: "certified",
            moore_box: Some(b.to_record()),
        },
        0,
    ))
}

pub fn certify(args: &CertifyArgs) -> CliResult<u8> {
    let poly = read_system(&args.system)?;
    if poly.param.is_some() {
        return Err(CliError::Usage("certify needs a system without parameter".into()));
    }
    let sys = System::new(compile(&poly, &args.system)?)?;
    let (line, code) = match args.precision {
        PrecisionArg::Fixed => certify_with::<f64>(&sys, args, PrecisionContext::fixed64())?,
        PrecisionArg::Adaptive => certify_with::<Dyadic>(&sys, args, PrecisionContext::dyadic(53))?,
    };
    let mut out = open_output(None)?;
    json_line(&mut out, &line, None)?;
    out.flush().map_err(CliError::io("<stdout>"))?;
    Ok(code)
}
