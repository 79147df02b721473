use std::io::Write;

use serde::Serialize;

use algpath::circuit::Circuit;
use algpath::homotopy::{build_newton, build_total_degree, corpus, random_gamma, Homotopy};

use crate::config::{BenchArgs, FormatArg, HomotopyArg};
use crate::error::{CliError, CliResult};
use crate::paths::{run_jobs, Job, Summary};

#[derive(Serialize)]
struct Row {
    name: String,
    dim: usize,
    max_deg: u32,
    paths: usize,
    f_size: usize,
    df_size: usize,
    failures: usize,
    median_steps: f64,
    max_steps: u64,
    total_steps: u64,
    ksteps_per_second: f64,
    wall_seconds: f64,
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("bench {family} needs --{flag}")))
}

fn target(args: &BenchArgs) -> CliResult<(String, Circuit)> {
    let fam = args.family.as_str();
    Ok(match fam {
        "dense" => {
            let (n, d) = (need(args.dim, "dim", fam)?, need(args.deg, "deg", fam)?);
            (format!("dense {n} {d}"), corpus::dense(n, d, args.seed)?.to_circuit()?)
        }
        "structured" => {
            let (n, d) = (need(args.dim, "dim", fam)?, need(args.deg, "deg", fam)?);
            (format!("structured {n} {d}"), corpus::structured(n, d, args.seed)?)
        }
        "katsura" => {
            let n = need(args.n.or(args.dim), "n", fam)?;
            (format!("katsura {n}"), corpus::katsura(n)?.to_circuit()?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown benchmark family `{other}` (expected dense, structured or katsura)"
            )))
        }
    })
}

/// `k` path indices spread evenly over `0..n`.
fn spread(n: usize, k: usize) -> Vec<usize> {
    if k >= n {
        return (0..n).collect();
    }
    (0..k).map(|i| i * n / k).collect()
}

pub fn bench(args: &BenchArgs) -> CliResult<u8> {
    let (name, f) = target(args)?;
    let n = f.n_inputs();
    let newton = args.family == "structured" && args.homotopy == HomotopyArg::Newton;
    let h: Homotopy = if newton {
        build_newton(&f, &random_gamma(args.seed, n))?
    } else {
        build_total_degree(&f, args.seed)?
    };
    let picked = spread(h.n_paths(), args.paths.unwrap_or(usize::MAX));
    let jobs: Vec<Job> = picked.iter().map(|&i| Job::Homotopy(&h, i)).collect();
    let (lines, _, wall) = run_jobs(&jobs, &args.tracking, false)?;
    let s = Summary::new(&lines, wall);
    let max_deg = f.output_degrees(&(0..n).collect::<Vec<_>>()).into_iter().max().unwrap_or(0);
    let row = Row {
        name: if newton { format!("{name} newton") } else { name },
        dim: n,
        max_deg,
        paths: s.paths,
        f_size: h.system.f().size(),
        df_size: h.system.df().size(),
        failures: s.failures,
        median_steps: s.median_steps,
        max_steps: s.max_steps,
        total_steps: s.total_steps,
        ksteps_per_second: s.steps_per_second / 1e3,
        wall_seconds: wall,
    };
    let mut out = std::io::stdout().lock();
    let text = match args.format {
        FormatArg::Json => serde_json::to_string(&row).expect("rows serialize"),
        FormatArg::Text => format!(
            "{:<24} {:>4} {:>4} {:>6} {:>6} {:>6} {:>5} {:>7} {:>6} {:>9} {:>9}\n{:<24} {:>4} {:>4} {:>6} {:>6} {:>6} {:>5} {:>7} {:>6} {:>9.2} {:>9.3}",
            "name", "dim", "deg", "paths", "f", "df", "fail", "med", "max", "ksteps/s", "time(s)",
            row.name, row.dim, row.max_deg, row.paths, row.f_size, row.df_size, row.failures,
            row.median_steps, row.max_steps, row.ksteps_per_second, row.wall_seconds,
        ),
    };
    writeln!(out, "{text}").map_err(CliError::io("<stdout>"))?;
    Ok(if row.failures == 0 { 0 } else { 1 })
}
