//! Timing harness. Everything runs on the calling thread, and only the solve
//! call sits inside the timed region.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use linfit::models::{gen_line_data, ContaminationSpec};
use linfit::{solve_cg, solve_full, CgConfig, Error, MinimaxSolution};

use crate::args::BenchArgs;
use crate::commands::cg_config;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Full,
    Cg,
}

impl Variant {
    fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Cg => "cg",
        }
    }
}

struct Record {
    n: usize,
    d: usize,
    variant: Variant,
    rep: usize,
    seed: u64,
    /// `None` when the solve failed; the cell is reported as missing.
    wall_seconds: Option<f64>,
    cg_iterations: usize,
    delta: Option<f64>,
    status: String,
}

fn time_solve(variant: Variant, problem: &linfit::RegressionProblem, cfg: &CgConfig) -> (f64, Result<MinimaxSolution, Error>) {
    let start = Instant::now();
    let out = match variant {
        Variant::Full => solve_full(problem),
        Variant::Cg => solve_cg(problem, cfg),
    };
    // clock resolution can round a tiny solve down to zero
    (start.elapsed().as_secs_f64().max(1e-9), out)
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub(crate) fn run(a: &BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.reps == 0 {
        return Err(CliError::User("--reps must be at least 1".into()));
    }
    for &d in &a.dims {
        if d == 0 {
            return Err(CliError::User("dimensions must be at least 1".into()));
        }
        if let Some(&n) = a.sizes.iter().find(|&&n| n < d + 2) {
            return Err(CliError::User(format!("size {n} is below d + 2 = {} for d = {d}", d + 2)));
        }
    }
    let cfg = cg_config(a.cg.lmax);
    cfg.validate()?;

    let mut records = Vec::new();
    for &d in &a.dims {
        for &n in &a.sizes {
            for rep in 0..a.reps {
                let seed = a.seed.wrapping_add(rep as u64);
                let problem = gen_line_data(&ContaminationSpec::timing(n, d, seed))?.problem;
                for variant in [Variant::Full, Variant::Cg] {
                    let (secs, out) = time_solve(variant, &problem, &cfg);
                    let rec = match out {
                        Ok(sol) => Record {
                            n,
                            d,
                            variant,
                            rep,
                            seed,
                            wall_seconds: Some(secs),
                            cg_iterations: sol.iterations,
                            delta: Some(sol.delta_opt),
                            status: "ok".into(),
                        },
                        Err(e) => Record {
                            n,
                            d,
                            variant,
                            rep,
                            seed,
                            wall_seconds: None,
                            cg_iterations: match &e {
                                Error::IterationCapReached(s) => s.iterations,
                                _ => 0,
                            },
                            delta: None,
                            status: format!("failed: {e}"),
                        },
                    };
                    records.push(rec);
                }
            }
        }
    }

    if let Some(path) = &a.out {
        write_records(BufWriter::new(File::create(path)?), &records)?;
    }
    write_summary(stdout, a, &records)?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_records<W: Write>(out: W, records: &[Record]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::from(Error::from(e));
    w.write_record(["n", "d", "solver", "rep", "seed", "wall_seconds", "cg_iterations", "delta", "status"])
        .map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.d.to_string(),
            r.variant.name().to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            opt(r.wall_seconds),
            r.cg_iterations.to_string(),
            opt(r.delta),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(out: &mut dyn Write, a: &BenchArgs, records: &[Record]) -> CliResult<()> {
    writeln!(out, "{:>7} {:>3} {:>14} {:>14} {:>9} {:>8}", "n", "d", "full_median_s", "cg_median_s", "speedup", "missing")?;
    for &d in &a.dims {
        for &n in &a.sizes {
            let cell: Vec<&Record> = records.iter().filter(|r| r.n == n && r.d == d).collect();
            let times = |v: Variant| -> Vec<f64> {
                cell.iter().filter(|r| r.variant == v).filter_map(|r| r.wall_seconds).collect()
            };
            let full = median(times(Variant::Full));
            let cg = median(times(Variant::Cg));
            let missing = cell.iter().filter(|r| r.wall_seconds.is_none()).count();
            let fmt = |t: Option<f64>| t.map_or("-".to_string(), |t| format!("{t:.6}"));
            let ratio = match (full, cg) {
                (Some(f), Some(c)) => format!("{:.1}x", f / c),
                _ => "-".into(),
            };
            writeln!(out, "{n:>7} {d:>3} {:>14} {:>14} {ratio:>9} {missing:>8}", fmt(full), fmt(cg))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(vec![]), None);
    }
}
