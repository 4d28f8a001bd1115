use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use linfit::io::{read_gallery, read_problem, read_vectors, save_problem, write_gallery, write_points, write_vectors};
use linfit::models::{
    classify_residual, gen_ellipse_data, gen_gallery as make_gallery, gen_line_data, gen_queries,
    ContaminationSpec, EllipseSpec, GallerySpec, OcclusionSpec, Sidedness,
};
use linfit::{
    least_squares, max_abs_residual, remove_outliers, solve_cg, solve_full_with, support_set, CgConfig,
    Error, MinimaxSolution, RemovalConfig, RemovalCounting, SupportTolerances,
};

use crate::args::{ClassifyArgs, FitArgs, FitMode, GenEllipseArgs, GenGalleryArgs, GenLineArgs, RemoveArgs};
use crate::{CliError, CliResult};

pub(crate) fn cg_config(lmax: usize) -> CgConfig {
    CgConfig { l_max: lmax, ..CgConfig::default() }
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes `text` to `out` when given, otherwise to `stdout`.
fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn summary(mode: &str, sol: &MinimaxSolution) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode: {mode}");
    let _ = writeln!(s, "beta: {}", join(sol.beta.iter()));
    let _ = writeln!(s, "delta: {}", sol.delta_opt);
    let _ = writeln!(s, "support: {}", join(&sol.support));
    let _ = writeln!(s, "iterations: {}", sol.iterations);
    let _ = writeln!(s, "certified: {}", sol.certified);
    s
}

pub(crate) fn fit(a: &FitArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let problem = read_problem(&a.input)?;
    let tol = SupportTolerances::default();
    let (mode, result) = match a.mode {
        FitMode::LinfFull => ("linf-full", solve_full_with(&problem, tol)),
        FitMode::LinfCg => ("linf-cg", solve_cg(&problem, &cg_config(a.cg.lmax))),
        FitMode::Ls => {
            let beta = least_squares(&problem, a.ridge)?;
            let delta = max_abs_residual(&problem, &beta);
            let support = support_set(&problem, &beta, delta, tol);
            let sol = MinimaxSolution {
                beta,
                delta_opt: delta,
                support,
                iterations: 0,
                subproblem_solves: 0,
                pivots: 0,
                certified: true,
            };
            ("ls", Ok(sol))
        }
    };
    match result {
        Ok(sol) => emit(a.out.as_deref(), stdout, &summary(mode, &sol)),
        Err(Error::IterationCapReached(sol)) => {
            // still report the best iterate, but fail the run
            emit(a.out.as_deref(), stdout, &summary(mode, &sol))?;
            Err(CliError::Internal(Error::IterationCapReached(sol).to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn remove(a: &RemoveArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let problem = read_problem(&a.input)?;
    let mut cfg = RemovalConfig::new(a.outlier_fraction).with_solver(a.solver.into());
    cfg.cg = cg_config(a.cg.lmax);
    if a.gross {
        cfg.counting = RemovalCounting::Gross;
    }
    let rep = remove_outliers(&problem, &cfg)?;
    if let Some(path) = &a.report {
        rep.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &a.out {
        let positions: Vec<usize> =
            rep.kept.iter().map(|&l| problem.position_of(l).expect("kept label")).collect();
        save_problem(path, &problem.subset(&positions)?)?;
    }
    let mut s = String::new();
    let _ = writeln!(s, "rounds: {}", rep.rounds.len());
    let _ = writeln!(s, "target: {}", rep.target);
    let _ = writeln!(s, "removed: {}{}", rep.removed.len(), if rep.overshoot { " (overshoot)" } else { "" });
    let _ = writeln!(s, "removed_rows: {}", join(&rep.removed));
    let _ = writeln!(s, "final_delta: {}", rep.final_delta);
    let _ = writeln!(s, "final_beta: {}", join(rep.final_beta.iter()));
    stdout.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn gen_line(a: &GenLineArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = ContaminationSpec {
        n: a.n,
        k: a.k,
        dim: a.dim,
        sidedness: if a.two_sided { Sidedness::TwoSided } else { Sidedness::OneSided },
        intercept: !a.no_intercept,
        seed: a.seed,
    };
    let lp = gen_line_data(&spec)?;
    save_problem(&a.out, &lp.problem)?;
    let outliers = lp.outlier_labels();
    let mut s = String::new();
    let _ = writeln!(s, "beta_true: {}", join(lp.true_beta.iter()));
    match (outliers.first(), outliers.last()) {
        (Some(first), Some(last)) => {
            let _ = writeln!(s, "outliers: {} (rows {first}..={last})", outliers.len());
        }
        _ => {
            let _ = writeln!(s, "outliers: 0");
        }
    }
    stdout.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn gen_ellipse(a: &GenEllipseArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.center.len() != 2 || a.semi_axes.len() != 2 {
        return Err(CliError::User("--center and --semi-axes take two comma-separated values".into()));
    }
    let spec = EllipseSpec {
        n_inliers: a.n_inliers,
        n_outliers: a.n_outliers,
        center: [a.center[0], a.center[1]],
        semi_axes: [a.semi_axes[0], a.semi_axes[1]],
        rotation: a.rotation,
        noise: a.noise,
        box_scale: a.box_scale,
        seed: a.seed,
    };
    let set = gen_ellipse_data(&spec)?;
    write_points(BufWriter::new(File::create(&a.out)?), &set)?;
    let mut s = String::new();
    let _ = writeln!(s, "center: {} {}", spec.center[0], spec.center[1]);
    let _ = writeln!(s, "semi_axes: {} {}", spec.semi_axes[0], spec.semi_axes[1]);
    let _ = writeln!(s, "rotation: {}", spec.rotation);
    let _ = writeln!(s, "points: {}", set.points.len());
    let _ = writeln!(s, "outliers: {}", set.outlier.iter().filter(|&&o| o).count());
    stdout.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn gen_gallery(a: &GenGalleryArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = GallerySpec {
        classes: a.classes,
        templates_per_class: a.templates,
        len: a.len,
        seed: a.seed,
        ..GallerySpec::default()
    };
    let gallery = make_gallery(&spec)?;
    write_gallery(&a.out, &gallery)?;
    let mut s = String::new();
    let _ = writeln!(s, "classes: {}", gallery.classes().len());
    let _ = writeln!(s, "templates: {}", gallery.template_count());
    let _ = writeln!(s, "length: {}", gallery.vector_len());
    if a.queries_out.is_some() || a.labels_out.is_some() {
        let occ = OcclusionSpec {
            count: a.queries,
            fraction: a.occlusion,
            seed: a.seed.wrapping_add(1),
            ..OcclusionSpec::default()
        };
        let queries = gen_queries(&gallery, &occ)?;
        if let Some(path) = &a.queries_out {
            let vectors: Vec<Vec<f64>> = queries.iter().map(|q| q.vector.clone()).collect();
            write_vectors(BufWriter::new(File::create(path)?), &vectors)?;
        }
        if let Some(path) = &a.labels_out {
            let labels: String = queries.iter().map(|q| format!("{}\n", q.label)).collect();
            fs::write(path, labels)?;
        }
        let _ = writeln!(s, "queries: {}", queries.len());
    }
    stdout.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn classify(a: &ClassifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let gallery = read_gallery(&a.gallery)?;
    let queries = read_vectors(&a.query)?;
    let mut cfg = RemovalConfig::new(a.outlier_fraction).with_solver(a.solver.into());
    cfg.cg = cg_config(a.cg.lmax);

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec!["query".to_string(), "label".to_string()];
        header.extend(gallery.labels().map(String::from));
        w.write_record(&header).map_err(linfit::Error::from)?;
        for (i, q) in queries.iter().enumerate() {
            let c = classify_residual(&gallery, q, &cfg)?;
            let mut rec = vec![i.to_string(), c.label];
            rec.extend(c.residuals.iter().map(|(_, r)| r.to_string()));
            w.write_record(&rec).map_err(linfit::Error::from)?;
        }
        w.flush()?;
    }
    emit(a.out.as_deref(), stdout, std::str::from_utf8(&buf).expect("csv output is utf-8"))
}
