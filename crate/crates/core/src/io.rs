//! CSV file formats.
//!
//! * problems: header `x1,...,xd,y`, one measurement per line;
//! * point sets: header `x,y` or `x,y,is_outlier`;
//! * galleries: a directory with one headerless CSV per class, one template
//!   per line, the file stem being the class label;
//! * query files: headerless, one vector per line.
//!
//! Numbers are written with the shortest representation that round-trips.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::{ClassGallery, PointSet};
use crate::problem::RegressionProblem;

fn parse_err(path: &str, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.into() }
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn parse_field(path: &str, line: u64, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(path, line, e.to_string())
}

pub fn parse_problem<R: Read>(reader: R, name: &str) -> Result<RegressionProblem> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(name, e))?.clone();
    let width = header.len();
    let valid = width >= 2
        && header.get(width - 1).map(str::trim) == Some("y")
        && (0..width - 1).all(|j| header.get(j).map(str::trim) == Some(&format!("x{}", j + 1)));
    if !valid {
        return Err(parse_err(name, 1, "header must be x1,...,xd,y"));
    }
    let d = width - 1;
    let mut rows = Vec::new();
    let mut response = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(name, e))?;
        let line = record_line(&rec);
        if rec.len() != width {
            return Err(parse_err(name, line, format!("expected {width} fields, found {}", rec.len())));
        }
        for j in 0..d {
            rows.push(parse_field(name, line, &rec[j])?);
        }
        response.push(parse_field(name, line, &rec[d])?);
    }
    if response.is_empty() {
        return Err(parse_err(name, 2, "no measurements"));
    }
    RegressionProblem::new(rows, d, response)
}

pub fn read_problem(path: &Path) -> Result<RegressionProblem> {
    parse_problem(File::open(path)?, &path.display().to_string())
}

pub fn write_problem<W: Write>(out: W, problem: &RegressionProblem) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = problem.dim();
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for i in 0..problem.len() {
        let mut rec: Vec<String> = problem.row(i).iter().map(ToString::to_string).collect();
        rec.push(problem.response()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_problem(path: &Path, problem: &RegressionProblem) -> Result<()> {
    write_problem(BufWriter::new(File::create(path)?), problem)
}

pub fn parse_points<R: Read>(reader: R, name: &str) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(name, e))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let flagged = match names.as_slice() {
        ["x", "y"] => false,
        ["x", "y", "is_outlier"] => true,
        _ => return Err(parse_err(name, 1, "header must be x,y or x,y,is_outlier")),
    };
    let mut set = PointSet::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(name, e))?;
        let line = record_line(&rec);
        if rec.len() != header.len() {
            return Err(parse_err(name, line, format!("expected {} fields", header.len())));
        }
        set.points.push([parse_field(name, line, &rec[0])?, parse_field(name, line, &rec[1])?]);
        let outlier = if flagged {
            match rec[2].trim() {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(parse_err(name, line, format!("bad is_outlier value {other:?}"))),
            }
        } else {
            false
        };
        set.outlier.push(outlier);
    }
    Ok(set)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(File::open(path)?, &path.display().to_string())
}

pub fn write_points<W: Write>(out: W, set: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "is_outlier"])?;
    for (p, o) in set.points.iter().zip(&set.outlier) {
        w.write_record([p[0].to_string(), p[1].to_string(), u8::from(*o).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_vectors<R: Read>(reader: R, name: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(name, e))?;
        let line = record_line(&rec);
        let v = rec.iter().map(|f| parse_field(name, line, f)).collect::<Result<Vec<_>>>()?;
        out.push(v);
    }
    Ok(out)
}

pub fn read_vectors(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_vectors(File::open(path)?, &path.display().to_string())
}

pub fn write_vectors<W: Write>(out: W, vectors: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for v in vectors {
        w.write_record(v.iter().map(ToString::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_gallery(dir: &Path) -> Result<ClassGallery> {
    let mut classes = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let label = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidInput(format!("bad class file name {}", path.display())))?
            .to_string();
        classes.push((label, read_vectors(&path)?));
    }
    ClassGallery::new(classes)
}

pub fn write_gallery(dir: &Path, gallery: &ClassGallery) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (label, templates) in gallery.classes() {
        let file = File::create(dir.join(format!("{label}.csv")))?;
        write_vectors(BufWriter::new(file), templates)?;
    }
    Ok(())
}
