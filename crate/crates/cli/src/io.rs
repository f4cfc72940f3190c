//! CSV readers for attribute and distance tables, and the weights writer.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use spatreg_core::weights::ASYMMETRY_TOLERANCE;
use spatreg_core::{DistanceMatrix, Matrix, RawAttributeTable, SpatialWeightMatrix};

use crate::config::DistFormat;
use crate::error::{CliError, Result};
use crate::report::canonical;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(input)
}

fn parse_error(path: &Path, line: u64, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map_or(0, |p| p.line());
    parse_error(path, line, 0, err.to_string())
}

fn parse_real(path: &Path, line: u64, column: usize, field: &str) -> Result<f64> {
    if field.is_empty() {
        return Err(parse_error(path, line, column, "missing value"));
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(
            path,
            line,
            column,
            format!("`{field}` is not a finite decimal number"),
        )),
    }
}

fn check_header(path: &Path, headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(parse_error(
            path,
            1,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

/// Reads an `id,x,y` table.
pub fn parse_attributes(path: &Path) -> Result<RawAttributeTable> {
    read_attributes(open(path)?, path)
}

pub fn read_attributes<R: Read>(input: R, path: &Path) -> Result<RawAttributeTable> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    check_header(path, &headers, &["id", "x", "y"])?;
    let (mut ids, mut xs, mut ys) = (Vec::new(), Vec::new(), Vec::new());
    let mut seen = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_error(path, line, 1, "missing id"));
        }
        if let Some(first) = seen.insert(id.clone(), line) {
            return Err(CliError::Schema(format!(
                "duplicate id `{id}` on lines {first} and {line}"
            )));
        }
        xs.push(parse_real(path, line, 2, &record[1])?);
        ys.push(parse_real(path, line, 3, &record[2])?);
        ids.push(id);
    }
    RawAttributeTable::new(ids, xs, ys).map_err(CliError::core("attribute table"))
}

/// Reads a distance table and aligns it to `ids` (the attribute order).
pub fn parse_distances(path: &Path, format: DistFormat, ids: &[String]) -> Result<DistanceMatrix> {
    read_distances(open(path)?, path, format, ids)
}

pub fn read_distances<R: Read>(input: R, path: &Path, format: DistFormat, ids: &[String]) -> Result<DistanceMatrix> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let m = match format {
        DistFormat::Square => read_square(input, path, ids, &index)?,
        DistFormat::Long => read_long(input, path, ids, &index)?,
    };
    DistanceMatrix::new(m).map_err(CliError::core("distance table"))
}

fn read_square<R: Read>(input: R, path: &Path, ids: &[String], index: &HashMap<&str, usize>) -> Result<Matrix> {
    let n = ids.len();
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.get(0) != Some("id") {
        return Err(parse_error(
            path,
            1,
            1,
            "square distance table must start with an `id` column",
        ));
    }
    let mut columns = Vec::with_capacity(n);
    for (c, h) in headers.iter().enumerate().skip(1) {
        let j = *index.get(h).ok_or_else(|| CliError::UnknownId(h.to_string()))?;
        if columns.contains(&j) {
            return Err(parse_error(path, 1, c + 1, format!("column `{h}` repeated")));
        }
        columns.push(j);
    }
    if columns.len() != n {
        return Err(CliError::Schema(format!(
            "distance table has {} columns, attribute table has {n} units",
            columns.len()
        )));
    }

    let mut m = Matrix::zeros(n, n);
    let mut row_seen = vec![false; n];
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record).map_err(|e| csv_error(path, e))? {
        let line = record.position().map_or(0, |p| p.line());
        let i = *index
            .get(&record[0])
            .ok_or_else(|| CliError::UnknownId(record[0].to_string()))?;
        if std::mem::replace(&mut row_seen[i], true) {
            return Err(parse_error(path, line, 1, format!("row `{}` repeated", &record[0])));
        }
        for (c, &j) in columns.iter().enumerate() {
            if i == j {
                continue;
            }
            m.set(i, j, parse_real(path, line, c + 2, &record[c + 1])?);
        }
    }
    if let Some(i) = row_seen.iter().position(|s| !s) {
        return Err(CliError::Schema(format!("distance table has no row for `{}`", ids[i])));
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (m.get(i, j), m.get(j, i));
            let relative_gap = (a - b).abs() / a.abs().max(b.abs());
            if relative_gap > ASYMMETRY_TOLERANCE {
                return Err(CliError::Core {
                    context: "distance table",
                    source: spatreg_core::Error::AsymmetricDistance { i, j, relative_gap },
                });
            }
        }
    }
    Ok(m)
}

fn read_long<R: Read>(input: R, path: &Path, ids: &[String], index: &HashMap<&str, usize>) -> Result<Matrix> {
    let n = ids.len();
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    check_header(path, &headers, &["from", "to", "distance"])?;
    let mut m = Matrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| CliError::UnknownId(s.to_string()));
        let (i, j) = (lookup(&record[0])?, lookup(&record[1])?);
        if i == j {
            return Err(parse_error(path, line, 2, format!("self pair `{}`", &record[0])));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        if std::mem::replace(&mut seen[lo * n + hi], true) {
            return Err(CliError::DuplicatePair(ids[lo].clone(), ids[hi].clone()));
        }
        let d = parse_real(path, line, 3, &record[2])?;
        m.set(i, j, d);
        m.set(j, i, d);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !seen[i * n + j] {
                return Err(CliError::MissingPair(ids[i].clone(), ids[j].clone()));
            }
        }
    }
    Ok(m)
}

/// Writes `W` as a square CSV with the same layout as the distance input.
pub fn write_weights_csv<W: Write>(out: W, ids: &[String], w: &SpatialWeightMatrix) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend(ids.iter().cloned());
    wtr.write_record(&header)?;
    let m = w.matrix();
    for (i, id) in ids.iter().enumerate() {
        let mut row = Vec::with_capacity(ids.len() + 1);
        row.push(id.clone());
        row.extend((0..ids.len()).map(|j| canonical(m.get(i, j)).to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()
}
