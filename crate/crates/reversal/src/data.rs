//! CSV ingestion and export, and column standardization.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use reversal_core::linalg::{DataColumn, DataMatrix};
use reversal_core::simpson::CategoricalStudy;
use reversal_core::Error as CoreError;

use crate::error::{AppError, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input)
}

fn csv_error(e: csv::Error) -> AppError {
    let row = e.position().map_or(0, |p| p.line() as usize);
    AppError::Parse { row, column: String::new(), message: e.to_string() }
}

type Records = (Vec<String>, Vec<(usize, csv::StringRecord)>);

/// Reads the header and all records, checking field counts and duplicate labels.
fn records<R: Read>(input: R, origin: &Path) -> Result<Records> {
    let mut rdr = reader(input);
    let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(AppError::EmptyFile(origin.to_path_buf()));
    }
    let mut seen = HashSet::new();
    for (i, h) in header.iter().enumerate() {
        if h.is_empty() {
            return Err(AppError::Parse { row: 1, column: format!("#{}", i + 1), message: "empty header label".into() });
        }
        if !seen.insert(h.as_str()) {
            return Err(AppError::Parse { row: 1, column: h.clone(), message: "duplicate header label".into() });
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let row = rec.position().map_or(rows.len() + 2, |p| p.line() as usize);
        if rec.len() != header.len() {
            let column = header.get(rec.len()).cloned().unwrap_or_else(|| format!("#{}", rec.len()));
            return Err(AppError::Parse {
                row,
                column,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        rows.push((row, rec));
    }
    if rows.is_empty() {
        return Err(AppError::EmptyFile(origin.to_path_buf()));
    }
    Ok((header, rows))
}

fn number(field: &str, row: usize, column: &str) -> Result<f64> {
    if field.is_empty() {
        return Err(AppError::Parse { row, column: column.into(), message: "missing value".into() });
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(AppError::Parse { row, column: column.into(), message: format!("not a finite number: {field:?}") }),
    }
}

/// Parses numeric CSV from any reader. `origin` is only used in messages.
pub fn parse_csv<R: Read>(input: R, origin: &Path) -> Result<DataMatrix> {
    let (header, rows) = records(input, origin)?;
    let mut values = vec![Vec::with_capacity(rows.len()); header.len()];
    for (row, rec) in &rows {
        for (j, field) in rec.iter().enumerate() {
            values[j].push(number(field, *row, &header[j])?);
        }
    }
    let columns = header
        .into_iter()
        .zip(values)
        .map(|(label, v)| DataColumn::new(label, v))
        .collect::<Result<Vec<_>, CoreError>>()?;
    Ok(DataMatrix::new(columns)?)
}

/// Loads a numeric CSV file with a header row.
pub fn load_csv(path: &Path) -> Result<DataMatrix> {
    parse_csv(open(path)?, path)
}

/// Writes `matrix` as CSV with a header row; values use the shortest exact
/// decimal representation.
pub fn write_csv<W: Write>(matrix: &DataMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| AppError::Parse { row: 0, column: String::new(), message: e.to_string() };
    w.write_record(matrix.labels()).map_err(err)?;
    for i in 0..matrix.nrows().unwrap_or(0) {
        w.write_record(matrix.iter().map(|c| c.values()[i].to_string())).map_err(err)?;
    }
    w.flush().map_err(|source| AppError::Io { path: "<output>".into(), source })?;
    Ok(())
}

/// Centers every column and scales it to unit sample standard deviation.
pub fn standardize(matrix: &DataMatrix) -> Result<DataMatrix> {
    let columns = matrix
        .iter()
        .map(|c| {
            if c.is_constant() {
                return Err(CoreError::ZeroVariance { column: c.label().into() });
            }
            let mean = c.mean();
            let ss: f64 = c.values().iter().map(|v| (v - mean).powi(2)).sum();
            let sd = (ss / (c.len() - 1) as f64).sqrt();
            DataColumn::new(c.label(), c.values().iter().map(|v| (v - mean) / sd).collect())
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    Ok(DataMatrix::new(columns)?)
}

/// Parses a long-format study with columns `population` (0 or 1), `category`
/// (any label) and `outcome` (numeric). Category labels are ordered
/// lexicographically, so the last one in that order is the reference cell.
pub fn parse_study_csv<R: Read>(input: R, origin: &Path) -> Result<(CategoricalStudy, Vec<String>)> {
    let (header, rows) = records(input, origin)?;
    let idx = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| AppError::UnknownColumn(name.into()));
    let (pi, ci, oi) = (idx("population")?, idx("category")?, idx("outcome")?);
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    for (_, rec) in &rows {
        labels.entry(rec[ci].to_owned()).or_insert(0);
    }
    for (i, v) in labels.values_mut().enumerate() {
        *v = i;
    }
    let mut population = Vec::with_capacity(rows.len());
    let mut category = Vec::with_capacity(rows.len());
    let mut outcome = Vec::with_capacity(rows.len());
    for (row, rec) in &rows {
        population.push(match &rec[pi] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(AppError::Parse {
                    row: *row,
                    column: "population".into(),
                    message: format!("expected 0 or 1, found {other:?}"),
                })
            }
        });
        if rec[ci].is_empty() {
            return Err(AppError::Parse { row: *row, column: "category".into(), message: "missing value".into() });
        }
        category.push(labels[&rec[ci]]);
        outcome.push(number(&rec[oi], *row, "outcome")?);
    }
    let study = CategoricalStudy::new(population, category, outcome)?;
    Ok((study, labels.into_keys().collect()))
}

pub fn load_study_csv(path: &Path) -> Result<(CategoricalStudy, Vec<String>)> {
    parse_study_csv(open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<DataMatrix> {
        parse_csv(text.as_bytes(), Path::new("test.csv"))
    }

    #[test]
    fn three_rows() {
        let m = parse("a,b\n1,2\n3,4\n5,6.5\n").unwrap();
        assert_eq!(m.nrows(), Some(3));
        assert_eq!(m.column("b").unwrap().values(), &[2.0, 4.0, 6.5]);
    }

    #[test]
    fn bad_cell_reports_row_and_column() {
        match parse("hdi,meat\n0.5,abc\n0.6,3\n") {
            Err(AppError::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "meat");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_and_duplicates() {
        assert!(matches!(parse("a,b\n1,2\n3\n"), Err(AppError::Parse { row: 3, .. })));
        assert!(matches!(parse("a,b\n1,\n3,4\n"), Err(AppError::Parse { row: 2, .. })));
        assert!(matches!(parse("a,a\n1,2\n3,4\n"), Err(AppError::Parse { row: 1, .. })));
        assert!(matches!(parse(""), Err(AppError::EmptyFile(_))));
        assert!(matches!(parse("a,b\n"), Err(AppError::EmptyFile(_))));
    }

    #[test]
    fn standardize_examples() {
        let m = parse("t,hdi\n1,0.5\n2,0.5\n3,0.5\n").unwrap();
        match standardize(&m) {
            Err(AppError::Numeric(CoreError::ZeroVariance { column })) => assert_eq!(column, "hdi"),
            other => panic!("{other:?}"),
        }
        let m = parse("t\n1\n2\n3\n").unwrap();
        let s = standardize(&m).unwrap();
        assert_eq!(s.columns()[0].values(), &[-1.0, 0.0, 1.0]);
        let again = standardize(&s).unwrap();
        for (a, b) in again.columns()[0].values().iter().zip(s.columns()[0].values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_through_csv() {
        let m = parse("a,b\n0.1,2\n-3e-5,4\n").unwrap();
        let mut buf = Vec::new();
        write_csv(&m, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
    }

    #[test]
    fn study_format() {
        let text = "population,category,outcome\n1,small,1\n0,small,0\n1,large,0\n0,large,1\n1,small,0\n0,large,0\n";
        let (study, labels) = parse_study_csv(text.as_bytes(), Path::new("s.csv")).unwrap();
        assert_eq!(labels, ["large", "small"]);
        assert_eq!(study.num_categories(), 2);
        assert_eq!(study.cell_mean(1, 1), Some(0.5));
        let bad = "population,category,outcome\n2,a,1\n";
        assert!(matches!(
            parse_study_csv(bad.as_bytes(), Path::new("s.csv")),
            Err(AppError::Parse { row: 2, .. })
        ));
    }
}
