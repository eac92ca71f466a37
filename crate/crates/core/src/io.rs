//! CSV tables for degree distributions and JSON model specs.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::{DegreeDistribution, EdgeDegreeMatrix, MatrixKind};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {reason}")]
    Format { row: usize, reason: String },
}

/// `degree,probability` rows.
pub fn write_vdd_csv<W: Write>(q: &DegreeDistribution, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree", "probability"])?;
    for (k, p) in q.iter() {
        w.write_record([k.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `degree,count,probability` rows for degrees with at least one vertex.
pub fn write_degree_counts_csv<W: Write>(degrees: &[usize], out: W) -> Result<(), IoError> {
    let hi = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; hi + 1];
    for &d in degrees {
        counts[d] += 1;
    }
    let n = degrees.len() as f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree", "count", "probability"])?;
    for (k, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        w.write_record([k.to_string(), c.to_string(), (c as f64 / n).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `degree,probability` or `degree,count,probability` rows. Missing
/// degrees are zero; unaccounted mass becomes the truncation mass.
pub fn read_vdd_csv<R: Read>(input: R) -> Result<DegreeDistribution, IoError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let prob_col = match r.headers()?.len() {
        2 => 1,
        3 => 2,
        n => {
            return Err(IoError::Format {
                row: 1,
                reason: format!("expected 2 or 3 columns, got {n}"),
            })
        }
    };
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let degree: usize = parse_field(&rec, 0, row)?;
        let p: f64 = parse_field(&rec, prob_col, row)?;
        rows.push((degree, p));
    }
    let lo = rows.iter().map(|r| r.0).min().ok_or(IoError::Format {
        row: 1,
        reason: "no rows".into(),
    })?;
    let hi = rows.iter().map(|r| r.0).max().unwrap();
    let mut probs = vec![0.0; hi - lo + 1];
    for (k, p) in rows {
        probs[k - lo] += p;
    }
    Ok(DegreeDistribution::with_deficit(lo, probs))
}

/// `l,k,probability` rows for every nonzero cell, plus the two corner
/// cells so the matrix range survives a round trip.
pub fn write_edd_csv<W: Write>(theta: &EdgeDegreeMatrix, out: W) -> Result<(), IoError> {
    let (lo, hi) = (theta.min_degree(), theta.extent());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["l", "k", "probability"])?;
    for (l, k, p) in theta.cells() {
        let corner = (l == lo && k == lo) || (l == hi && k == hi);
        if p != 0.0 || corner {
            w.write_record([l.to_string(), k.to_string(), p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads `l,k,probability` rows into an edge matrix. Unaccounted mass
/// becomes the truncation mass.
pub fn read_edd_csv<R: Read>(input: R) -> Result<EdgeDegreeMatrix, IoError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let l: usize = parse_field(&rec, 0, row)?;
        let k: usize = parse_field(&rec, 1, row)?;
        let p: f64 = parse_field(&rec, 2, row)?;
        rows.push((l, k, p));
    }
    let lo = rows.iter().map(|r| r.0.min(r.1)).min().ok_or(IoError::Format {
        row: 1,
        reason: "no rows".into(),
    })?;
    let hi = rows.iter().map(|r| r.0.max(r.1)).max().unwrap();
    let mut theta = EdgeDegreeMatrix::zeros(lo, hi, MatrixKind::Edge);
    for (l, k, p) in rows {
        theta.set(l, k, p);
    }
    theta.close_mass();
    if theta.truncation_mass().abs() < 1e-12 {
        theta.set_truncation_mass(0.0);
    }
    Ok(theta)
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, col: usize, row: usize) -> Result<T, IoError> {
    let field = rec.get(col).ok_or_else(|| IoError::Format {
        row,
        reason: format!("missing column {}", col + 1),
    })?;
    field.trim().parse().map_err(|_| IoError::Format {
        row,
        reason: format!("cannot parse {field:?}"),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vdd_round_trip() {
        let q = DegreeDistribution::new(2, vec![0.5, 0.0, 0.25], 0.25);
        let mut buf = Vec::new();
        write_vdd_csv(&q, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("degree,probability\n2,0.5\n"));
        assert_eq!(read_vdd_csv(&buf[..]).unwrap(), q);
    }

    #[test]
    fn counts_read_back_as_distribution() {
        let mut buf = Vec::new();
        write_degree_counts_csv(&[1, 1, 2, 4], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "degree,count,probability\n1,2,0.5\n2,1,0.25\n4,1,0.25\n");
        let q = read_vdd_csv(&buf[..]).unwrap();
        assert_eq!((q.get(1), q.get(3), q.get(4)), (0.5, 0.0, 0.25));
        assert_eq!(q.truncation_mass(), 0.0);
    }

    #[test]
    fn edd_round_trip() {
        let mut t = EdgeDegreeMatrix::zeros(1, 4, MatrixKind::Edge);
        t.set(1, 2, 0.3);
        t.set(2, 1, 0.3);
        t.set(2, 2, 0.1 + 0.2);
        let mut buf = Vec::new();
        write_edd_csv(&t, &mut buf).unwrap();
        let back = read_edd_csv(&buf[..]).unwrap();
        assert_eq!(back.extent(), 4);
        assert_eq!(back.entries(), t.entries());
        assert!((back.truncation_mass() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bad_rows_report_their_position() {
        let err = read_vdd_csv("degree,probability\n1,0.5\nx,0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Format { row: 3, .. }), "{err}");
    }
}
