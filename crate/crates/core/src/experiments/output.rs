//! CSV encoding of [`RunRecord`]s.
//!
//! Floats are written as `{:.16e}` (17 significant digits, lossless for
//! `f64`), `None` as an empty cell, booleans as `true`/`false`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{ExperimentKind, RunRecord};

pub const CSV_HEADER: [&str; 11] = [
    "kind",
    "n",
    "theta",
    "sigma",
    "layer",
    "realization",
    "seed",
    "f_a",
    "m_lin_initial",
    "ratio",
    "witness_fired",
];

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn write_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.kind.name().to_string(),
            r.n.to_string(),
            opt_float(r.theta),
            opt_float(r.sigma),
            r.layer.to_string(),
            r.realization.to_string(),
            r.seed.to_string(),
            float(r.f_a),
            float(r.m_lin_initial),
            opt_float(r.ratio),
            r.witness_fired.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, creating parent directories.
pub fn write_csv_file(path: &Path, records: &[RunRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(file, records)
}

fn cell<T: std::str::FromStr>(row: usize, col: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Validation(format!("CSV row {row}: bad `{col}` value {s:?}")))
}

fn opt_cell<T: std::str::FromStr>(row: usize, col: &str, s: &str) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        cell(row, col, s).map(Some)
    }
}

/// Parses a CSV written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut rows = rdr.records();
    let header = rows
        .next()
        .ok_or_else(|| Error::Validation("empty CSV".into()))??;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Validation(format!(
            "CSV header mismatch: expected {}",
            CSV_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rows.enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Validation(format!("CSV row {line}: wrong field count")));
        }
        let kind = ExperimentKind::from_name(&row[0])
            .ok_or_else(|| Error::Validation(format!("CSV row {line}: unknown kind {:?}", &row[0])))?;
        out.push(RunRecord {
            kind,
            n: cell(line, "n", &row[1])?,
            theta: opt_cell(line, "theta", &row[2])?,
            sigma: opt_cell(line, "sigma", &row[3])?,
            layer: cell(line, "layer", &row[4])?,
            realization: cell(line, "realization", &row[5])?,
            seed: cell(line, "seed", &row[6])?,
            f_a: cell(line, "f_a", &row[7])?,
            m_lin_initial: cell(line, "m_lin_initial", &row[8])?,
            ratio: opt_cell(line, "ratio", &row[9])?,
            witness_fired: opt_cell(line, "witness_fired", &row[10])?,
            c_mode: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_formatting() {
        let r = RunRecord {
            kind: ExperimentKind::OrbitAverage,
            n: 8,
            theta: Some(0.25),
            sigma: None,
            layer: 3,
            realization: 1,
            seed: 42,
            f_a: 0.1,
            m_lin_initial: 0.0,
            ratio: None,
            witness_fired: Some(false),
            c_mode: None,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "kind,n,theta,sigma,layer,realization,seed,f_a,m_lin_initial,ratio,witness_fired\n\
             orbit-average,8,2.5000000000000000e-1,,3,1,42,1.0000000000000001e-1,0.0000000000000000e0,,false\n"
        );
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("kind,n\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn floats_roundtrip_losslessly(
            f in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
            theta in proptest::option::of(-10.0f64..10.0),
            fired in proptest::option::of(any::<bool>()),
            seed in any::<u64>(),
        ) {
            let r = RunRecord {
                kind: ExperimentKind::WitnessSweep,
                n: 5,
                theta,
                sigma: Some(f.abs()),
                layer: 7,
                realization: 2,
                seed,
                f_a: f,
                m_lin_initial: 0.125,
                ratio: theta.map(|t| t * f),
                witness_fired: fired,
                c_mode: None,
            };
            let mut buf = Vec::new();
            write_csv(&mut buf, std::slice::from_ref(&r)).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0].f_a.to_bits(), r.f_a.to_bits());
            prop_assert_eq!(&back[0], &r);
        }
    }
}
