use std::io::{self, Read, Write};

use serde::Serialize;

use crate::run::{BenchRow, RatioRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Finite floats as numbers; NaN and infinities as the strings `NaN`,
/// `inf`, `-inf`, which JSON cannot hold as numbers. Reads either form.
pub(crate) mod finite_or_text {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct F;

    impl Visitor<'_> for F {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number, NaN or inf")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            v.trim().parse().map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(F)
    }
}

fn write_csv<T: Serialize, W: Write>(items: &[T], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for item in items {
        w.serialize(item).map_err(io::Error::other)?;
    }
    w.flush()
}

/// Writes `rows` (and, when given, the ratio table) in `format`.
///
/// CSV: the row table, then a blank line and the ratio table. JSON: an
/// array of row objects, or `{"rows": [...], "ratios": [...]}` with ratios.
pub fn emit_report<W: Write>(
    rows: &[BenchRow],
    ratios: Option<&[RatioRow]>,
    format: OutputFormat,
    mut out: W,
) -> io::Result<()> {
    if rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no rows to report"));
    }
    match format {
        OutputFormat::Csv => {
            write_csv(rows, &mut out)?;
            if let Some(r) = ratios {
                writeln!(out)?;
                write_csv(r, &mut out)?;
            }
        }
        OutputFormat::Json => {
            match ratios {
                None => serde_json::to_writer_pretty(&mut out, rows)?,
                Some(r) => serde_json::to_writer_pretty(
                    &mut out,
                    &serde_json::json!({ "rows": rows, "ratios": r }),
                )?,
            }
            writeln!(out)?;
        }
    }
    out.flush()
}

pub fn emit_ratios<W: Write>(ratios: &[RatioRow], format: OutputFormat, mut out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(ratios, out),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, ratios)?;
            writeln!(out)
        }
    }
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<BenchRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn parse_json<R: Read>(input: R) -> serde_json::Result<Vec<BenchRow>> {
    serde_json::from_reader(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> BenchRow {
        BenchRow {
            matrix: "m".into(),
            method: "bicg".into(),
            precision: "dd".into(),
            precond: "none".into(),
            spmv_mode: "full".into(),
            iterations: 7,
            converged: true,
            total_seconds: 0.25,
            ms_per_iter: 250.0 / 7.0,
            true_relres: 1e-14,
            error_norm: f64::NAN,
            failure: None,
        }
    }

    #[test]
    fn one_row_is_two_csv_lines() {
        let mut buf = Vec::new();
        emit_report(&[row()], None, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "matrix,method,precision,precond,spmv_mode,iterations,converged,total_s,ms_per_iter,true_relres,err2"
        );
    }

    #[test]
    fn json_keys_match_csv_header() {
        let mut buf = Vec::new();
        emit_report(&[row()], None, OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
        let mut want = vec![
            "matrix", "method", "precision", "precond", "spmv_mode", "iterations", "converged", "total_s",
            "ms_per_iter", "true_relres", "err2",
        ];
        want.sort();
        let mut got: Vec<&str> = keys.iter().map(|s| s.as_str()).collect();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(v[0]["err2"], "NaN");
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(emit_report(&[], None, OutputFormat::Csv, Vec::new()).is_err());
    }
}
