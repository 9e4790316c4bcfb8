//! Matrix Market exchange format, coordinate layout.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use super::coo::{CooMatrix, Field, Symmetry};

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: unsupported layout {layout:?} (only `coordinate` is supported)")]
    UnsupportedLayout { line: usize, layout: String },
    #[error("line {line}: malformed size line: {msg}")]
    Size { line: usize, msg: String },
    #[error("line {line}: malformed entry: {msg}")]
    Entry { line: usize, msg: String },
    #[error("line {line}: index ({row}, {col}) outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfBounds {
        line: usize,
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
}

/// Reads a `.mtx` file.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CooMatrix, MarketError> {
    let file = File::open(path.as_ref())?;
    parse_matrix_market(BufReader::new(file))
}

/// Parses Matrix Market text. File indices are 1-based; the result is 0-based.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CooMatrix, MarketError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => {
            return Err(MarketError::Header {
                line: 1,
                msg: "empty input".into(),
            })
        }
    };
    let (field, symmetry, pattern) = parse_header(line_no, &header)?;

    // size line: first non-comment, non-blank line
    let (n_rows, n_cols, nnz) = loop {
        let (n, line) = match lines.next() {
            Some((n, l)) => (n, l?),
            None => {
                return Err(MarketError::Size {
                    line: line_no + 1,
                    msg: "missing size line".into(),
                })
            }
        };
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let nums: Vec<&str> = t.split_whitespace().collect();
        if nums.len() != 3 {
            return Err(MarketError::Size {
                line: n,
                msg: format!("expected `rows cols nnz`, got {t:?}"),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| MarketError::Size {
                line: n,
                msg: format!("not a non-negative integer: {s:?}"),
            })
        };
        break (parse(nums[0])?, parse(nums[1])?, parse(nums[2])?);
    };

    let mut coo = CooMatrix::new(n_rows, n_cols, field, symmetry);
    coo.entries.reserve(nnz);
    for item in lines {
        let (n, line) = (item.0, item.1?);
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if coo.entries.len() == nnz {
            return Err(MarketError::EntryCount {
                expected: nnz,
                found: nnz + 1,
            });
        }
        let mut it = t.split_whitespace();
        let mut index = |what: &str| -> Result<usize, MarketError> {
            let s = it.next().ok_or_else(|| MarketError::Entry {
                line: n,
                msg: format!("missing {what} index"),
            })?;
            s.parse::<usize>().map_err(|_| MarketError::Entry {
                line: n,
                msg: format!("bad {what} index {s:?}"),
            })
        };
        let row = index("row")?;
        let col = index("column")?;
        if row == 0 || col == 0 || row > n_rows || col > n_cols {
            return Err(MarketError::IndexOutOfBounds {
                line: n,
                row,
                col,
                n_rows,
                n_cols,
            });
        }
        let mut value = |what: &str| -> Result<f64, MarketError> {
            let s = it.next().ok_or_else(|| MarketError::Entry {
                line: n,
                msg: format!("missing {what}"),
            })?;
            let v = s.parse::<f64>().map_err(|_| MarketError::Entry {
                line: n,
                msg: format!("bad {what} {s:?}"),
            })?;
            if !v.is_finite() {
                return Err(MarketError::Entry {
                    line: n,
                    msg: format!("non-finite {what} {s:?}"),
                });
            }
            Ok(v)
        };
        let (re, im) = if pattern {
            (1.0, 0.0)
        } else if field == Field::Complex {
            (value("real part")?, value("imaginary part")?)
        } else {
            (value("value")?, 0.0)
        };
        if it.next().is_some() {
            return Err(MarketError::Entry {
                line: n,
                msg: "trailing tokens".into(),
            });
        }
        coo.push(row - 1, col - 1, re, im);
    }
    if coo.entries.len() != nnz {
        return Err(MarketError::EntryCount {
            expected: nnz,
            found: coo.entries.len(),
        });
    }
    Ok(coo)
}

fn parse_header(line: usize, header: &str) -> Result<(Field, Symmetry, bool), MarketError> {
    let bad = |msg: &str| MarketError::Header {
        line,
        msg: msg.to_string(),
    };
    let lower = header.trim().to_ascii_lowercase();
    let tok: Vec<&str> = lower.split_whitespace().collect();
    if tok.first() != Some(&"%%matrixmarket") {
        return Err(bad("first line must start with %%MatrixMarket"));
    }
    if tok.len() != 5 {
        return Err(bad("expected `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if tok[1] != "matrix" {
        return Err(bad(&format!("unsupported object {:?}", tok[1])));
    }
    if tok[2] != "coordinate" {
        return Err(MarketError::UnsupportedLayout {
            line,
            layout: tok[2].to_string(),
        });
    }
    let (field, pattern) = match tok[3] {
        "real" | "double" | "integer" => (Field::Real, false),
        "pattern" => (Field::Real, true),
        "complex" => (Field::Complex, false),
        other => return Err(bad(&format!("unknown field {other:?}"))),
    };
    let symmetry = match tok[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(bad(&format!("unknown symmetry {other:?}"))),
    };
    Ok((field, symmetry, pattern))
}

/// Writes `coo` in coordinate layout with shortest round-trip literals.
pub fn write_matrix_market<W: Write>(coo: &CooMatrix, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "%%MatrixMarket matrix coordinate {} {}",
        coo.field, coo.symmetry
    )?;
    writeln!(out, "{} {} {}", coo.n_rows, coo.n_cols, coo.entries.len())?;
    for e in &coo.entries {
        match coo.field {
            Field::Real => writeln!(out, "{} {} {:e}", e.row + 1, e.col + 1, e.value.re)?,
            Field::Complex => writeln!(
                out,
                "{} {} {:e} {:e}",
                e.row + 1,
                e.col + 1,
                e.value.re,
                e.value.im
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CooMatrix, MarketError> {
        parse_matrix_market(s.as_bytes())
    }

    #[test]
    fn single_entry() {
        let coo = parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 3.5\n").unwrap();
        assert_eq!((coo.n_rows, coo.n_cols), (1, 1));
        assert_eq!(coo.entries.len(), 1);
        assert_eq!((coo.entries[0].row, coo.entries[0].col), (0, 0));
        assert_eq!(coo.entries[0].value.re, 3.5);
    }

    #[test]
    fn comments_and_symmetry_tag_survive() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% a comment\n\n2 2 2\n1 1 2\n2 1 -1\n";
        let coo = parse(text).unwrap();
        assert_eq!(coo.symmetry, Symmetry::Symmetric);
        assert_eq!(coo.entries.len(), 2);
        assert_eq!((coo.entries[1].row, coo.entries[1].col), (1, 0));
    }

    #[test]
    fn complex_and_pattern_fields() {
        let coo = parse("%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 1.5 -2\n").unwrap();
        assert_eq!(coo.field, Field::Complex);
        assert_eq!(coo.entries[0].value.im, -2.0);
        let coo = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 2\n").unwrap();
        assert_eq!(coo.entries[0].value.re, 1.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("%%MatrixMarket matrix array real general\n2 2\n").unwrap_err();
        assert!(matches!(e, MarketError::UnsupportedLayout { line: 1, .. }));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert!(matches!(e, MarketError::IndexOutOfBounds { line: 3, row: 3, .. }));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").unwrap_err();
        assert!(matches!(e, MarketError::EntryCount { expected: 2, found: 1 }));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n").unwrap_err();
        assert!(matches!(e, MarketError::Entry { line: 3, .. }));
        let e = parse("%%MatrixMarket vector coordinate real general\n").unwrap_err();
        assert!(matches!(e, MarketError::Header { line: 1, .. }));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n2 2 1.0\n").unwrap_err();
        assert!(matches!(e, MarketError::EntryCount { expected: 1, .. }));
    }

    #[test]
    fn write_then_read() {
        let mut coo = CooMatrix::new(3, 3, Field::Complex, Symmetry::General);
        coo.push(0, 2, 0.1, -1e-300);
        coo.push(2, 1, -7.0, 0.0);
        let mut buf = Vec::new();
        write_matrix_market(&coo, &mut buf).unwrap();
        assert_eq!(parse_matrix_market(&buf[..]).unwrap(), coo);
    }
}
