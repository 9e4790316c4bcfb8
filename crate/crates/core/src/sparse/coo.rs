use std::fmt;

use crate::scalar::Complex;

/// Value field declared by a Matrix Market header. `integer` and `pattern`
/// files load as [`Field::Real`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::General => "general",
            Symmetry::Symmetric => "symmetric",
            Symmetry::Hermitian => "hermitian",
            Symmetry::SkewSymmetric => "skew-symmetric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooEntry {
    pub row: usize,
    pub col: usize,
    pub value: Complex<f64>,
}

/// Coordinate listing as read from disk: 0-based indices, binary64 values,
/// symmetric storage not yet expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub field: Field,
    pub symmetry: Symmetry,
    pub entries: Vec<CooEntry>,
}

impl CooMatrix {
    pub fn new(n_rows: usize, n_cols: usize, field: Field, symmetry: Symmetry) -> Self {
        Self {
            n_rows,
            n_cols,
            field,
            symmetry,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, re: f64, im: f64) {
        self.entries.push(CooEntry {
            row,
            col,
            value: Complex::new(re, im),
        });
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Entries of the full (general) matrix: off-diagonal entries of
    /// symmetric storage are mirrored, conjugated for `hermitian` and
    /// negated for `skew-symmetric`. Duplicates are kept.
    pub fn expanded_entries(&self) -> Vec<CooEntry> {
        let mut out = Vec::with_capacity(match self.symmetry {
            Symmetry::General => self.entries.len(),
            _ => 2 * self.entries.len(),
        });
        for e in &self.entries {
            out.push(*e);
            if e.row == e.col {
                continue;
            }
            let mirrored = match self.symmetry {
                Symmetry::General => continue,
                Symmetry::Symmetric => e.value,
                Symmetry::Hermitian => e.value.conj(),
                Symmetry::SkewSymmetric => -e.value,
            };
            out.push(CooEntry {
                row: e.col,
                col: e.row,
                value: mirrored,
            });
        }
        out
    }
}
