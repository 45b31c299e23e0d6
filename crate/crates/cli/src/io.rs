//! JSON schemas for matrices, suite reports, and search reports, plus the
//! fixed-significant-digit number formatting used on stdout.

use serde::{Deserialize, Serialize};

use qig::checker::{CheckReport, TrialConfig};
use qig::linalg::ComplexMatrix;
use qig::Complex64;

/// On-disk matrix: `{"dim": n, "entries": [[[re, im], ...], ...]}`,
/// row-major, complex entries as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.entries.len() != self.dim
            || self.entries.iter().any(|row| row.len() != self.dim)
        {
            return Err(format!("entries are not a {0}x{0} grid", self.dim));
        }
        Ok(ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        }))
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let dim = m.rows();
        let entries = (0..dim)
            .map(|i| (0..dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { dim, entries }
    }
}

/// On-disk suite report; round-trips losslessly and is byte-identical for
/// identical flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub config: TrialConfig,
    pub checks: Vec<CheckReport>,
    pub version: String,
}

/// On-disk search report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReportFile {
    pub metric: String,
    pub dims: String,
    pub constraint: String,
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub best_gap: f64,
    pub reverified: bool,
    pub state: MatrixFile,
    pub observable_a: MatrixFile,
    pub observable_b: MatrixFile,
    pub version: String,
}

/// Format with a fixed number of significant digits, decimal where the
/// exponent allows it and scientific otherwise.
pub fn format_significant(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let exp = v.abs().log10().floor() as i32;
    if exp >= -4 && exp < digits as i32 {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, v)
    } else {
        format!("{:.*e}", digits - 1, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.4, 12), "0.400000000000");
        assert_eq!(format_significant(0.0, 12), "0.00000000000");
        assert_eq!(format_significant(-2.5, 3), "-2.50");
        assert_eq!(format_significant(1234.5, 6), "1234.50");
        assert_eq!(format_significant(1e-7, 4), "1.000e-7");
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        let file = MatrixFile::from_matrix(&m);
        let back = file.to_matrix().unwrap();
        assert_eq!(m, back);
        let bad = MatrixFile { dim: 3, entries: file.entries };
        assert!(bad.to_matrix().is_err());
    }
}
