//! Row-major grayscale frames with values in `[0, 1]` and binary PGM output.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Frame {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Average-pools non-overlapping `factor`×`factor` blocks.
    pub fn downsample(&self, factor: usize) -> Result<Frame> {
        if factor == 0 || !self.rows.is_multiple_of(factor) || !self.cols.is_multiple_of(factor) {
            return Err(Error::InvalidProblem(format!(
                "cannot downsample {}x{} by {factor}",
                self.rows, self.cols
            )));
        }
        let (rows, cols) = (self.rows / factor, self.cols / factor);
        let norm = (factor * factor) as f64;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let mut s = 0.0;
                for dr in 0..factor {
                    for dc in 0..factor {
                        s += self.get(r * factor + dr, c * factor + dc);
                    }
                }
                data.push(s / norm);
            }
        }
        Ok(Frame { rows, cols, data })
    }

    /// Quantizes to 8 bits, clamping to `[0, 1]` first.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Binary (P5) PGM with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend(self.to_bytes());
        out
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_pgm()).map_err(|e| Error::io(path, e))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}
