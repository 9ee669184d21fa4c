//! CSV and JSON serialization of density matrices.
//!
//! Numbers are written in Rust's shortest round-trip form, so identical
//! matrices give identical bytes and reading a file back is lossless.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{DensityMatrix, FrequencyGrid};
use crate::error::{Error, Result};

/// Run metadata stored with the JSON matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    pub config_hash: String,
    pub alpha_deg: f64,
    pub alpha_solved: bool,
    pub purity: Option<f64>,
    /// Weighted trace before normalization.
    pub trace: f64,
    pub normalized: bool,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub wavelength_nm: Vec<f64>,
    pub omega_rad_per_fs: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Row-major real and imaginary parts; row j is ω_i = grid[j].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub grid: GridRecord,
    pub matrix: MatrixRecord,
    pub metadata: MatrixMetadata,
}

impl MatrixDocument {
    pub fn new(rho: &DensityMatrix, metadata: MatrixMetadata) -> Self {
        let n = rho.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                re.push(rho.values[(j, k)].re);
                im.push(rho.values[(j, k)].im);
            }
        }
        Self {
            grid: GridRecord {
                wavelength_nm: rho.grid.wavelengths_nm(),
                omega_rad_per_fs: rho.grid.omegas.clone(),
                weights: rho.grid.weights.clone(),
            },
            matrix: MatrixRecord { rows: n, cols: n, re, im },
            metadata,
        }
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let m = &self.matrix;
        let n = self.grid.omega_rad_per_fs.len();
        if m.rows != n || m.cols != n || m.re.len() != n * n || m.im.len() != n * n {
            return Err(Error::GridMismatch(format!("matrix is {}×{}, grid has {n} points", m.rows, m.cols)));
        }
        let values = DMatrix::from_fn(n, n, |j, k| Complex64::new(m.re[j * n + k], m.im[j * n + k]));
        let grid = FrequencyGrid {
            omegas: self.grid.omega_rad_per_fs.clone(),
            weights: self.grid.weights.clone(),
        };
        let mut rho = DensityMatrix::new(grid, values)?;
        rho.normalized = self.metadata.normalized;
        Ok(rho)
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_json(doc: &MatrixDocument, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("document serializes");
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_json(path: &Path) -> Result<MatrixDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

/// First column and header row hold wavelengths in nm; each matrix entry
/// occupies a `re, im` column pair.
pub fn write_csv<W: Write>(rho: &DensityMatrix, out: W) -> Result<()> {
    let wl = rho.grid.wavelengths_nm();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["wavelength_nm".to_string()];
    for l in &wl {
        header.push(format!("re@{l}"));
        header.push(format!("im@{l}"));
    }
    let to_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(to_err)?;
    for (j, l) in wl.iter().enumerate() {
        let mut rec = Vec::with_capacity(1 + 2 * wl.len());
        rec.push(l.to_string());
        for k in 0..wl.len() {
            let v = rho.values[(j, k)];
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
        }
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv_path(rho: &DensityMatrix, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_csv(rho, std::io::BufWriter::new(f))
}

/// Reads back the entries of a matrix CSV (wavelengths are not checked).
pub fn read_csv_values<R: std::io::Read>(input: R) -> Result<DMatrix<Complex64>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let nums: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|e| Error::Io(format!("{s}: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::GridMismatch("matrix CSV is not square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
}
