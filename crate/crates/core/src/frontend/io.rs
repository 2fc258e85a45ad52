//! On-disk form of a [`MeasurementSet`]: a directory holding the frontend
//! config as JSON, the three matrices `A`, `X`, `Y` in a flat little-endian
//! interleaved complex-double format with a 16-byte header, and a text
//! manifest recording seeds and the realized SNR. `E` is recomputable as
//! `Y - A X` and is not stored.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FrontendError, MeasurementSet, NoiseModel};
use crate::scalar::Real;
use crate::CMatrix;

/// 8-byte magic prefixing every matrix file, followed by u32 rows and u32
/// cols (little-endian), then `rows*cols` row-major (re, im) f64 pairs.
pub const MATRIX_MAGIC: &[u8; 8] = b"CPXMAT01";

#[derive(Serialize, Deserialize)]
struct Manifest {
    noise: NoiseModel<f64>,
    seed: u64,
    realized_snr_db: Option<f64>,
}

fn write_matrix<T: Real>(path: &Path, m: &CMatrix<T>) -> Result<(), FrontendError> {
    let mut buf =
        Vec::with_capacity(16 + 16 * m.len());
    buf.extend_from_slice(MATRIX_MAGIC);
    let rows = u32::try_from(m.nrows())
        .map_err(|_| FrontendError::BadFormat("matrix too large".into()))?;
    let cols = u32::try_from(m.ncols())
        .map_err(|_| FrontendError::BadFormat("matrix too large".into()))?;
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&cols.to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            buf.extend_from_slice(&z.re.to_f64().unwrap_or(f64::NAN).to_le_bytes());
            buf.extend_from_slice(&z.im.to_f64().unwrap_or(f64::NAN).to_le_bytes());
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

fn read_matrix<T: Real>(path: &Path) -> Result<CMatrix<T>, FrontendError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..8] != MATRIX_MAGIC {
        return Err(FrontendError::BadFormat(format!("{}: bad header", path.display())));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = 16 + 16 * rows * cols;
    if bytes.len() != expected {
        return Err(FrontendError::BadFormat(format!(
            "{}: expected {} bytes for {}x{}, got {}",
            path.display(),
            expected,
            rows,
            cols,
            bytes.len()
        )));
    }
    let mut vals = Vec::with_capacity(rows * cols);
    for chunk in bytes[16..].chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        vals.push(Complex::new(T::lit(re), T::lit(im)));
    }
    Ok(DMatrix::from_row_iterator(rows, cols, vals))
}

/// Persist a measurement set as a directory (`a.cmat`, `x.cmat`, `y.cmat`,
/// `manifest.json`).
pub fn save_measurement_set<T: Real>(
    dir: &Path,
    set: &MeasurementSet<T>,
) -> Result<(), FrontendError> {
    fs::create_dir_all(dir)?;
    write_matrix(&dir.join("a.cmat"), &set.a)?;
    write_matrix(&dir.join("x.cmat"), &set.x)?;
    write_matrix(&dir.join("y.cmat"), &set.y)?;
    let manifest = Manifest {
        noise: match set.noise {
            NoiseModel::Noiseless => NoiseModel::Noiseless,
            NoiseModel::SnrDb(s) => NoiseModel::SnrDb(s.to_f64().unwrap_or(f64::NAN)),
        },
        seed: set.seed,
        realized_snr_db: set.realized_snr_db().and_then(|v| v.to_f64()),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| FrontendError::BadFormat(e.to_string()))?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

/// Load a measurement set saved by [`save_measurement_set`]; `E` is
/// rebuilt as `Y - A X`.
pub fn load_measurement_set<T: Real>(dir: &Path) -> Result<MeasurementSet<T>, FrontendError> {
    let a: CMatrix<T> = read_matrix(&dir.join("a.cmat"))?;
    let x: CMatrix<T> = read_matrix(&dir.join("x.cmat"))?;
    let y: CMatrix<T> = read_matrix(&dir.join("y.cmat"))?;
    if a.ncols() != x.nrows() || a.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(FrontendError::BadFormat("matrix shapes disagree".into()));
    }
    let manifest: Manifest = serde_json::from_str(
        &fs::read_to_string(dir.join("manifest.json"))?,
    )
    .map_err(|e| FrontendError::BadFormat(e.to_string()))?;
    let e = &y - &a * &x;
    Ok(MeasurementSet {
        a,
        x,
        y,
        e,
        noise: match manifest.noise {
            NoiseModel::Noiseless => NoiseModel::Noiseless,
            NoiseModel::SnrDb(s) => NoiseModel::SnrDb(T::lit(s)),
        },
        seed: manifest.seed,
    })
}
