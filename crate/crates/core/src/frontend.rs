//! Sampling architectures, simulated in the frequency domain.
//!
//! All three frontends reduce to the same compressed-sensing product: the
//! signal matrix `X` holds analytic spectrum samples on a per-row frequency
//! segment, the sensing matrix `A` holds the per-channel modulation
//! coefficients, and the measurement is `Y = A X + E`. The DAWC partitions
//! each `f_p`-wide interval into `n` segments of width `f_s` spaced `f_c`
//! apart (so its matrix has `n L` rows); the conventional schemes (MWC, MCS)
//! tile the band uniformly with `f_s = f_nyq / L` (so theirs has `L` rows).
//!
//! Measurements are synthesized as `A X` directly rather than by time-domain
//! mixing and filtering; the product *is* the ideal-filter input-output
//! relationship, and synthesizing it removes filter-design confounds from
//! the recovery experiments.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{complex_standard_normal, Real};
use crate::signal::MultibandSpec;
use crate::CMatrix;

mod io;
pub use io::{load_measurement_set, save_measurement_set};

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("operation requires a {expected:?} configuration, got {got:?}")]
    WrongArchitecture { expected: Architecture, got: Architecture },
    #[error("the frequency grid needs at least 2 columns (snapshots * samples_per_snapshot = {0})")]
    DegenerateGrid(usize),
    #[error("MCS needs p <= L distinct coset rows (p = {p}, L = {l})")]
    TooManyCosets { p: usize, l: usize },
    #[error("dimension mismatch: A is {a_rows}x{a_cols}, X is {x_rows}x{x_cols}")]
    Nonconformable { a_rows: usize, a_cols: usize, x_rows: usize, x_cols: usize },
    #[error("A*X is identically zero; a finite SNR is undefined")]
    ZeroSignal,
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("persisted measurement set is malformed: {0}")]
    BadFormat(String),
}

/// Which sampling architecture the frontend simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// Dual-frequency aliasing wideband converter (non-uniform partition).
    Dawc,
    /// Modulated wideband converter (uniform partition, Gaussian mixing).
    Mwc,
    /// Multi-coset sampler (uniform partition, DFT-row subsampling).
    Mcs,
}

impl Architecture {
    pub fn is_csss(self) -> bool {
        matches!(self, Architecture::Mwc | Architecture::Mcs)
    }
}

/// Architecture choice plus the full parameter tuple.
///
/// Row indices are zero-based throughout: DAWC row `xi` covers the segment
/// starting at `(floor(xi/n) - floor(L/2)) f_p + (xi mod n) f_c`, so row 0
/// maps to `-floor(L/2) * f_p`. For MWC/MCS the fields `f_p_hz`, `f_c_hz`
/// and `segments_per_interval` are ignored and the row dimension is `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontendConfig<T> {
    pub architecture: Architecture,
    /// Coarse modulation frequency `f_p` (DAWC only).
    pub f_p_hz: T,
    /// Fine modulation frequency `f_c` (DAWC only).
    pub f_c_hz: T,
    /// Per-channel ADC rate / LPF width `f_s`.
    pub f_s_hz: T,
    /// Segments per `f_p` interval, `n >= 2` (DAWC only).
    pub segments_per_interval: usize,
    /// Number of sensing channels `p`.
    pub channels: usize,
    /// Number of partition intervals `L` (`f_nyq / f_p` for DAWC,
    /// `f_nyq / f_s` for MWC/MCS).
    pub intervals: usize,
    /// Number of column blocks (snapshots) `r`.
    pub snapshots: usize,
    /// Columns per snapshot `N`.
    pub samples_per_snapshot: usize,
    /// Seed for the sensing-matrix draw.
    pub seed: u64,
}

impl<T: Real> FrontendConfig<T> {
    /// Row dimension of the signal matrix: `n L` for DAWC, `L` otherwise.
    pub fn rows(&self) -> usize {
        match self.architecture {
            Architecture::Dawc => self.segments_per_interval * self.intervals,
            _ => self.intervals,
        }
    }

    /// Total number of spectrum grid columns, `r N`.
    pub fn grid_columns(&self) -> usize {
        self.snapshots * self.samples_per_snapshot
    }

    /// Nyquist rate implied by the partition.
    pub fn f_nyq_hz(&self) -> T {
        match self.architecture {
            Architecture::Dawc => self.f_p_hz * T::from_count(self.intervals),
            _ => self.f_s_hz * T::from_count(self.intervals),
        }
    }

    /// Starting frequency of the DAWC row `xi` (zero-based).
    ///
    /// Panics if `xi` is out of `[0, nL)` or the architecture is not DAWC.
    pub fn dawc_freq_map(&self, xi: usize) -> T {
        assert_eq!(self.architecture, Architecture::Dawc, "freq map is DAWC-specific");
        let n = self.segments_per_interval;
        let l = self.intervals;
        assert!(xi < n * l, "row index {xi} out of range for nL = {}", n * l);
        let m = (xi / n) as i64 - (l / 2) as i64;
        let k = xi % n;
        T::lit(m as f64) * self.f_p_hz + T::from_count(k) * self.f_c_hz
    }

    /// Sampling segment `[start, start + f_s]` covered by row `xi` of the
    /// architecture's own grid.
    pub fn segment_interval(&self, xi: usize) -> (T, T) {
        let start = match self.architecture {
            Architecture::Dawc => self.dawc_freq_map(xi),
            _ => {
                let l = self.intervals;
                assert!(xi < l, "row index {xi} out of range for L = {l}");
                let j = xi as i64 - (l / 2) as i64;
                T::lit(j as f64) * self.f_s_hz
            }
        };
        (start, start + self.f_s_hz)
    }
}

/// Outcome of checking a configuration against the architecture's
/// admissibility conditions. Always returned in full; callers decide whether
/// to proceed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `f_s < f_c < f_p` (DAWC ordering requirement).
    pub ordering: bool,
    /// `f_s + (n-1) f_c <= f_p`: the shifted spectrum segments are pairwise
    /// disjoint.
    pub disjoint: bool,
    /// `f_s + (n-1) f_c = f_p` exactly: the segments tile each interval, the
    /// precondition for subband-bound localization.
    pub exact_tiling: bool,
    /// `n >= 2` and `L >= 1`.
    pub shape_ok: bool,
    /// `f_c - f_s < min_j B_j`; present only when a signal spec was supplied.
    pub narrowband: Option<bool>,
    /// Partition consistent with the spec's Nyquist band (`L` integral);
    /// present only when a signal spec was supplied.
    pub covers_band: Option<bool>,
    /// `r N` matches `T f_s` within the ceiling rounding used to pick `N`;
    /// present only when a signal spec was supplied.
    pub grid_matches_window: Option<bool>,
    /// `p <= rows`: measuring is actually compressive. A report with
    /// `compressive = false` is a warning, not a failure.
    pub compressive: bool,
}

impl ValidationReport {
    /// True when every hard condition for the architecture holds
    /// (`compressive` is advisory and not included).
    pub fn admissible(&self, architecture: Architecture) -> bool {
        let base = self.shape_ok
            && self.covers_band.unwrap_or(true)
            && self.grid_matches_window.unwrap_or(true);
        match architecture {
            Architecture::Dawc => base && self.ordering && self.disjoint,
            _ => base,
        }
    }
}

/// Relative tolerance for the exact-tiling and band-coverage equality checks;
/// `f_s + (n-1) f_c` is a sum of rounded products, so bit equality is the
/// wrong test.
pub const TILING_REL_TOL: f64 = 1e-9;

/// Check a configuration (and optionally a signal spec) against the
/// admissibility conditions of its architecture.
pub fn validate_params<T: Real>(
    cfg: &FrontendConfig<T>,
    spec: Option<&MultibandSpec<T>>,
) -> ValidationReport {
    let tol = T::lit(TILING_REL_TOL);
    let n = cfg.segments_per_interval;
    let (ordering, disjoint, exact_tiling, shape_ok) = match cfg.architecture {
        Architecture::Dawc => {
            let ordering = cfg.f_s_hz < cfg.f_c_hz && cfg.f_c_hz < cfg.f_p_hz;
            let span = cfg.f_s_hz + T::from_count(n - 1) * cfg.f_c_hz;
            let slack = cfg.f_p_hz * tol;
            let disjoint = span <= cfg.f_p_hz + slack;
            let exact = Float::abs(span - cfg.f_p_hz) <= slack;
            (ordering, disjoint, exact, n >= 2 && cfg.intervals >= 1)
        }
        // uniform tiling is disjoint and exact by construction
        _ => (true, true, true, cfg.intervals >= 1),
    };
    let narrowband = spec.map(|s| {
        s.subbands
            .iter()
            .all(|sb| cfg.f_c_hz - cfg.f_s_hz < sb.bandwidth_hz)
    });
    let covers_band = spec.map(|s| {
        let err = Float::abs(cfg.f_nyq_hz() - s.f_nyq_hz());
        err <= s.f_nyq_hz() * tol
    });
    let grid_matches_window = spec.map(|s| {
        let samples = s.window_s * cfg.f_s_hz;
        let rn = T::from_count(cfg.grid_columns());
        // N = ceil(T f_s / r) implies 0 <= rN - T f_s < r
        rn >= samples - cfg.f_nyq_hz() * tol && rn - samples < T::from_count(cfg.snapshots)
    });
    ValidationReport {
        ordering,
        disjoint,
        exact_tiling,
        shape_ok,
        narrowband,
        covers_band,
        grid_matches_window,
        compressive: cfg.channels <= cfg.rows(),
    }
}

/// Signal matrix of the DAWC: entry `(xi, q)` is the spectrum at
/// `F(xi) + q f_s / (rN - 1)`, rows in lexicographic `(m, k)` order with the
/// fine index `k` fast-varying, columns spanning `[0, f_s]` inclusive.
pub fn build_dawc_signal_matrix<T: Real>(
    spec: &MultibandSpec<T>,
    cfg: &FrontendConfig<T>,
) -> Result<CMatrix<T>, FrontendError> {
    if cfg.architecture != Architecture::Dawc {
        return Err(FrontendError::WrongArchitecture {
            expected: Architecture::Dawc,
            got: cfg.architecture,
        });
    }
    build_signal_matrix_grid(spec, cfg)
}

/// Signal matrix of the conventional schemes: row `j` holds spectrum samples
/// of `X(f + j f_nyq / L)` on the LPF grid, `j` running from `-floor(L/2)` to
/// `floor((L-1)/2)`.
pub fn build_csss_signal_matrix<T: Real>(
    spec: &MultibandSpec<T>,
    cfg: &FrontendConfig<T>,
) -> Result<CMatrix<T>, FrontendError> {
    if !cfg.architecture.is_csss() {
        return Err(FrontendError::WrongArchitecture {
            expected: Architecture::Mwc,
            got: cfg.architecture,
        });
    }
    build_signal_matrix_grid(spec, cfg)
}

/// Architecture-dispatching form of the two builders above.
pub fn build_signal_matrix<T: Real>(
    spec: &MultibandSpec<T>,
    cfg: &FrontendConfig<T>,
) -> Result<CMatrix<T>, FrontendError> {
    match cfg.architecture {
        Architecture::Dawc => build_dawc_signal_matrix(spec, cfg),
        _ => build_csss_signal_matrix(spec, cfg),
    }
}

fn build_signal_matrix_grid<T: Real>(
    spec: &MultibandSpec<T>,
    cfg: &FrontendConfig<T>,
) -> Result<CMatrix<T>, FrontendError> {
    let cols = cfg.grid_columns();
    if cols <= 1 {
        return Err(FrontendError::DegenerateGrid(cols));
    }
    let step = cfg.f_s_hz / T::from_count(cols - 1);
    Ok(DMatrix::from_fn(cfg.rows(), cols, |xi, q| {
        let (start, _) = cfg.segment_interval(xi);
        spec.spectrum_at(start + T::from_count(q) * step)
    }))
}

/// Draw the sensing matrix for `cfg`, seeded by `cfg.seed`.
///
/// DAWC and MWC use i.i.d. circular complex Gaussian entries with each column
/// rescaled to unit norm (the recovery algorithms require unit columns). MCS
/// uses `p` distinct coset rows of the `L`-point DFT drawn without
/// replacement; its columns all share norm `sqrt(p/L)` and are rescaled by
/// the common factor `sqrt(L/p)` to meet the same unit-column contract, which
/// leaves the matrix unchanged at `p = L`.
pub fn draw_sensing_matrix<T: Real>(cfg: &FrontendConfig<T>) -> Result<CMatrix<T>, FrontendError> {
    let p = cfg.channels;
    let d = cfg.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.architecture {
        Architecture::Dawc | Architecture::Mwc => {
            let mut a = DMatrix::from_fn(p, d, |_, _| complex_standard_normal::<T, _>(&mut rng));
            for mut col in a.column_iter_mut() {
                let norm = col.norm();
                if norm > T::zero() {
                    col /= Complex::new(norm, T::zero());
                }
            }
            Ok(a)
        }
        Architecture::Mcs => {
            let l = cfg.intervals;
            if p > l {
                return Err(FrontendError::TooManyCosets { p, l });
            }
            // sample p distinct cosets without replacement
            let mut pool: Vec<usize> = (0..l).collect();
            let mut cosets = Vec::with_capacity(p);
            for _ in 0..p {
                let k = rng.gen_range(0..pool.len());
                cosets.push(pool.swap_remove(k));
            }
            let scale = Float::sqrt(T::one() / T::from_count(p));
            Ok(DMatrix::from_fn(p, l, |i, j| {
                let phase = -T::TAU() * T::from_count(cosets[i] * j % l) / T::from_count(l);
                crate::scalar::cis(phase) * Complex::new(scale, T::zero())
            }))
        }
    }
}

/// Noise injection model for [`measure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel<T> {
    Noiseless,
    /// Measurement-domain SNR in dB, defined on `||AX||_F^2 / ||E||_F^2`.
    SnrDb(T),
}

/// The sensing triple `(A, X, Y)` with the noise realization.
///
/// Construction guarantees `Y - A X == E` bit-for-bit (the stored `E` is the
/// recomputed difference, within half an ulp of the drawn noise), unit
/// columns of `A`, and a realized SNR equal to the requested one up to float
/// rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet<T> {
    pub a: CMatrix<T>,
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
    pub e: CMatrix<T>,
    pub noise: NoiseModel<T>,
    pub seed: u64,
}

impl<T: Real> MeasurementSet<T> {
    /// Realized SNR in dB; `None` for noiseless or zero-noise sets.
    pub fn realized_snr_db(&self) -> Option<T> {
        let signal = self.a.clone() * &self.x;
        let e2 = self.e.norm_squared();
        if e2 == T::zero() {
            return None;
        }
        Some(T::lit(10.0) * Float::log10(signal.norm_squared() / e2))
    }
}

/// Form `Y = A X + E` with `E` i.i.d. circular complex Gaussian scaled so
/// that `||E||_F^2 = ||AX||_F^2 * 10^(-snr_db/10)` exactly.
pub fn measure<T: Real>(
    a: &CMatrix<T>,
    x: &CMatrix<T>,
    noise: NoiseModel<T>,
    seed: u64,
) -> Result<MeasurementSet<T>, FrontendError> {
    if a.ncols() != x.nrows() {
        return Err(FrontendError::Nonconformable {
            a_rows: a.nrows(),
            a_cols: a.ncols(),
            x_rows: x.nrows(),
            x_cols: x.ncols(),
        });
    }
    let ax = a * x;
    let (y, e) = match noise {
        NoiseModel::Noiseless => (ax.clone(), DMatrix::zeros(ax.nrows(), ax.ncols())),
        NoiseModel::SnrDb(snr_db) => {
            let signal_energy = ax.norm_squared();
            if signal_energy == T::zero() {
                return Err(FrontendError::ZeroSignal);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut e = DMatrix::from_fn(ax.nrows(), ax.ncols(), |_, _| {
                complex_standard_normal::<T, _>(&mut rng)
            });
            let target = signal_energy * Float::powf(T::lit(10.0), -snr_db / T::lit(10.0));
            let gain = Float::sqrt(target / e.norm_squared());
            e *= Complex::new(gain, T::zero());
            let y = &ax + &e;
            // store the difference so the construction identity is exact
            let e = &y - &ax;
            (y, e)
        }
    };
    Ok(MeasurementSet { a: a.clone(), x: x.clone(), y, e, noise, seed })
}

/// Overall sampling rate in Hz: `p f_s` for the support-recovery stage plus,
/// when subband bounds are supplied, the reconstruction-stage rate
/// `sum_j (F_max_j - F_min_j)`.
pub fn overall_rate<T: Real>(cfg: &FrontendConfig<T>, bounds: Option<&[(T, T)]>) -> T {
    let stage1 = T::from_count(cfg.channels) * cfg.f_s_hz;
    match bounds {
        Some(ranges) => ranges
            .iter()
            .fold(stage1, |acc, &(lo, hi)| acc + (hi - lo)),
        None => stage1,
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn opt(v: Option<bool>) -> &'static str {
            match v {
                Some(true) => "true",
                Some(false) => "false",
                None => "n/a (no signal spec)",
            }
        }
        writeln!(f, "ordering f_s < f_c < f_p : {}", self.ordering)?;
        writeln!(f, "disjoint segments        : {}", self.disjoint)?;
        writeln!(f, "exact tiling             : {}", self.exact_tiling)?;
        writeln!(f, "shape (n, L)             : {}", self.shape_ok)?;
        writeln!(f, "narrowband f_c - f_s < B : {}", opt(self.narrowband))?;
        writeln!(f, "partition covers band    : {}", opt(self.covers_band))?;
        writeln!(f, "grid matches window      : {}", opt(self.grid_matches_window))?;
        write!(f, "compressive p <= rows    : {}", self.compressive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{make_random_spec, oracle_support, MultibandSpec, Subband};
    use approx::assert_relative_eq;

    fn dawc_cfg(f_c: f64, f_s: f64, f_p: f64, n: usize) -> FrontendConfig<f64> {
        FrontendConfig {
            architecture: Architecture::Dawc,
            f_p_hz: f_p,
            f_c_hz: f_c,
            f_s_hz: f_s,
            segments_per_interval: n,
            channels: 31,
            intervals: 100,
            snapshots: 6,
            samples_per_snapshot: 4,
            seed: 5,
        }
    }

    fn mwc_cfg() -> FrontendConfig<f64> {
        FrontendConfig {
            architecture: Architecture::Mwc,
            f_p_hz: 0.0,
            f_c_hz: 0.0,
            f_s_hz: 100e6,
            segments_per_interval: 1,
            channels: 20,
            intervals: 100,
            snapshots: 6,
            samples_per_snapshot: 4,
            seed: 5,
        }
    }

    fn band(carrier: f64, bw: f64) -> Subband<f64> {
        Subband { amplitude: 1.0, bandwidth_hz: bw, carrier_hz: carrier, delay_s: 5e-6 }
    }

    #[test]
    fn validate_reference_configurations() {
        // (f_s, f_c, f_p, n) = (1, 19.8, 100, 6) MHz: 1 + 5*19.8 = 100
        let r = validate_params(&dawc_cfg(19.8e6, 1e6, 100e6, 6), None);
        assert!(r.ordering && r.disjoint && r.exact_tiling);
        // (4, 32, 100, 4) MHz: 4 + 3*32 = 100
        let r = validate_params(&dawc_cfg(32e6, 4e6, 100e6, 4), None);
        assert!(r.ordering && r.disjoint && r.exact_tiling);
        // (10, 20, 100, 6) MHz: 10 + 100 > 100
        let r = validate_params(&dawc_cfg(20e6, 10e6, 100e6, 6), None);
        assert!(r.ordering);
        assert!(!r.disjoint && !r.exact_tiling);
    }

    #[test]
    fn validate_against_spec_checks_narrowband_and_coverage() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = make_random_spec(3, &[50e6], 5e9, 24e-6, 1).unwrap();
        let r = validate_params(&cfg, Some(&spec));
        assert_eq!(r.narrowband, Some(true)); // f_c - f_s = 18.8 MHz < 50 MHz
        assert_eq!(r.covers_band, Some(true)); // 100 * 100 MHz = 10 GHz
        assert_eq!(r.grid_matches_window, Some(true)); // 24e-6 * 1e6 = 24 = rN
        assert!(r.admissible(Architecture::Dawc));
        // a sub-15 MHz subband violates the narrowband condition
        let narrow =
            MultibandSpec::new(vec![band(1e9, 10e6)], 5e9, 24e-6).unwrap();
        assert_eq!(validate_params(&cfg, Some(&narrow)).narrowband, Some(false));
    }

    #[test]
    fn freq_map_reference_values() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        // zero-based: row 0 is the paper's xi = 1
        assert_relative_eq!(cfg.dawc_freq_map(0), -5000e6, max_relative = 1e-12);
        assert_relative_eq!(cfg.dawc_freq_map(5), -4901e6, max_relative = 1e-12);
        assert_relative_eq!(cfg.dawc_freq_map(599), 4999e6, max_relative = 1e-12);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn freq_map_rejects_out_of_range() {
        dawc_cfg(19.8e6, 1e6, 100e6, 6).dawc_freq_map(600);
    }

    #[test]
    fn freq_map_is_strictly_increasing_and_closes_the_band() {
        for cfg in [dawc_cfg(19.8e6, 1e6, 100e6, 6), dawc_cfg(32e6, 4e6, 100e6, 4)] {
            let rows = cfg.rows();
            for xi in 1..rows {
                assert!(cfg.dawc_freq_map(xi) > cfg.dawc_freq_map(xi - 1));
            }
            // under exact tiling the last segment's upper edge hits f_max
            let f_max = cfg.f_nyq_hz() / 2.0;
            assert_relative_eq!(
                cfg.dawc_freq_map(rows - 1) + cfg.f_s_hz,
                f_max,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn segments_are_pairwise_disjoint_under_lemma_conditions() {
        for cfg in [dawc_cfg(19.8e6, 1e6, 100e6, 6), dawc_cfg(32e6, 4e6, 100e6, 4)] {
            let segs: Vec<(f64, f64)> =
                (0..cfg.rows()).map(|xi| cfg.segment_interval(xi)).collect();
            let tol = 1e-9 * cfg.f_s_hz;
            for i in 0..segs.len() {
                for j in (i + 1)..segs.len() {
                    let lo = segs[i].0.max(segs[j].0);
                    let hi = segs[i].1.min(segs[j].1);
                    assert!(hi - lo <= tol, "segments {i} and {j} overlap by {}", hi - lo);
                }
            }
        }
    }

    #[test]
    fn dawc_matrix_empty_spec_is_zero() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = MultibandSpec::new(vec![], 5e9, 24e-6).unwrap();
        let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
        assert_eq!(x.nrows(), 600);
        assert_eq!(x.ncols(), 24);
        assert_eq!(x.norm(), 0.0);
    }

    #[test]
    fn dawc_matrix_rows_match_oracle_support() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        for seed in 0..10 {
            let spec = make_random_spec(1, &[50e6], 5e9, 24e-6, 200 + seed).unwrap();
            let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
            let nonzero: crate::SupportSet =
                (0..x.nrows()).filter(|&i| x.row(i).norm() > 0.0).collect();
            assert_eq!(nonzero, oracle_support(&spec, &cfg), "seed {seed}");
        }
    }

    #[test]
    fn dawc_matrix_first_column_is_segment_start_spectrum() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = make_random_spec(2, &[50e6], 5e9, 24e-6, 3).unwrap();
        let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
        for xi in (0..600).step_by(37) {
            assert_eq!(x[(xi, 0)], spec.spectrum_at(cfg.dawc_freq_map(xi)));
        }
    }

    #[test]
    fn csss_matrix_straddle_and_alignment() {
        let cfg = mwc_cfg();
        // straddles the 200 MHz grid line: rows for [100, 200] and [200, 300]
        let spec = MultibandSpec::new(vec![band(180e6, 100e6)], 5e9, 24e-6).unwrap();
        let x = build_csss_signal_matrix(&spec, &cfg).unwrap();
        let nonzero: Vec<usize> = (0..x.nrows()).filter(|&i| x.row(i).norm() > 0.0).collect();
        assert_eq!(nonzero, vec![51, 52]);

        // aligned with the leftmost segment: exactly one nonzero row
        let spec = MultibandSpec::new(vec![band(-4950e6, 100e6)], 5e9, 24e-6).unwrap();
        let x = build_csss_signal_matrix(&spec, &cfg).unwrap();
        let nonzero: Vec<usize> = (0..x.nrows()).filter(|&i| x.row(i).norm() > 0.0).collect();
        assert_eq!(nonzero, vec![0]);
        assert_eq!(nonzero, oracle_support(&spec, &cfg).iter().copied().collect::<Vec<_>>());

        // interior alignment: the grid spans [0, f_s] inclusive, so the
        // neighbor row's final sample touches the subband's included lower
        // edge; occupancy (positive-measure overlap) still names one row
        let spec = MultibandSpec::new(vec![band(250e6, 100e6)], 5e9, 24e-6).unwrap();
        let x = build_csss_signal_matrix(&spec, &cfg).unwrap();
        let touched: Vec<usize> = (0..x.nrows()).filter(|&i| x.row(i).norm() > 0.0).collect();
        assert_eq!(touched, vec![51, 52]);
        let interior: Vec<usize> = (0..x.nrows())
            .filter(|&i| (0..x.ncols() - 1).any(|q| x[(i, q)].norm() > 0.0))
            .collect();
        assert_eq!(interior, vec![52]);
        assert_eq!(
            oracle_support(&spec, &cfg).iter().copied().collect::<Vec<_>>(),
            vec![52]
        );
    }

    #[test]
    fn architectures_reject_mismatched_builders() {
        let spec = make_random_spec(1, &[50e6], 5e9, 24e-6, 0).unwrap();
        assert!(build_dawc_signal_matrix(&spec, &mwc_cfg()).is_err());
        assert!(build_csss_signal_matrix(&spec, &dawc_cfg(19.8e6, 1e6, 100e6, 6)).is_err());
    }

    #[test]
    fn sensing_matrices_have_unit_columns_and_fixed_seed() {
        for cfg in [dawc_cfg(19.8e6, 1e6, 100e6, 6), mwc_cfg()] {
            let a = draw_sensing_matrix(&cfg).unwrap();
            assert_eq!(a.nrows(), cfg.channels);
            assert_eq!(a.ncols(), cfg.rows());
            for col in a.column_iter() {
                assert_relative_eq!(col.norm(), 1.0, epsilon = 1e-12);
            }
            assert_eq!(a, draw_sensing_matrix(&cfg).unwrap());
        }
        let mut mcs = mwc_cfg();
        mcs.architecture = Architecture::Mcs;
        let a = draw_sensing_matrix(&mcs).unwrap();
        for col in a.column_iter() {
            assert_relative_eq!(col.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mcs_full_rank_is_unitary() {
        let cfg = FrontendConfig::<f64> {
            architecture: Architecture::Mcs,
            f_p_hz: 0.0,
            f_c_hz: 0.0,
            f_s_hz: 100e6,
            segments_per_interval: 1,
            channels: 16,
            intervals: 16,
            snapshots: 1,
            samples_per_snapshot: 8,
            seed: 9,
        };
        let a = draw_sensing_matrix(&cfg).unwrap();
        let gram = a.ad_mul(&a);
        let eye = CMatrix::<f64>::identity(16, 16);
        assert!((gram - eye).norm() < 1e-10);
    }

    #[test]
    fn mcs_rejects_too_many_cosets() {
        let mut cfg = mwc_cfg();
        cfg.architecture = Architecture::Mcs;
        cfg.channels = cfg.intervals + 1;
        assert!(matches!(
            draw_sensing_matrix(&cfg),
            Err(FrontendError::TooManyCosets { .. })
        ));
    }

    #[test]
    fn measurement_identity_and_snr() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = make_random_spec(3, &[50e6], 5e9, 24e-6, 11).unwrap();
        let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
        let a = draw_sensing_matrix(&cfg).unwrap();

        let clean = measure(&a, &x, NoiseModel::Noiseless, 1).unwrap();
        assert_eq!(clean.y, &clean.a * &clean.x);
        assert_eq!(clean.e.norm(), 0.0);
        assert_eq!(clean.realized_snr_db(), None);

        let at_zero_db = measure(&a, &x, NoiseModel::SnrDb(0.0), 2).unwrap();
        assert_relative_eq!(at_zero_db.e.norm(), (&a * &x).norm(), max_relative = 1e-12);

        let at_20db = measure(&a, &x, NoiseModel::SnrDb(20.0), 3).unwrap();
        let realized = at_20db.realized_snr_db().unwrap();
        assert!((realized - 20.0).abs() < 1e-9, "realized {realized}");

        // construction identity is exact, bit for bit
        let diff = &at_20db.y - &at_20db.a * &at_20db.x;
        assert_eq!(diff, at_20db.e);

        // determinism per seed
        let again = measure(&a, &x, NoiseModel::SnrDb(20.0), 3).unwrap();
        assert_eq!(again.y, at_20db.y);
    }

    #[test]
    fn measure_rejects_zero_signal_with_finite_snr() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = MultibandSpec::new(vec![], 5e9, 24e-6).unwrap();
        let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
        let a = draw_sensing_matrix(&cfg).unwrap();
        assert!(matches!(
            measure(&a, &x, NoiseModel::SnrDb(10.0), 0),
            Err(FrontendError::ZeroSignal)
        ));
    }

    #[test]
    fn overall_rate_examples() {
        let mut cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        cfg.channels = 62;
        let w = 300e6 / 3.0 - 62e6 / 3.0; // three equal bounds filling a 300 MHz budget
        let bounds = vec![(0.0, w), (1e9, 1e9 + w), (2e9, 2e9 + w)];
        assert_relative_eq!(overall_rate(&cfg, Some(&bounds)), 300e6, max_relative = 1e-12);

        let mut csss = mwc_cfg();
        csss.channels = 23;
        assert_relative_eq!(overall_rate(&csss, None), 2300e6, max_relative = 1e-12);
        assert_relative_eq!(
            overall_rate(&csss, Some(&[])),
            2300e6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn measurement_set_round_trips_through_disk() {
        let cfg = dawc_cfg(19.8e6, 1e6, 100e6, 6);
        let spec = make_random_spec(2, &[50e6], 5e9, 24e-6, 21).unwrap();
        let x = build_dawc_signal_matrix(&spec, &cfg).unwrap();
        let a = draw_sensing_matrix(&cfg).unwrap();
        let set = measure(&a, &x, NoiseModel::SnrDb(15.0), 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_measurement_set(dir.path(), &set).unwrap();
        let back: MeasurementSet<f64> = load_measurement_set(dir.path()).unwrap();
        assert_eq!(back.a, set.a);
        assert_eq!(back.x, set.x);
        assert_eq!(back.y, set.y);
        assert_eq!(back.e, set.e);
        assert_eq!(back.seed, set.seed);
    }
}
