//! Ground-truth multiband signal model.
//!
//! The signal is a superposition of modulated sinc pulses: subband `i`
//! contributes `A_i * sinc(B_i (t - t_i)) * exp(j 2 pi f_i t)`, whose
//! Fourier transform is an indicator on `[f_i - B_i/2, f_i + B_i/2)` with
//! height `A_i / B_i` and a linear phase set by the delay. Both domains are
//! evaluated in closed form, so the spectrum grid of the frontends and the
//! time-domain oracle used by reconstruction tests come from the same
//! analytic object.
//!
//! The transform here is the infinite-window one; windowing leakage over a
//! finite observation window decays like `1 / (T B_i)` and is quantified by
//! the DFT oracle in the tests rather than modeled.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::FrontendConfig;
use crate::scalar::{cis, sinc, Real};
use crate::SupportSet;

/// How many whole-carrier-set redraws `make_random_spec` attempts before
/// giving up on disjoint placement.
pub const PLACEMENT_RETRY_BUDGET: usize = 1000;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid subband: {0}")]
    InvalidSubband(String),
    #[error("subbands overlap in frequency: [{0}, {1}) and [{2}, {3})")]
    Overlap(f64, f64, f64, f64),
    #[error("total occupied bandwidth {got} Hz must be below the Nyquist band {nyquist} Hz")]
    TooWide { got: f64, nyquist: f64 },
    #[error("could not place {n_sig} disjoint subbands after {budget} attempts")]
    PlacementFailed { n_sig: usize, budget: usize },
    #[error("{0}")]
    BadArgument(String),
}

/// One occupied subband of the multiband signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subband<T> {
    /// Dimensionless pulse amplitude `A_i`.
    pub amplitude: T,
    /// Occupied bandwidth `B_i` in Hz.
    pub bandwidth_hz: T,
    /// Carrier (band center) `f_i` in Hz.
    pub carrier_hz: T,
    /// Pulse delay `t_i` in seconds.
    pub delay_s: T,
}

impl<T: Real> Subband<T> {
    /// Half-open frequency interval `[f_i - B_i/2, f_i + B_i/2)`.
    pub fn interval(&self) -> (T, T) {
        let half = self.bandwidth_hz * T::lit(0.5);
        (self.carrier_hz - half, self.carrier_hz + half)
    }

    fn spectrum_at(&self, f: T) -> Complex<T> {
        let (lo, hi) = self.interval();
        if f < lo || f >= hi {
            return Complex::new(T::zero(), T::zero());
        }
        let phase = -T::TAU() * (f - self.carrier_hz) * self.delay_s;
        cis(phase) * Complex::new(self.amplitude / self.bandwidth_hz, T::zero())
    }

    fn time_at(&self, t: T) -> Complex<T> {
        let envelope = self.amplitude * sinc(self.bandwidth_hz * (t - self.delay_s));
        cis(T::TAU() * self.carrier_hz * t) * Complex::new(envelope, T::zero())
    }
}

/// Ground-truth description of the analog multiband signal.
///
/// Invariants, enforced by [`MultibandSpec::new`] and [`MultibandSpec::validate`]:
/// subbands lie inside `[-f_max, f_max)`, are pairwise disjoint in frequency,
/// and their total bandwidth is below the Nyquist band `2 f_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultibandSpec<T> {
    /// Half the Nyquist band edge, in Hz: the signal lives in `[-f_max, f_max)`.
    pub f_max_hz: T,
    /// Observation window length in seconds.
    pub window_s: T,
    /// Occupied subbands, sorted by carrier.
    pub subbands: Vec<Subband<T>>,
}

impl<T: Real> MultibandSpec<T> {
    pub fn new(subbands: Vec<Subband<T>>, f_max_hz: T, window_s: T) -> Result<Self, SignalError> {
        let mut spec = Self { f_max_hz, window_s, subbands };
        spec.subbands
            .sort_by(|a, b| a.carrier_hz.partial_cmp(&b.carrier_hz).expect("finite carrier"));
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if !(self.f_max_hz > T::zero()) || !(self.window_s > T::zero()) {
            return Err(SignalError::BadArgument(
                "f_max_hz and window_s must be positive".into(),
            ));
        }
        for sb in &self.subbands {
            if !(sb.bandwidth_hz > T::zero()) {
                return Err(SignalError::InvalidSubband("bandwidth must be positive".into()));
            }
            if !Float::is_finite(sb.amplitude) || sb.amplitude == T::zero() {
                return Err(SignalError::InvalidSubband(
                    "amplitude must be finite and nonzero".into(),
                ));
            }
            let half = sb.bandwidth_hz * T::lit(0.5);
            if Float::abs(sb.carrier_hz) + half > self.f_max_hz {
                return Err(SignalError::InvalidSubband(format!(
                    "subband at {} Hz exceeds the band edge",
                    sb.carrier_hz.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        for pair in self.intervals().windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.0 < a.1 {
                return Err(SignalError::Overlap(
                    a.0.to_f64().unwrap_or(f64::NAN),
                    a.1.to_f64().unwrap_or(f64::NAN),
                    b.0.to_f64().unwrap_or(f64::NAN),
                    b.1.to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
        let total = self.total_bandwidth_hz();
        let nyquist = self.f_nyq_hz();
        if !(total < nyquist) {
            return Err(SignalError::TooWide {
                got: total.to_f64().unwrap_or(f64::NAN),
                nyquist: nyquist.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Number of subbands.
    pub fn n_sig(&self) -> usize {
        self.subbands.len()
    }

    /// Total occupied bandwidth, `sum B_i`.
    pub fn total_bandwidth_hz(&self) -> T {
        self.subbands
            .iter()
            .fold(T::zero(), |acc, sb| acc + sb.bandwidth_hz)
    }

    /// Nyquist rate `2 f_max`.
    pub fn f_nyq_hz(&self) -> T {
        self.f_max_hz * T::lit(2.0)
    }

    /// Occupied intervals sorted by lower edge.
    pub fn intervals(&self) -> Vec<(T, T)> {
        self.subbands.iter().map(|sb| sb.interval()).collect()
    }

    /// Closed-form Fourier transform of the signal at frequency `f`.
    pub fn spectrum_at(&self, f: T) -> Complex<T> {
        self.subbands
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, sb| acc + sb.spectrum_at(f))
    }

    /// Time-domain signal value at time `t`.
    pub fn time_signal_at(&self, t: T) -> Complex<T> {
        self.subbands
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, sb| acc + sb.time_at(t))
    }
}

/// Draw a random spec: carriers uniform inside the band, delays uniform in
/// `[0.1 T, 0.9 T]` so pulse energy stays within the window, amplitudes 1.
/// Bandwidths are drawn uniformly from `bandwidth_pool`. For a fixed seed the
/// result is deterministic. Placement retries whole carrier sets until the
/// subbands are pairwise disjoint, failing after [`PLACEMENT_RETRY_BUDGET`]
/// attempts.
pub fn make_random_spec<T: Real>(
    n_sig: usize,
    bandwidth_pool: &[T],
    f_max_hz: T,
    window_s: T,
    seed: u64,
) -> Result<MultibandSpec<T>, SignalError> {
    if n_sig == 0 {
        return Err(SignalError::BadArgument("n_sig must be at least 1".into()));
    }
    if bandwidth_pool.is_empty() {
        return Err(SignalError::BadArgument("bandwidth pool must be nonempty".into()));
    }
    let max_pool = bandwidth_pool
        .iter()
        .copied()
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    if !(f_max_hz > max_pool) {
        return Err(SignalError::BadArgument(
            "f_max must exceed the largest pool bandwidth".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bandwidths: Vec<T> = (0..n_sig)
        .map(|_| bandwidth_pool[rng.gen_range(0..bandwidth_pool.len())])
        .collect();
    make_spec_with_bandwidths(&bandwidths, f_max_hz, window_s, &mut rng)
}

/// Same as [`make_random_spec`] but with the bandwidth of every subband given
/// explicitly (used when an experiment assigns one pool entry per subband).
pub fn make_random_spec_with_bandwidths<T: Real>(
    bandwidths: &[T],
    f_max_hz: T,
    window_s: T,
    seed: u64,
) -> Result<MultibandSpec<T>, SignalError> {
    if bandwidths.is_empty() {
        return Err(SignalError::BadArgument("bandwidth list must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_spec_with_bandwidths(bandwidths, f_max_hz, window_s, &mut rng)
}

fn make_spec_with_bandwidths<T: Real>(
    bandwidths: &[T],
    f_max_hz: T,
    window_s: T,
    rng: &mut ChaCha8Rng,
) -> Result<MultibandSpec<T>, SignalError> {
    let n_sig = bandwidths.len();
    for attempt in 0..PLACEMENT_RETRY_BUDGET {
        let carriers: Vec<T> = bandwidths
            .iter()
            .map(|&b| {
                let half = b * T::lit(0.5);
                rng.gen_range(-f_max_hz + half..=f_max_hz - half)
            })
            .collect();
        let mut intervals: Vec<(T, T, usize)> = carriers
            .iter()
            .zip(bandwidths)
            .enumerate()
            .map(|(i, (&c, &b))| (c - b * T::lit(0.5), c + b * T::lit(0.5), i))
            .collect();
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite edge"));
        let disjoint = intervals.windows(2).all(|w| w[1].0 >= w[0].1);
        if !disjoint {
            continue;
        }
        let lo = T::lit(0.1) * window_s;
        let hi = T::lit(0.9) * window_s;
        let subbands: Vec<Subband<T>> = (0..n_sig)
            .map(|i| Subband {
                amplitude: T::one(),
                bandwidth_hz: bandwidths[i],
                carrier_hz: carriers[i],
                delay_s: rng.gen_range(lo..=hi),
            })
            .collect();
        let spec = MultibandSpec::new(subbands, f_max_hz, window_s)?;
        let _ = attempt;
        return Ok(spec);
    }
    Err(SignalError::PlacementFailed { n_sig, budget: PLACEMENT_RETRY_BUDGET })
}

/// Ground-truth row support of the signal matrix for `cfg`: the set of rows
/// whose sampling segment overlaps the occupied spectrum on a set of positive
/// length. This is the reference `supp(X)` that detection metrics score
/// against, computed by exact interval intersection rather than by
/// thresholding a sampled matrix.
pub fn oracle_support<T: Real>(spec: &MultibandSpec<T>, cfg: &FrontendConfig<T>) -> SupportSet {
    let intervals = spec.intervals();
    (0..cfg.rows())
        .filter(|&xi| {
            let (seg_lo, seg_hi) = cfg.segment_interval(xi);
            intervals.iter().any(|&(lo, hi)| {
                let overlap_lo = if lo > seg_lo { lo } else { seg_lo };
                let overlap_hi = if hi < seg_hi { hi } else { seg_hi };
                overlap_hi > overlap_lo
            })
        })
        .collect::<BTreeSet<usize>>()
}
