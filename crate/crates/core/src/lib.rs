//! Desk-scale laboratory for sub-Nyquist wideband spectrum sensing.
//!
//! The crate simulates, entirely in the frequency domain, a dual-frequency
//! aliasing wideband converter (DAWC) alongside conventional sub-Nyquist
//! architectures (MWC, MCS), recovers spectral row supports with
//! side-information-aided subspace pursuit (MSSP) and standard joint-sparse
//! baselines, localizes subbands from the recovered support, and checks the
//! restricted-isometry theory that governs when recovery is guaranteed.
//!
//! Modules:
//! - [`signal`]: ground-truth multiband signal (modulated sinc pulses) and
//!   its analytic spectrum and oracle row support.
//! - [`frontend`]: sampling architectures as measurement models `Y = AX + E`.
//! - [`recovery`]: MSSP and the SOMP/SP/SSMP/MP baselines.
//! - [`localization`]: support blocks -> subband frequency bounds ->
//!   spectral synthesis and NMSE evaluation.
//! - [`theory`]: restricted isometry constants, rate/sparsity bounds, and
//!   the convergence constants of the MSSP guarantee.
//!
//! All numeric code is generic over the real scalar (see [`scalar::Real`]);
//! the aliases below pin the common `f64` instantiations.

pub mod frontend;
pub mod localization;
pub mod recovery;
pub mod scalar;
pub mod signal;
pub mod theory;

pub use scalar::Real;

/// Complex scalar over a real field.
pub type Cpx<T> = num_complex::Complex<T>;

/// Dense complex matrix, the working currency of the crate.
pub type CMatrix<T> = nalgebra::DMatrix<Cpx<T>>;

/// Row-index set (zero-based) into a signal matrix.
pub type SupportSet = std::collections::BTreeSet<usize>;

/// Default-precision instantiations.
pub type Matrix64 = CMatrix<f64>;
pub type Spec64 = signal::MultibandSpec<f64>;
pub type FrontendConfig64 = frontend::FrontendConfig<f64>;
pub type MsspConfig64 = recovery::MsspConfig<f64>;

/// Single-precision matrix alias for memory-bound experiments.
pub type Matrix32 = CMatrix<f32>;
