//! Real scalar abstraction.
//!
//! Everything numeric in this crate is generic over the underlying real
//! field; `f64` is the default used by the CLI and the concrete aliases at
//! the crate root, `f32` is available for memory-bound experiments.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::distributions::uniform::SampleUniform;
use rand::Rng;
use rand_distr::StandardNormal;

/// Real scalar type: `f32` or `f64`.
pub trait Real:
    RealField + Float + FloatConst + FromPrimitive + ToPrimitive + SampleUniform + Default
{
    /// One draw from the standard real normal distribution N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Conversion from an `f64` constant. Panics if not representable.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Conversion from a `usize` count. Panics on overflow.
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count not representable in scalar type")
    }
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// Circularly symmetric complex Gaussian with unit variance
/// (real and imaginary parts each N(0, 1/2)).
pub fn complex_standard_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let half = T::lit(0.5);
    let scale = Float::sqrt(half);
    Complex::new(T::standard_normal(rng) * scale, T::standard_normal(rng) * scale)
}

/// Normalized sinc: sin(pi u) / (pi u), with sinc(0) = 1.
pub fn sinc<T: Real>(u: T) -> T {
    let x = T::PI() * u;
    if Float::abs(x) < T::lit(1e-8) {
        // second-order series keeps the removable singularity smooth
        T::one() - x * x / T::lit(6.0)
    } else {
        Float::sin(x) / x
    }
}

/// exp(j * theta) on the unit circle.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(Float::cos(theta), Float::sin(theta))
}

/// Deterministic, platform-independent seed mixing (splitmix64).
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut h = splitmix64(base);
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}
