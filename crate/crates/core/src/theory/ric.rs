//! Restricted isometry constants by support enumeration.
//!
//! `delta_s` is the worst deviation of the Gram spectrum of any `s` columns
//! from the identity: `max_S max(lambda_max(A_S^H A_S) - 1,
//! 1 - lambda_min(A_S^H A_S))`. Exact enumeration is limited to a support
//! budget (the count grows as `C(D, s)`); beyond it the sampled mode scans
//! random supports and reports a lower bound.

use itertools::Itertools;
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::iter::{ParallelBridge, ParallelIterator};
use serde::{Deserialize, Serialize};

use super::TheoryError;
use crate::scalar::Real;
use crate::CMatrix;

/// Default cap on the number of supports `ric_exact` will enumerate.
pub const RIC_ENUMERATION_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RicMode {
    Exact,
    /// Monte Carlo scan: the reported delta is a lower bound on the true RIC.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicEstimate<T> {
    pub s: usize,
    pub delta: T,
    pub mode: RicMode,
    pub supports_checked: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Gram-spectrum deviation of one support.
fn support_delta<T: Real>(a: &CMatrix<T>, idx: &[usize]) -> T {
    let mut a_s = nalgebra::DMatrix::zeros(a.nrows(), idx.len());
    for (k, &j) in idx.iter().enumerate() {
        a_s.set_column(k, &a.column(j));
    }
    let gram = a_s.ad_mul(&a_s);
    let eig = SymmetricEigen::new(gram);
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for &v in eig.eigenvalues.iter() {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    num_traits::Float::max(hi - T::one(), T::one() - lo)
}

/// Exact RIC with the default enumeration budget.
pub fn ric_exact<T: Real>(a: &CMatrix<T>, s: usize) -> Result<RicEstimate<T>, TheoryError> {
    ric_exact_with_budget(a, s, RIC_ENUMERATION_BUDGET)
}

/// Exact RIC of order `s`, enumerating every size-`s` support. Errors when
/// `C(D, s)` exceeds `budget`.
pub fn ric_exact_with_budget<T: Real>(
    a: &CMatrix<T>,
    s: usize,
    budget: usize,
) -> Result<RicEstimate<T>, TheoryError> {
    let d = a.ncols();
    if s == 0 || s > d {
        return Err(TheoryError::BadArgument(format!(
            "RIC order s = {s} must lie in [1, {d}]"
        )));
    }
    let needed = binomial(d, s);
    if needed > budget as u128 {
        return Err(TheoryError::EnumerationBudget { needed, budget });
    }
    let delta = (0..d)
        .combinations(s)
        .par_bridge()
        .map(|idx| support_delta(a, &idx))
        .reduce(T::zero, num_traits::Float::max);
    Ok(RicEstimate { s, delta, mode: RicMode::Exact, supports_checked: needed as usize })
}

/// Monte Carlo lower bound on the RIC over `trials` random supports.
pub fn ric_sampled<T: Real>(
    a: &CMatrix<T>,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<RicEstimate<T>, TheoryError> {
    let d = a.ncols();
    if s == 0 || s > d {
        return Err(TheoryError::BadArgument(format!(
            "RIC order s = {s} must lie in [1, {d}]"
        )));
    }
    if trials == 0 {
        return Err(TheoryError::BadArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta = T::zero();
    for _ in 0..trials {
        // draw s distinct indices
        let mut pool: Vec<usize> = (0..d).collect();
        let mut idx = Vec::with_capacity(s);
        for _ in 0..s {
            let k = rng.gen_range(0..pool.len());
            idx.push(pool.swap_remove(k));
        }
        idx.sort_unstable();
        let v = support_delta(a, &idx);
        if v > delta {
            delta = v;
        }
    }
    Ok(RicEstimate { s, delta, mode: RicMode::Sampled, supports_checked: trials })
}
