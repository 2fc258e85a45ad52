//! Quantitative recovery theory: restricted isometry constants, the
//! uniqueness and minimum-rate bounds that size the architectures, and the
//! convergence constants of the MSSP guarantee.

mod lemmas;
mod ric;

pub use lemmas::{lemma_identity_suite, LemmaCheck, LemmaSuiteReport};
pub use ric::{ric_exact, ric_exact_with_budget, ric_sampled, RicEstimate, RicMode, RIC_ENUMERATION_BUDGET};

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::FrontendConfig;
use crate::scalar::Real;
use crate::signal::{oracle_support, MultibandSpec};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("exact RIC enumeration needs {needed} supports, over the budget of {budget}; use ric_sampled")]
    EnumerationBudget { needed: u128, budget: usize },
    #[error("{0}")]
    BadArgument(String),
    #[error("minimum-rate theorem hypothesis violated: f_c = {f_c} but (f_p - f_s)/(n - 1) = {expected}")]
    HypothesisViolated { f_c: f64, expected: f64 },
}

/// Minimum channel count for unique support recovery, `2 s + 1`, from
/// `p >= spark(A) - 1 > 2 |supp(X)|` with a full-spark sensing matrix.
pub fn uniqueness_channel_bound(s: usize) -> usize {
    2 * s + 1
}

/// Floor with snapping: values within a relative 1e-9 of an integer are
/// treated as that integer, so exact multiples survive float noise.
fn div_floor_snap<T: Real>(x: T, y: T) -> usize {
    let q = x / y;
    let r = Float::round(q);
    let tol = T::lit(1e-9) * Float::max(T::one(), Float::abs(q));
    let v = if Float::abs(q - r) <= tol { r } else { Float::floor(q) };
    v.to_usize().unwrap_or(0)
}

/// Ceiling with the same snapping convention, so `ceil(0) = 0` when the
/// numerator is an exact multiple.
fn div_ceil_snap<T: Real>(x: T, y: T) -> usize {
    let q = x / y;
    let r = Float::round(q);
    let tol = T::lit(1e-9) * Float::max(T::one(), Float::abs(q));
    let v = if Float::abs(q - r) <= tol { r } else { Float::ceil(q) };
    v.to_usize().unwrap_or(0)
}

/// Worst-case number of occupied rows per subband and in total:
/// `n floor(B_j / f_p) + ceil(mod(B_j, f_p) / f_c) + 1` for each bandwidth.
/// When `B_j` is an exact multiple of `f_p` the mod term is 0.
pub fn sparsity_upper_bound<T: Real>(
    bandwidths_hz: &[T],
    cfg: &FrontendConfig<T>,
) -> (Vec<usize>, usize) {
    let n = cfg.segments_per_interval;
    let per: Vec<usize> = bandwidths_hz
        .iter()
        .map(|&b| {
            let k = div_floor_snap(b, cfg.f_p_hz);
            let rem = b - T::from_count(k) * cfg.f_p_hz;
            let rem = if rem > T::zero() { rem } else { T::zero() };
            n * k + div_ceil_snap(rem, cfg.f_c_hz) + 1
        })
        .collect();
    let total = per.iter().sum();
    (per, total)
}

/// Outcome of the minimum-rate condition check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinRateReport<T> {
    /// Worst-case bound side: `2 (sum_j bound_j) f_s + 2 N_sig f_c`.
    pub lhs_hz: T,
    /// Total occupied bandwidth `B`.
    pub rhs_hz: T,
    pub satisfied: bool,
    /// Realized side from the oracle support: `2 |supp(X)| f_s + 2 N_sig f_c`.
    pub realized_lhs_hz: T,
    pub realized_satisfied: bool,
    pub per_subband_bound: Vec<usize>,
    pub support_size: usize,
}

/// Check the minimum-rate condition: with `f_c = (f_p - f_s)/(n - 1)`, the
/// overall two-stage rate stays within `2 B` iff
/// `2 (sum_j bound_j) f_s + 2 N_sig f_c <= B`. Also evaluates the realized
/// inequality on the oracle support of this specific spec.
pub fn min_rate_check<T: Real>(
    spec: &MultibandSpec<T>,
    cfg: &FrontendConfig<T>,
) -> Result<MinRateReport<T>, TheoryError> {
    let n = cfg.segments_per_interval;
    if n < 2 {
        return Err(TheoryError::BadArgument("DAWC needs n >= 2".into()));
    }
    let expected = (cfg.f_p_hz - cfg.f_s_hz) / T::from_count(n - 1);
    if Float::abs(cfg.f_c_hz - expected) > T::lit(1e-9) * Float::abs(expected) {
        return Err(TheoryError::HypothesisViolated {
            f_c: cfg.f_c_hz.to_f64().unwrap_or(f64::NAN),
            expected: expected.to_f64().unwrap_or(f64::NAN),
        });
    }
    let bandwidths: Vec<T> = spec.subbands.iter().map(|s| s.bandwidth_hz).collect();
    let (per, total_bound) = sparsity_upper_bound(&bandwidths, cfg);
    let two = T::lit(2.0);
    let n_sig = T::from_count(spec.n_sig());
    let lhs = two * T::from_count(total_bound) * cfg.f_s_hz + two * n_sig * cfg.f_c_hz;
    let rhs = spec.total_bandwidth_hz();
    let support = oracle_support(spec, cfg);
    let realized_lhs =
        two * T::from_count(support.len()) * cfg.f_s_hz + two * n_sig * cfg.f_c_hz;
    Ok(MinRateReport {
        lhs_hz: lhs,
        rhs_hz: rhs,
        satisfied: lhs <= rhs,
        realized_lhs_hz: realized_lhs,
        realized_satisfied: realized_lhs <= rhs,
        per_subband_bound: per,
        support_size: support.len(),
    })
}

/// The constant `C(gamma, omega)` of the MSSP feasibility condition.
pub fn feasibility_constant<T: Real>(gamma: T, omega: T) -> T {
    let one = T::one();
    let root = Float::sqrt((one + omega) * (one + gamma)) + Float::sqrt(one - gamma);
    one + root * root * (one + gamma) / ((one - gamma) * (one - gamma))
}

/// Feasibility of the MSSP guarantee at `(gamma, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCheck<T> {
    pub gamma: T,
    pub omega: T,
    /// `C(gamma, omega)`.
    pub c: T,
    /// `1 + C omega (2 - omega) - C^2 (1 - omega)^2`; feasible iff positive.
    pub gap: T,
    pub feasible: bool,
    /// `min(gamma, unclipped)`; present only when feasible.
    pub delta_bound: Option<T>,
    /// The algebraic branch `(sqrt(1 + C w (2-w)) - C (1-w)) / (C + 1)`.
    pub delta_bound_unclipped: Option<T>,
}

/// Evaluate the weighted-selection feasibility condition and, when it holds,
/// the admissible `3s`-RIC upper bound.
pub fn mssp_feasibility<T: Real>(gamma: T, omega: T) -> Result<FeasibilityCheck<T>, TheoryError> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(TheoryError::BadArgument("gamma must lie in (0, 1)".into()));
    }
    if !(omega >= T::zero() && omega <= T::one()) {
        return Err(TheoryError::BadArgument("omega must lie in [0, 1]".into()));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let c = feasibility_constant(gamma, omega);
    let lhs = one + c * omega * (two - omega);
    let rhs = c * c * (one - omega) * (one - omega);
    let gap = lhs - rhs;
    let feasible = gap > T::zero();
    let (bound, unclipped) = if feasible {
        let branch = (Float::sqrt(lhs) - c * (one - omega)) / (c + one);
        (Some(Float::min(gamma, branch)), Some(branch))
    } else {
        (None, None)
    };
    Ok(FeasibilityCheck {
        gamma,
        omega,
        c,
        gap,
        feasible,
        delta_bound: bound,
        delta_bound_unclipped: unclipped,
    })
}

/// Contraction constants of the MSSP error recursion at a given `3s`-RIC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConstants<T> {
    pub delta_3s: T,
    pub omega: T,
    /// `nu_1 = 1 - omega + delta_3s`.
    pub nu_1: T,
    /// `nu_3 = (sqrt((1+omega)(1+delta)) + sqrt(1-delta)) / (1-delta)`.
    pub nu_3: T,
    /// `varrho = sqrt(1 + delta)`.
    pub varrho: T,
    /// Per-iteration contraction factor.
    pub rho: T,
    /// Noise amplification constant; `None` when `rho >= 1` or
    /// `delta >= 1/2` makes it undefined.
    pub tau: Option<T>,
    /// `rho < 1` and `tau` defined.
    pub feasible: bool,
}

/// Evaluate the contraction factor `rho` and noise constant `tau` of the
/// error recursion `||X - X^k|| <= rho ||X - X^{k-1}|| + (1 - rho) tau ||E||`.
pub fn convergence_constants<T: Real>(
    delta_3s: T,
    omega: T,
) -> Result<ConvergenceConstants<T>, TheoryError> {
    if !(delta_3s >= T::zero() && delta_3s < T::one()) {
        return Err(TheoryError::BadArgument("delta_3s must lie in [0, 1)".into()));
    }
    if !(omega >= T::zero() && omega <= T::one()) {
        return Err(TheoryError::BadArgument("omega must lie in [0, 1]".into()));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let d = delta_3s;
    let nu_1 = one - omega + d;
    let varrho = Float::sqrt(one + d);
    let nu_3 = (Float::sqrt((one + omega) * (one + d)) + Float::sqrt(one - d)) / (one - d);
    let rho = Float::sqrt((nu_1 * nu_1 + nu_1 * nu_1 * nu_3 * nu_3 * varrho * varrho)
        / (one - d * d));
    let tau = if rho < one && d < T::lit(0.5) {
        let v2 = varrho * varrho;
        let lhs = (Float::sqrt(two * v2 + two * nu_3 * nu_3 * v2 * v2) + nu_3)
            / Float::sqrt(one - d * d)
            + Float::sqrt(one + d) / (one - two * d);
        Some(lhs / (one - rho))
    } else {
        None
    };
    Ok(ConvergenceConstants {
        delta_3s: d,
        omega,
        nu_1,
        nu_3,
        varrho,
        rho,
        feasible: tau.is_some(),
        tau,
    })
}

/// Iterations guaranteed to reach the stable error ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterationBound {
    /// `ceil(log_rho(tau ||E|| / ||X||))`, floored at 0.
    Finite(usize),
    /// No noise: the error contracts geometrically without a floor.
    Noiseless,
}

pub fn iteration_bound<T: Real>(
    rho: T,
    tau: T,
    x_norm: T,
    e_norm: T,
) -> Result<IterationBound, TheoryError> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(TheoryError::BadArgument("rho must lie in (0, 1)".into()));
    }
    if !(x_norm > T::zero()) || tau < T::zero() || e_norm < T::zero() {
        return Err(TheoryError::BadArgument(
            "need x_norm > 0, tau >= 0, e_norm >= 0".into(),
        ));
    }
    if e_norm == T::zero() {
        return Ok(IterationBound::Noiseless);
    }
    let ratio = tau * e_norm / x_norm;
    let k = Float::ln(ratio) / Float::ln(rho);
    let k = Float::ceil(k);
    Ok(IterationBound::Finite(if k <= T::zero() {
        0
    } else {
        k.to_usize().unwrap_or(usize::MAX)
    }))
}

/// One grid point of the feasibility sweep behind the guarantee-region
/// figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilitySweepRow<T> {
    pub gamma: T,
    pub omega: T,
    pub gap: T,
    pub delta_bound: Option<T>,
}

/// Sweep `omega` over `[0, 1]` in `omega_steps` uniform steps for each
/// `gamma`, producing the gap of the feasibility condition and the RIC upper
/// bound where defined.
pub fn feasibility_sweep<T: Real>(
    gammas: &[T],
    omega_steps: usize,
) -> Result<Vec<FeasibilitySweepRow<T>>, TheoryError> {
    if omega_steps == 0 {
        return Err(TheoryError::BadArgument("omega_steps must be positive".into()));
    }
    let mut rows = Vec::with_capacity(gammas.len() * (omega_steps + 1));
    for &gamma in gammas {
        for k in 0..=omega_steps {
            let omega = T::from_count(k) / T::from_count(omega_steps);
            let check = mssp_feasibility(gamma, omega)?;
            rows.push(FeasibilitySweepRow {
                gamma,
                omega,
                gap: check.gap,
                delta_bound: check.delta_bound,
            });
        }
    }
    Ok(rows)
}
