//! Canonical MMV baselines on a single measurement block.
//!
//! SOMP and MP run a fixed `s` selection iterations; SP and SSMP terminate
//! once the residual energy stabilizes, on the same stall rule as MSSP so
//! that plain subspace pursuit coincides with MSSP at `r = 1`, `omega = 1`.

use nalgebra::DMatrix;

use crate::scalar::Real;
use crate::{CMatrix, SupportSet};

use super::steps::{
    gather_columns, least_squares_on_support, pinv_solve, si_prune, top_k_indices,
    weighted_select,
};
use super::{check_unit_columns, MsspConfig, RecoveryError, RecoveryOutput};

fn check<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    cfg: &MsspConfig<T>,
) -> Result<(), RecoveryError> {
    let limit = a.nrows().min(a.ncols());
    if cfg.sparsity == 0 || cfg.sparsity > limit {
        return Err(RecoveryError::BadSparsity { s: cfg.sparsity, limit });
    }
    if y.nrows() != a.nrows() || y.ncols() == 0 {
        return Err(RecoveryError::BadBlocks);
    }
    check_unit_columns(a)
}

fn finish<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    support: SupportSet,
    estimate: CMatrix<T>,
    iterations_used: usize,
    eps: T,
) -> RecoveryOutput<T> {
    let residual = (y - a * &estimate).norm();
    RecoveryOutput {
        converged: residual <= eps,
        supports: vec![support],
        estimates: vec![estimate],
        residual_norms: vec![residual],
        iterations_used,
        pruning_fallbacks: 0,
    }
}

/// Simultaneous orthogonal matching pursuit: `s` greedy picks of the column
/// most correlated with the current residual, never re-selecting, with a
/// full least-squares refit after each pick.
pub fn somp<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    cfg: &MsspConfig<T>,
) -> Result<RecoveryOutput<T>, RecoveryError> {
    check(a, y, cfg)?;
    let eps = cfg.effective_tolerance(y.norm());
    let mut support = SupportSet::new();
    let mut estimate = DMatrix::zeros(a.ncols(), y.ncols());
    let mut residual = y.clone();
    for _ in 0..cfg.sparsity {
        let corr = a.ad_mul(&residual);
        let mut scores: Vec<T> = (0..a.ncols()).map(|j| corr.row(j).norm_squared()).collect();
        for &j in &support {
            scores[j] = T::neg_infinity();
        }
        let pick = top_k_indices(&scores, 1)[0];
        support.insert(pick);
        let (est, _) = least_squares_on_support(a, y, &support);
        residual = y - a * &est;
        estimate = est;
    }
    Ok(finish(a, y, support, estimate, cfg.sparsity, eps))
}

/// Matching pursuit extended to joint sparsity: `s` rank-one deflations of
/// the residual (re-selection allowed, no intermediate least squares). If
/// fewer than `s` distinct rows were touched the support is topped up with
/// the best remaining correlations of the final residual, keeping the
/// output support at exactly `s` rows.
pub fn mp_mmv<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    cfg: &MsspConfig<T>,
) -> Result<RecoveryOutput<T>, RecoveryError> {
    check(a, y, cfg)?;
    let eps = cfg.effective_tolerance(y.norm());
    let mut support = SupportSet::new();
    let mut estimate: CMatrix<T> = DMatrix::zeros(a.ncols(), y.ncols());
    let mut residual = y.clone();
    for _ in 0..cfg.sparsity {
        let corr = a.ad_mul(&residual);
        let scores: Vec<T> = (0..a.ncols()).map(|j| corr.row(j).norm_squared()).collect();
        let pick = top_k_indices(&scores, 1)[0];
        support.insert(pick);
        let coeff = corr.row(pick).into_owned();
        // deflate: R -= a_j (a_j^H R)
        let col = a.column(pick).into_owned();
        residual -= &col * &coeff;
        let updated = estimate.row(pick) + coeff;
        estimate.set_row(pick, &updated);
    }
    if support.len() < cfg.sparsity {
        let corr = a.ad_mul(&residual);
        let mut scores: Vec<T> = (0..a.ncols()).map(|j| corr.row(j).norm_squared()).collect();
        for &j in &support {
            scores[j] = T::neg_infinity();
        }
        for j in top_k_indices(&scores, cfg.sparsity - support.len()) {
            support.insert(j);
        }
    }
    Ok(finish(a, y, support, estimate, cfg.sparsity, eps))
}

/// Signal-space matching pursuit with one index per iteration: pick the
/// column whose span, after projecting off the already-selected columns,
/// best explains the residual (the orthogonal-least-squares rule), refit,
/// and stop early once the residual is within tolerance.
pub fn ssmp<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    cfg: &MsspConfig<T>,
) -> Result<RecoveryOutput<T>, RecoveryError> {
    check(a, y, cfg)?;
    let eps = cfg.effective_tolerance(y.norm());
    let mut support = SupportSet::new();
    let mut estimate = DMatrix::zeros(a.ncols(), y.ncols());
    let mut residual = y.clone();
    let mut iterations = 0;
    for _ in 0..cfg.sparsity {
        if residual.norm() <= eps {
            break;
        }
        iterations += 1;
        // project every column off span(A_S)
        let deflated = if support.is_empty() {
            a.clone()
        } else {
            let idx: Vec<usize> = support.iter().copied().collect();
            let a_s = gather_columns(a, &idx);
            let (coeffs, _) = pinv_solve(&a_s, a);
            a - a_s * coeffs
        };
        let corr = deflated.ad_mul(&residual);
        let floor = T::lit(1e-12);
        let scores: Vec<T> = (0..a.ncols())
            .map(|j| {
                if support.contains(&j) {
                    return T::neg_infinity();
                }
                let gain = deflated.column(j).norm_squared();
                if gain <= floor {
                    // column already inside span(A_S): explains nothing new
                    T::neg_infinity()
                } else {
                    corr.row(j).norm_squared() / gain
                }
            })
            .collect();
        let pick = top_k_indices(&scores, 1)[0];
        support.insert(pick);
        let (est, _) = least_squares_on_support(a, y, &support);
        residual = y - a * &est;
        estimate = est;
    }
    Ok(finish(a, y, support, estimate, iterations, eps))
}

/// Subspace pursuit extended to joint sparsity: top-`s` correlation
/// selection, merge with the previous support, leave-one-out pruning back to
/// `s`, least-squares refit. Equivalent to [`super::mssp`] run with a single
/// block and `omega = 1` (an empty SI set makes every weight uniform).
pub fn sp_mmv<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    cfg: &MsspConfig<T>,
) -> Result<RecoveryOutput<T>, RecoveryError> {
    check(a, y, cfg)?;
    let s = cfg.sparsity;
    let eps = cfg.effective_tolerance(y.norm());
    let max_iter = cfg.effective_max_iterations();
    let empty_si = SupportSet::new();
    let one = T::one();

    let mut support = SupportSet::new();
    let mut estimate = DMatrix::zeros(a.ncols(), y.ncols());
    let mut residual = y.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut prev_norm = T::infinity();
    let mut stalled = 0usize;
    while iterations < max_iter {
        iterations += 1;
        let selected = weighted_select(a, &residual, &empty_si, one, s);
        let mut merged = support.clone();
        merged.extend(selected);
        let (pruned, _) = si_prune(a, y, &merged, &empty_si, one, s);
        let (est, _) = least_squares_on_support(a, y, &pruned);
        residual = y - a * &est;
        support = pruned;
        estimate = est;
        let norm = residual.norm();
        if norm <= eps {
            converged = true;
            break;
        }
        if norm >= prev_norm * (T::one() - T::lit(1e-12)) {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
        prev_norm = norm;
    }
    let mut out = finish(a, y, support, estimate, iterations, eps);
    out.converged = converged || out.residual_norms[0] <= eps;
    Ok(out)
}
