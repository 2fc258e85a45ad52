//! The primitive steps shared by the pursuit solvers: weighted selection,
//! SI-weighted pruning via residual downdating, and rank-revealing least
//! squares on a fixed support.

use nalgebra::{Cholesky, DMatrix};
use num_traits::Float;

use crate::scalar::Real;
use crate::{CMatrix, SupportSet};

use super::LSQ_SV_CUTOFF;

/// Gather the columns of `a` indexed by `idx` (in the given order).
pub(crate) fn gather_columns<T: Real>(a: &CMatrix<T>, idx: &[usize]) -> CMatrix<T> {
    let mut out = DMatrix::zeros(a.nrows(), idx.len());
    for (k, &j) in idx.iter().enumerate() {
        out.set_column(k, &a.column(j));
    }
    out
}

/// Indices of the `s` largest scores, ties broken toward the smallest index.
pub(crate) fn top_k_indices<T: Real>(scores: &[T], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        scores[j]
            .partial_cmp(&scores[i])
            .expect("scores must be comparable")
            .then(i.cmp(&j))
    });
    order.truncate(k);
    order
}

/// Row energies of `A^H R`: with unit columns, `||a_j a_j^dagger R||_F^2`
/// collapses to the correlation energy `||a_j^H R||_2^2`.
fn correlation_energies<T: Real>(a: &CMatrix<T>, r: &CMatrix<T>) -> Vec<T> {
    let corr = a.ad_mul(r);
    (0..corr.nrows()).map(|j| corr.row(j).norm_squared()).collect()
}

/// Selection step: rank every column by its projection energy onto the
/// residual, damping columns outside the SI set `lambda` by `omega^2`, and
/// return the `s` best indices (smallest index wins ties).
///
/// Panics if `s` exceeds the column count.
pub fn weighted_select<T: Real>(
    a: &CMatrix<T>,
    residual: &CMatrix<T>,
    lambda: &SupportSet,
    omega: T,
    s: usize,
) -> SupportSet {
    assert!(s <= a.ncols(), "cannot select {s} of {} columns", a.ncols());
    let mut scores = correlation_energies(a, residual);
    let w2 = omega * omega;
    for (j, score) in scores.iter_mut().enumerate() {
        if !lambda.contains(&j) {
            *score = *score * w2;
        }
    }
    top_k_indices(&scores, s).into_iter().collect()
}

/// Leave-one-out residual scores over the candidate set `t` via the
/// downdating identity
/// `||P^perp_{T\{j}} Y||^2 = ||P^perp_T Y||^2 + ||Xhat^j||^2 / [G^-1]_{jj}`,
/// where `G = A_T^H A_T` and `Xhat = G^-1 A_T^H Y`. Returns `None` when `G`
/// is not safely positive definite.
fn downdating_scores<T: Real>(a_t: &CMatrix<T>, y: &CMatrix<T>) -> Option<Vec<T>> {
    let g = a_t.ad_mul(a_t);
    let chol = Cholesky::new(g)?;
    let g_inv = chol.inverse();
    let xt = chol.solve(&a_t.ad_mul(y));
    let base = (y - a_t * &xt).norm_squared();
    let mut scores = Vec::with_capacity(a_t.ncols());
    for j in 0..a_t.ncols() {
        let diag = g_inv[(j, j)].re;
        if !(diag > T::zero()) || !Float::is_finite(diag) {
            return None;
        }
        let v = base + xt.row(j).norm_squared() / diag;
        if !Float::is_finite(v) {
            return None;
        }
        scores.push(v);
    }
    Some(scores)
}

/// Explicit leave-one-out scores: project `Y` off the span of every
/// `A_{T \ {j}}` with a pseudo-inverse solve. Slow path used when the
/// candidate columns are rank-deficient (always the case once `|T| > p`).
fn explicit_projection_scores<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    t: &[usize],
) -> Vec<T> {
    t.iter()
        .enumerate()
        .map(|(k, _)| {
            let reduced: Vec<usize> = t
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &j)| j)
                .collect();
            let sub = gather_columns(a, &reduced);
            let (coeffs, _) = pinv_solve(&sub, y);
            (y - sub * coeffs).norm_squared()
        })
        .collect()
}

/// Pruning step: keep the `s` indices of the merged candidate set whose
/// leave-one-out residual scores, weighted by `omega' = 1 + omega` on the SI
/// set, are largest (removing an important column raises the residual most).
/// Falls back to explicit projections when the candidate Gram matrix is not
/// positive definite; the boolean in the return value reports that fallback.
///
/// A candidate set no larger than `s` is returned unchanged.
pub fn si_prune<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    merged: &SupportSet,
    lambda: &SupportSet,
    omega: T,
    s: usize,
) -> (SupportSet, bool) {
    if merged.len() <= s {
        return (merged.clone(), false);
    }
    let t: Vec<usize> = merged.iter().copied().collect();
    let a_t = gather_columns(a, &t);
    let (mut scores, fell_back) = match downdating_scores(&a_t, y) {
        Some(v) => (v, false),
        None => (explicit_projection_scores(a, y, &t), true),
    };
    let w = T::one() + omega;
    for (k, &j) in t.iter().enumerate() {
        if lambda.contains(&j) {
            scores[k] = scores[k] * w;
        }
    }
    let kept: SupportSet = top_k_indices(&scores, s).into_iter().map(|k| t[k]).collect();
    (kept, fell_back)
}

/// Rank-revealing pseudo-inverse solve `argmin ||Y - A_S Theta||_F` with a
/// relative singular-value cutoff. Returns the coefficients and whether the
/// cutoff dropped rank.
pub(crate) fn pinv_solve<T: Real>(a_s: &CMatrix<T>, y: &CMatrix<T>) -> (CMatrix<T>, bool) {
    if a_s.ncols() == 0 {
        return (DMatrix::zeros(0, y.ncols()), false);
    }
    let svd = a_s.clone().svd(true, true);
    let s_max = svd
        .singular_values
        .iter()
        .fold(T::zero(), |m, &v| if v > m { v } else { m });
    let eps = s_max * T::lit(LSQ_SV_CUTOFF);
    let rank = svd.singular_values.iter().filter(|&&v| v > eps).count();
    let theta = svd.solve(y, eps).expect("SVD was computed with U and V");
    (theta, rank < a_s.ncols())
}

/// Least squares restricted to a row support: rows in `support` hold
/// `A_S^dagger Y`, all other rows are zero. Rank deficiency is absorbed by
/// the singular-value cutoff and reported in the flag.
pub fn least_squares_on_support<T: Real>(
    a: &CMatrix<T>,
    y: &CMatrix<T>,
    support: &SupportSet,
) -> (CMatrix<T>, bool) {
    let mut out = DMatrix::zeros(a.ncols(), y.ncols());
    if support.is_empty() {
        return (out, false);
    }
    let idx: Vec<usize> = support.iter().copied().collect();
    let a_s = gather_columns(a, &idx);
    let (theta, rank_deficient) = pinv_solve(&a_s, y);
    for (k, &j) in idx.iter().enumerate() {
        out.set_row(j, &theta.row(k));
    }
    (out, rank_deficient)
}

