//! Numeric verification of the inequalities behind the recovery guarantee.
//!
//! Each lemma is checked on seeded random small instances whose restricted
//! isometry constants are computed by exhaustive enumeration, so the checks
//! exercise the inequalities exactly as used by the convergence proof. The
//! suite reports violations and worst-case slack instead of panicking;
//! tests assert on the report.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::recovery::weighted_select;
use crate::scalar::{complex_standard_normal, derive_seed, Real};
use crate::theory::ric_exact_with_budget;
use crate::{CMatrix, SupportSet};

/// Outcome of one lemma's random search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck<T> {
    pub trials: usize,
    pub violations: usize,
    /// Minimum of `rhs - lhs` over all trials; negative means a violation.
    pub worst_slack: T,
}

impl<T: Real> LemmaCheck<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, slack: T) {
        self.trials += 1;
        if slack < self.worst_slack {
            self.worst_slack = slack;
        }
        // tolerate float rounding at the boundary
        if slack < -T::lit(1e-12) {
            self.violations += 1;
        }
    }

    fn fresh() -> Self {
        Self { trials: 0, violations: 0, worst_slack: T::infinity() }
    }
}

/// Report of the whole suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport<T> {
    /// Scalar inequality `a(bx+cy)^2 + dy^2 <= (sqrt(a) b x + sqrt(a c^2 + d) y)^2`.
    pub lemma3: LemmaCheck<T>,
    /// Merge-step bound on the signal mass missed by the selected set.
    pub lemma4: LemmaCheck<T>,
    /// Weighted Gram deviation bound `(1 - omega + delta_{t+s}) ||V||`.
    pub lemma6: LemmaCheck<T>,
    /// Weighted noise correlation bound `sqrt(1 + delta_u) ||E||`.
    pub lemma7: LemmaCheck<T>,
}

impl<T: Real> LemmaSuiteReport<T> {
    pub fn all_passed(&self) -> bool {
        self.lemma3.passed() && self.lemma4.passed() && self.lemma6.passed() && self.lemma7.passed()
    }
}

pub(crate) fn random_unit_columns<T: Real>(
    p: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> CMatrix<T> {
    let mut a = DMatrix::from_fn(p, d, |_, _| complex_standard_normal::<T, _>(rng));
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col /= Complex::new(norm, T::zero());
    }
    a
}

fn random_row_sparse<T: Real>(
    d: usize,
    cols: usize,
    support: &[usize],
    rng: &mut ChaCha8Rng,
) -> CMatrix<T> {
    let mut x = DMatrix::zeros(d, cols);
    for &i in support {
        for j in 0..cols {
            x[(i, j)] = complex_standard_normal::<T, _>(rng);
        }
    }
    x
}

fn random_subset(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..d).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let i = rng.gen_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out.sort_unstable();
    out
}

fn row_restricted_norm<T: Real>(m: &CMatrix<T>, rows: &[usize]) -> T {
    Float::sqrt(
        rows.iter()
            .fold(T::zero(), |acc, &i| acc + m.row(i).norm_squared()),
    )
}

/// Verify the lemmas on seeded random instances; see [`LemmaSuiteReport`].
pub fn lemma_identity_suite<T: Real>(seed: u64) -> LemmaSuiteReport<T> {
    let mut lemma3 = LemmaCheck::fresh();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[3]));
        for _ in 0..10_000 {
            let draw = |rng: &mut ChaCha8Rng| T::lit(rng.gen_range(0.0..10.0f64));
            let (a, b, c, d, x, y) = (
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
            );
            let lhs = a * (b * x + c * y) * (b * x + c * y) + d * y * y;
            let root = Float::sqrt(a) * b * x + Float::sqrt(a * c * c + d) * y;
            let rhs = root * root;
            // relative slack so magnitudes up to 1e4 compare fairly
            let scale = Float::max(T::one(), rhs);
            lemma3.record((rhs - lhs) / scale);
        }
    }

    let (p, d, s) = (8usize, 16usize, 2usize);
    let budget = 20_000;

    let mut lemma4 = LemmaCheck::fresh();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[4]));
        for _ in 0..8 {
            let a = random_unit_columns::<T>(p, d, &mut rng);
            let delta_3s = ric_exact_with_budget(&a, 3 * s, budget)
                .expect("small instance within budget")
                .delta;
            for _ in 0..12 {
                let omega = T::lit(rng.gen_range(0.0..=1.0f64));
                let supp_x = random_subset(d, s, &mut rng);
                let supp_prev = random_subset(d, s, &mut rng);
                let lambda: SupportSet =
                    random_subset(d, 2 * s, &mut rng).into_iter().collect();
                let x = random_row_sparse(d, 3, &supp_x, &mut rng);
                let x_prev = random_row_sparse(d, 3, &supp_prev, &mut rng);
                let mut e = DMatrix::from_fn(p, 3, |_, _| complex_standard_normal::<T, _>(&mut rng));
                e *= Complex::new(T::lit(0.1), T::zero());
                let y = &a * &x + &e;
                let residual = &y - &a * &x_prev;
                let selected = weighted_select(&a, &residual, &lambda, omega, s);
                let mut merged: SupportSet = supp_prev.iter().copied().collect();
                merged.extend(selected);
                let outside: Vec<usize> =
                    (0..d).filter(|i| !merged.contains(i)).collect();
                let lhs = row_restricted_norm(&x, &outside);
                let nu_1 = T::one() - omega + omega * delta_3s;
                let rhs = nu_1 * (&x - &x_prev).norm()
                    + Float::sqrt(T::lit(2.0) * (T::one() + delta_3s)) * e.norm();
                lemma4.record(rhs - lhs);
            }
        }
    }

    let mut lemma6 = LemmaCheck::fresh();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[6]));
        let t = 3usize;
        for _ in 0..8 {
            let a = random_unit_columns::<T>(p, d, &mut rng);
            let delta_ts = ric_exact_with_budget(&a, t + s, budget)
                .expect("small instance within budget")
                .delta;
            for _ in 0..12 {
                let omega = T::lit(rng.gen_range(0.0..=1.0f64));
                let t0 = random_subset(d, rng.gen_range(0..=d), &mut rng);
                let supp_v = random_subset(d, t, &mut rng);
                let u = random_subset(d, s, &mut rng);
                let v = random_row_sparse(d, 3, &supp_v, &mut rng);
                let corr = a.ad_mul(&(&a * &v));
                let mut m = v.clone();
                let t0_set: SupportSet = t0.iter().copied().collect();
                for i in 0..d {
                    let w = if t0_set.contains(&i) { T::one() } else { omega };
                    let scaled = corr.row(i) * Complex::new(w, T::zero());
                    let diff = m.row(i) - scaled;
                    m.set_row(i, &diff);
                }
                let lhs = row_restricted_norm(&m, &u);
                let rhs = (T::one() - omega + delta_ts) * v.norm();
                lemma6.record(rhs - lhs);
            }
        }
    }

    let mut lemma7 = LemmaCheck::fresh();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[7]));
        for _ in 0..8 {
            let a = random_unit_columns::<T>(p, d, &mut rng);
            for _ in 0..12 {
                let omega = T::lit(rng.gen_range(0.0..=1.0f64));
                let t0: SupportSet =
                    random_subset(d, rng.gen_range(0..=d), &mut rng).into_iter().collect();
                let u = random_subset(d, rng.gen_range(1..=4), &mut rng);
                let e = DMatrix::from_fn(p, 3, |_, _| complex_standard_normal::<T, _>(&mut rng));
                let corr = a.ad_mul(&e);
                let mut weighted = corr.clone();
                for i in 0..d {
                    if !t0.contains(&i) {
                        let scaled = weighted.row(i) * Complex::new(omega, T::zero());
                        weighted.set_row(i, &scaled);
                    }
                }
                let lhs = row_restricted_norm(&weighted, &u);
                // the RIC order is the overlap |T0 and U|; delta_0 = 0
                let u_cap = u.iter().filter(|i| t0.contains(i)).count();
                let delta_u = if u_cap == 0 {
                    T::zero()
                } else {
                    ric_exact_with_budget(&a, u_cap, budget)
                        .expect("small instance within budget")
                        .delta
                };
                let rhs = Float::sqrt(T::one() + delta_u) * e.norm();
                lemma7.record(rhs - lhs);
            }
        }
    }

    LemmaSuiteReport { lemma3, lemma4, lemma6, lemma7 }
}
